"""Exception hierarchy.

Input problems (bad documents, wrong domains, degree mismatches) derive from
:class:`InputError`; broken internal invariants derive from
:class:`InvariantError`.  The CLI maps them to exit codes 2 and 3.
"""


class DGFormalError(Exception):
    pass


class InputError(DGFormalError):
    pass


class DomainError(InputError):
    """Operation requested over an unsuitable scalar domain."""


class DegreeError(InputError):
    """A table entry does not respect the grading."""


class PoleError(InputError):
    """Specialisation of a rational function at one of its poles."""


class ScalarParseError(InputError):
    pass


class NotACocycleError(InputError):
    pass


class InvariantError(DGFormalError):
    """An identity that must hold by construction failed (a bug, not bad input)."""
