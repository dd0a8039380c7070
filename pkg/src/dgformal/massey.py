"""Triple Massey products computed directly on cochains of A."""

from __future__ import annotations

from dataclasses import dataclass

from .dga import CohomologyAlgebra, DGAlgebra, cohomology
from .errors import InputError, InvariantError, NotACocycleError
from .linalg import Echelon, _axpy, solve_sparse


@dataclass(frozen=True)
class MasseyResult:
    defined: bool
    value: dict | None = None          # H coordinates of one representative class
    indeterminacy: tuple = ()          # H vectors spanning a.H + H.c
    degree: int | None = None
    reason: str = ""
    defining_system: dict | None = None   # chain-level x, y with dx = ab, dy = bc
    domain: object = None

    @property
    def status(self) -> str:
        return "DEFINED" if self.defined else "UNDEFINED"

    @property
    def nonzero(self) -> bool:
        """True when the value is not in the indeterminacy subspace."""
        if not self.defined or not self.value:
            return False
        ech = Echelon(self.domain)
        for v in self.indeterminacy:
            ech.add(v)
        return not ech.contains(self.value)

    def to_json(self, H: CohomologyAlgebra | None = None) -> dict:
        def fmt(vec):
            if H is None:
                return {str(k): str(v) for k, v in sorted(vec.items())}
            return {H.algebra.names[k]: H.algebra.domain.format(v) for k, v in sorted(vec.items())}

        out = {"status": self.status}
        if self.defined:
            out.update(value=fmt(self.value), degree=self.degree,
                       indeterminacy=[fmt(v) for v in self.indeterminacy],
                       nonzero_mod_indeterminacy=self.nonzero)
        else:
            out["reason"] = self.reason
        return out


def _class_vec(H: CohomologyAlgebra, x) -> dict:
    if isinstance(x, str):
        return {H.class_index(x): H.algebra.domain.one}
    if isinstance(x, int):
        return {x: H.algebra.domain.one}
    if isinstance(x, dict):
        return dict(x)
    raise InputError(f"cannot interpret {x!r} as a cohomology class")


def _primitive(A: DGAlgebra, z: dict):
    """Some x with dx = z (free coordinates zero), or None."""
    p = A.vec_degree(z)
    if p is None:
        return {}
    src = A.in_degree(p - 1)
    cols = [dict(A.diff.get(i, {})) for i in src]
    sol = solve_sparse(cols, z, A.domain)
    if sol is None:
        return None
    return {src[j]: c for j, c in sol.items() if c}


def _degree(H: CohomologyAlgebra, hvec: dict) -> int:
    degs = {H.algebra.degrees[k] for k in hvec}
    if len(degs) != 1:
        raise InputError("Massey inputs must be nonzero homogeneous classes")
    return degs.pop()


def _products(H: CohomologyAlgebra, left: dict | None, right: dict | None, degree: int) -> list:
    B = H.algebra
    out = []
    for h in B.in_degree(degree):
        e = B.basis_vec(h)
        v = B.mul(left, e) if left is not None else B.mul(e, right)
        if v:
            out.append(v)
    return out


def massey_triple(H, a, b, c) -> MasseyResult:
    """<a, b, c> as [x c' - (-1)^{|a|} a' y] with d x = a' b', d y = b' c'.

    ``H`` is a CohomologyAlgebra or a DGAlgebra; classes may be names such as
    "[x1]" (brackets optional), basis indices or H coordinate vectors.
    """
    if isinstance(H, DGAlgebra):
        H = cohomology(H)
    A = H.source
    va, vb, vc = (_class_vec(H, x) for x in (a, b, c))
    da, db, dc = (_degree(H, v) for v in (va, vb, vc))
    alpha, beta, gamma = H.section(va), H.section(vb), H.section(vc)
    for z in (alpha, beta, gamma):
        if A.d(z):
            raise NotACocycleError("Massey inputs must be cocycle classes")
    ab = A.mul(alpha, beta)
    bc = A.mul(beta, gamma)
    x = _primitive(A, ab)
    if x is None:
        return MasseyResult(False, reason="a*b is not zero in cohomology")
    y = _primitive(A, bc)
    if y is None:
        return MasseyResult(False, reason="b*c is not zero in cohomology")
    dom = A.domain
    z = A.mul(x, gamma)
    sign = dom.convert(1 if da % 2 else -1)
    _axpy(z, sign, A.mul(alpha, y))
    if A.d(z):
        raise InvariantError("Massey representative is not closed (internal sign error)")
    value = H.project(z)
    deg = da + db + dc - 1
    indet = _products(H, va, None, db + dc - 1) + _products(H, None, vc, da + db - 1)
    ech = Echelon(dom)
    basis = tuple(v for v in indet if ech.add(v))
    return MasseyResult(True, value, basis, deg, defining_system={"x": x, "y": y}, domain=dom)
