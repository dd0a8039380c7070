"""Hochschild cocycles attached to square-zero extensions and first-order deformations."""

from __future__ import annotations

from dataclasses import dataclass

from .dga import DGAlgebra, require_valid
from .errors import DegreeError, InputError
from .hochschild import Cochain, bracket, structure_cochain
from .linalg import Echelon, _axpy


@dataclass(frozen=True)
class Bimodule:
    """A finite graded A-bimodule; ``left[(a, m)]`` and ``right[(m, a)]`` are
    sparse vectors over the module basis."""

    names: tuple
    degrees: tuple
    left: dict
    right: dict

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InputError(f"unknown module element {name!r}") from None


def _table(entries, resolve, domain) -> dict:
    """{(x, y): {z: c}} from a dict keyed by name pairs or a list of [x, y, z, c]."""
    out: dict = {}
    if isinstance(entries, dict):
        items = [(l, r, t, c) for (l, r), vec in entries.items() for t, c in vec.items()]
    else:
        items = [tuple(e) for e in entries]
    for l, r, t, c in items:
        c = domain.parse(c) if isinstance(c, str) else domain.convert(c)
        if c:
            vec = out.setdefault((resolve(l), resolve(r)), {})
            vec[resolve(t)] = vec.get(resolve(t), domain.zero) + c
    return {k: {t: c for t, c in v.items() if c} for k, v in out.items()}


@dataclass(frozen=True, eq=False)
class ExtensionCocycle:
    algebra: DGAlgebra
    module: Bimodule
    gamma: dict               # (a, b) -> M vector
    closed: bool
    trivial: bool
    potential: dict | None    # f: a -> M vector with gamma = delta f, when trivial

    def to_json(self) -> dict:
        A, M, dom = self.algebra, self.module, self.algebra.domain

        def fmt(vec):
            return {M.names[k]: dom.format(c) for k, c in sorted(vec.items())}

        out = {"gamma": [[A.names[i], A.names[j], fmt(v)] for (i, j), v in sorted(self.gamma.items())],
               "closed": self.closed, "class_zero": self.trivial}
        if self.potential is not None:
            out["potential"] = {A.names[i]: fmt(v) for i, v in sorted(self.potential.items())}
        return out


def extension_cocycle(A: DGAlgebra, M, star) -> ExtensionCocycle:
    """gamma(a, b) = a * b - ab for a split square-zero extension A (+) M.

    ``M`` is a Bimodule or a list of (name, degree) pairs; in the latter case
    the actions are read off ``star``.  ``star`` is the product of the
    extension on the basis A names + M names, given as {(x, y): {z: c}} or as
    [x, y, z, c] rows.  The differential of A is ignored.
    """
    dom = A.domain
    if not isinstance(M, Bimodule):
        M = Bimodule(tuple(n for n, _ in M), tuple(int(d) for _, d in M), {}, {})
    na = A.dim
    names = list(A.names) + list(M.names)
    if len(set(names)) != len(names):
        raise InputError("algebra and module names overlap")
    degrees = list(A.degrees) + list(M.degrees)
    pos = {n: i for i, n in enumerate(names)}

    def resolve(x):
        if isinstance(x, int):
            return x
        if x not in pos:
            raise InputError(f"unknown basis element {x!r} in the extension table")
        return pos[x]

    E = _table(star, resolve, dom)
    # the unit of A acts as the identity on the whole extension
    for i in range(len(names)):
        E.setdefault((A.unit, i), {i: dom.one})
        E.setdefault((i, A.unit), {i: dom.one})
    for (i, j), vec in E.items():
        for k in vec:
            if degrees[k] != degrees[i] + degrees[j]:
                raise DegreeError(f"{names[i]}*{names[j]} has a term of the wrong degree")

    def emul(u, v):
        out: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                prod = E.get((i, j))
                if prod:
                    _axpy(out, a * b, prod)
        return out

    n = len(names)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                lhs = emul(emul({i: dom.one}, {j: dom.one}), {k: dom.one})
                rhs = emul({i: dom.one}, emul({j: dom.one}, {k: dom.one}))
                if lhs != rhs:
                    raise InputError(f"extension product is not associative on "
                                     f"({names[i]}, {names[j]}, {names[k]})")
    for i in range(na, n):
        for j in range(na, n):
            if E.get((i, j)):
                raise InputError("M * M must vanish in a square-zero extension")
    gamma: dict = {}
    for i in range(na):
        for j in range(na):
            vec = dict(E.get((i, j), {}))
            ab = A.mult.get((i, j), {})
            _axpy(vec, -dom.one, ab)
            if any(k < na for k in vec):
                raise InputError(f"{names[i]}*{names[j]} does not reduce to the product of A modulo M")
            if vec:
                gamma[(i, j)] = {k - na: c for k, c in vec.items()}
    left = {(a, m - na): {k - na: c for k, c in E.get((a, m), {}).items()}
            for a in range(na) for m in range(na, n) if E.get((a, m))}
    right = {(m - na, a): {k - na: c for k, c in E.get((m, a), {}).items()}
             for a in range(na) for m in range(na, n) if E.get((m, a))}
    for vecs in (left, right):
        for v in vecs.values():
            if any(k < 0 for k in v):
                raise InputError("A * M must land in M")
    M = Bimodule(M.names, M.degrees, left, right)

    def act_l(a: int, mv: dict) -> dict:
        out: dict = {}
        for m, c in mv.items():
            _axpy(out, c, left.get((a, m), {}))
        return out

    def act_r(mv: dict, a: int) -> dict:
        out: dict = {}
        for m, c in mv.items():
            _axpy(out, c, right.get((m, a), {}))
        return out

    def lin(f, vec):
        out: dict = {}
        for k, c in vec.items():
            _axpy(out, c, f.get(k, {}))
        return out

    def coboundary(f) -> dict:
        out = {}
        for a in range(na):
            for b in range(na):
                v = act_l(a, f.get(b, {}))
                _axpy(v, -dom.one, lin(f, A.mult.get((a, b), {})))
                _axpy(v, dom.one, act_r(f.get(a, {}), b))
                if v:
                    out[(a, b)] = v
        return out

    one = dom.one
    for a in range(na):
        for b in range(na):
            for c in range(na):
                v = act_l(a, gamma.get((b, c), {}))
                for k, x in A.mult.get((a, b), {}).items():
                    _axpy(v, -x, gamma.get((k, c), {}))
                for k, x in A.mult.get((b, c), {}).items():
                    _axpy(v, x, gamma.get((a, k), {}))
                _axpy(v, -one, act_r(gamma.get((a, b), {}), c))
                if v:
                    raise InputError("extension cocycle identity fails; star is not a square-zero extension")
    # gamma = delta f over degree-0 maps f: A -> M
    unknowns = [(a, m) for a in range(na) for m in range(M.dim) if A.degrees[a] == M.degrees[m]]
    rows: dict = {}

    def coords(tab):
        out = {}
        for (a, b), vec in tab.items():
            for m, c in vec.items():
                out[rows.setdefault((a, b, m), len(rows))] = c
        return out

    ech = Echelon(dom, track=True)
    for col, (a, m) in enumerate(unknowns):
        ech.add(coords(coboundary({a: {m: one}})), col)
    res, combo = ech.reduce(coords(gamma), {})
    potential = None
    if not res:
        potential = {}
        for col, c in combo.items():
            a, m = unknowns[col]
            potential.setdefault(a, {})[m] = c
    return ExtensionCocycle(A, M, gamma, True, not res, potential)


# -- first-order deformations -------------------------------------------------


@dataclass(frozen=True, eq=False)
class FirstOrderCocycle:
    algebra: DGAlgebra
    gamma1: dict              # i -> vector, the epsilon part of the differential
    gamma2: dict              # (i, j) -> vector, the epsilon part of the product
    cochain: Cochain          # shifted gamma1 + gamma2
    closed: bool
    trivial: bool
    potential: dict | None    # f: A -> A (degree 0) with gamma = [delta, f]

    def to_json(self) -> dict:
        A, dom = self.algebra, self.algebra.domain

        def fmt(vec):
            return {A.names[k]: dom.format(c) for k, c in sorted(vec.items())}

        out = {"gamma1": {A.names[i]: fmt(v) for i, v in sorted(self.gamma1.items())},
               "gamma2": [[A.names[i], A.names[j], fmt(v)] for (i, j), v in sorted(self.gamma2.items())],
               "closed": self.closed, "class_zero": self.trivial}
        if self.potential is not None:
            out["potential"] = {A.names[i]: fmt(v) for i, v in sorted(self.potential.items())}
        return out


def _split_eps(value, dom):
    if isinstance(value, (tuple, list)) and len(value) == 2:
        c0, c1 = value
    else:
        c0, c1 = value, 0
    conv = lambda c: dom.parse(c) if isinstance(c, str) else dom.convert(c)  # noqa: E731
    return conv(c0), conv(c1)


def first_order_cocycle(A: DGAlgebra, deformed: dict) -> FirstOrderCocycle:
    """gamma = gamma1 + gamma2 for d~ = d + eps gamma1, m~ = m + eps gamma2.

    ``deformed`` has keys "diff" ({src: {tgt: (c0, c1)}}) and "mult"
    ({(left, right): {tgt: (c0, c1)}}), names or indices, where c0 + c1 eps is
    the deformed structure constant.  Entries left out keep the value of A.
    """
    require_valid(A)
    dom = A.domain
    idx = lambda x: x if isinstance(x, int) else A.index(x)  # noqa: E731
    g1: dict = {}
    g2: dict = {}
    for src, vec in (deformed.get("diff") or {}).items():
        i = idx(src)
        zero_part = {}
        for tgt, val in vec.items():
            c0, c1 = _split_eps(val, dom)
            k = idx(tgt)
            if c0:
                zero_part[k] = c0
            if c1:
                if A.degrees[k] != A.degrees[i] + 1:
                    raise DegreeError(f"epsilon term d({A.names[i]}) -> {A.names[k]} has the wrong degree")
                g1.setdefault(i, {})[k] = c1
        if zero_part != A.diff.get(i, {}):
            raise InputError(f"deformed differential of {A.names[i]} does not reduce to d mod epsilon")
    for key, vec in (deformed.get("mult") or {}).items():
        i, j = (idx(x) for x in key)
        zero_part = {}
        for tgt, val in vec.items():
            c0, c1 = _split_eps(val, dom)
            k = idx(tgt)
            if c0:
                zero_part[k] = c0
            if c1:
                if A.degrees[k] != A.degrees[i] + A.degrees[j]:
                    raise DegreeError(f"epsilon term {A.names[i]}*{A.names[j]} -> {A.names[k]} "
                                      "has the wrong degree")
                g2.setdefault((i, j), {})[k] = c1
        if zero_part != A.mult.get((i, j), {}):
            raise InputError(f"deformed product {A.names[i]}*{A.names[j]} does not reduce to m mod epsilon")
    gamma = structure_cochain(g1, g2, A.degrees, dom)
    delta = structure_cochain(A.diff, A.mult, A.degrees, dom)
    if not bracket(delta, gamma, A.degrees).is_zero():
        raise InputError("deformed tables fail d~^2 = 0, Leibniz or associativity modulo epsilon^2")
    # trivializing f: A -> A of degree 0, unnormalized, single-input
    unknowns = [(i, k) for i in range(A.dim) for k in range(A.dim) if A.degrees[i] == A.degrees[k]]
    rows: dict = {}

    def coords(phi: Cochain):
        out = {}
        for inp, vec in phi.entries.items():
            for k, c in vec.items():
                out[rows.setdefault((inp, k), len(rows))] = c
        return out

    ech = Echelon(dom, track=True)
    for col, (i, k) in enumerate(unknowns):
        ech.add(coords(bracket(delta, Cochain(1, {(i,): {k: dom.one}}), A.degrees)), col)
    res, combo = ech.reduce(coords(gamma), {})
    potential = None
    if not res:
        potential = {}
        for col, c in combo.items():
            i, k = unknowns[col]
            potential.setdefault(i, {})[k] = c
    return FirstOrderCocycle(A, g1, g2, gamma, True, not res, potential)
