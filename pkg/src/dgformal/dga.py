"""Finite-dimensional DG algebras: data model, validation and cohomology."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DegreeError, InputError, NotACocycleError
from .linalg import Echelon, Matrix, sparse_kernel, _axpy
from .scalars import QQ, Domain


def _clean(vec: dict) -> dict:
    return {k: v for k, v in vec.items() if v}


@dataclass(frozen=True, eq=False)
class DGAlgebra:
    """Basis e_0..e_{n-1} with integer degrees.

    ``mult[(i, j)]`` is the sparse vector e_i * e_j, ``diff[i]`` is d(e_i).
    Products with the unit are stored explicitly (``build`` fills them in).
    ``weights`` is set on associated graded algebras only.
    """

    names: tuple
    degrees: tuple
    unit: int
    mult: dict
    diff: dict
    domain: Domain = QQ
    weights: tuple | None = None
    label: str = ""

    @classmethod
    def build(cls, names, degrees, unit, mult=None, diff=None, domain: Domain = QQ,
              weights=None, label="", implicit_unit=True):
        """Tables may use names or indices; coefficients anything domain.convert takes."""
        names = tuple(names)
        degrees = tuple(int(d) for d in degrees)
        if len(names) != len(degrees):
            raise InputError("names and degrees differ in length")
        if len(set(names)) != len(names):
            raise InputError("basis names must be unique")
        index = {n: i for i, n in enumerate(names)}

        def idx(x):
            if isinstance(x, int):
                if not 0 <= x < len(names):
                    raise InputError(f"basis index {x} out of range")
                return x
            try:
                return index[x]
            except KeyError:
                raise InputError(f"unknown basis element {x!r}") from None

        u = idx(unit)
        M: dict = {}
        for key, vec in (mult or {}).items():
            i, j = idx(key[0]), idx(key[1])
            out = M.setdefault((i, j), {})
            for k, c in vec.items():
                c = domain.convert(c)
                k = idx(k)
                out[k] = out.get(k, domain.zero) + c
        if implicit_unit:
            for i in range(len(names)):
                M.setdefault((u, i), {i: domain.one})
                M.setdefault((i, u), {i: domain.one})
        Dm: dict = {}
        for key, vec in (diff or {}).items():
            i = idx(key)
            out = Dm.setdefault(i, {})
            for k, c in vec.items():
                k = idx(k)
                out[k] = out.get(k, domain.zero) + domain.convert(c)
        M = {k: _clean(v) for k, v in M.items()}
        M = {k: v for k, v in M.items() if v}
        Dm = {k: _clean(v) for k, v in Dm.items()}
        Dm = {k: v for k, v in Dm.items() if v}
        return cls(names, degrees, u, M, Dm, domain, tuple(weights) if weights is not None else None, label)

    # -- shape --------------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def amplitude(self) -> int:
        return max(self.degrees) if self.degrees else 0

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InputError(f"unknown basis element {name!r}") from None

    def in_degree(self, p: int) -> list[int]:
        return [i for i, d in enumerate(self.degrees) if d == p]

    def vec_degree(self, vec: dict) -> int | None:
        degs = {self.degrees[k] for k in vec}
        if len(degs) > 1:
            raise DegreeError("inhomogeneous vector")
        return degs.pop() if degs else None

    # -- arithmetic on sparse vectors ----------------------------------------

    def mul(self, u: dict, v: dict) -> dict:
        out: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                prod = self.mult.get((i, j))
                if prod:
                    _axpy(out, a * b, prod)
        return out

    def d(self, u: dict) -> dict:
        out: dict = {}
        for i, a in u.items():
            img = self.diff.get(i)
            if img:
                _axpy(out, a, img)
        return out

    def basis_vec(self, i: int) -> dict:
        return {i: self.domain.one}

    def diff_matrix(self, p: int) -> Matrix:
        """d: A^p -> A^{p+1} in local coordinates (ordered by basis index)."""
        src = self.in_degree(p)
        tgt = {k: r for r, k in enumerate(self.in_degree(p + 1))}
        entries = {}
        for c, i in enumerate(src):
            for k, v in self.diff.get(i, {}).items():
                entries[(tgt[k], c)] = v
        return Matrix(len(tgt), len(src), entries, self.domain)

    def has_zero_differential(self) -> bool:
        return not self.diff

    def map_scalars(self, fn, domain: Domain, label=None) -> "DGAlgebra":
        mult = {k: _clean({i: fn(c) for i, c in v.items()}) for k, v in self.mult.items()}
        diff = {k: _clean({i: fn(c) for i, c in v.items()}) for k, v in self.diff.items()}
        return DGAlgebra(self.names, self.degrees, self.unit, {k: v for k, v in mult.items() if v},
                         {k: v for k, v in diff.items() if v}, domain, self.weights,
                         self.label if label is None else label)

    def with_domain(self, domain: Domain) -> "DGAlgebra":
        return self.map_scalars(domain.convert, domain)

    def with_diff(self, diff: dict) -> "DGAlgebra":
        return DGAlgebra(self.names, self.degrees, self.unit, self.mult, diff, self.domain,
                         self.weights, self.label)

    def check_degrees(self):
        """Raise DegreeError on the first degree-incompatible table entry."""
        if not self.names:
            raise DegreeError("empty basis")
        if min(self.degrees) < 0:
            raise DegreeError("degrees must be nonnegative")
        if self.degrees[self.unit] != 0:
            raise DegreeError(f"unit {self.names[self.unit]!r} must have degree 0")
        for (i, j), vec in sorted(self.mult.items()):
            for k in vec:
                if self.degrees[k] != self.degrees[i] + self.degrees[j]:
                    raise DegreeError(
                        f"product {self.names[i]}*{self.names[j]} has a component on "
                        f"{self.names[k]} of degree {self.degrees[k]}, expected "
                        f"{self.degrees[i] + self.degrees[j]}")
        for i, vec in sorted(self.diff.items()):
            for k in vec:
                if self.degrees[k] != self.degrees[i] + 1:
                    raise DegreeError(
                        f"d({self.names[i]}) has a component on {self.names[k]} of degree "
                        f"{self.degrees[k]}, expected {self.degrees[i] + 1}")

    def format_vec(self, vec: dict) -> str:
        if not vec:
            return "0"
        parts = []
        for k in sorted(vec):
            c = self.domain.format(vec[k])
            parts.append(f"{c}*{self.names[k]}" if c != "1" else self.names[k])
        return " + ".join(parts)


@dataclass
class Violation:
    identity: str
    witness: tuple
    detail: str

    def __str__(self):
        return f"{self.identity} fails at ({', '.join(self.witness)}): {self.detail}"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def to_json(self):
        return {"ok": self.ok, "violations": [
            {"identity": v.identity, "witness": list(v.witness), "detail": v.detail} for v in self.violations]}


def _sub(u: dict, v: dict) -> dict:
    out = dict(u)
    for k, x in v.items():
        y = out.get(k)
        y = -x if y is None else y - x
        if y:
            out[k] = y
        else:
            out.pop(k, None)
    return out


def validate(A: DGAlgebra, limit: int | None = None) -> ValidationReport:
    """Check d^2 = 0, unit laws, graded Leibniz and associativity on basis tuples.

    Degree-incompatible entries raise DegreeError before any identity check.
    ``limit`` stops after that many violations.
    """
    A.check_degrees()
    rep = ValidationReport()
    names = A.names
    n = A.dim
    e = A.basis_vec

    def add(identity, witness, detail):
        rep.violations.append(Violation(identity, tuple(names[i] for i in witness), detail))
        return limit is not None and len(rep.violations) >= limit

    for i in range(n):
        dd = A.d(A.d(e(i)))
        if dd and add("d^2 = 0", (i,), A.format_vec(dd)):
            return rep
    u = A.unit
    for i in range(n):
        for left in (True, False):
            prod = A.mul(e(u), e(i)) if left else A.mul(e(i), e(u))
            if prod != e(i) and add("unit law", (u, i) if left else (i, u), A.format_vec(prod)):
                return rep
    if A.diff.get(u) and add("unit law", (u,), "d(1) must vanish"):
        return rep
    for i in range(n):
        for j in range(n):
            lhs = A.d(A.mul(e(i), e(j)))
            rhs = A.mul(A.d(e(i)), e(j))
            sign = -1 if A.degrees[i] % 2 else 1
            _axpy(rhs, A.domain.convert(sign), A.mul(e(i), A.d(e(j))))
            diff = _sub(lhs, rhs)
            if diff and add("Leibniz", (i, j), A.format_vec(diff)):
                return rep
    for i in range(n):
        for j in range(n):
            ij = A.mult.get((i, j), {})
            for k in range(n):
                lhs = A.mul(ij, e(k))
                rhs = A.mul(e(i), A.mult.get((j, k), {}))
                diff = _sub(lhs, rhs)
                if diff and add("associativity", (i, j, k), A.format_vec(diff)):
                    return rep
    return rep


def require_valid(A: DGAlgebra):
    rep = validate(A, limit=1)
    if not rep.ok:
        raise InputError(f"not a DG algebra: {rep.violations[0]}")


# -- cohomology -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CohomologyAlgebra:
    """H(A) with zero differential, plus chain-level access.

    ``representatives[h]`` is a cocycle of A (global sparse vector) for the
    H basis element h; ``project`` sends cocycles to H coordinates.
    """

    algebra: DGAlgebra
    source: DGAlgebra
    representatives: tuple
    _echelons: dict = field(repr=False, default_factory=dict)

    def betti(self) -> tuple:
        top = self.source.amplitude
        return tuple(len(self.algebra.in_degree(p)) for p in range(top + 1))

    def section(self, hvec: dict) -> dict:
        out: dict = {}
        for h, c in hvec.items():
            _axpy(out, c, self.representatives[h])
        return out

    def project(self, z: dict) -> dict:
        """H coordinates of a homogeneous cocycle (global sparse vector)."""
        A = self.source
        if not z:
            return {}
        if A.d(z):
            raise NotACocycleError(f"{A.format_vec(z)} is not a cocycle")
        p = A.vec_degree(z)
        ech = self._echelons[p]
        res, combo = ech.reduce(z, {})
        if res:
            raise NotACocycleError("vector is outside the cocycle space")
        return {lab[1]: c for lab, c in combo.items() if lab[0] == "h" and c}

    def is_exact(self, z: dict) -> bool:
        return not self.project(z)

    def class_index(self, name: str) -> int:
        names = self.algebra.names
        for cand in (name, f"[{name}]"):
            if cand in names:
                return names.index(cand)
        raise InputError(f"unknown cohomology class {name!r}; known: {', '.join(names)}")


def cocycles(A: DGAlgebra, p: int) -> list[dict]:
    """Basis of Z^p as global sparse vectors (deterministic)."""
    idx = A.in_degree(p)
    cols = [{k: v for k, v in A.diff.get(i, {}).items()} for i in idx]
    return [{idx[j]: c for j, c in vec.items()} for vec in sparse_kernel(cols, A.domain)]


def boundaries(A: DGAlgebra, p: int) -> list[dict]:
    """Spanning set of B^p (images of the degree p-1 basis)."""
    return [A.diff[i] for i in A.in_degree(p - 1) if A.diff.get(i)]


def cohomology(A: DGAlgebra) -> CohomologyAlgebra:
    if not A.domain.is_field:
        raise InputError(f"cohomology needs a field; got {A.domain.tag}")
    reps, names, degrees, echelons = [], [], [], {}
    for p in range(A.amplitude + 1):
        ech = Echelon(A.domain, track=True)
        for b, vec in enumerate(boundaries(A, p)):
            ech.add(vec, ("b", b))
        for z in cocycles(A, p):
            res, _ = ech.reduce(z)
            if res:
                h = len(reps)
                ech.add(z, ("h", h))
                reps.append(z)
                degrees.append(p)
                if len(z) == 1 and next(iter(z.values())) == A.domain.one:
                    names.append(f"[{A.names[next(iter(z))]}]")
                else:
                    names.append(f"[h{p}_{sum(1 for d in degrees if d == p) - 1}]")
        echelons[p] = ech
    shell = CohomologyAlgebra(None, A, tuple(reps), echelons)
    unit_class = shell.project(A.basis_vec(A.unit)) if not A.diff.get(A.unit) else {}
    if len(unit_class) != 1 or next(iter(unit_class.values())) != A.domain.one:
        raise InputError("the unit does not represent a basis class of H^0")
    mult = {}
    for i, zi in enumerate(reps):
        for j, zj in enumerate(reps):
            prod = shell.project(A.mul(zi, zj))
            if prod:
                mult[(i, j)] = prod
    hu = next(iter(unit_class))
    H = DGAlgebra.build(names, degrees, hu, mult, {}, A.domain, label=f"H({A.label})" if A.label else "H",
                        implicit_unit=False)
    H = DGAlgebra(H.names, H.degrees, H.unit, H.mult, H.diff, H.domain, None, H.label)
    result = CohomologyAlgebra(H, A, tuple(reps), echelons)
    _check_well_defined(result)
    return result


def _check_well_defined(H: CohomologyAlgebra):
    """Products of representatives shifted by boundaries give the same class."""
    from .errors import InvariantError

    A = H.source
    for i, zi in enumerate(H.representatives):
        p = H.algebra.degrees[i]
        for b in boundaries(A, p):
            moved = dict(zi)
            _axpy(moved, A.domain.one, b)
            for j, zj in enumerate(H.representatives):
                if H.project(A.mul(moved, zj)) != H.project(A.mul(zi, zj)):
                    raise InvariantError("induced product depends on the representative")
                if H.project(A.mul(zj, moved)) != H.project(A.mul(zj, zi)):
                    raise InvariantError("induced product depends on the representative")
