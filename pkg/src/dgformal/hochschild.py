"""Weight-graded Hochschild cochains of a graded DG algebra B.

Cochains are stored in the shifted (coderivation) picture: a cochain of total
degree n is a family of maps (sB)^{(x)q} -> sB of shifted degree n - 1, where
|sb| = deg(b) - 1.  An entry ``entries[(i_1, ..., i_q)] = {k: c}`` means
phi(sb_{i_1} (x) ... (x) sb_{i_q}) = sum_k c * sb_k.

The unshifted map phi_q : B^{(x)q} -> B has map-degree n - q and is related by
phi_hat = s o phi o (s^{-1})^{(x)q}; see ``to_unshifted``.  The structure
cochain delta = d + m satisfies [delta, delta] = 0 exactly when B is a DG
algebra, and the Hochschild differential is D = [delta, -].

Weight: a cochain has weight w when every entry satisfies
weight(output) = sum(weight(inputs)) + w.  Normalized cochains never take the
unit as an input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct

from .dga import DGAlgebra
from .errors import InputError, InvariantError
from .linalg import Echelon, Matrix, _axpy, sparse_kernel, sparse_rank
from .parallel import parallel_map


class Cochain:
    __slots__ = ("degree", "entries", "_by_output")

    def __init__(self, degree: int, entries=None):
        self.degree = degree
        self.entries = {k: v for k, v in (entries or {}).items() if v}
        self._by_output = None

    @property
    def shifted_degree(self) -> int:
        return self.degree - 1

    def is_zero(self) -> bool:
        return not self.entries

    def __bool__(self):
        return bool(self.entries)

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return self.entries == other.entries and (self.degree == other.degree or not self.entries)

    def __repr__(self):
        return f"Cochain(n={self.degree}, terms={len(self.entries)})"

    def arities(self) -> set:
        return {len(k) for k in self.entries}

    def by_output(self) -> dict:
        """{output index: [(inputs, coefficient)]}."""
        if self._by_output is None:
            idx: dict = {}
            for inp, vec in self.entries.items():
                for k, c in vec.items():
                    idx.setdefault(k, []).append((inp, c))
            self._by_output = idx
        return self._by_output

    def add(self, other: "Cochain", scale=1) -> "Cochain":
        out = {k: dict(v) for k, v in self.entries.items()}
        for inp, vec in other.entries.items():
            tgt = out.setdefault(inp, {})
            _axpy(tgt, scale, vec)
        out = {k: v for k, v in out.items() if v}
        deg = self.degree if self.entries else other.degree
        return Cochain(deg, out)

    def scale(self, c) -> "Cochain":
        if not c:
            return Cochain(self.degree)
        return Cochain(self.degree, {k: {i: c * x for i, x in v.items()} for k, v in self.entries.items()})

    def normalized(self, unit: int) -> bool:
        return all(unit not in k for k in self.entries)

    def drop_unit_inputs(self, unit: int) -> "Cochain":
        return Cochain(self.degree, {k: v for k, v in self.entries.items() if unit not in k})

    def weights_of(self, weights) -> set:
        return {weights[o] - sum(weights[i] for i in inp) for inp, vec in self.entries.items() for o in vec}

    def to_unshifted(self, degrees) -> dict:
        """Entries of the unshifted maps phi_q : B^{(x)q} -> B."""
        out = {}
        for inp, vec in self.entries.items():
            q = len(inp)
            e = sum((q - 1 - j) * (degrees[i] - 1) for j, i in enumerate(inp))
            sign = -1 if e % 2 else 1
            out[inp] = {k: sign * c for k, c in vec.items()}
        return out

    @classmethod
    def from_unshifted(cls, degree: int, entries: dict, degrees) -> "Cochain":
        out = {}
        for inp, vec in entries.items():
            q = len(inp)
            e = sum((q - 1 - j) * (degrees[i] - 1) for j, i in enumerate(inp))
            sign = -1 if e % 2 else 1
            out[tuple(inp)] = {k: sign * c for k, c in vec.items() if c}
        return cls(degree, out)

    def format(self, names) -> list:
        rows = []
        for inp in sorted(self.entries, key=lambda k: (len(k), k)):
            vec = self.entries[inp]
            rows.append([[names[i] for i in inp], {names[k]: c for k, c in sorted(vec.items())}])
        return rows


def _sdeg(degrees):
    return [d - 1 for d in degrees]


def compose(phi: Cochain, psi: Cochain, degrees, unit: int | None = None) -> Cochain:
    """Gerstenhaber pre-Lie composition phi o psi (insert psi into each slot).

    (phi o psi)(x_1..x_N) = sum_j (-1)^{|psi| (|x_1|+..+|x_j|)}
                            phi(x_1..x_j, psi(..), ..)
    When ``unit`` is given, output entries with a unit input are dropped
    (normalized result).
    """
    sd = _sdeg(degrees)
    spsi = psi.shifted_degree
    odd = spsi % 2
    idx = psi.by_output()
    out: dict = {}
    for inp, vec in phi.entries.items():
        prefix = 0
        for j, y in enumerate(inp):
            cands = idx.get(y)
            if cands:
                sign = -1 if (odd and prefix % 2) else 1
                head, tail = inp[:j], inp[j + 1:]
                for J, c in cands:
                    key = head + J + tail
                    if unit is not None and unit in key:
                        continue
                    tgt = out.get(key)
                    if tgt is None:
                        tgt = out[key] = {}
                    f = c if sign == 1 else -c
                    for k, a in vec.items():
                        v = tgt.get(k)
                        v = f * a if v is None else v + f * a
                        if v:
                            tgt[k] = v
                        else:
                            del tgt[k]
            prefix += sd[y]
    return Cochain(phi.degree + psi.degree - 1, {k: v for k, v in out.items() if v})


def bracket(phi: Cochain, psi: Cochain, degrees, unit: int | None = None) -> Cochain:
    """[phi, psi] = phi o psi - (-1)^{|phi||psi|} psi o phi (shifted degrees)."""
    a = compose(phi, psi, degrees, unit)
    b = compose(psi, phi, degrees, unit)
    sign = -1 if (phi.shifted_degree * psi.shifted_degree) % 2 else 1
    return a.add(b, -sign)


def structure_cochain(diff: dict, mult: dict, degrees, domain, include_unit_inputs=True, unit=None) -> Cochain:
    """Shifted d + m from tables diff[i] = d(b_i), mult[(i, j)] = b_i b_j."""
    entries = {}
    for i, vec in diff.items():
        if vec:
            entries[(i,)] = dict(vec)
    for (i, j), vec in mult.items():
        if not vec:
            continue
        if not include_unit_inputs and unit is not None and unit in (i, j):
            continue
        if (degrees[i] - 1) % 2:
            entries[(i, j)] = {k: -c for k, c in vec.items()}
        else:
            entries[(i, j)] = dict(vec)
    return Cochain(2, entries)


def algebra_cochain(B: DGAlgebra) -> Cochain:
    return structure_cochain(B.diff, B.mult, B.degrees, B.domain)


# -- slices -------------------------------------------------------------------


def arity_bound(n: int, w: int) -> int:
    """Largest arity q of a nonzero elementary cochain of degree n, weight w.

    Writing c for the number of inputs of complement type (weight = degree+1)
    and e in {0, 1} for the output, degree and weight bookkeeping force
    q + c = n - w + e, hence q <= n + 1 - w.
    """
    return n + 1 - w


@dataclass(frozen=True, eq=False)
class CochainSlice:
    """Elementary cochains of total degree n and weight w, with the matrix of
    D into slice (n + 1, w)."""

    n: int
    w: int
    basis: tuple            # ((inputs...), output) pairs
    index: dict = field(repr=False, default_factory=dict)
    differential: Matrix | None = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    def cochain(self, vec: dict) -> Cochain:
        entries: dict = {}
        for col, c in vec.items():
            inp, out = self.basis[col]
            entries.setdefault(inp, {})[out] = c
        return Cochain(self.n, entries)

    def coordinates(self, phi: Cochain) -> dict:
        out = {}
        for inp, vec in phi.entries.items():
            for k, c in vec.items():
                try:
                    out[self.index[(inp, k)]] = c
                except KeyError:
                    raise InvariantError(
                        f"cochain term {inp}->{k} lies outside slice (n={self.n}, w={self.w})") from None
        return out


def _check_connected(B: DGAlgebra):
    if B.weights is None:
        raise InputError("Hochschild slices need a weight-graded algebra (use associated_graded)")
    for i, w in enumerate(B.weights):
        if w == 0 and i != B.unit:
            raise InputError(
                f"weight-0 element {B.names[i]!r} outside the unit line: H^0 must be one-dimensional")
        if w < 0:
            raise InputError("negative weights are not supported")


class HochschildComplex:
    """Normalized Hochschild cochains of a weight-graded DG algebra B.

    ``derived=True`` (the default) allows components of negative map-degree
    (q > n); ``derived=False`` gives the classical subcomplex q <= n.
    """

    def __init__(self, B, derived: bool = True):
        if hasattr(B, "algebra") and hasattr(B, "splitting"):
            B = B.algebra
        _check_connected(B)
        self.B = B
        self.derived = derived
        self.domain = B.domain
        self.degrees = B.degrees
        self.weights = B.weights
        self.unit = B.unit
        self.delta = algebra_cochain(B)
        self.reduced = [i for i in range(B.dim) if i != B.unit]
        types: dict = {}
        for i in self.reduced:
            types.setdefault((B.degrees[i], B.weights[i]), []).append(i)
        self.types = sorted(types.items())
        outs: dict = {}
        for i in range(B.dim):
            outs.setdefault((B.degrees[i], B.weights[i]), []).append(i)
        self.out_types = outs
        self.max_weight = max(B.weights)
        self.max_degree = B.amplitude
        self._slices: dict = {}

    def q_range(self, n: int, w: int) -> range:
        top = arity_bound(n, w)
        if not self.derived:
            top = min(top, n)
        return range(1, max(top, 0) + 1)

    def _type_sequences(self, q: int, wsum_max: int):
        """Sequences of input types of length q with total weight <= wsum_max."""
        types = self.types
        seq = []

        def rec(depth, wsum):
            if depth == q:
                yield tuple(seq)
                return
            for t, members in types:
                nw = wsum + t[1]
                if nw + (q - depth - 1) > wsum_max:
                    continue
                seq.append((t, members))
                yield from rec(depth + 1, nw)
                seq.pop()

        yield from rec(0, 0)

    def enumerate_slice(self, n: int, w: int) -> list:
        basis = []
        wsum_max = self.max_weight - w
        for q in self.q_range(n, w):
            if q > wsum_max:
                break
            for seq in self._type_sequences(q, wsum_max):
                dsum = sum(t[0] for t, _ in seq)
                wsum = sum(t[1] for t, _ in seq)
                outs = self.out_types.get((dsum + n - q, wsum + w))
                if not outs:
                    continue
                for inp in iproduct(*[m for _, m in seq]):
                    for o in outs:
                        basis.append((inp, o))
        basis.sort(key=lambda e: (len(e[0]), e[0], e[1]))
        return basis

    def slice(self, n: int, w: int, with_differential: bool = True) -> CochainSlice:
        key = (n, w, with_differential)
        hit = self._slices.get(key)
        if hit is not None:
            return hit
        basis = tuple(self.enumerate_slice(n, w))
        index = {b: k for k, b in enumerate(basis)}
        S = CochainSlice(n, w, basis, index)
        if with_differential:
            D = self.operator_matrix(self.delta, S, self.slice(n + 1, w, with_differential=False))
            S = CochainSlice(n, w, basis, index, D)
        self._slices[key] = S
        return S

    def operator_matrix(self, sigma: Cochain, src: CochainSlice, tgt: CochainSlice) -> Matrix:
        """Matrix of phi -> [sigma, phi] from src into tgt."""
        entries = {}
        one = self.domain.one
        for col, (inp, out) in enumerate(src.basis):
            e = Cochain(src.n, {inp: {out: one}})
            img = bracket(sigma, e, self.degrees, self.unit)
            for row, c in tgt.coordinates(img).items():
                entries[(row, col)] = c
        return Matrix(tgt.dim, src.dim, entries, self.domain)

    def differential(self, phi: Cochain) -> Cochain:
        return bracket(self.delta, phi, self.degrees, self.unit)

    def rank(self, n: int, w: int) -> int:
        """Rank of D from slice (n, w) into (n + 1, w)."""
        key = ("rank", n, w)
        hit = self._slices.get(key)
        if hit is None:
            self._require_field()
            S = self.slice(n, w)
            hit = self._slices[key] = sparse_rank(S.differential.columns(), self.domain)
        return hit

    def _require_field(self):
        if not self.domain.is_field:
            raise InputError("HH components need a field; use hh_module over QQ[t]")

    def hh_dim(self, n: int, w: int) -> int:
        return self.slice(n, w).dim - self.rank(n, w) - self.rank(n - 1, w)

    def component(self, n: int, w: int, representatives: bool = True) -> "HHComponent":
        S = self.slice(n, w)
        dim = self.hh_dim(n, w)
        reps = None
        if representatives:
            reps = tuple(self._representatives(n, w))
            if len(reps) != dim:
                raise InvariantError("cohomology dimension bookkeeping failed")
        return HHComponent(n, w, dim, reps, S.dim, S.dim - self.rank(n, w), self.rank(n - 1, w))

    def _representatives(self, n: int, w: int) -> list:
        S = self.slice(n, w)
        prev = self.slice(n - 1, w)
        if self.hh_dim(n, w) == 0:
            return []
        kernel = sparse_kernel(S.differential.columns(), self.domain)
        ech = Echelon(self.domain)
        for col in prev.differential.columns():
            ech.add(col)
        return [S.cochain(z) for z in kernel if ech.add(z)]


@dataclass(frozen=True)
class HHComponent:
    n: int
    w: int
    dim: int
    representatives: tuple | None
    cochains: int
    cocycles: int
    coboundaries: int


def _complex(B, derived=True) -> HochschildComplex:
    if isinstance(B, HochschildComplex):
        return B
    return HochschildComplex(B, derived)


def cochain_space(B, n: int, w: int, derived: bool = True) -> CochainSlice:
    return _complex(B, derived).slice(n, w)


def hh_component(B, n: int, w: int, derived: bool = True, representatives: bool = True) -> HHComponent:
    return _complex(B, derived).component(n, w, representatives)


def hochschild_differential(phi: Cochain, B) -> Cochain:
    """[delta, phi] over B (an AssociatedGraded or a DGAlgebra)."""
    if hasattr(B, "algebra") and hasattr(B, "splitting"):
        B = B.algebra
    delta = algebra_cochain(B)
    return bracket(delta, phi, B.degrees, B.unit)


def hh_table(B, degrees, weights, derived: bool = True, threads: int | None = None) -> dict:
    """{(n, w): HH dimension}; slices are computed concurrently."""
    C = _complex(B, derived)
    keys = [(n, w) for n in degrees for w in weights]
    # warm the slice cache in a deterministic order before fanning out
    for w in weights:
        for n in sorted(set(degrees) | {min(degrees) - 1}):
            C.slice(n, w)
    dims = parallel_map(lambda k: C.hh_dim(*k), keys, threads)
    return dict(zip(keys, dims))
