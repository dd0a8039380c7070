"""Canonical filtration, associated graded algebra and the Rees h-expansion.

The splitting s: B -> A is realised by a basis of A adapted to the
filtration: in each degree p, a basis of Z^p (weight p) followed by a basis of
a complement C^p (weight p + 1).  Transporting the structure maps of A into
this basis and sorting each output by how far it drops weight gives the
expansions d = sum h^l d_l and m = sum h^l m_l.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .dga import DGAlgebra, cohomology, cocycles, CohomologyAlgebra
from .errors import InputError, InvariantError
from .linalg import Echelon, Matrix, _axpy, inverse, smith_normal_form
from .scalars import DomainKind


@dataclass(frozen=True, eq=False)
class Filtration:
    """F_k A^p = A^p (p < k), Z^p (p = k), 0 (p > k)."""

    source: DGAlgebra
    cycles: dict          # p -> list of global sparse vectors (basis of Z^p)
    complements: dict     # p -> list of global sparse vectors (basis of C^p)

    def subspace(self, k: int, p: int) -> list[dict]:
        A = self.source
        if p < k:
            return [A.basis_vec(i) for i in A.in_degree(p)]
        if p == k:
            return list(self.cycles.get(p, []))
        return []

    def dimension(self, k: int, p: int) -> int:
        return len(self.subspace(k, p))

    def contains(self, k: int, vec: dict) -> bool:
        A = self.source
        if not vec:
            return True
        p = A.vec_degree(vec)
        if p < k:
            return True
        if p == k:
            return not A.d(vec)
        return False

    def check(self):
        """Nested, d-stable and multiplicative; raises InvariantError otherwise."""
        A = self.source
        top = A.amplitude + 1
        for k in range(-1, top + 1):
            for p in range(top + 1):
                for v in self.subspace(k, p):
                    if not self.contains(k + 1, v):
                        raise InvariantError(f"F_{k} is not contained in F_{k + 1}")
                    if not self.contains(k, A.d(v)):
                        raise InvariantError(f"d does not preserve F_{k}")
        for i in range(top + 1):
            for j in range(top + 1):
                for p in range(i + 1):
                    for q in range(j + 1):
                        for a in self.subspace(i, p):
                            for b in self.subspace(j, q):
                                if not self.contains(i + j, A.mul(a, b)):
                                    raise InvariantError(f"F_{i} * F_{j} is not inside F_{i + j}")
        return True


def _is_basis_vec(vec: dict, domain) -> int | None:
    if len(vec) == 1:
        (k, v), = vec.items()
        if v == domain.one:
            return k
    return None


def _field_split(A: DGAlgebra, p: int):
    Z = cocycles(A, p)
    if p == 0:
        u = {A.unit: A.domain.one}
        Z = [u] + [z for z in Z if z != u]
    ech = Echelon(A.domain)
    for z in Z:
        ech.add(z)
    C = [A.basis_vec(i) for i in A.in_degree(p) if ech.add(A.basis_vec(i))]
    return Z, C


def _poly_split(A: DGAlgebra, p: int):
    """Saturated basis of Z^p over QQ[t] plus a free complement (from SNF)."""
    idx = A.in_degree(p)
    if p == 0:
        idx = [i for i in idx if i != A.unit]
    tgt = {k: r for r, k in enumerate(A.in_degree(p + 1))}
    entries = {}
    for c, i in enumerate(idx):
        for k, v in A.diff.get(i, {}).items():
            entries[(tgt[k], c)] = v
    M = Matrix(len(tgt), len(idx), entries, A.domain)
    snf = smith_normal_form(M)
    r = len(snf.invariant_factors())
    Vcols = snf.V.columns()
    lift = [{idx[j]: v for j, v in col.items()} for col in Vcols]
    Z, C = lift[r:], lift[:r]
    if p == 0:
        Z = [{A.unit: A.domain.one}] + Z
    return Z, C


def _splitting(A: DGAlgebra, seed=None):
    if A.diff.get(A.unit):
        raise InputError("d(1) must vanish")
    poly = A.domain.kind is DomainKind.POLY_T
    rng = random.Random(seed) if seed is not None else None
    cycles, comps = {}, {}
    for p in range(A.amplitude + 1):
        Z, C = _poly_split(A, p) if poly else _field_split(A, p)
        if rng is not None and Z:
            moved = []
            for c in C:
                c = dict(c)
                for z in Z:
                    k = rng.randint(-2, 2)
                    if k:
                        _axpy(c, A.domain.convert(k), z)
                moved.append(c)
            C = moved
        cycles[p], comps[p] = Z, C
    return Filtration(A, cycles, comps)


def canonical_filtration(A: DGAlgebra, seed=None) -> Filtration:
    F = _splitting(A, seed)
    F.check()
    return F


@dataclass(frozen=True, eq=False)
class AssociatedGraded:
    """gr^F A realised on an adapted basis of A.

    ``algebra`` is B (with weight labels); ``splitting[b]`` is s(b) in A
    coordinates; ``kinds[b]`` is "Z" or "C".
    """

    algebra: DGAlgebra
    source: DGAlgebra
    filtration: Filtration
    splitting: tuple
    kinds: tuple
    _inverse: Matrix = field(repr=False, default=None)

    def weight_dims(self) -> dict:
        """{w: {degree: dim}} of the weight pieces gr_w."""
        B = self.algebra
        out: dict = {}
        for d, w in zip(B.degrees, B.weights):
            out.setdefault(w, {}).setdefault(d, 0)
            out[w][d] += 1
        return {w: dict(sorted(v.items())) for w, v in sorted(out.items())}

    def to_b(self, vec: dict) -> dict:
        return self._inverse.apply(vec)

    def from_b(self, vec: dict) -> dict:
        out: dict = {}
        for b, c in vec.items():
            _axpy(out, c, self.splitting[b])
        return out

    def quasiiso_to_H(self, H: CohomologyAlgebra | None = None):
        """(H, images) with images[b] the H-coordinates of the class of b
        (zero on complement elements)."""
        if H is None:
            H = cohomology(self.source)
        images = []
        for b, kind in enumerate(self.kinds):
            images.append(H.project(self.splitting[b]) if kind == "Z" else {})
        return H, images

    def check_quasiiso(self, H: CohomologyAlgebra | None = None):
        """The map B -> H(A) is an algebra map and a quasi-isomorphism."""
        H, images = self.quasiiso_to_H(H)
        B = self.algebra
        for (i, j), prod in B.mult.items():
            lhs: dict = {}
            for k, c in prod.items():
                _axpy(lhs, c, images[k])
            rhs = H.algebra.mul(images[i], images[j])
            if lhs != rhs:
                raise InvariantError(f"B -> H is not multiplicative on ({B.names[i]}, {B.names[j]})")
        for i in range(B.dim):
            dimg: dict = {}
            for k, c in B.d(B.basis_vec(i)).items():
                _axpy(dimg, c, images[k])
            if dimg:
                raise InvariantError("B -> H does not kill boundaries")
        HB = cohomology(B)
        if HB.betti() != H.betti():
            raise InvariantError(f"H(B) {HB.betti()} differs from H(A) {H.betti()}")
        # the induced map on cohomology is onto, hence an isomorphism
        for p in range(B.amplitude + 1):
            vecs = [_combine(z, images)
                    for z in (HB.representatives[h] for h in range(len(HB.representatives))
                              if HB.algebra.degrees[h] == p)]
            ech = Echelon(H.algebra.domain)
            rank = sum(1 for v in vecs if ech.add(v))
            if rank != len(H.algebra.in_degree(p)):
                raise InvariantError(f"B -> H is not onto in degree {p}")
        return True


def _combine(vec, images):
    out: dict = {}
    for k, c in vec.items():
        _axpy(out, c, images[k])
    return out


@dataclass(frozen=True, eq=False)
class ReesExpansion:
    """d = sum_l h^l d_l and m = sum_l h^l m_l on the basis of B.

    ``d_terms[l][i]`` is d_l(b_i) and ``m_terms[l][(i, j)]`` is m_l(b_i, b_j),
    both as sparse vectors in B coordinates.
    """

    graded: AssociatedGraded
    d_terms: dict
    m_terms: dict

    @property
    def algebra(self) -> DGAlgebra:
        return self.graded.algebra

    @property
    def max_order(self) -> int:
        orders = [l for l, t in self.d_terms.items() if t] + [l for l, t in self.m_terms.items() if t]
        return max(orders, default=0)

    def is_trivial(self) -> bool:
        return self.max_order == 0

    def check_reconstruction(self):
        """s(sum_l m_l(a, b)) = s(a) s(b) and s(sum_l d_l(a)) = d s(a) exactly."""
        G = self.graded
        A = G.source
        n = G.algebra.dim
        for i in range(n):
            total: dict = {}
            for l, tab in self.d_terms.items():
                _axpy(total, A.domain.one, tab.get(i, {}))
            if G.from_b(total) != A.d(G.splitting[i]):
                raise InvariantError(f"differential expansion fails on {G.algebra.names[i]}")
            for j in range(n):
                total = {}
                for l, tab in self.m_terms.items():
                    _axpy(total, A.domain.one, tab.get((i, j), {}))
                if G.from_b(total) != A.mul(G.splitting[i], G.splitting[j]):
                    raise InvariantError("product expansion fails on "
                                         f"({G.algebra.names[i]}, {G.algebra.names[j]})")
        B = G.algebra
        if self.d_terms.get(0, {}) != {k: v for k, v in B.diff.items()}:
            raise InvariantError("d_0 differs from the differential of B")
        if self.m_terms.get(0, {}) != {k: v for k, v in B.mult.items()}:
            raise InvariantError("m_0 differs from the product of B")
        if self.max_order > 2 * max(A.amplitude, 1):
            raise InvariantError("expansion order exceeds twice the amplitude")
        return True


def _expand(A: DGAlgebra, F: Filtration):
    names, degrees, weights, splitting, kinds = [], [], [], [], []
    dom = A.domain
    for p in range(A.amplitude + 1):
        for tag, vecs, w in (("Z", F.cycles[p], p), ("C", F.complements[p], p + 1)):
            for k, v in enumerate(vecs):
                i = _is_basis_vec(v, dom)
                names.append(A.names[i] if i is not None else f"{tag.lower()}{p}_{k}")
                degrees.append(p)
                weights.append(w)
                splitting.append(v)
                kinds.append(tag)
    if len(names) != A.dim or len(set(names)) != len(names):
        raise InvariantError("adapted basis has the wrong size")
    n = len(names)
    P = Matrix.from_columns(splitting, n, dom)
    Pinv = inverse(P)
    d_terms: dict = {}
    m_terms: dict = {}

    def split(vec, w_in):
        out: dict = {}
        for k, c in Pinv.apply(vec).items():
            l = w_in - weights[k]
            if l < 0:
                raise InvariantError("structure map raises filtration weight")
            out.setdefault(l, {})[k] = c
        return out

    for i in range(n):
        for l, vec in split(A.d(splitting[i]), weights[i]).items():
            d_terms.setdefault(l, {})[i] = vec
        for j in range(n):
            prod = A.mul(splitting[i], splitting[j])
            for l, vec in split(prod, weights[i] + weights[j]).items():
                m_terms.setdefault(l, {})[(i, j)] = vec
    unit = 0
    B = DGAlgebra(tuple(names), tuple(degrees), unit, dict(m_terms.get(0, {})), dict(d_terms.get(0, {})),
                  dom, tuple(weights), f"gr({A.label})" if A.label else "gr")
    G = AssociatedGraded(B, A, F, tuple(splitting), tuple(kinds), Pinv)
    return G, d_terms, m_terms


def associated_graded(A: DGAlgebra, seed=None) -> AssociatedGraded:
    F = canonical_filtration(A, seed)
    G, _, _ = _expand(A, F)
    return G


def rees_expansion(A: DGAlgebra, seed=None) -> ReesExpansion:
    F = canonical_filtration(A, seed)
    G, d_terms, m_terms = _expand(A, F)
    R = ReesExpansion(G, d_terms, m_terms)
    R.check_reconstruction()
    return R
