"""Builders for the shipped fixtures and for random valid DG algebras."""

from __future__ import annotations

import itertools
import random

from .dga import DGAlgebra, validate
from .linalg import Matrix, _axpy, inverse
from .scalars import QQ, QQ_T, Domain


def graded_commutative(gens, max_degree: int, dgen=None, domain: Domain = QQ, label: str = "",
                       power_names: bool = True) -> DGAlgebra:
    """Free graded-commutative algebra on ``gens`` [(name, degree)] modulo
    everything of degree > max_degree, with d given on generators as
    {gen: {monomial name: coefficient}} and extended by the Leibniz rule."""
    gnames = [g for g, _ in gens]
    gdeg = [d for _, d in gens]
    ng = len(gens)

    def mono_degree(exps):
        return sum(e * d for e, d in zip(exps, gdeg))

    bounds = []
    for d in gdeg:
        if d % 2:
            bounds.append(1)
        else:
            bounds.append(max_degree // d if d else 0)
    monos = [m for m in itertools.product(*[range(b + 1) for b in bounds]) if mono_degree(m) <= max_degree]
    monos.sort(key=lambda m: (mono_degree(m), [-e for e in m]))

    def name(m):
        if not any(m):
            return "1"
        parts = []
        for g, e in zip(gnames, m):
            if e == 1:
                parts.append(g)
            elif e > 1:
                parts.append(f"{g}^{e}" if power_names else g * e)
        return "".join(parts)

    index = {m: i for i, m in enumerate(monos)}

    def mono_mul(a, b):
        c = tuple(x + y for x, y in zip(a, b))
        if mono_degree(c) > max_degree:
            return None, 0
        for k in range(ng):
            if gdeg[k] % 2 and c[k] > 1:
                return None, 0
        sign = 1
        for i in range(ng):
            if a[i] and gdeg[i] % 2:
                for j in range(i):
                    if b[j] and gdeg[j] % 2:
                        sign = -sign
        return c, sign

    mult = {}
    for a in monos:
        for b in monos:
            c, s = mono_mul(a, b)
            if c is not None and c in index:
                mult[(index[a], index[b])] = {index[c]: s}
    names = [name(m) for m in monos]
    degrees = [mono_degree(m) for m in monos]
    base = DGAlgebra.build(names, degrees, 0, mult, {}, domain, label=label, implicit_unit=False)
    byname = {n: i for i, n in enumerate(names)}
    gen_d = {}
    for g, img in (dgen or {}).items():
        k = gnames.index(g)
        unit = tuple(1 if j == k else 0 for j in range(ng))
        gen_d[unit] = {byname[t]: domain.convert(c) for t, c in img.items()}
    diff = {}
    for m in monos:
        if not any(m):
            continue
        # write m as an ordered word of generators and apply Leibniz
        word = [k for k in range(ng) for _ in range(m[k])]
        total: dict = {}
        for pos, k in enumerate(word):
            unit = tuple(1 if j == k else 0 for j in range(ng))
            dk = gen_d.get(unit)
            if not dk:
                continue
            prefix = {0: domain.one}
            for k2 in word[:pos]:
                u2 = tuple(1 if j == k2 else 0 for j in range(ng))
                prefix = base.mul(prefix, {index[u2]: domain.one})
            sign = -1 if sum(gdeg[k2] for k2 in word[:pos]) % 2 else 1
            term = base.mul(prefix, dk)
            for k2 in word[pos + 1:]:
                u2 = tuple(1 if j == k2 else 0 for j in range(ng))
                term = base.mul(term, {index[u2]: domain.one})
            _axpy(total, domain.convert(sign), term)
        if total:
            diff[index[m]] = total
    return DGAlgebra(base.names, base.degrees, 0, base.mult, diff, domain, None, label)


def e0() -> DGAlgebra:
    return DGAlgebra.build(["1"], [0], "1", {}, {}, QQ, label="E0")


def e1(domain: Domain = QQ, coeff="1", label="E1") -> DGAlgebra:
    """Heisenberg algebra: Lambda(x1, x2, y) with d(y) = coeff * x1 x2."""
    return graded_commutative([("x1", 1), ("x2", 1), ("y", 1)], 3, {"y": {"x1x2": domain.parse(coeff)}},
                              domain, label)


def e2() -> DGAlgebra:
    return DGAlgebra.build(["1", "x", "y"], [0, 1, 2], "1", {}, {"x": {"y": 1}}, QQ, label="E2")


def e3() -> DGAlgebra:
    """Heisenberg family over QQ[t]: d(y) = t x1 x2."""
    return e1(QQ_T, "t", "E3")


def e4(domain: Domain = QQ, label="E4") -> DGAlgebra:
    """QQ[e]/e^3 with deg e = 2 and zero differential."""
    return graded_commutative([("e", 2)], 4, {}, domain, label)


def e1_corrupted() -> DGAlgebra:
    """E1 with a Leibniz-violating value d(x1y) = x1x2y."""
    A = e1()
    diff = dict(A.diff)
    diff[A.index("x1y")] = {A.index("x1x2y"): QQ.one}
    return DGAlgebra(A.names, A.degrees, A.unit, A.mult, diff, A.domain, None, "E1-corrupted")


def truncated_pair() -> DGAlgebra:
    """Lambda(x, y) (x) QQ[z] truncated above degree 2, d(y) = z.

    Formal, but its Rees expansion has m_1(x, y) = xy != 0, so the
    first-order cocycle is nonzero yet exact."""
    return graded_commutative([("x", 1), ("y", 1), ("z", 2)], 2, {"y": {"z": 1}}, QQ, "pair")


def constant_family(A: DGAlgebra, label: str | None = None) -> DGAlgebra:
    return A.map_scalars(QQ_T.convert, QQ_T, label if label is not None else f"{A.label}t")


FIXTURES = {
    "E0": e0,
    "E1": e1,
    "E2": e2,
    "E3": e3,
    "E4": e4,
    "E1t": lambda: constant_family(e1(), "E1t"),
    "E4t": lambda: constant_family(e4(), "E4t"),
}


# -- random algebras ----------------------------------------------------------

_GC_SHAPES = [
    ([("a", 1), ("b", 2)], 3),
    ([("a", 1), ("b", 1)], 2),
    ([("a", 1), ("b", 2)], 2),
    ([("a", 2), ("b", 3)], 5),
    ([("a", 1), ("b", 1), ("c", 2)], 2),
    ([("a", 2), ("b", 2)], 2),
    ([("a", 1), ("b", 2)], 4),
    ([("a", 2)], 6),
    ([("a", 1), ("b", 3)], 4),
]


def _random_gc(rng: random.Random, max_dim: int):
    for _ in range(200):
        gens, top = rng.choice(_GC_SHAPES)
        probe = graded_commutative(gens, top)
        if probe.dim > max_dim:
            continue
        dgen = {}
        for g, deg in gens:
            targets = [n for n, d in zip(probe.names, probe.degrees) if d == deg + 1 and n != g]
            img = {t: rng.randint(-2, 2) for t in targets if rng.random() < 0.6}
            img = {t: c for t, c in img.items() if c}
            if img:
                dgen[g] = img
        A = graded_commutative(gens, top, dgen, QQ, "random")
        if validate(A, limit=1).ok:
            return A
    return None


def _random_square_zero(rng: random.Random, max_dim: int) -> DGAlgebra:
    n = rng.randint(2, max_dim)
    degrees = [0] + sorted(rng.randint(1, 3) for _ in range(n - 1))
    names = ["1"] + [f"v{i}" for i in range(1, n)]
    diff = {}
    # random complex: d maps degree p to p+1, d^2 = 0 forced by using a chain of
    # at most two consecutive nonzero maps composed to zero
    for i in range(1, n):
        if rng.random() < 0.5:
            targets = [j for j in range(1, n) if degrees[j] == degrees[i] + 1]
            if targets:
                j = rng.choice(targets)
                diff[names[i]] = {names[j]: rng.choice([1, 2, -1])}
    A = DGAlgebra.build(names, degrees, "1", {}, diff, QQ, label="random")
    if validate(A, limit=1).ok:
        return A
    return A.with_diff({})


def random_basis_change(A: DGAlgebra, rng: random.Random) -> DGAlgebra:
    """Conjugate the tables by a random unitriangular, degree-preserving
    change of basis that fixes the unit."""
    dom = A.domain
    n = A.dim
    cols = {}
    for i in range(n):
        col = {i: dom.one}
        if i != A.unit:
            for j in range(i):
                if j != A.unit and A.degrees[j] == A.degrees[i] and rng.random() < 0.5:
                    col[j] = dom.convert(rng.randint(-2, 2))
        cols[i] = {k: v for k, v in col.items() if v}
    P = Matrix.from_columns([cols[i] for i in range(n)], n, dom)
    Pinv = inverse(P)

    def to_new(vec):
        return Pinv.apply(vec)

    mult = {}
    diff = {}
    for i in range(n):
        di = to_new(A.d(cols[i]))
        if di:
            diff[i] = di
        for j in range(n):
            prod = to_new(A.mul(cols[i], cols[j]))
            if prod:
                mult[(i, j)] = prod
    return DGAlgebra(A.names, A.degrees, A.unit, mult, diff, dom, None, A.label)


def random_algebra(rng: random.Random, max_dim: int = 6) -> DGAlgebra:
    """A random valid DG algebra over QQ of dimension <= max_dim."""
    kind = rng.random()
    A = None
    if kind < 0.65:
        A = _random_gc(rng, max_dim)
    if A is None:
        A = _random_square_zero(rng, max_dim)
    if rng.random() < 0.5:
        A = random_basis_change(A, rng)
    return A


def random_algebras(count: int, seed: int = 0, max_dim: int = 6) -> list[DGAlgebra]:
    rng = random.Random(seed)
    return [random_algebra(rng, max_dim) for _ in range(count)]
