import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dgformal.errors import DomainError, PoleError, ScalarParseError
from dgformal.linalg import (Matrix, det, invariant_factors, kernel_basis, rank, smith_normal_form,
                             solve_linear)
from dgformal.scalars import QQ, QQ_T, QQ_T_FRAC, domain_from_tag, irreducible_factors, rational_roots

from oracles import dense_rank, frac

T = QQ_T.parse("t")


def rand_poly(rng, deg=3, lo=-3, hi=3):
    return QQ_T.convert(sum((QQ_T.convert(rng.randint(lo, hi)) * T ** k for k in range(rng.randint(0, deg) + 1)),
                            QQ_T.zero))


def rand_scalar(rng, dom):
    if dom is QQ:
        return QQ.convert(Fraction(rng.randint(-50, 50), rng.randint(1, 30)))
    p = rand_poly(rng)
    if dom is QQ_T:
        return p
    q = rand_poly(rng)
    if not q:
        q = QQ_T.one
    return QQ_T_FRAC.convert(p) / QQ_T_FRAC.convert(q)


# -- scalars --------------------------------------------------------------------

@pytest.mark.parametrize("text,dom", [("3/4", QQ), ("-7", QQ), ("t^2-1", QQ_T), ("(t+1)/(t-2)", QQ_T_FRAC),
                                      ("0", QQ_T_FRAC)])
def test_serialization_round_trip(text, dom):
    assert dom.format(dom.parse(text)) == text


def test_rationals_lowest_terms():
    assert QQ.format(QQ.parse("6/4")) == "3/2"
    assert QQ.format(QQ.parse("-6/4")) == "-3/2"


def test_rational_function_normal_form():
    x = QQ_T_FRAC.parse("(2*t+2)/(2*t^2-2)")
    num, den = QQ_T_FRAC.numer_denom(x)
    assert den.LC == 1
    assert num.gcd(den) == QQ_T.one
    assert QQ_T_FRAC.format(x) == "(1)/(t-1)"


def test_zero_denominator_rejected():
    with pytest.raises(ScalarParseError, match="zero denominator"):
        QQ.parse("1/0")
    with pytest.raises(ScalarParseError):
        QQ.parse("t")          # not a rational number


def test_domain_tags():
    for d in (QQ, QQ_T, QQ_T_FRAC):
        assert domain_from_tag(d.tag) is d
    with pytest.raises(Exception):
        domain_from_tag("GF(7)")


@pytest.mark.parametrize("dom", [QQ, QQ_T, QQ_T_FRAC], ids=lambda d: d.tag)
def test_arithmetic_is_exact(dom):
    rng = random.Random(7)
    for k in range(10_000):
        a, b, c = (rand_scalar(rng, dom) for _ in range(3))
        assert (a + b) - b == a
        if k % 20 == 0:
            assert (a + b) + c == a + (b + c)
            assert a * (b + c) == a * b + a * c


def test_evaluation_and_poles():
    x = QQ_T_FRAC.parse("(t+1)/(t-2)")
    assert QQ_T_FRAC.evaluate(x, 3) == QQ.convert(4)
    with pytest.raises(PoleError):
        QQ_T_FRAC.evaluate(x, 2)


def test_factors_and_roots():
    p = QQ_T.parse("t^3-t")
    assert sorted(QQ.format(r) for r in rational_roots(p)) == ["-1", "0", "1"]
    q = QQ_T.parse("t^2+1")
    assert rational_roots(q) == []
    assert sorted(QQ_T.format(f) for f in irreducible_factors(q * q * T)) == ["t", "t^2+1"]


@given(st.fractions(max_denominator=10 ** 6))
def test_rational_format_parse(x):
    assert QQ.parse(QQ.format(QQ.convert(x))) == QQ.convert(x)


@settings(max_examples=60)
@given(st.lists(st.integers(-9, 9), min_size=1, max_size=5), st.lists(st.integers(-9, 9), min_size=1, max_size=4))
def test_ratfun_format_parse(num, den):
    n = sum((QQ_T.convert(c) * T ** k for k, c in enumerate(num)), QQ_T.zero)
    d = sum((QQ_T.convert(c) * T ** k for k, c in enumerate(den)), QQ_T.zero)
    if not d:
        return
    x = QQ_T_FRAC.convert(n) / QQ_T_FRAC.convert(d)
    assert QQ_T_FRAC.parse(QQ_T_FRAC.format(x)) == x


# -- solve / kernel ---------------------------------------------------------------

def test_solve_examples():
    assert solve_linear(Matrix.from_rows([[2]]), [3]) == [QQ.parse("3/2")]
    assert solve_linear(Matrix.from_rows([[0]]), [1]) is None
    A = Matrix.from_rows([[1, 1], [1, 1]])
    x = solve_linear(A, [2, 2])
    assert x[0] + x[1] == 2
    assert solve_linear(A, [2, 2]) == x


def test_kernel_examples():
    assert kernel_basis(Matrix.from_rows([[1, 0], [0, 1]])) == []
    (v,) = kernel_basis(Matrix.from_rows([[1, 1]]))
    assert v[0] == -v[1] != 0
    basis = kernel_basis(Matrix(2, 3))
    assert sorted(map(tuple, basis)) == sorted(tuple(QQ.one if i == j else QQ.zero for i in range(3))
                                               for j in range(3))


def test_field_required():
    A = Matrix.from_rows([[1]], QQ_T)
    with pytest.raises(DomainError):
        solve_linear(A, [1])
    with pytest.raises(DomainError):
        kernel_basis(A)
    with pytest.raises(DomainError):
        smith_normal_form(Matrix.from_rows([[1]]))
    with pytest.raises(DomainError):
        Matrix.from_rows([[1]]) @ Matrix.from_rows([[1]], QQ_T_FRAC)


def _random_rational_matrix(rng, r, c, density=0.6):
    return [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) if rng.random() < density else Fraction(0)
             for _ in range(c)] for _ in range(r)]


def test_solve_and_kernel_against_elimination_oracle():
    rng = random.Random(11)
    for _ in range(150):
        r, c = rng.randint(1, 8), rng.randint(1, 8)
        rows = _random_rational_matrix(rng, r, c)
        if rng.random() < 0.3 and r > 1:
            rows[-1] = [a + b for a, b in zip(rows[0], rows[-1])]
        A = Matrix.from_rows(rows)
        rk = dense_rank(rows)
        assert rank(A) == rk
        K = kernel_basis(A)
        assert len(K) == c - rk
        assert dense_rank([[frac(x) for x in v] for v in K] or [[0] * c]) == len(K)
        for v in K:
            assert all(sum(rows[i][j] * frac(v[j]) for j in range(c)) == 0 for i in range(r))
        b = [Fraction(rng.randint(-3, 3)) for _ in range(r)]
        x = solve_linear(A, b)
        consistent = dense_rank([row + [bi] for row, bi in zip(rows, b)]) == rk
        assert (x is not None) == consistent
        if x is not None:
            assert all(sum(rows[i][j] * frac(x[j]) for j in range(c)) == b[i] for i in range(r))
            assert solve_linear(A, b) == x


# -- Smith normal form --------------------------------------------------------------

def _poly_rows(rows):
    return Matrix.from_rows([[QQ_T.parse(x) if isinstance(x, str) else x for x in row] for row in rows], QQ_T)


def check_snf(A: Matrix):
    S = smith_normal_form(A)
    assert S.U @ A @ S.V == S.D
    for (r, c) in S.D.entries():
        assert r == c
    assert QQ_T.is_constant(det(S.U)) and det(S.U)
    assert QQ_T.is_constant(det(S.V)) and det(S.V)
    diag = S.diagonal()
    nz = [x for x in diag if x]
    assert diag[:len(nz)] == nz          # zeros at the end
    for x in nz:
        assert x.LC == 1
    for a, b in zip(nz, nz[1:]):
        assert b.rem(a) == QQ_T.zero
    return S


def test_snf_examples():
    t = "t"
    assert [QQ_T.format(x) for x in check_snf(_poly_rows([[t, 0], [0, "t^2"]])).diagonal()] == ["t", "t^2"]
    S = check_snf(_poly_rows([[t, 1]]))
    assert [QQ_T.format(x) for x in S.diagonal()] == ["1"]
    assert S.D.cols == 2 and S.D[0, 1] == QQ_T.zero
    S = check_snf(_poly_rows([[t, 0], [0, "t-1"]]))
    assert [QQ_T.format(x) for x in S.diagonal()] == ["1", "t^2-t"]


def _determinantal_divisors(A: Matrix):
    """gcd of all k x k minors, k = 1..rank (independent of the elimination)."""
    from itertools import combinations

    import sympy

    t = sympy.Symbol("t")
    M = sympy.Matrix([[sympy.sympify(QQ_T.format(x).replace("^", "**")) for x in row] for row in A.to_dense()])
    out = []
    for k in range(1, min(A.rows, A.cols) + 1):
        g = sympy.Integer(0)
        for rs in combinations(range(A.rows), k):
            for cs in combinations(range(A.cols), k):
                g = sympy.gcd(g, M.extract(list(rs), list(cs)).det())
        if g == 0:
            break
        out.append(sympy.Poly(g, t, domain="QQ").monic())
    return out


def test_snf_matches_determinantal_divisors():
    import sympy

    t = sympy.Symbol("t")
    rng = random.Random(3)
    for _ in range(25):
        r, c = rng.randint(1, 4), rng.randint(1, 4)
        A = Matrix.from_rows([[rand_poly(rng, 2) if rng.random() < 0.7 else QQ_T.zero for _ in range(c)]
                              for _ in range(r)], QQ_T)
        facs = invariant_factors(A)
        divs = _determinantal_divisors(A)
        assert len(facs) == len(divs)
        prod = sympy.Poly(1, t, domain="QQ")
        for f, dk in zip(facs, divs):
            prod = prod * sympy.Poly(sympy.sympify(QQ_T.format(f).replace("^", "**")), t, domain="QQ")
            assert prod == dk


def test_snf_random_properties():
    rng = random.Random(5)
    for _ in range(40):
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        A = Matrix.from_rows([[rand_poly(rng, 2) if rng.random() < 0.5 else QQ_T.zero for _ in range(c)]
                              for _ in range(r)], QQ_T)
        S = check_snf(A)
        assert len(S.invariant_factors()) == rank(A.convert(QQ_T_FRAC))
