import pytest

from dgformal import (associated_graded, certify, cohomology, ks_cocycle, massey_triple,
                      obstruction_test, rees_expansion, vanishing_bound)
from dgformal.errors import InputError, InvariantError
from dgformal.formality import (FORMAL, NON_FORMAL, NONZERO, P_FORMAL, SLICE_EMPTY, ZERO, AInfinityMorphism,
                                _Context, check_iota, weight_part)
from dgformal.hochschild import HochschildComplex, bracket
from dgformal.samples import e0, e1, e2, e4, random_algebras, truncated_pair

from oracles import dense_rank, frac, sparse_rank


def higher_terms_vanish(A, seed=None):
    R = rees_expansion(A, seed)
    return all(not t for l, t in R.d_terms.items() if l) and all(not t for l, t in R.m_terms.items() if l)


# -- the Kodaira-Spencer cochain --------------------------------------------------

@pytest.mark.parametrize("make,zero", [(e0, True), (e2, True), (e4, True), (e1, False), (truncated_pair, False)])
def test_ks_examples(make, zero):
    K = ks_cocycle(make())
    assert K.is_zero() == zero
    B = K.algebra
    assert bracket(K.deformation, K.cochain, B.degrees, B.unit).is_zero()
    assert bracket(K.deformation, K.deformation, B.degrees).is_zero()


def test_ks_weight_bookkeeping():
    K = ks_cocycle(e1())
    B = K.algebra
    for k in range(K.max_order):
        assert K.coefficient(k).weights_of(B.weights) <= {-(k + 1)}
    assert K.cochain.weights_of(B.weights) <= {-k for k in range(1, 2 * B.amplitude + 1)}


def test_ks_random_algebras():
    for i, A in enumerate(random_algebras(20, seed=9)):
        K = ks_cocycle(A, seed=i)
        assert K.closed
        assert K.is_zero() == higher_terms_vanish(A, seed=i)
        if A.has_zero_differential():
            assert K.is_zero()


def test_ks_rejects_invalid_algebra():
    from dgformal.samples import e1_corrupted

    with pytest.raises(InputError):
        ks_cocycle(e1_corrupted())


# -- stage tests ---------------------------------------------------------------------

def test_e4_stages_zero():
    for p in (1, 2, 3):
        rep = obstruction_test(e4(), p)
        assert rep.status in (ZERO, SLICE_EMPTY)
        assert rep.gamma.is_zero()


def test_e2_stages_zero():
    ctx = _Context(e2())
    for p in range(1, 11):
        assert obstruction_test(e2(), p, context=ctx).status == ZERO


def test_e1_stage1_nonzero():
    rep = obstruction_test(e1(), 1)
    assert rep.status == NONZERO
    assert rep.residual
    assert rep.projection and rep.hh2_dim == 12
    assert rep.to_json()["status"] == NONZERO


def _stage_system(ctx, p):
    """Columns [delta_h, e] and theta in flattened (entry -> Fraction) coordinates."""
    B = ctx.B
    keep = lambda w: w >= -p  # noqa: E731

    def flat(phi):
        return {(inp, o): frac(c) for inp, vec in weight_part(phi, B.weights, keep).entries.items()
                for o, c in vec.items()}

    cols = []
    for j in range(p):
        cols += [flat(img) for img in ctx.images(j)[1]]
    return cols, flat(ctx.ks.truncate(p))


def _renumber(vecs):
    keys = {}
    out = []
    for v in vecs:
        out.append({keys.setdefault(k, len(keys)): c for k, c in v.items()})
    return out


@pytest.mark.parametrize("make,p", [(e1, 1), (truncated_pair, 1), (truncated_pair, 2), (e2, 2)])
def test_stage_status_against_rank_oracle(make, p):
    ctx = _Context(make())
    cols, theta = _stage_system(ctx, p)
    both = _renumber(cols + [theta])
    solvable = sparse_rank(both[:-1]) == sparse_rank(both)
    rep = obstruction_test(None, p, context=ctx)
    assert rep.passed == solvable


def test_zero_reports_carry_a_valid_gamma():
    A = truncated_pair()
    ctx = _Context(A)
    B = ctx.B
    for p in (1, 2, 3):
        rep = obstruction_test(A, p, context=ctx)
        assert rep.status in (ZERO, SLICE_EMPTY)
        lhs = weight_part(bracket(ctx.delta, rep.gamma, B.degrees, B.unit), B.weights, lambda w: w >= -p)
        assert lhs == ctx.ks.truncate(p)
    assert not obstruction_test(A, 1, context=ctx).gamma.is_zero()


def test_stage_must_be_positive():
    with pytest.raises(InputError):
        obstruction_test(e1(), 0)
    with pytest.raises(InputError):
        certify(e1(), 0)


# -- vanishing bound ----------------------------------------------------------------

def _c2_empty(G, p):
    return HochschildComplex(G).slice(2, -p, with_differential=False).dim == 0


def test_vanishing_bound_examples():
    assert vanishing_bound(associated_graded(e0())) == 0
    G = associated_graded(e4())
    b = vanishing_bound(G)
    assert b is not None
    assert all(_c2_empty(G, p) for p in range(b + 1, b + 6))
    G = associated_graded(e1())
    assert vanishing_bound(G) is None
    assert not any(_c2_empty(G, p) for p in range(6, 11))


def test_vanishing_bound_property_on_random_algebras():
    seen = 0
    for A in random_algebras(30, seed=17):
        G = associated_graded(A)
        b = vanishing_bound(G)
        if b is None:
            continue
        seen += 1
        assert all(_c2_empty(G, p) for p in range(b + 1, b + 6))
    assert seen >= 3


# -- certify ------------------------------------------------------------------------

def test_certify_golden():
    assert certify(e4(), 5).kind == FORMAL
    assert certify(e0(), 1).kind == FORMAL
    v = certify(e1(), 5)
    assert (v.kind, v.stage) == (NON_FORMAL, 1)
    assert v.obstruction.status == NONZERO
    assert v.iota is None
    assert certify(e2(), 5).label() == "P_FORMAL(5)"
    assert certify(truncated_pair(), 4).label() == "P_FORMAL(4)"


@pytest.mark.parametrize("make", [e1, e2, e4])
def test_verdict_independent_of_splitting(make):
    labels = {certify(make(), 3, seed=s).label() for s in range(5)}
    assert len(labels) == 1


def test_zero_differential_never_non_formal():
    for A in random_algebras(25, seed=4):
        if not A.has_zero_differential():
            continue
        v = certify(A, 1)
        assert v.kind != NON_FORMAL
        if v.bound is not None and v.bound <= 1:
            assert v.kind == FORMAL


@pytest.mark.parametrize("make,p", [(truncated_pair, 4), (e2, 5), (e4, 3)])
def test_iota_is_an_a_infinity_morphism(make, p):
    v = certify(make(), p)
    assert v.iota is not None and v.iota.verified
    ctx = _Context(make())
    assert check_iota(ctx, v.iota, p)
    for i, comp in v.iota.components.items():
        assert comp.weights_of(ctx.B.weights) <= {-i}


def test_iota_check_detects_a_broken_morphism():
    v = certify(truncated_pair(), 2)
    comps = dict(v.iota.components)
    assert not comps[1].is_zero()
    comps[1] = comps[1].scale(v.iota.algebra.domain.convert(2))
    bad = AInfinityMorphism(v.iota.algebra, comps, v.iota.order)
    with pytest.raises(InvariantError):
        check_iota(_Context(truncated_pair()), bad)


def test_verdict_json():
    data = certify(e1(), 2, massey=True).to_json()
    assert data["verdict"] == NON_FORMAL and data["first_obstruction"] == 1
    assert data["massey_check"]["stage1_nonzero"] is True
    assert data["massey_check"]["nonzero_triple_product"] is not None
    data = certify(e2(), 2).to_json()
    assert data["verdict"] == P_FORMAL and data["iota"]["verified"]


# -- Massey products ----------------------------------------------------------------

def test_e1_massey_product():
    A = e1()
    H = cohomology(A)
    r = massey_triple(H, "x1", "x1", "x2")
    assert r.defined and r.nonzero
    assert r.indeterminacy == ()
    assert r.degree == 2
    assert {H.algebra.names[k] for k in r.value} == {"[x1y]"}


def test_e1_massey_by_hand():
    """x1 x1 = 0 = d(0), x1 x2 = d(y): the product is the class of x1 y, and
    x1 y is not a boundary nor in x1.Z^1 + Z^1.x2 + B^2."""
    A = e1()
    ix = A.index
    one = A.domain.one
    x1, x2, y = ({ix(n): one} for n in ("x1", "x2", "y"))
    assert A.d(y) == A.mul(x1, x2)
    val = A.mul(x1, y)
    assert val == {ix("x1y"): one}
    deg2 = A.in_degree(2)
    span = [A.d({i: one}) for i in A.in_degree(1)]
    span += [A.mul(x1, z) for z in (x1, x2)] + [A.mul(z, x2) for z in (x1, x2)]

    def row(v):
        return [frac(v.get(i, 0)) if v.get(i) else 0 for i in deg2]

    base = dense_rank([row(v) for v in span])
    assert dense_rank([row(v) for v in span] + [row(val)]) == base + 1


def test_massey_undefined_and_zero():
    H = cohomology(e4())
    r = massey_triple(H, "e", "e", "e")
    assert not r.defined and r.status == "UNDEFINED"
    H1 = cohomology(e1())
    r = massey_triple(H1, "x1", "x1", "x1")
    assert r.defined and not r.nonzero
    with pytest.raises(InputError):
        massey_triple(H1, "x1", "nope", "x1")


def test_zero_differential_massey_products_vanish():
    for A in random_algebras(25, seed=31):
        if not A.has_zero_differential():
            continue
        H = cohomology(A)
        pos = [i for i in range(H.algebra.dim) if i != H.algebra.unit]
        for a in pos[:3]:
            for b in pos[:3]:
                for c in pos[:3]:
                    r = massey_triple(H, a, b, c)
                    assert not r.nonzero


@pytest.mark.parametrize("make", [e1, e2, e4, truncated_pair])
def test_stage1_agrees_with_massey_oracle(make):
    A = make()
    H = cohomology(A)
    ones = H.algebra.in_degree(1)
    massey_nonzero = any(massey_triple(H, a, b, c).nonzero for a in ones for b in ones for c in ones)
    stage1 = obstruction_test(A, 1).status == NONZERO
    assert stage1 == massey_nonzero
