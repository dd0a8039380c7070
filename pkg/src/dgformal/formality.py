"""Kodaira-Spencer cocycle of the Rees deformation and stagewise formality tests.

Conventions.  The Rees deformation is delta_h = sum_l h^l delta_l on B, where
delta_l is the shifted cochain of (d_l + m_l); delta_l has weight -l.  Its
h-derivative

    theta = sum_{l >= 1} l h^{l-1} delta_l

is a D_h = [delta_h, -] cocycle of degree 2 whose h^k coefficient has weight
-(k + 1).  Stage p asks whether theta = [delta_h, g] mod h^p for some degree-1
cochain g = sum_{j < p} h^j g_j with g_j of weight -(j + 1).  Since weight
determines the h-power, every h-series here is stored as one Cochain on B and
truncated by weight.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dga import DGAlgebra, require_valid
from .errors import InputError, InvariantError
from .filtration import AssociatedGraded, ReesExpansion, rees_expansion
from .hochschild import Cochain, HochschildComplex, bracket, compose, structure_cochain
from .linalg import Echelon

ZERO = "ZERO"
NONZERO = "NONZERO"
SLICE_EMPTY = "SLICE_EMPTY"

FORMAL = "FORMAL"
NON_FORMAL = "NON_FORMAL"
P_FORMAL = "P_FORMAL"


def _entry_weight(weights, inp, out) -> int:
    return weights[out] - sum(weights[i] for i in inp)


def weight_part(phi: Cochain, weights, keep) -> Cochain:
    """Terms of phi whose weight w satisfies keep(w)."""
    out = {}
    for inp, vec in phi.entries.items():
        part = {o: c for o, c in vec.items() if keep(_entry_weight(weights, inp, o))}
        if part:
            out[inp] = part
    return Cochain(phi.degree, out)


def format_cochain(phi: Cochain, B: DGAlgebra) -> list:
    rows = []
    for inp in sorted(phi.entries, key=lambda k: (len(k), k)):
        for o, c in sorted(phi.entries[inp].items()):
            rows.append({"inputs": [B.names[i] for i in inp], "output": B.names[o],
                         "weight": _entry_weight(B.weights, inp, o), "coeff": B.domain.format(c)})
    return rows


# -- the cocycle --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KSCocycle:
    rees: ReesExpansion
    terms: dict            # l -> shifted (d_l + m_l)
    deformation: Cochain   # delta_h as a single cochain
    cochain: Cochain       # theta as a single cochain
    closed: bool = True

    @property
    def algebra(self) -> DGAlgebra:
        return self.rees.algebra

    @property
    def max_order(self) -> int:
        """Largest l with a nonzero delta_l."""
        return max((l for l, t in self.terms.items() if t and l), default=0)

    def is_zero(self) -> bool:
        return self.cochain.is_zero()

    def coefficient(self, k: int) -> Cochain:
        """Coefficient of h^k, which has weight -(k + 1)."""
        return weight_part(self.cochain, self.algebra.weights, lambda w: w == -(k + 1))

    def truncate(self, p: int) -> Cochain:
        """theta mod h^p."""
        return weight_part(self.cochain, self.algebra.weights, lambda w: w >= -p)

    def to_json(self) -> dict:
        B = self.algebra
        return {
            "zero": self.is_zero(),
            "closed": self.closed,
            "max_order": self.max_order,
            "coefficients": {str(k): format_cochain(self.coefficient(k), B)
                             for k in range(self.max_order)},
        }


def _coerce_rees(R, seed=None) -> ReesExpansion:
    if isinstance(R, ReesExpansion):
        return R
    if isinstance(R, DGAlgebra):
        require_valid(R)
        return rees_expansion(R, seed)
    raise InputError("expected a ReesExpansion or a DGAlgebra")


def ks_cocycle(R, seed=None) -> KSCocycle:
    """theta from a ReesExpansion (or from a DGAlgebra, expanding it first)."""
    R = _coerce_rees(R, seed)
    B = R.algebra
    terms = {}
    for l in sorted(set(R.d_terms) | set(R.m_terms)):
        terms[l] = structure_cochain(R.d_terms.get(l, {}), R.m_terms.get(l, {}), B.degrees, B.domain)
    delta = Cochain(2)
    theta = Cochain(2)
    for l, t in terms.items():
        delta = delta.add(t)
        if l:
            theta = theta.add(t, B.domain.convert(l))
    if not bracket(delta, delta, B.degrees).is_zero():
        raise InvariantError("the Rees structure cochain does not square to zero")
    if not bracket(delta, theta, B.degrees, B.unit).is_zero():
        raise InvariantError("Kodaira-Spencer cochain is not closed; sign conventions are broken")
    return KSCocycle(R, terms, delta, theta, True)


# -- stage tests --------------------------------------------------------------


class _Context:
    """Shared, cached data for the stage tests of one algebra."""

    def __init__(self, A, seed=None):
        if isinstance(A, KSCocycle):
            self.ks = A
        else:
            self.ks = ks_cocycle(A, seed)
        self.B = self.ks.algebra
        self.complex = HochschildComplex(self.B)
        self.delta = self.ks.deformation
        self._images: dict = {}
        self._solutions: dict = {}

    def images(self, j: int) -> tuple:
        """(slice, [delta_h, e] for each elementary e in C^1 of weight -(j+1))."""
        hit = self._images.get(j)
        if hit is None:
            S = self.complex.slice(1, -(j + 1), with_differential=False)
            one = self.B.domain.one
            imgs = [bracket(self.delta, Cochain(1, {inp: {o: one}}), self.B.degrees, self.B.unit)
                    for inp, o in S.basis]
            hit = self._images[j] = (S, imgs)
        return hit


@dataclass(frozen=True, eq=False)
class ObstructionReport:
    stage: int
    status: str
    algebra: DGAlgebra
    gamma: Cochain | None = None          # g with theta = [delta_h, g] mod h^p
    residual: dict | None = None          # normal form of theta modulo the image
    projection: dict | None = None        # coordinates in HH^2(B)_{-p}
    hh2_dim: int | None = None
    unknowns: int = 0
    equations: int = 0
    rank: int = 0
    notes: tuple = ()

    @property
    def passed(self) -> bool:
        return self.status != NONZERO

    def to_json(self) -> dict:
        B = self.algebra
        out = {"stage": self.stage, "status": self.status, "unknowns": self.unknowns,
               "equations": self.equations, "rank": self.rank}
        if self.gamma is not None:
            out["gamma"] = format_cochain(self.gamma, B)
        if self.residual is not None:
            out["class_coordinates"] = [
                {"h": k, "inputs": [B.names[i] for i in inp], "output": B.names[o],
                 "coeff": B.domain.format(c)}
                for (k, inp, o), c in sorted(self.residual.items(), key=lambda kv: (kv[0][0], len(kv[0][1]), kv[0][1:]))]
        if self.projection is not None:
            out["hh2_projection"] = {str(i): B.domain.format(c) for i, c in sorted(self.projection.items())}
            out["hh2_dim"] = self.hh2_dim
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _solve_stage(ctx: _Context, p: int):
    """Assemble and solve theta = [delta_h, g] mod h^p.

    Returns (gamma or None, residual, unknowns, equations, rank)."""
    B = ctx.B
    C = ctx.complex
    weights = B.weights
    targets = [C.slice(2, -(k + 1), with_differential=False) for k in range(p)]
    offsets, total = [], 0
    for T in targets:
        offsets.append(total)
        total += T.dim
    row_key = {}
    for k, T in enumerate(targets):
        for r, (inp, o) in enumerate(T.basis):
            row_key[offsets[k] + r] = (k, inp, o)

    def coords(phi: Cochain) -> dict:
        vec = {}
        for k, T in enumerate(targets):
            part = weight_part(phi, weights, lambda w, k=k: w == -(k + 1))
            for r, c in T.coordinates(part).items():
                vec[offsets[k] + r] = c
        return vec

    ech = Echelon(B.domain, track=True)
    labels = []
    for j in range(p):
        S, imgs = ctx.images(j)
        for e, img in enumerate(imgs):
            ech.add(coords(weight_part(img, weights, lambda w: w >= -p)), len(labels))
            labels.append((j, S.basis[e]))
    theta = ctx.ks.truncate(p)
    res, combo = ech.reduce(coords(theta), {})
    if res:
        residual = {row_key[r]: c for r, c in res.items()}
        return None, residual, len(labels), total, ech.rank
    entries: dict = {}
    for lab, c in combo.items():
        _, (inp, o) = labels[lab]
        entries.setdefault(inp, {})[o] = c
    gamma = Cochain(1, entries)
    check = weight_part(bracket(ctx.delta, gamma, B.degrees, B.unit), weights, lambda w: w >= -p)
    if check.add(theta, -B.domain.one):
        raise InvariantError(f"stage {p} solution does not reproduce theta")
    return gamma, None, len(labels), total, ech.rank


def _projection(ctx: _Context, p: int, previous: Cochain | None):
    """Class in HH^2(B)_{-p} of the h^{p-1} coefficient of theta - [delta_h, g']."""
    B = ctx.B
    C = ctx.complex
    lead = ctx.ks.coefficient(p - 1)
    if previous is not None and previous:
        corr = weight_part(bracket(ctx.delta, previous, B.degrees, B.unit), B.weights, lambda w: w == -p)
        lead = lead.add(corr, -B.domain.one)
    base = C.delta
    if not bracket(base, lead, B.degrees, B.unit).is_zero():
        raise InvariantError(f"leading stage-{p} obstruction is not a cocycle of B")
    S = C.slice(2, -p)
    comp = C.component(2, -p)
    ech = Echelon(B.domain, track=True)
    for j, col in enumerate(C.slice(1, -p).differential.columns()):
        ech.add(col, ("b", j))
    for i, rep in enumerate(comp.representatives):
        ech.add(S.coordinates(rep), ("h", i))
    res, combo = ech.reduce(S.coordinates(lead), {})
    if res:
        raise InvariantError("obstruction cocycle is outside the cocycle space")
    coords = {lab[1]: c for lab, c in combo.items() if lab[0] == "h" and c}
    return coords, comp.dim


def _stage(ctx: _Context, p: int) -> ObstructionReport:
    if p < 1:
        raise InputError("stage must be at least 1")
    hit = ctx._solutions.get(p)
    if hit is not None:
        return hit
    B = ctx.B
    if ctx.ks.truncate(p).is_zero():
        rep = ObstructionReport(p, ZERO, B, gamma=Cochain(1))
    else:
        gamma, residual, nu, ne, rk = _solve_stage(ctx, p)
        if gamma is not None:
            top = ctx.complex.slice(2, -p, with_differential=False)
            status = SLICE_EMPTY if top.dim == 0 else ZERO
            notes = ("no degree-2 cochains of weight -%d; the stage passes for degree reasons" % p,) \
                if status == SLICE_EMPTY else ()
            rep = ObstructionReport(p, status, B, gamma=gamma, unknowns=nu, equations=ne, rank=rk, notes=notes)
        else:
            previous = None
            notes = ()
            if p > 1:
                prev = _stage(ctx, p - 1)
                if prev.passed:
                    previous = prev.gamma
            projection = hh2 = None
            if p == 1 or previous is not None:
                projection, hh2 = _projection(ctx, p, previous)
            else:
                notes = ("an earlier stage already fails; no projection to HH^2(B)",)
            rep = ObstructionReport(p, NONZERO, B, residual=residual, projection=projection, hh2_dim=hh2,
                                    unknowns=nu, equations=ne, rank=rk, notes=notes)
    ctx._solutions[p] = rep
    return rep


def obstruction_test(A, p: int, seed=None, context: _Context | None = None) -> ObstructionReport:
    """Decide whether theta vanishes in the Rees Hochschild complex mod h^p."""
    ctx = context or _Context(A, seed)
    return _stage(ctx, p)


# -- vanishing bound ----------------------------------------------------------


def _graded_algebra(B) -> DGAlgebra:
    if isinstance(B, AssociatedGraded):
        return B.algebra
    if isinstance(B, DGAlgebra) and B.weights is not None:
        return B
    raise InputError("vanishing_bound needs a weight-graded algebra")


def vanishing_bound(B) -> int | None:
    """P0 with every degree-2 cochain slice of weight -p empty for p > P0, or None.

    A component with q inputs of degrees d_i has map-degree 2 - q, so an
    output of degree e needs sum(d_i - 1) = e - 2.  When no reduced element
    has degree 1, and degrees 0 and >= 2 do not both occur, every summand has
    the same sign and the arity is bounded; the finitely many configurations
    are then enumerated.
    """
    B = _graded_algebra(B)
    types = sorted({(B.degrees[i], B.weights[i]) for i in range(B.dim) if i != B.unit})
    if not types:
        return 0
    degs = {d for d, _ in types}
    if 1 in degs or (0 in degs and any(d >= 2 for d in degs)):
        return None
    outputs = sorted({(B.degrees[i], B.weights[i]) for i in range(B.dim)})
    top = max(B.degrees)
    qmax = 2 if degs == {0} else max(top - 2, 0)
    best = 0

    def rec(start, q, dsum, wsum):
        nonlocal best
        if q >= 1:
            for do, wo in outputs:
                if dsum == do - 2 and wsum - wo > best:
                    best = wsum - wo
        if q == qmax:
            return
        for t in range(start, len(types)):
            d, w = types[t]
            rec(t, q + 1, dsum + d - 1, wsum + w)

    rec(0, 0, 0, 0)
    return best


# -- the A-infinity morphism --------------------------------------------------


def _diamond(G: Cochain, F: Cochain, weights, target: int, one) -> Cochain:
    """Weight-`target` part of sum_q G_q(F (x) ... (x) F); F has shifted degree 0."""
    idx = F.by_output()
    fw = {}
    for y, cands in idx.items():
        fw[y] = [(J, c, weights[y] - sum(weights[i] for i in J)) for J, c in cands]
    out: dict = {}
    for ys, vec in G.entries.items():
        for o, g in vec.items():
            wg = _entry_weight(weights, ys, o)
            need = target - wg
            if need > 0:
                continue
            def rec(pos, budget, key, coeff):
                if pos == len(ys):
                    if budget == 0:
                        tgt = out.setdefault(key, {})
                        v = tgt.get(o)
                        v = coeff * g if v is None else v + coeff * g
                        if v:
                            tgt[o] = v
                        else:
                            tgt.pop(o, None)
                    return
                for J, c, w in fw.get(ys[pos], ()):
                    if w < budget:
                        continue
                    rec(pos + 1, budget - w, key + J, coeff * c)

            rec(0, need, (), one)
    return Cochain(G.degree + F.degree - 1, {k: v for k, v in out.items() if v})


@dataclass(frozen=True, eq=False)
class AInfinityMorphism:
    """iota = sum_i h^i F_i from (B[h], delta_0) to (B[h], delta_h), mod h^(order+1).

    F_0 is the identity; F_i has weight -i.  ``verified`` records that
    delta_h o iota = iota o delta_0 holds exactly through h^order.
    """

    algebra: DGAlgebra
    components: dict
    order: int
    verified: bool = False

    def total(self) -> Cochain:
        out = Cochain(1)
        for c in self.components.values():
            out = out.add(c)
        return out

    def to_json(self) -> dict:
        return {"order": self.order, "verified": self.verified,
                "components": {str(i): format_cochain(c, self.algebra)
                               for i, c in sorted(self.components.items()) if i}}


def _identity(B: DGAlgebra) -> Cochain:
    one = B.domain.one
    return Cochain(1, {(i,): {i: one} for i in range(B.dim) if i != B.unit})


def materialize_iota(ctx: _Context, gamma: Cochain, order: int) -> AInfinityMorphism:
    """Integrate d/dh F = -gamma . F from F_0 = id, through h^order."""
    B = ctx.B
    w = B.weights
    dom = B.domain
    comps = {0: _identity(B)}
    total = comps[0]
    for k in range(order):
        step = _diamond(gamma, total, w, -(k + 1), dom.one)
        comps[k + 1] = step.scale(-dom.one / dom.convert(k + 1))
        total = total.add(comps[k + 1])
    iota = AInfinityMorphism(B, comps, order)
    check_iota(ctx, iota)
    return AInfinityMorphism(B, comps, order, True)


def check_iota(ctx: _Context, iota: AInfinityMorphism, order: int | None = None):
    """delta_h o iota == iota o delta_0 through h^order (default: iota.order)."""
    B = ctx.B
    order = iota.order if order is None else order
    F = iota.total()
    keep = lambda w: w >= -order  # noqa: E731
    lhs = Cochain(2)
    for target in range(0, -order - 1, -1):
        lhs = lhs.add(_diamond(ctx.delta, F, B.weights, target, B.domain.one))
    rhs = weight_part(compose(F, ctx.complex.delta, B.degrees, B.unit), B.weights, keep)
    diff = weight_part(lhs, B.weights, keep).add(rhs, -B.domain.one)
    if diff:
        raise InvariantError(f"iota fails delta_h o iota = iota o delta_0 mod h^{order + 1}")
    return True


# -- certification ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FormalityVerdict:
    kind: str
    stage: int                   # first failing stage, or the last stage tested
    reports: tuple
    bound: int | None
    iota: AInfinityMorphism | None = None
    notes: tuple = ()
    massey_check: dict | None = None

    @property
    def obstruction(self) -> ObstructionReport | None:
        return self.reports[-1] if self.kind == NON_FORMAL else None

    def label(self) -> str:
        if self.kind == FORMAL:
            return FORMAL
        return f"{self.kind}({self.stage})"

    def __str__(self):
        return self.label()

    def to_json(self) -> dict:
        out = {"verdict": self.kind, "label": self.label(), "stage": self.stage,
               "vanishing_bound": self.bound,
               "stages": [r.to_json() for r in self.reports]}
        if self.kind == NON_FORMAL:
            out["first_obstruction"] = self.stage
        out["iota"] = self.iota.to_json() if self.iota is not None else None
        if self.massey_check is not None:
            out["massey_check"] = self.massey_check
        out["notes"] = list(self.notes)
        return out


def certify(A, p_max: int, seed=None, massey: bool = False) -> FormalityVerdict:
    """Run stages 1..p_max; FORMAL needs all passing stages plus a vanishing bound <= p_max."""
    if p_max < 1:
        raise InputError("p_max must be at least 1")
    ctx = _Context(A, seed)
    reports = []
    notes = []
    for p in range(1, p_max + 1):
        rep = _stage(ctx, p)
        reports.append(rep)
        if not rep.passed:
            verdict = FormalityVerdict(NON_FORMAL, p, tuple(reports), vanishing_bound(ctx.B), None,
                                       tuple(notes))
            return _with_massey(verdict, ctx) if massey else verdict
    bound = vanishing_bound(ctx.B)
    gamma = reports[-1].gamma
    iota = materialize_iota(ctx, gamma, p_max)
    if bound is not None and bound <= p_max:
        kind = FORMAL
        notes.append(f"degree-2 cochains of weight -p vanish for p > {bound}")
    else:
        kind = P_FORMAL
        notes.append("no vanishing bound within p_max" if bound is not None
                     else "vanishing bound unavailable (degree bookkeeping is not one-signed)")
    verdict = FormalityVerdict(kind, p_max, tuple(reports), bound, iota, tuple(notes))
    return _with_massey(verdict, ctx) if massey else verdict


def _with_massey(verdict: FormalityVerdict, ctx: _Context) -> FormalityVerdict:
    """Cross-check stage 1 against triple Massey products of the degree-1 classes."""
    from .dga import cohomology
    from .massey import massey_triple

    src = ctx.ks.rees.graded.source
    if not src.domain.is_field:
        return verdict
    H = cohomology(src)
    ones = H.algebra.in_degree(1)
    found = None
    for a in ones:
        for b in ones:
            for c in ones:
                r = massey_triple(H, a, b, c)
                if r.defined and r.nonzero:
                    found = [H.algebra.names[i] for i in (a, b, c)]
                    break
            if found:
                break
        if found:
            break
    stage1 = verdict.reports[0].status == NONZERO
    check = {"nonzero_triple_product": found, "stage1_nonzero": stage1}
    return FormalityVerdict(verdict.kind, verdict.stage, verdict.reports, verdict.bound, verdict.iota,
                            verdict.notes, check)
