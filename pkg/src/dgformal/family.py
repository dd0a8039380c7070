"""One-parameter families over QQ[t]: fibers, flatness and the fiberwise scan."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .dga import DGAlgebra, cohomology, validate
from .errors import DomainError, InputError, InvariantError
from .filtration import AssociatedGraded, associated_graded
from .formality import FORMAL, NON_FORMAL, certify
from .hochschild import HochschildComplex
from .linalg import det, invariant_factors
from .parallel import parallel_map
from .scalars import QQ, QQ_T, QQ_T_FRAC, DomainKind, irreducible_factors, rational_roots


@dataclass(frozen=True, eq=False)
class FamilyAlgebra:
    """A DG algebra with structure constants in QQ[t] (or QQ(t)), viewed as a
    family over the affine line."""

    algebra: DGAlgebra

    def __post_init__(self):
        if not self.algebra.domain.has_parameter:
            raise DomainError("a family needs scalars in QQ[t] or QQ(t)")
        report = validate(self.algebra.with_domain(QQ_T_FRAC))
        if not report.ok:
            raise InputError(f"family is not a DG algebra over QQ(t): {report.violations[0]}")

    @property
    def label(self) -> str:
        return self.algebra.label


def _family(F) -> FamilyAlgebra:
    if isinstance(F, FamilyAlgebra):
        return F
    if isinstance(F, DGAlgebra):
        return FamilyAlgebra(F)
    raise InputError("expected a FamilyAlgebra or a DGAlgebra over QQ[t]")


def _poly_family(F: FamilyAlgebra) -> DGAlgebra:
    A = F.algebra
    if A.domain.kind is not DomainKind.POLY_T:
        raise DomainError("this check needs polynomial structure constants (QQ[t])")
    return A


def fiber(F, c) -> DGAlgebra:
    """Substitute t = c; raises PoleError at a pole."""
    F = _family(F)
    A = F.algebra
    c = QQ.convert(c) if not isinstance(c, str) else QQ.parse(c)
    label = f"{A.label}@t={QQ.format(c)}" if A.label else None
    out = A.map_scalars(lambda x: QQ.convert(A.domain.evaluate(x, c)), QQ, label)
    report = validate(out)
    if not report.ok:
        raise InvariantError(f"fiber at t={QQ.format(c)} is not a DG algebra: {report.violations[0]}")
    return out


def generic_fiber(F) -> DGAlgebra:
    """The same tables read over QQ(t)."""
    F = _family(F)
    A = F.algebra
    label = f"{A.label}@generic" if A.label else None
    return A.map_scalars(QQ_T_FRAC.convert, QQ_T_FRAC, label)


# -- flatness -----------------------------------------------------------------


def _fmt(p) -> str:
    return QQ_T.format(p)


@dataclass(frozen=True)
class DegreeFlatness:
    degree: int
    generic_betti: int
    torsion: tuple          # nonunit invariant factors of d_{p-1}
    exceptional: tuple      # rational points where the fiber Betti number jumps
    factors: tuple          # irreducible factors responsible for jumps
    fiber_betti: dict       # exceptional rational point -> Betti number there

    def to_json(self) -> dict:
        return {"degree": self.degree, "generic_betti": self.generic_betti,
                "torsion": [_fmt(f) for f in self.torsion],
                "exceptional_points": [QQ.format(c) for c in self.exceptional],
                "exceptional_factors": [_fmt(f) for f in self.factors],
                "fiber_betti": {QQ.format(c): b for c, b in self.fiber_betti.items()}}


@dataclass(frozen=True)
class FlatnessReport:
    degrees: tuple
    spot_checks: dict       # non-exceptional point -> fiber Betti tuple (all equal generic)

    @property
    def flat(self) -> bool:
        return not any(d.torsion or d.exceptional or d.factors for d in self.degrees)

    @property
    def generic_betti(self) -> tuple:
        return tuple(d.generic_betti for d in self.degrees)

    @property
    def exceptional_points(self) -> list:
        return sorted({c for d in self.degrees for c in d.exceptional})

    def to_json(self) -> dict:
        return {"flat": self.flat, "generic_betti": list(self.generic_betti),
                "exceptional_points": [QQ.format(c) for c in self.exceptional_points],
                "degrees": [d.to_json() for d in self.degrees],
                "spot_checks": {QQ.format(c): list(b) for c, b in self.spot_checks.items()}}


def flatness_check(F, spot_checks: int = 3) -> FlatnessReport:
    """Cohomology of the QQ[t]-complex degreewise, via Smith normal forms."""
    F = _family(F)
    A = _poly_family(F)
    top = A.amplitude
    factors = {p: invariant_factors(A.diff_matrix(p)) for p in range(-1, top + 1)}
    dims = {p: len(A.in_degree(p)) for p in range(top + 1)}
    bad_polys = {}
    out = []
    for p in range(top + 1):
        generic = dims[p] - len(factors[p]) - len(factors[p - 1])
        torsion = tuple(f for f in factors[p - 1] if not f.is_ground)
        jumps = [f for f in factors[p] + factors[p - 1] if not f.is_ground]
        irr = []
        for f in jumps:
            for g in irreducible_factors(f):
                if g not in irr:
                    irr.append(g)
        irr.sort(key=lambda g: (g.degree(), _fmt(g)))
        points = sorted({r for g in irr for r in rational_roots(g)})
        bad_polys[p] = irr
        out.append((p, generic, torsion, tuple(points), tuple(irr)))
    fib = {}
    degrees = []
    for p, generic, torsion, points, irr in out:
        fb = {}
        for c in points:
            if c not in fib:
                fib[c] = cohomology(fiber(F, c)).betti()
            fb[c] = fib[c][p]
        degrees.append(DegreeFlatness(p, generic, torsion, points, irr, fb))
    generic = tuple(d.generic_betti for d in degrees)
    checks = {}
    c = 0
    while len(checks) < spot_checks and c < 50:
        x = QQ.convert(c)
        if not any(g(x) == 0 for irr in bad_polys.values() for g in irr):
            try:
                b = cohomology(fiber(F, x)).betti()
            except DomainError:
                b = None
            if b is not None:
                if b != generic:
                    raise InvariantError(f"fiber Betti numbers at t={c} differ from the generic ones")
                checks[x] = b
        c += 1
    return FlatnessReport(tuple(degrees), checks)


# -- Hochschild modules -------------------------------------------------------


@dataclass(frozen=True)
class ModulePresentation:
    n: int
    w: int
    free_rank: int
    torsion: tuple
    cochains: int = 0

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def torsion_free(self) -> bool:
        return not self.torsion

    def to_json(self) -> dict:
        return {"n": self.n, "w": self.w, "free_rank": self.free_rank,
                "torsion": [_fmt(f) for f in self.torsion], "cochains": self.cochains}


def family_graded(Bfam) -> AssociatedGraded:
    """gr of a family over QQ[t], with the freeness of the filtration checked."""
    if isinstance(Bfam, AssociatedGraded):
        G = Bfam
    else:
        G = associated_graded(_poly_family(_family(Bfam)))
    if G.algebra.domain.kind is not DomainKind.POLY_T:
        raise DomainError("hh_module needs a family over QQ[t]")
    from .linalg import Matrix

    P = Matrix.from_columns(list(G.splitting), G.algebra.dim, QQ_T)
    if not det(P).is_ground:
        raise InputError("filtration steps are not free QQ[t]-summands")
    return G


class _ModuleComplex:
    def __init__(self, G: AssociatedGraded):
        self.C = HochschildComplex(G)
        self._factors: dict = {}

    def factors(self, n: int, w: int) -> list:
        key = (n, w)
        if key not in self._factors:
            self._factors[key] = invariant_factors(self.C.slice(n, w).differential)
        return self._factors[key]

    def module(self, n: int, w: int) -> ModulePresentation:
        S = self.C.slice(n, w)
        out_f = self.factors(n, w)
        in_f = self.factors(n - 1, w)
        free = S.dim - len(out_f) - len(in_f)
        torsion = tuple(f for f in in_f if not f.is_ground)
        return ModulePresentation(n, w, free, torsion, S.dim)


def hh_module(Bfam, n: int, w: int) -> ModulePresentation:
    """HH^n(B)_w of a QQ[t]-family as free rank plus torsion invariant factors."""
    return _ModuleComplex(family_graded(Bfam)).module(n, w)


# -- the scan -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PointResult:
    point: object
    verdict: object
    seconds: float

    def to_json(self) -> dict:
        v = self.verdict
        return {"point": "generic" if self.point is None else QQ.format(self.point),
                "verdict": v.kind, "label": v.label(),
                "first_obstruction": v.stage if v.kind == NON_FORMAL else None}


@dataclass(frozen=True, eq=False)
class ScanReport:
    flatness: FlatnessReport
    modules: tuple
    generic: PointResult
    points: tuple
    hypotheses: bool
    hh2_vanishing: bool
    consistent: bool
    notes: tuple

    def to_json(self, timings: bool = False) -> dict:
        dash = {"hypotheses": "PASS" if self.hypotheses else "FAIL",
                "flatness": "PASS" if self.flatness.flat else "FAIL",
                "coherence": "PASS" if all(m.torsion_free for m in self.modules) else "FAIL",
                "hh2_modules_zero": self.hh2_vanishing,
                "conclusion_consistent": self.consistent,
                "notes": list(self.notes)}
        out = {"dashboard": dash, "flatness": self.flatness.to_json(),
               "modules": [m.to_json() for m in self.modules],
               "generic": self.generic.to_json(),
               "points": [p.to_json() for p in self.points]}
        if timings:
            out["timings"] = {"generic": self.generic.seconds,
                              **{QQ.format(p.point): p.seconds for p in self.points}}
        return out


def _timed_certify(A, p_max):
    start = time.perf_counter()
    v = certify(A, p_max)
    return v, time.perf_counter() - start


def theorem_q_scan(F, points, p_max: int, threads: int | None = None) -> ScanReport:
    """Flatness, HH module torsion and fiberwise certification in one report.

    Raises InvariantError on hypotheses PASS + generic FORMAL + a NON_FORMAL fiber.
    """
    F = _family(F)
    pts = [QQ.parse(p) if isinstance(p, str) else QQ.convert(p) for p in points]
    fibers = [fiber(F, c) for c in pts]            # pole errors surface before any work
    flat = flatness_check(F)
    G = family_graded(F)
    M = _ModuleComplex(G)
    modules = tuple(M.module(n, w) for n in (1, 2, 3) for w in range(-p_max, 0))
    coherent = all(m.torsion_free for m in modules)
    hypotheses = flat.flat and coherent
    hh2_zero = all(m.is_zero for m in modules if m.n == 2)
    gv, gt = _timed_certify(generic_fiber(F), p_max)
    results = parallel_map(lambda A: _timed_certify(A, p_max), fibers, threads)
    per_point = tuple(PointResult(c, v, s) for c, (v, s) in zip(pts, results))
    notes = []
    if not flat.flat:
        notes.append("cohomology jumps at " + ", ".join(
            f"t={QQ.format(c)}" for c in flat.exceptional_points) if flat.exceptional_points
            else "cohomology modules have torsion without rational jump points")
    if not coherent:
        notes.append("some Hochschild modules have torsion")
    bad = [p for p in per_point if p.verdict.kind == NON_FORMAL]
    if hypotheses and gv.kind == FORMAL and bad:
        raise InvariantError("hypotheses hold and the generic fiber is formal, yet fibers "
                             + ", ".join(QQ.format(p.point) for p in bad) + " are not")
    return ScanReport(flat, modules, PointResult(None, gv, gt), per_point, hypotheses, hh2_zero, True,
                      tuple(notes))
