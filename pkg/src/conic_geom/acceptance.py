"""Acceptance checks shared by ``conic-geom verify`` and the test suite.

Each check returns a :class:`CheckResult` whose ``detail`` records every
compared quantity, so a failure report names the offending case.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import absorption, conic, sections
from .core import (
    AbsorptionFamily,
    AbsorptionQuery,
    ConeFamily,
    ConeSpec,
    PolytopeFamily,
    ParameterError,
    PolytopeSpec,
    binomial,
)
from .gfun import EvalMethod, g_cross, g_cube
from .mc import oracles
from .mc.rng import check_seed

FULL_SAMPLES = 10 ** 6
LAPLACE_CLOUDS = 50_000
PLANE_TRIALS = 10 ** 4
QUICK_NSIGMA = 6.0
NSIGMA = 4.0

PARAM_GRID = (0.25, 1.0, 4.0)
ABSORPTION_GRID = ((2, 2), (3, 2), (3, 3), (4, 2), (4, 3))


def simplex_params(n):
    return (-1.0 / (n + 1) + 0.05, 0.0, 1.0)


def cone_grid(max_n=6):
    for fam in ConeFamily:
        for n in range(1, max_n + 1):
            params = simplex_params(n) if fam is ConeFamily.SIMPLEX else PARAM_GRID
            for p in params:
                yield ConeSpec(fam, n, p)


@dataclass
class Budget:
    """Sample sizes for the randomized checks.

    ``samples=None`` uses the full sizes with 4-sigma bands. A smaller
    ``samples`` caps every Monte Carlo size at that value and widens the
    bands to 6 sigma.
    """

    samples: int | None = None
    seed: int = 0
    threads: int | None = None
    tol: float = 1e-10

    def __post_init__(self):
        self.seed = check_seed(self.seed)
        if self.samples is not None and int(self.samples) < 1:
            raise ParameterError("samples must be positive")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise ParameterError("tolerance must be positive")

    @property
    def method(self) -> EvalMethod:
        return EvalMethod.quadrature(self.tol)

    @property
    def quick(self) -> bool:
        return self.samples is not None and self.samples < FULL_SAMPLES

    @property
    def nsigma(self) -> float:
        return QUICK_NSIGMA if self.quick else NSIGMA

    def mc(self, full=FULL_SAMPLES) -> int:
        return full if self.samples is None else min(full, int(self.samples))


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name} ({self.seconds:.1f}s)"

    def as_dict(self):
        return {"criterion": self.number, "name": self.name, "passed": self.passed,
                "seconds": round(self.seconds, 3), "detail": _jsonable(self.detail)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer, int)) and not isinstance(x, bool):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _label(c: ConeSpec):
    return f"{c.family.value}({c.n},{c.param:.6g})"


def check_normalization(budget: Budget) -> CheckResult:
    worst_sum = worst_odd = 0.0
    for c in cone_grid():
        v = conic.intrinsic_volumes(c, budget.method)
        worst_sum = max(worst_sum, abs(v.total() - 1.0))
        worst_odd = max(worst_odd, abs(v.odd_sum() - 0.5))
    ok = worst_sum <= 1e-6 and worst_odd <= 1e-6
    return CheckResult(1, "normalization and parity", ok,
                       detail={"max_sum_error": worst_sum, "max_odd_error": worst_odd, "tol": 1e-6})


def check_polarity(budget: Budget) -> CheckResult:
    worst, where = 0.0, None
    for c in cone_grid():
        v = conic.intrinsic_volumes(c, budget.method).values
        w = conic.intrinsic_volumes(conic.polar(c), budget.method).values
        err = float(np.abs(w - v[::-1]).max())
        if err > worst:
            worst, where = err, _label(c)
    return CheckResult(2, "polarity reversal", worst <= 1e-6,
                       detail={"max_error": worst, "worst_cone": where, "tol": 1e-6})


def check_projection_oracle(budget: Budget) -> CheckResult:
    samples = budget.mc()
    failures = []
    worst = 0.0
    for c in cone_grid(max_n=3):
        exact = conic.intrinsic_volumes(c, budget.method).values
        est = oracles.estimate_intrinsic_volumes(c, samples, budget.seed, budget.threads)
        z = np.abs(est.values - exact) / np.maximum(est.stderr, 1e-300)
        worst = max(worst, float(z.max()))
        if (np.abs(est.values - exact) > budget.nsigma * est.stderr).any():
            failures.append({"cone": _label(c), "exact": exact.tolist(), "mc": est.values.tolist(),
                             "stderr": est.stderr.tolist()})
    v = conic.intrinsic_volumes(ConeSpec(ConeFamily.SIMPLEX, 4, 0.0)).values
    target = np.array([binomial(4, k) for k in range(5)]) / 16.0
    exact_err = float(np.abs(v - target).max())
    ok = not failures and exact_err <= 1e-12
    return CheckResult(3, "NNLS face-dimension histogram", ok,
                       detail={"samples": samples, "nsigma": budget.nsigma, "max_z": worst,
                               "failures": failures, "simplex4_r0_error": exact_err})


def check_planar_values(budget: Budget) -> CheckResult:
    worst_planar = 0.0
    for s2 in PARAM_GRID:
        target = math.atan(1.0 / math.sqrt(s2)) / math.pi
        worst_planar = max(worst_planar,
                           abs(g_cube(1, s2, budget.method).value - target),
                           abs(g_cross(1, s2, budget.method).value - target))
    worst_sym = max(abs(g_cube(n, 1.0, budget.method).value - 1.0 / (2 * (n + 1))) for n in range(0, 7))
    ok = worst_planar <= 1e-10 and worst_sym <= 1e-8
    return CheckResult(4, "closed planar angles", ok,
                       detail={"planar_error": worst_planar, "exchangeable_error": worst_sym})


def check_absorption(budget: Budget) -> CheckResult:
    samples = budget.mc()
    rows = []
    exact_ok = (abs(absorption.p_cross(3, 1, 1.0) - 0.25) <= 1e-8
                and abs(absorption.p_cube(1, 1, 1.0) - 0.5) <= 1e-8)
    cells = [(AbsorptionFamily.SYMMETRIC_GAUSSIAN, 3, 1, 1.0), (AbsorptionFamily.GAUSSIAN_ZONOTOPE, 1, 1, 1.0)]
    for fam in AbsorptionFamily:
        for n, d in ABSORPTION_GRID:
            for s2 in PARAM_GRID:
                cells.append((fam, n, d, s2))
    ok = exact_ok
    for fam, n, d, s2 in cells:
        q = AbsorptionQuery(fam, n, d, s2=s2)
        formula = absorption.p_family(fam, n, d, s2)
        est = oracles.estimate_random_point_absorption(q, samples, budget.seed, budget.threads)
        agree = est.agrees(formula, budget.nsigma)
        ok &= agree
        rows.append({"family": fam.value, "n": n, "d": d, "s2": s2, "formula": formula,
                     "mc": est.mean, "stderr": est.stderr, "discarded": est.discarded, "agree": agree})
    return CheckResult(5, "absorption probabilities", ok,
                       detail={"exact_values_ok": exact_ok, "samples": samples, "rows": rows})


def check_planar_absorption(budget: Budget) -> CheckResult:
    samples = budget.mc()
    clouds = budget.mc(LAPLACE_CLOUDS)
    rows = []
    ok = True
    q = AbsorptionQuery(AbsorptionFamily.SYMMETRIC_GAUSSIAN, 3, 2)
    for u in (0.25, 1.0, 4.0):
        formula = absorption.f_cross_d2(3, u)
        est = oracles.estimate_absorption(q, math.sqrt(2 * u), samples, budget.seed, budget.threads)
        agree = est.agrees(formula, budget.nsigma)
        ok &= agree
        rows.append({"u": u, "formula": formula, "mc": est.mean, "stderr": est.stderr, "agree": agree})
    laplace = []
    for fam in AbsorptionFamily:
        for lam in (0.5, 1.0, 2.0):
            rhs = absorption.laplace_rhs(fam, 3, 2, lam)
            est = absorption.laplace_lhs_numeric(fam, 3, 2, lam, clouds, budget.seed, budget.threads)
            atol = 0.02 * abs(rhs)
            agree = est.agrees(rhs, budget.nsigma, atol=atol)
            ok &= agree
            laplace.append({"family": fam.value, "lambda": lam, "rhs": rhs, "lhs": est.mean,
                            "stderr": est.stderr, "atol": atol, "agree": agree})
    return CheckResult(6, "planar non-absorption and Laplace link", ok,
                       detail={"samples": samples, "clouds": clouds, "pointwise": rows, "laplace": laplace})


def check_sections(budget: Budget) -> CheckResult:
    samples = budget.mc(10 ** 5)
    ok = True
    detail = {}
    oct3 = PolytopeSpec(PolytopeFamily.CROSSPOLYTOPE, 3)
    e_cross = sections.expected_faces(sections.SectionQuery(oct3, 2, 0))
    agree = sections.planar_face_agreement(oct3, PLANE_TRIALS, budget.seed, budget.threads)
    hexagons = int((agree.vertex_counts == 6).sum())
    ok &= e_cross == 6.0 and hexagons == PLANE_TRIALS
    detail["crosspolytope"] = {"formula": e_cross, "hexagons": hexagons, "trials": PLANE_TRIALS}
    # references are the planar closed forms; the rounded decimals are reported alongside
    targets = {
        PolytopeFamily.CUBE: (24.0 * math.atan(1.0 / math.sqrt(2.0)) / math.pi, 4.7021796),
        PolytopeFamily.SIMPLEX: (12.0 * math.acos(-1.0 / 3.0) / (2.0 * math.pi), 3.6490402),
    }
    for fam, (target, printed) in targets.items():
        q = sections.SectionQuery(PolytopeSpec(fam, 3), 2, 0)
        formula = sections.expected_faces(q)
        est = sections.estimate_expected_faces(q, samples, budget.seed, budget.threads)
        good = abs(formula - target) <= 1e-6 and est.agrees(formula, budget.nsigma)
        ok &= good
        detail[fam.value] = {"formula": formula, "closed_form": target, "printed_decimal": printed,
                             "printed_gap": formula - printed, "mc": est.mean,
                             "stderr": est.stderr, "samples": samples, "agree": good}
    return CheckResult(7, "section face counts in dimension 3", ok, detail=detail)


def check_planar_equivalence(budget: Budget) -> CheckResult:
    ok = True
    rows = []
    for fam in PolytopeFamily:
        for n in (3, 4, 5):
            a = sections.planar_face_agreement(PolytopeSpec(fam, n), PLANE_TRIALS, budget.seed, budget.threads)
            good = a.rate >= 0.999 and a.degenerate <= 1e-3 * a.trials
            ok &= good
            rows.append({"family": fam.value, "n": n, "rate": a.rate, "degenerate": a.degenerate, "ok": good})
    return CheckResult(8, "polygon vertices versus faces hit", ok, detail={"trials": PLANE_TRIALS, "rows": rows})


def check_asymptotics(budget: Budget) -> CheckResult:
    ratios = []
    for n in (8, 10, 12, 14):
        q = sections.SectionQuery(PolytopeSpec(PolytopeFamily.CUBE, n), n - 1, 0)
        ratios.append(sections.expected_faces(q) / sections.asymp_cube_lowdim(0, 1, n))
    dist = [abs(r - 1.0) for r in ratios]
    monotone = all(b < a for a, b in zip(dist, dist[1:]))
    q = sections.SectionQuery(PolytopeSpec(PolytopeFamily.CUBE, 10), 9, 8)
    lonke = sections.expected_faces(q) / sections.asymp_cube_fixed_codim(2, 1, 10)
    ok = 0.7 <= ratios[-1] <= 1.3 and monotone and 0.7 <= lonke <= 1.3
    return CheckResult(9, "cube section asymptotics", ok,
                       detail={"lowdim_ratios": dict(zip((8, 10, 12, 14), ratios)), "monotone": monotone,
                               "fixed_codim_ratio_n10": lonke})


def check_crosspolytope_angles(budget: Budget) -> CheckResult:
    square_int = conic.crosspoly_internal_angle(2, 0).value
    square_ext = conic.crosspoly_external_angle(2, 0).value
    edge = conic.crosspoly_internal_angle(3, 1).value
    target = math.atan(math.sqrt(2.0)) / math.pi
    ok = abs(square_int - 0.25) <= 1e-8 and abs(square_ext - 0.25) <= 1e-8 and abs(edge - target) <= 1e-8
    return CheckResult(10, "crosspolytope angles", ok,
                       detail={"square_internal": square_int, "square_external": square_ext,
                               "octahedron_edge": edge, "target": target})


CHECKS = {
    1: check_normalization,
    2: check_polarity,
    3: check_projection_oracle,
    4: check_planar_values,
    5: check_absorption,
    6: check_planar_absorption,
    7: check_sections,
    8: check_planar_equivalence,
    9: check_asymptotics,
    10: check_crosspolytope_angles,
}


def run_check(number: int, budget: Budget) -> CheckResult:
    t0 = time.perf_counter()
    try:
        res = CHECKS[number](budget)
    except (RuntimeError, ValueError, ArithmeticError) as exc:
        res = CheckResult(number, CHECKS[number].__name__, False, detail={"error": repr(exc)})
    res.seconds = time.perf_counter() - t0
    return res


def run_all(budget: Budget, only=None) -> list[CheckResult]:
    numbers = sorted(CHECKS) if only is None else sorted(only)
    return [run_check(k, budget) for k in numbers]
