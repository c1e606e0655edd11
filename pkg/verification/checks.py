"""
Registry of invariant checks run by `verify`.

Each check takes the node budget of the run and returns a CheckResult with
margin = tolerance − observed error, so a negative margin is a failure and
its size says by how much.
"""

import cmath
import logging
import math
from typing import Dict, List

import numpy as np
import scipy.integrate

from cauchy_szego.boundary_operator import (
    KSTSolver,
    berezin_A,
    berezin_A2,
    discretize_cauchy,
    kerzman_stein,
    operator_norm,
    spectrum_A,
    szego_via_kst,
)
from cauchy_szego.geometry import (
    INFINITY,
    Circle,
    Ellipse,
    MoebiusMap,
    WedgeBoundary,
    analytic_capacity,
    capacity_inequalities,
    lens_arc_length,
    quadrature,
)
from cauchy_szego.kernels import (
    DomainSide,
    cauchy_szego_distance_sq,
    ellipse_nome,
    szego_diag,
    wedge_cauchy_norm_sq,
    wedge_I,
    wedge_szego_diag,
)
from cauchy_szego.lambda_function import (
    asymptotic_check,
    cauchy_norm_bounds,
    fks_upper_bound,
    lambda_ellipse_0,
    lambda_ellipse_inf,
    lambda_grid,
    lambda_pullback,
    lambda_value,
    lambda_wedge,
    wedge_lens_bound,
)
from cauchy_szego.specfun import (
    ellint_E,
    ellint_K,
    ellint_Pi,
    inverse_nome,
    nome,
    theta,
    theta1_prime_at0,
    theta_constants,
)
from verification.state import CheckResult

logger = logging.getLogger(__name__)

QUAD_OPTS = {"epsabs": 1e-15, "epsrel": 1e-13, "limit": 200}


def _result(name: str, error: float, tol: float, detail: str) -> CheckResult:
    error = float(error)
    return {
        "name": name,
        "passed": bool(error <= tol),
        "margin": float(tol - error),
        "detail": detail,
    }


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


# ============================================================================
# SPECIAL FUNCTIONS
# ============================================================================

def check_special_functions(max_nodes: int) -> CheckResult:
    worst = 0.0
    ks = [0.1 * i for i in range(1, 10)]

    for k in ks:
        q = nome(k)
        worst = max(worst, abs(inverse_nome(q) - k))
        t2, t3, _ = theta_constants(q)
        worst = max(worst, _rel(t3 ** 2, 2.0 * ellint_K(k) / math.pi))
        worst = max(worst, _rel(t2 / t3, math.sqrt(k)))

    for q in np.linspace(0.01, 0.8, 10):
        product = theta(2, 0.0, q).real * theta(3, 0.0, q).real * theta(4, 0.0, q).real
        worst = max(worst, _rel(theta1_prime_at0(q), product))

    for k in ks:
        s2 = lambda u: math.sin(u) ** 2
        K_ref = scipy.integrate.quad(lambda u: 1.0 / math.sqrt(1.0 - k * k * s2(u)), 0.0, math.pi / 2, **QUAD_OPTS)[0]
        E_ref = scipy.integrate.quad(lambda u: math.sqrt(1.0 - k * k * s2(u)), 0.0, math.pi / 2, **QUAD_OPTS)[0]
        n = -3.0 * k
        Pi_ref = scipy.integrate.quad(
            lambda u: 1.0 / ((1.0 - n * s2(u)) * math.sqrt(1.0 - k * k * s2(u))), 0.0, math.pi / 2, **QUAD_OPTS
        )[0]
        worst = max(worst, _rel(ellint_K(k), K_ref), _rel(ellint_E(k), E_ref), _rel(ellint_Pi(n, k), Pi_ref))

    return _result("special_functions", worst, 1e-10,
                   "nome round trip, theta identities, Jacobi identity, K/E/Pi against quadrature")


# ============================================================================
# LAMBDA: CIRCLES, INFINITY, ELLIPSES, WEDGE
# ============================================================================

def check_circle_rigidity(max_nodes: int) -> CheckResult:
    rel_radii = [0.0, 0.3, 0.7, 0.95, 1.05, 1.5, 3.0, 10.0, 100.0, 1e6]
    angles = [2.0 * math.pi * j / 10 + 0.1 for j in range(10)]
    worst = 0.0
    count = 0
    for radius in (0.5, 1.0, 3.0):
        for center in (0j, 1 + 1j):
            c = Circle(center=center, radius=radius)
            points = [center + radius * s * cmath.exp(1j * a) for s in rel_radii for a in angles]
            points.append(INFINITY)
            values = lambda_grid(c, points)
            worst = max(worst, max(abs(v.value - 1.0) for v in values))
            count += len(points)
    return _result("circle_rigidity", worst, 1e-10, f"max |Λ − 1| over {count} points on 6 circles")


def check_lambda_at_infinity(max_nodes: int) -> CheckResult:
    worst = abs(lambda_value(Circle(), INFINITY).value ** 2 - 1.0)
    n = min(max_nodes, 512)
    for r in (1.5, 2.0, 4.0):
        c = Ellipse(r=r)
        sigma = float(np.sum(quadrature(c, n).weights))
        expected = sigma / (2.0 * math.pi * analytic_capacity(c))
        worst = max(worst, abs(lambda_value(c, INFINITY).value ** 2 - expected))
        worst = max(worst, abs(lambda_ellipse_inf(r) ** 2 - expected))
    for theta_ in (math.pi / 8, math.pi / 4):
        kappa = math.pi / (2.0 * (math.pi - theta_))
        expected = lens_arc_length(theta_) / (2.0 * math.pi * kappa)
        worst = max(worst, abs(wedge_lens_bound(theta_) ** 2 - expected))
        worst = max(worst, abs(lambda_wedge(theta_, 0.0) ** 2 - expected))
    return _result("lambda_at_infinity", worst, 1e-10, "Λ(∞)² = σ/(2πκ) for circle, ellipses and wedge lenses")


def check_ellipse_closed_forms(max_nodes: int) -> CheckResult:
    n = min(max_nodes, 512)
    worst = 0.0
    for r in (1.2, 2.0, 5.0):
        c = Ellipse(r=r)
        rule = quadrature(c, n)
        worst = max(worst, abs(lambda_value(c, 0j, rule).value - lambda_ellipse_0(r)))
        sigma = float(np.sum(rule.weights))
        worst = max(worst, abs(math.sqrt(sigma / (2.0 * math.pi * analytic_capacity(c))) - lambda_ellipse_inf(r)))
    return _result("ellipse_closed_forms", worst, 1e-9,
                   f"Λ(E_r, 0) and Λ(E_r, ∞) against quadrature at n={n}")


def check_ellipse_zero_exceeds_infinity(max_nodes: int) -> CheckResult:
    gaps = [lambda_ellipse_0(r) - lambda_ellipse_inf(r) for r in (1.5, 2.0, 3.0)]
    return _result("ellipse_zero_exceeds_infinity", -min(gaps), 0.0,
                   "Λ(E_r, 0) > Λ(E_r, ∞) at r = 1.5, 2, 3")


def check_wedge_formula(max_nodes: int) -> CheckResult:
    worst = 0.0
    for theta_ in np.linspace(0.05, math.pi / 2 - 0.05, 10):
        for j in range(20):
            phi = -theta_ + 2.0 * math.pi * (j + 0.5) / 20
            if abs(phi - theta_) < 1e-6:
                continue
            composed = math.sqrt(wedge_cauchy_norm_sq(theta_, 1.0, phi) / wedge_szego_diag(theta_, 1.0, phi))
            worst = max(worst, _rel(lambda_wedge(theta_, phi), composed))

    aux_err = 0.0
    for r in (0.5, 1.0, 2.0, 5.0):
        for alpha in (0.4, 1.2, math.pi, 4.0, 5.8):
            f = lambda x: 1.0 / (x * x - 2.0 * x * r * math.cos(alpha) + r * r)
            peak = [r * math.cos(alpha)] if 0.0 < r * math.cos(alpha) < 2.0 * r else None
            ref = scipy.integrate.quad(f, 0.0, 2.0 * r, points=peak, **QUAD_OPTS)[0]
            ref += scipy.integrate.quad(f, 2.0 * r, np.inf, **QUAD_OPTS)[0]
            aux_err = max(aux_err, _rel(wedge_I(r, alpha), ref))

    error = max(worst / 1e-12, aux_err / 1e-10)
    return _result("wedge_formula", error, 1.0,
                   f"closed form vs composition rel err {worst:.3g} (tol 1e-12); "
                   f"auxiliary integral rel err {aux_err:.3g} (tol 1e-10)")


def check_asymptotics(max_nodes: int) -> CheckResult:
    rs = [1.01, 1.02, 1.03, 1.04, 1.05]
    worst = 0.0
    parts = []
    for which in ("zero", "infinity"):
        report = asymptotic_check(rs, which)
        c2, c3 = report["fitted_c2"], report["fitted_c3"]
        # distance outside the accepted bands
        worst = max(worst, 0.029 - c2, c2 - 0.0335, -0.0335 - c3, c3 + 0.029)
        parts.append(f"{which}: c2={c2:.6g}, c3={c3:.6g}")
    return _result("asymptotic_coefficients", worst, 0.0, "; ".join(parts))


def check_capacity_inequalities(max_nodes: int) -> CheckResult:
    curves = [Circle(), Circle(center=1 + 1j, radius=3.0), Ellipse(r=1.0001), Ellipse(r=1.5),
              Ellipse(r=2.0), Ellipse(r=4.0), WedgeBoundary(theta=math.pi / 8), WedgeBoundary(theta=math.pi / 4)]
    worst = 0.0
    for c in curves:
        report = capacity_inequalities(c)
        worst = max(worst, -report["margin_2pi"], -report["margin_ab"])
        if isinstance(c, Circle) and not report["equality"]:
            worst = max(worst, abs(report["margin_2pi"]), abs(report["margin_ab"]))
    return _result("capacity_inequalities", worst, 1e-12, "σ ≥ 2πκ ≥ 2π√(A/π), equality on circles")


def check_l2_distance(max_nodes: int) -> CheckResult:
    n = min(max_nodes, 512)
    c = Ellipse(r=2.0)
    rule = quadrature(c, n)
    side = DomainSide.INTERIOR
    lhs = cauchy_szego_distance_sq(c, side, 0j, rule)
    rhs = szego_diag(c, side, 0j) * (lambda_ellipse_0(2.0) ** 2 - 1.0)
    return _result("l2_distance_identity", abs(lhs - rhs), 1e-8, f"‖C(0,·) − S(0,·)‖² on E_2 at n={n}")


# ============================================================================
# OPERATORS
# ============================================================================

def check_kst_circle(max_nodes: int) -> CheckResult:
    n = min(max_nodes, 128)
    Cmat = discretize_cauchy(Circle(), DomainSide.INTERIOR, n)
    Amat = kerzman_stein(Cmat)
    a_max = float(np.max(np.abs(Amat.entries)))

    zeta = Cmat.points
    scale = np.sqrt(Cmat.weights)
    reproduction = 0.0
    for k in range(6):
        v = scale * zeta ** k
        reproduction = max(reproduction, float(np.max(np.abs(Cmat.entries @ v - v))))
    annihilation = float(np.max(np.abs(Cmat.entries @ (scale / zeta))))

    _, S00 = szego_via_kst(Cmat, Amat, 0j)
    szego_err = abs(S00 - 1.0 / (2.0 * math.pi))
    error = max(a_max / 1e-10, reproduction / 1e-10, annihilation / 1e-10, szego_err / 1e-8)
    return _result("kst_circle", error, 1.0,
                   f"max|A|={a_max:.3g}, reproduction {reproduction:.3g}, "
                   f"annihilation {annihilation:.3g}, S(0,0) err {szego_err:.3g}")


def check_kst_ellipse(max_nodes: int) -> CheckResult:
    n = min(max_nodes, 256)
    c = Ellipse(r=2.0)
    Cmat = discretize_cauchy(c, DomainSide.INTERIOR, n)
    solver = KSTSolver(Cmat, kerzman_stein(Cmat))
    t2, t3, _ = theta_constants(ellipse_nome(2.0))
    worst = abs(solver.solve(0j)[1] - t2 * t3 / (2.0 * math.pi * math.sqrt(3.0)))
    worst = max(worst, abs(solver.solve(0.5 + 0j)[1] - szego_diag(c, DomainSide.INTERIOR, 0.5 + 0j)))
    return _result("kst_szego_ellipse", worst, 1e-6, f"KST S(z,z) on E_2 at n={n}, z = 0 and 0.5")


def check_bolt_spectrum(max_nodes: int) -> CheckResult:
    n = min(max_nodes, 256)
    worst = 0.0
    details = []
    for r in (1.05, 1.1, 1.2):
        Cmat = discretize_cauchy(Ellipse(r=r), DomainSide.INTERIOR, n)
        lam = spectrum_A(kerzman_stein(Cmat), 2)
        ratio = lam[0] * 2.0 * (r + 1.0) / (r - 1.0)
        worst = max(worst, abs(ratio - 1.0) / 0.1)
        details.append(f"r={r:g}: ratio {ratio:.6g}")
        if r == 1.1:
            pairing = abs(lam[0] - lam[1])
            norm = operator_norm(Cmat)
            cross = abs(lam[0] - math.sqrt(max(norm ** 2 - 1.0, 0.0)))
            worst = max(worst, pairing / 1e-8, cross / 1e-6)
            details.append(f"pairing {pairing:.3g}, |λ₁ − √(‖C‖² − 1)| {cross:.3g}")
    return _result("bolt_spectrum", worst, 1.0, "; ".join(details))


def check_operator_sandwich(max_nodes: int) -> CheckResult:
    n = min(max_nodes, 512)
    worst = 0.0
    details = []
    for r in (1.2, 2.0, 3.0):
        c = Ellipse(r=r)
        lower = cauchy_norm_bounds(c)["lower"]
        norm_in = operator_norm(discretize_cauchy(c, DomainSide.INTERIOR, n))
        norm_out = operator_norm(discretize_cauchy(c, DomainSide.EXTERIOR, n))
        upper = fks_upper_bound(r)
        worst = max(worst, lower - norm_in, norm_in - upper, abs(norm_in - norm_out))
        details.append(f"r={r:g}: {lower:.10f} <= {norm_in:.10f} <= {upper:.10f}, |C+| - |C-| = {norm_in - norm_out:.3g}")
    return _result("operator_sandwich", worst, 1e-6, "; ".join(details))


def check_berezin(max_nodes: int) -> CheckResult:
    n = min(max_nodes, 512)
    c = Ellipse(r=2.0)
    Cmat = discretize_cauchy(c, DomainSide.INTERIOR, n)
    Amat = kerzman_stein(Cmat)
    solver = KSTSolver(Cmat, Amat)
    second = first = 0.0
    for z in (0j, 0.5 + 0j, 1 + 0.3j):
        s_z, _, _ = solver.solve(z)
        lam = lambda_value(c, z).value
        second = max(second, abs((1.0 - berezin_A2(Amat, s_z)) - lam ** 2))
        first = max(first, abs(berezin_A(Amat, s_z)))
    return _result("berezin_identity", max(second / 1e-5, first / 1e-10), 1.0,
                   f"|1 − B(A²) − Λ²| {second:.3g} (tol 1e-5), |B(A)| {first:.3g} (tol 1e-10)")


MOBIUS_POLES = [3.5 + 0j, -3 + 0.5j, 2.5j, -0.5 - 2.2j, 3 + 2j]
INVARIANCE_POINTS = [0j, 0.5 + 0j, 1 + 0.3j, -1.2 - 0.2j, 0.3j,
                     2.6 + 0j, -2.5 + 1j, 1.6j, 1.5 - 1.5j, 4 + 4j]


def check_mobius_invariance(max_nodes: int) -> CheckResult:
    n = min(max_nodes, 512)
    c = Ellipse(r=2.0)
    reference = lambda_grid(c, INVARIANCE_POINTS)
    worst = 0.0
    for k, pole in enumerate(MOBIUS_POLES):
        M = MoebiusMap(a=1.0, b=0.25 * k * 1j, c=1.0, d=-pole)
        for z, ref in zip(INVARIANCE_POINTS, reference):
            worst = max(worst, abs(lambda_pullback(M, c, z, n).value - ref.value))
    return _result("mobius_invariance", worst, 1e-6,
                   f"E_2 under {len(MOBIUS_POLES)} maps at {len(INVARIANCE_POINTS)} points, n={n}")


def check_refinement(max_nodes: int) -> CheckResult:
    c = Ellipse(r=2.0)
    scalars = []
    for n in (512, 1024):
        if n > max_nodes:
            return _result("operator_refinement", float("nan"), 1e-6, f"needs n={n} > {max_nodes}")
        Cmat = discretize_cauchy(c, DomainSide.INTERIOR, n)
        Amat = kerzman_stein(Cmat)
        scalars.append((operator_norm(Cmat), spectrum_A(Amat, 1)[0], szego_via_kst(Cmat, Amat, 0j)[1]))
    worst = max(abs(a - b) for a, b in zip(*scalars))
    return _result("operator_refinement", worst, 1e-6, "‖C‖, λ₁ and S(0,0) on E_2, n = 512 vs 1024")


# ============================================================================
# REGISTRY
# ============================================================================

# Ordered registry; "full" runs everything, "quick" only the quick entries
CHECKS: List[Dict] = [
    {"id": "special_functions", "level": "quick", "run": check_special_functions},
    {"id": "circle_rigidity", "level": "quick", "run": check_circle_rigidity},
    {"id": "lambda_at_infinity", "level": "quick", "run": check_lambda_at_infinity},
    {"id": "ellipse_closed_forms", "level": "quick", "run": check_ellipse_closed_forms},
    {"id": "ellipse_zero_exceeds_infinity", "level": "quick", "run": check_ellipse_zero_exceeds_infinity},
    {"id": "wedge_formula", "level": "quick", "run": check_wedge_formula},
    {"id": "asymptotic_coefficients", "level": "quick", "run": check_asymptotics},
    {"id": "capacity_inequalities", "level": "quick", "run": check_capacity_inequalities},
    {"id": "l2_distance_identity", "level": "quick", "run": check_l2_distance},
    {"id": "kst_circle", "level": "quick", "run": check_kst_circle},
    {"id": "kst_szego_ellipse", "level": "quick", "run": check_kst_ellipse},
    {"id": "bolt_spectrum", "level": "quick", "run": check_bolt_spectrum},
    {"id": "operator_sandwich", "level": "full", "run": check_operator_sandwich},
    {"id": "berezin_identity", "level": "full", "run": check_berezin},
    {"id": "mobius_invariance", "level": "full", "run": check_mobius_invariance},
    {"id": "operator_refinement", "level": "full", "run": check_refinement},
]


def get_check_by_id(check_id: str) -> Dict:
    """
    Get a check entry by its ID.

    Raises:
        ValueError: If check_id not found
    """
    for check in CHECKS:
        if check["id"] == check_id:
            return check
    raise ValueError(f"Check '{check_id}' not found in CHECKS")


def check_ids_for_level(level: str) -> List[str]:
    if level == "quick":
        return [c["id"] for c in CHECKS if c["level"] == "quick"]
    return [c["id"] for c in CHECKS]

