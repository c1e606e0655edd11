"""
The Cauchy-Szegő Λ-function Λ(γ, z) = ‖C±(z, ·)‖ / √S±(z, z).

Λ is 1 on the curve, √(σ(γ)/(2πκ(γ))) at infinity, at least 1 everywhere and
identically 1 exactly on circles. Each curve family takes its own route:

- Circle: closed forms for the Cauchy norm and the Szegő diagonal
- Ellipse: trapezoid Cauchy norm over the explicit Riemann-map Szegő diagonal
- Wedge: closed form in the angle, independent of |z|
- Sampled: discrete Cauchy row over the Kerzman-Stein-Trummer Szegő diagonal
"""

import cmath
import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Dict, Iterable, List, Literal, Optional, TypedDict

import numpy as np

from cauchy_szego.boundary_operator import KSTSolver, discretize_cauchy, kerzman_stein
from cauchy_szego.errors import (
    CapacityUnknownError,
    DomainError,
    InsufficientDataError,
    OnCurveError,
)
from cauchy_szego.geometry import (
    INFINITY,
    Circle,
    Curve,
    Ellipse,
    MoebiusMap,
    QuadratureRule,
    Sampled,
    ScalarPoint,
    WedgeBoundary,
    analytic_capacity,
    arc_length,
    counterclockwise,
    curve_pushforward,
    distance_to_curve,
    is_bounded,
    is_infinity,
    lens_arc_length,
    mobius_apply,
    quadrature,
)
from cauchy_szego.kernels import (
    DomainSide,
    circle_cauchy_norm_sq,
    ellipse_cauchy_norm0,
    ellipse_nome,
    normalize_wedge_angle,
    quadrature_resolves,
    side_of,
    sinc,
    szego_diag,
)
from cauchy_szego.specfun import ellint_E, theta_constants
from config.settings import NumericSettings, get_settings

logger = logging.getLogger(__name__)

# Λ(E_r, 0) and Λ(E_r, ∞) both tend to this as r → ∞
LAMBDA_ELLIPSE_LIMIT = 2.0 / math.sqrt(math.pi)

CLOSED_FORM_ACCURACY = 1e-13
ACCURACY_FLOOR = 1e-15


class Regime(str, Enum):
    INTERIOR_BULK = "interior"
    EXTERIOR_BULK = "exterior"
    ON_CURVE = "on_curve"
    AT_INFINITY = "at_infinity"


@dataclass(frozen=True)
class LambdaValue:
    """Λ at one point, with its regime and an estimated absolute error."""

    value: float
    regime: Regime
    accuracy: float

    def to_dict(self) -> Dict[str, object]:
        data = asdict(self)
        data["regime"] = self.regime.value
        return data


def _regime_for(side: DomainSide) -> Regime:
    return Regime.INTERIOR_BULK if side is DomainSide.INTERIOR else Regime.EXTERIOR_BULK


ON_CURVE = LambdaValue(1.0, Regime.ON_CURVE, 0.0)


# ============================================================================
# CLOSED FORMS
# ============================================================================

def lambda_wedge(theta: float, phi: float) -> float:
    """
    Λ on the wedge boundary γ_θ at z = re^{iφ}; independent of r.

    Inside W_θ (|φ| < θ):
        Λ² = (2θ/π²)·[1/sinc(π − (θ − φ)) + 1/sinc(π − (θ + φ))]·cos(πφ/2θ)
    Inside V_θ (θ < φ < 2π − θ):
        Λ² = (2(π − θ)/π²)·[1/sinc(π − (φ − θ)) + 1/sinc(π − (φ + θ))]·cos((π/2)(π − φ)/(π − θ))

    Args:
        theta: Half-angle in (0, π/2)
        phi: Angle of z; any representative mod 2π

    Returns:
        Λ, with 1 on the boundary rays

    Example:
        >>> abs(lambda_wedge(math.pi / 4, 0.0) - wedge_lens_bound(math.pi / 4)) < 1e-14
        True
    """
    if not 0.0 < theta < math.pi / 2:
        raise DomainError(f"Wedge half-angle theta={theta!r} is outside (0, π/2).")
    phi = normalize_wedge_angle(theta, phi)
    if phi == -theta or phi == theta:
        return 1.0
    if abs(phi) < theta:
        bracket = 1.0 / sinc(math.pi - (theta - phi)) + 1.0 / sinc(math.pi - (theta + phi))
        square = 2.0 * theta / math.pi ** 2 * bracket * math.cos(math.pi * phi / (2.0 * theta))
    else:
        outer = math.pi - theta
        bracket = 1.0 / sinc(math.pi - (phi - theta)) + 1.0 / sinc(math.pi - (phi + theta))
        square = 2.0 * outer / math.pi ** 2 * bracket * math.cos(0.5 * math.pi * (math.pi - phi) / outer)
    return math.sqrt(square)


def wedge_lens_bound(theta: float) -> float:
    """B(θ) = (2/π)·√((π − θ)·θ·csc θ), the value of Λ on the symmetry ray of W_θ."""
    return 2.0 / math.pi * math.sqrt((math.pi - theta) * theta / math.sin(theta))


def _check_r(r: float) -> float:
    r = float(r)
    if r < 1.0:
        raise DomainError(f"Ellipse parameter r={r!r} must be >= 1.")
    return r


def lambda_ellipse_inf(r: float) -> float:
    """Λ(E_r, ∞) = √((4r/(π(r + 1)))·E(√(1 − 1/r²)))."""
    r = _check_r(r)
    if r == 1.0:
        return 1.0
    k = math.sqrt(1.0 - 1.0 / r ** 2)
    return math.sqrt(4.0 * r / (math.pi * (r + 1.0)) * ellint_E(k))


def lambda_ellipse_0(r: float) -> float:
    """
    Λ(E_r, 0) from the closed Cauchy norm and the theta-constant Szegő diagonal.

        Λ² = (2/π)·√(1 − 1/r²)·[(r² + 1)Π(1 − r², k) − K(k)] / (θ₂(0, q)θ₃(0, q))

    with k = √(1 − 1/r²) and q = ((r − 1)/(r + 1))².

    Raises:
        DomainError: If r < 1
    """
    r = _check_r(r)
    if r == 1.0:
        return 1.0
    t2, t3, _ = theta_constants(ellipse_nome(r))
    szego0 = t2 * t3 / (2.0 * math.pi * math.sqrt(r * r - 1.0))
    return math.sqrt(ellipse_cauchy_norm0(r) / szego0)


def fks_upper_bound(r: float) -> float:
    """√(1 + ((r − 1)/(r + 1))²), an upper bound for ‖C±‖ on E_r."""
    r = _check_r(r)
    return math.sqrt(1.0 + ((r - 1.0) / (r + 1.0)) ** 2)


def _sigma_kappa(c: Curve):
    kappa = analytic_capacity(c)
    sigma = lens_arc_length(c.theta) if isinstance(c, WedgeBoundary) else arc_length(c)
    return sigma, kappa


def lambda_at_infinity(c: Curve) -> float:
    """√(σ(γ)/(2πκ(γ))); for the wedge, the value for its lens image."""
    sigma, kappa = _sigma_kappa(c)
    return math.sqrt(sigma / (2.0 * math.pi * kappa))


def kerzman_stein_lower_bound(c: Curve) -> float:
    """
    ‖A‖ ≥ √(Λ(γ, ∞)² − 1), from sup Λ ≤ ‖C‖ and ‖A‖² = ‖C‖² − 1.

    Raises:
        CapacityUnknownError: For Sampled curves
    """
    return math.sqrt(max(lambda_at_infinity(c) ** 2 - 1.0, 0.0))


# ============================================================================
# POINTWISE EVALUATION
# ============================================================================

class _Evaluator:
    """
    Evaluates Λ at many points of one curve, sharing the quadrature rule,
    its halved companion and the KST factorisations.
    """

    def __init__(
        self,
        c: Curve,
        rule: Optional[QuadratureRule] = None,
        settings: Optional[NumericSettings] = None,
    ):
        self.curve = c
        self.settings = settings or get_settings()
        self.rule = rule
        self._half_rule: Optional[QuadratureRule] = None
        self._solvers: Dict[DomainSide, KSTSolver] = {}
        self._half_solvers: Dict[DomainSide, Optional[KSTSolver]] = {}

        if isinstance(c, Ellipse) and c.r > 1.0:
            if self.rule is None:
                self.rule = quadrature(c, self.settings.nodes)
            if self.rule.n % 4 == 0:
                self._half_rule = self.rule.halved()

    # ------------------------------------------------------------------
    def __call__(self, z: ScalarPoint) -> LambdaValue:
        c = self.curve
        if is_infinity(z):
            return self._at_infinity()

        z = complex(z)
        if distance_to_curve(c, z) <= self.settings.on_curve_tol:
            return ON_CURVE
        try:
            side = side_of(c, z)
        except OnCurveError:
            return ON_CURVE

        if isinstance(c, WedgeBoundary):
            value = lambda_wedge(c.theta, cmath.phase(z))
            return LambdaValue(value, _regime_for(side), CLOSED_FORM_ACCURACY)
        if isinstance(c, Circle) or (isinstance(c, Ellipse) and c.r == 1.0):
            circle = c if isinstance(c, Circle) else Circle()
            ratio = circle_cauchy_norm_sq(circle, z) / szego_diag(circle, side, z)
            return LambdaValue(math.sqrt(ratio), _regime_for(side), CLOSED_FORM_ACCURACY)
        if isinstance(c, Ellipse):
            return self._ellipse(side, z)
        return self._sampled(side, z)

    # ------------------------------------------------------------------
    def _at_infinity(self) -> LambdaValue:
        if isinstance(self.curve, WedgeBoundary):
            return ON_CURVE
        if isinstance(self.curve, Sampled):
            raise CapacityUnknownError(
                "Λ at infinity needs the analytic capacity, which is unknown for sampled curves."
            )
        return LambdaValue(lambda_at_infinity(self.curve), Regime.AT_INFINITY, CLOSED_FORM_ACCURACY)

    def _ellipse(self, side: DomainSide, z: complex) -> LambdaValue:
        rule = self.rule
        if not quadrature_resolves(rule, z, self.settings.collar_spacings):
            logger.warning("z=%r is within %g node spacings of the ellipse", z, self.settings.collar_spacings)
        szego = szego_diag(self.curve, side, z)
        value = _ratio_sqrt(_trapezoid_norm_sq(rule, z), szego)
        accuracy = CLOSED_FORM_ACCURACY
        if self._half_rule is not None:
            coarse = _ratio_sqrt(_trapezoid_norm_sq(self._half_rule, z), szego)
            accuracy = max(abs(value - coarse), ACCURACY_FLOOR)
        return LambdaValue(value, _regime_for(side), accuracy)

    def _solver(self, side: DomainSide, half: bool = False) -> Optional[KSTSolver]:
        cache = self._half_solvers if half else self._solvers
        if side not in cache:
            curve = counterclockwise(self.curve)
            if half:
                if curve.n % 4 or curve.n // 2 < 32:
                    cache[side] = None
                    return None
                curve = Sampled(
                    points=curve.points[::2],
                    derivatives=curve.derivatives[::2],
                    second_derivatives=curve.second_derivatives[::2],
                )
            Cmat = discretize_cauchy(curve, side, settings=self.settings)
            cache[side] = KSTSolver(Cmat, kerzman_stein(Cmat), self.settings)
        return cache[side]

    def _sampled(self, side: DomainSide, z: complex) -> LambdaValue:
        value = self._solver(side).lambda_at(z)
        coarse_solver = self._solver(side, half=True)
        if coarse_solver is None:
            accuracy = float("nan")
        else:
            accuracy = max(abs(value - coarse_solver.lambda_at(z)), ACCURACY_FLOOR)
        return LambdaValue(value, _regime_for(side), accuracy)


def _trapezoid_norm_sq(rule: QuadratureRule, z: complex) -> float:
    dist_sq = np.abs(rule.points - z) ** 2
    return float(np.sum(rule.weights / dist_sq) / (4.0 * math.pi ** 2))


def _ratio_sqrt(norm_sq: float, szego: float) -> float:
    return math.sqrt(norm_sq / szego)


def lambda_value(
    c: Curve,
    z: ScalarPoint,
    rule: Optional[QuadratureRule] = None,
    settings: Optional[NumericSettings] = None,
) -> LambdaValue:
    """
    Λ(γ, z) on the whole Riemann sphere.

    Args:
        c: Any supported curve
        z: Finite point or INFINITY
        rule: Optional quadrature rule for the ellipse Cauchy norm (defaults
              to the configured node count)
        settings: Node count and tolerances (default from the environment)

    Returns:
        LambdaValue; points within the on-curve tolerance give exactly 1

    Raises:
        CapacityUnknownError: For z = INFINITY on a Sampled curve

    Example:
        >>> lambda_value(Circle(), 0.3 + 0.4j).value
        1.0
    """
    return _Evaluator(c, rule, settings)(z)


def lambda_grid(
    c: Curve,
    points: Iterable[ScalarPoint],
    rule: Optional[QuadratureRule] = None,
    settings: Optional[NumericSettings] = None,
) -> List[LambdaValue]:
    """Λ at each point, sharing one rule and one operator factorisation per side."""
    evaluate = _Evaluator(c, rule, settings)
    return [evaluate(z) for z in points]


def lambda_pullback(
    M: MoebiusMap,
    c: Curve,
    z: ScalarPoint,
    n: Optional[int] = None,
    settings: Optional[NumericSettings] = None,
) -> LambdaValue:
    """
    Λ(Φ(γ), Φ(z)) for a Möbius map Φ whose pole is off γ.

    By Möbius invariance this agrees with Λ(γ, z); the image curve is handled
    as a Sampled curve.

    Raises:
        PoleError: If the pole lies on the curve
    """
    settings = settings or get_settings()
    n = settings.nodes if n is None else n
    image = curve_pushforward(M, c, n)
    return lambda_value(image, mobius_apply(M, z), settings=settings)


# ============================================================================
# BOUNDS AND ASYMPTOTICS
# ============================================================================

class BoundsReport(TypedDict):
    lower: float
    upper: Optional[float]
    argmax: ScalarPoint


def default_grid(
    c: Curve,
    size: Optional[int] = None,
    settings: Optional[NumericSettings] = None,
) -> List[ScalarPoint]:
    """
    Search grid for sup Λ: a size × size lattice over a box around a bounded
    curve, plus infinity when the capacity is known; an angle sweep for the
    wedge. Points inside the quadrature collar are dropped.
    """
    settings = settings or get_settings()
    size = settings.grid_size if size is None else size
    if isinstance(c, WedgeBoundary):
        angles = np.linspace(-c.theta, 2.0 * math.pi - c.theta, 8 * size, endpoint=False)[1:]
        return [complex(cmath.rect(1.0, a)) for a in angles if abs(abs(a) - c.theta) > 1e-9]

    if isinstance(c, Circle):
        center, half_x, half_y = c.center, 1.5 * c.radius, 1.5 * c.radius
        collar = 1e-6 * c.radius
    else:
        if isinstance(c, Ellipse):
            center, half_x, half_y = 0j, 1.5 * c.r, 1.5
        else:
            center = complex(np.mean(c.points))
            half_x = 1.5 * float(np.max(np.abs(c.points.real - center.real)))
            half_y = 1.5 * float(np.max(np.abs(c.points.imag - center.imag)))
        rule = quadrature(c, None if isinstance(c, Sampled) else settings.nodes)
        collar = settings.collar_spacings * rule.max_spacing

    xs = np.linspace(center.real - half_x, center.real + half_x, size)
    ys = np.linspace(center.imag - half_y, center.imag + half_y, size)
    grid: List[ScalarPoint] = [
        complex(x, y) for y in ys for x in xs if distance_to_curve(c, complex(x, y)) > collar
    ]
    if not isinstance(c, Sampled):
        grid.append(INFINITY)
    return grid


def cauchy_norm_bounds(
    c: Curve,
    grid: Optional[List[ScalarPoint]] = None,
    settings: Optional[NumericSettings] = None,
) -> BoundsReport:
    """
    Lower and upper bounds for ‖C±‖.

    lower is the largest Λ over the grid (sup Λ ≤ ‖C±‖); upper is the
    closed-form bound √(1 + ((r − 1)/(r + 1))²) for ellipses and 1 for circles.

    Args:
        c: Any supported curve
        grid: Points to search; defaults to default_grid(c)
        settings: Node count and grid size (default from the environment)

    Returns:
        BoundsReport with lower, upper (None when unknown) and argmax
    """
    grid = default_grid(c, settings=settings) if grid is None else list(grid)
    if is_bounded(c) and not isinstance(c, Sampled) and not any(p is INFINITY for p in grid):
        grid.append(INFINITY)
    values = lambda_grid(c, grid, settings=settings)
    best = int(np.argmax([v.value for v in values]))

    upper: Optional[float] = None
    if isinstance(c, Ellipse):
        upper = fks_upper_bound(c.r)
    elif isinstance(c, Circle):
        upper = 1.0

    lower = values[best].value
    if upper is not None and lower > upper + 1e-9:
        logger.warning("Grid sup Λ=%.17g exceeds the upper bound %.17g", lower, upper)
    return {"lower": lower, "upper": upper, "argmax": grid[best]}


class AsymptoticReport(TypedDict):
    which: str
    fitted_c2: float
    fitted_c3: float
    fitted_c4: float
    residual: float


def asymptotic_check(r_values: Iterable[float], which: Literal["zero", "infinity"] = "infinity") -> AsymptoticReport:
    """
    Fit the near-circle expansion Λ(E_r, ·) = 1 + c₂x² + c₃x³ + c₄x⁴ + …, x = r − 1.

    The regression is (Λ − 1)/x² against 1, x, x², which separates the small
    coefficients well. Both Λ(E_r, 0) and Λ(E_r, ∞) have c₂ = 1/32 and
    c₃ = −1/32.

    Args:
        r_values: At least 4 values of r in (1, 1.2]
        which: "zero" for Λ(E_r, 0), "infinity" for Λ(E_r, ∞)

    Returns:
        AsymptoticReport with the fitted coefficients and the residual norm

    Raises:
        InsufficientDataError: With fewer than 4 values
        DomainError: For r <= 1 or an unknown `which`
    """
    rs = np.asarray(list(r_values), dtype=float)
    if rs.size < 4:
        raise InsufficientDataError(f"Asymptotic fit needs at least 4 values of r, got {rs.size}.")
    if np.any(rs <= 1.0):
        raise DomainError("Asymptotic fit needs r > 1.")
    if np.any(rs > 1.2):
        logger.warning("Asymptotic fit uses r values beyond 1.2; the expansion may not apply")
    funcs = {"zero": lambda_ellipse_0, "infinity": lambda_ellipse_inf}
    if which not in funcs:
        raise DomainError(f"which={which!r} must be 'zero' or 'infinity'.")

    x = rs - 1.0
    y = np.array([funcs[which](r) - 1.0 for r in rs]) / x ** 2
    design = np.vstack([np.ones_like(x), x, x ** 2]).T
    coef, residuals, _, _ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.sqrt(residuals[0])) if residuals.size else float(np.linalg.norm(design @ coef - y))
    return {
        "which": which,
        "fitted_c2": float(coef[0]),
        "fitted_c3": float(coef[1]),
        "fitted_c4": float(coef[2]),
        "residual": residual,
    }


def ellipse_family_sweep(r_values: Iterable[float]) -> List[Dict[str, float]]:
    """Rows {r, lambda0, lambdainf}; logs a warning where r ↦ Λ(E_r, 0) stops increasing."""
    rows = []
    previous = None
    for r in r_values:
        row = {"r": float(r), "lambda0": lambda_ellipse_0(r), "lambdainf": lambda_ellipse_inf(r)}
        if previous is not None and row["lambda0"] < previous:
            logger.warning("Λ(E_r, 0) decreased at r=%.6g", r)
        previous = row["lambda0"]
        rows.append(row)
    return rows
