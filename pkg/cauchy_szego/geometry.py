"""
Curves, Möbius transformations and quadrature rules.

Canonical curves (circle, ellipse E_r, wedge boundary γ_θ) are small pydantic
models; a Sampled curve carries point, first and second derivative values at
n uniform parameters on [0, 2π). Bounded curves are parametrised over
[0, 2π) and integrated with the periodic trapezoid rule.
"""

import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional, TypedDict, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from cauchy_szego.errors import (
    CapacityUnknownError,
    DomainError,
    OnCurveError,
    PoleError,
    UnboundedCurveError,
    UnsupportedCurveError,
)
from cauchy_szego.specfun import ellint_E

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# Pushforward refuses poles closer than this fraction of the curve diameter
POLE_PROXIMITY = 1e-9


# ============================================================================
# POINTS OF THE RIEMANN SPHERE
# ============================================================================

class _Infinity:
    """The point at infinity. Use the module-level INFINITY singleton."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()

ScalarPoint = Union[complex, _Infinity]


def is_infinity(z) -> bool:
    """True for INFINITY and for complex values with a non-finite part."""
    if z is INFINITY:
        return True
    return not np.isfinite(complex(z))


# ============================================================================
# CURVE MODELS
# ============================================================================

class Circle(BaseModel):
    """Circle |z − center| = radius, parametrised center + radius·e^{it}."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["circle"] = "circle"
    center: complex = 0j
    radius: float = Field(default=1.0, gt=0)


class Ellipse(BaseModel):
    """Ellipse E_r: x²/r² + y² = 1, parametrised (r cos t, sin t)."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["ellipse"] = "ellipse"
    r: float = Field(ge=1.0)


class WedgeBoundary(BaseModel):
    """
    Boundary of the wedge W_θ = {|arg z| < θ}: the rays at angles ±θ.

    Parametrised over the real line with W_θ on the left: t < 0 runs in along
    the upper ray, t ≥ 0 runs out along the lower ray.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["wedge"] = "wedge"
    theta: float = Field(gt=0.0, lt=math.pi / 2)


class Sampled(BaseModel):
    """
    A smooth closed curve known only at n uniform parameters t_j = 2πj/n.

    orientation is +1 when the parametrisation runs counterclockwise and -1
    when it runs clockwise (a Möbius image of a positively oriented curve
    whose pole lies inside it).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: Literal["sampled"] = "sampled"
    points: np.ndarray
    derivatives: np.ndarray
    second_derivatives: np.ndarray
    orientation: Literal[1, -1] = 1

    @field_validator("points", "derivatives", "second_derivatives", mode="before")
    @classmethod
    def _as_complex_array(cls, value):
        arr = np.asarray(value, dtype=complex)
        if arr.ndim != 1:
            raise ValueError("Sampled curve data must be one-dimensional")
        return arr

    @model_validator(mode="after")
    def _check_shapes(self):
        n = self.points.shape[0]
        if n % 2 or n < 16:
            raise ValueError(f"Sampled curve needs an even node count >= 16, got {n}")
        if self.derivatives.shape[0] != n or self.second_derivatives.shape[0] != n:
            raise ValueError("points, derivatives and second_derivatives must have equal length")
        if np.any(np.abs(self.derivatives) == 0):
            raise ValueError("Sampled curve has a vanishing derivative")
        return self

    @property
    def n(self) -> int:
        return int(self.points.shape[0])


Curve = Union[Circle, Ellipse, WedgeBoundary, Sampled]


def is_bounded(c: Curve) -> bool:
    return not isinstance(c, WedgeBoundary)


# ============================================================================
# MÖBIUS MAPS
# ============================================================================

class MoebiusMap(BaseModel):
    """
    Φ(z) = (az + b)/(cz + d) with ad − bc ≠ 0.

    sqrt_det fixes the branch of √Φ′(z) = sqrt_det/(cz + d). When omitted the
    principal square root of ad − bc is used.
    """

    model_config = ConfigDict(frozen=True)

    a: complex
    b: complex
    c: complex
    d: complex
    sqrt_det: Optional[complex] = None

    @model_validator(mode="after")
    def _check_determinant(self):
        det = self.a * self.d - self.b * self.c
        if det == 0:
            raise ValueError("Möbius map is degenerate: ad - bc = 0")
        if self.sqrt_det is None:
            object.__setattr__(self, "sqrt_det", complex(np.sqrt(det)))
        elif abs(self.sqrt_det ** 2 - det) > 1e-12 * max(1.0, abs(det)):
            raise ValueError(f"sqrt_det={self.sqrt_det!r} does not square to ad - bc = {det!r}")
        return self

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    @property
    def pole(self) -> ScalarPoint:
        if self.c == 0:
            return INFINITY
        return -self.d / self.c


IDENTITY = MoebiusMap(a=1, b=0, c=0, d=1)


def mobius_apply(M: MoebiusMap, z: ScalarPoint) -> ScalarPoint:
    """
    Evaluate Φ on the Riemann sphere.

    Args:
        M: The Möbius map
        z: A finite complex number or INFINITY

    Returns:
        Φ(z); the pole goes to INFINITY and INFINITY goes to a/c

    Example:
        >>> mobius_apply(MoebiusMap(a=0, b=1, c=1, d=0), 0j)
        INFINITY
    """
    if is_infinity(z):
        return INFINITY if M.c == 0 else M.a / M.c
    z = complex(z)
    den = M.c * z + M.d
    if den == 0:
        return INFINITY
    return (M.a * z + M.b) / den


def mobius_sqrt_deriv(M: MoebiusMap, z: complex) -> complex:
    """
    The chosen branch of √Φ′(z) = sqrt_det/(cz + d).

    Raises:
        PoleError: If z is the pole of M
    """
    z = complex(z)
    den = M.c * z + M.d
    if den == 0:
        raise PoleError(f"z={z!r} is the pole of the Möbius map.", point=z)
    return M.sqrt_det / den


def mobius_inverse(M: MoebiusMap) -> MoebiusMap:
    """Inverse map, keeping sqrt_det so that the chain rule holds exactly."""
    return MoebiusMap(a=M.d, b=-M.b, c=-M.c, d=M.a, sqrt_det=M.sqrt_det)


def mobius_compose(M: MoebiusMap, N: MoebiusMap) -> MoebiusMap:
    """M ∘ N, with sqrt_det(M ∘ N) = sqrt_det(M)·sqrt_det(N)."""
    return MoebiusMap(
        a=M.a * N.a + M.b * N.c,
        b=M.a * N.b + M.b * N.d,
        c=M.c * N.a + M.d * N.c,
        d=M.c * N.b + M.d * N.d,
        sqrt_det=M.sqrt_det * N.sqrt_det,
    )


def disc_automorphism(w: complex) -> MoebiusMap:
    """
    The involutive disc automorphism φ_w(z) = (w − z)/(1 − w̄ z).

    It swaps 0 and w, maps the unit circle onto itself and has its pole
    1/w̄ outside the closed disc.

    Raises:
        DomainError: If |w| >= 1
    """
    w = complex(w)
    if abs(w) >= 1.0:
        raise DomainError(f"Disc automorphism needs |w| < 1, got |w|={abs(w)!r}.")
    return MoebiusMap(a=-1, b=w, c=-w.conjugate(), d=1,
                      sqrt_det=1j * math.sqrt(1.0 - abs(w) ** 2))


# ============================================================================
# PARAMETRISATIONS
# ============================================================================

def _canonical_samples(c: Curve, t: np.ndarray):
    """Point, first and second parametric derivative at parameters t."""
    if isinstance(c, Circle):
        e = np.exp(1j * t)
        return c.center + c.radius * e, 1j * c.radius * e, -c.radius * e
    if isinstance(c, Ellipse):
        cos_t, sin_t = np.cos(t), np.sin(t)
        z = c.r * cos_t + 1j * sin_t
        dz = -c.r * sin_t + 1j * cos_t
        return z, dz, -z
    if isinstance(c, WedgeBoundary):
        upper, lower = np.exp(1j * c.theta), np.exp(-1j * c.theta)
        z = np.where(t < 0, -t * upper, t * lower)
        dz = np.where(t < 0, -upper, lower)
        return z, dz, np.zeros_like(z)
    raise UnsupportedCurveError(f"No closed-form parametrisation for {type(c).__name__}.")


def _sampled_index(c: Sampled, t: float) -> int:
    pos = float(t) / (TWO_PI / c.n)
    j = int(round(pos))
    if abs(pos - j) > 1e-9:
        raise UnsupportedCurveError(
            f"Parameter t={t!r} is not a node of the sampled curve (n={c.n}); "
            "sampled curves are not interpolated."
        )
    return j % c.n


def curve_point(c: Curve, t: float) -> complex:
    """Point of the curve at parameter t (a node for Sampled curves)."""
    if isinstance(c, Sampled):
        return complex(c.points[_sampled_index(c, t)])
    z, _, _ = _canonical_samples(c, np.asarray(float(t)))
    return complex(z)


def curve_derivative(c: Curve, t: float) -> complex:
    if isinstance(c, Sampled):
        return complex(c.derivatives[_sampled_index(c, t)])
    _, dz, _ = _canonical_samples(c, np.asarray(float(t)))
    return complex(dz)


def curve_tangent(c: Curve, t: float) -> complex:
    """
    Unit tangent z′(t)/|z′(t)| in the direction of the parametrisation.

    The wedge corner t = 0 takes the tangent of the outgoing ray.
    """
    dz = curve_derivative(c, t)
    return dz / abs(dz)


def sample(c: Curve, n: int) -> Sampled:
    """
    Sample a bounded canonical curve at n uniform parameters.

    Raises:
        UnboundedCurveError: For the wedge boundary
        UnsupportedCurveError: If n is odd or below 16
    """
    if isinstance(c, Sampled):
        return c
    if isinstance(c, WedgeBoundary):
        raise UnboundedCurveError("The wedge boundary is unbounded and cannot be sampled.")
    _check_node_count(n)
    t = TWO_PI * np.arange(n) / n
    z, dz, d2z = _canonical_samples(c, t)
    return Sampled(points=z, derivatives=dz, second_derivatives=d2z, orientation=1)


def counterclockwise(c: Curve) -> Curve:
    """Positively oriented copy of a curve; only Sampled curves can be clockwise."""
    if not isinstance(c, Sampled) or c.orientation == 1:
        return c
    idx = (-np.arange(c.n)) % c.n
    return Sampled(
        points=c.points[idx],
        derivatives=-c.derivatives[idx],
        second_derivatives=c.second_derivatives[idx],
        orientation=1,
    )


# ============================================================================
# LENGTH, AREA, CAPACITY
# ============================================================================

def arc_length(c: Curve) -> float:
    """
    Arc length σ(γ).

    Args:
        c: A bounded curve

    Returns:
        2πρ for circles, 4r·E(√(1 − 1/r²)) for ellipses, the trapezoid sum of
        |z′| for sampled curves

    Raises:
        UnboundedCurveError: For the wedge boundary
    """
    if isinstance(c, Circle):
        return TWO_PI * c.radius
    if isinstance(c, Ellipse):
        return 4.0 * c.r * ellint_E(math.sqrt(1.0 - 1.0 / c.r ** 2))
    if isinstance(c, Sampled):
        return float(TWO_PI / c.n * np.sum(np.abs(c.derivatives)))
    raise UnboundedCurveError("The wedge boundary has infinite arc length.")


def enclosed_area(c: Curve) -> float:
    """
    Area enclosed by a bounded curve.

    For Sampled curves this is the signed area ½·Im Σ Δt·conj(z)·z′, negative
    for clockwise parametrisations.
    """
    if isinstance(c, Circle):
        return math.pi * c.radius ** 2
    if isinstance(c, Ellipse):
        return math.pi * c.r
    if isinstance(c, Sampled):
        return float(0.5 * TWO_PI / c.n * np.sum(np.conj(c.points) * c.derivatives).imag)
    raise UnboundedCurveError("The wedge encloses infinite area.")


def lens_arc_length(theta: float) -> float:
    """Length 4θ·csc θ of the lens with vertices ±1 that a Möbius map makes of γ_θ."""
    return 4.0 * theta / math.sin(theta)


def lens_area(theta: float) -> float:
    """Area of the same lens: two circular segments of radius csc θ and angle 2θ."""
    return (2.0 * theta - math.sin(2.0 * theta)) / math.sin(theta) ** 2


def analytic_capacity(c: Curve) -> float:
    """
    Analytic capacity κ(γ) for the families with a closed form.

    Returns:
        ρ for circles, (r + 1)/2 for E_r, π/(2(π − θ)) for the wedge (the
        capacity of its Möbius-equivalent lens)

    Raises:
        CapacityUnknownError: For Sampled curves
    """
    if isinstance(c, Circle):
        return c.radius
    if isinstance(c, Ellipse):
        return 0.5 * (c.r + 1.0)
    if isinstance(c, WedgeBoundary):
        return math.pi / (2.0 * (math.pi - c.theta))
    raise CapacityUnknownError("Analytic capacity is only known for circles, ellipses and wedges.")


class CapacityReport(TypedDict):
    sigma: float
    kappa: float
    area: float
    margin_2pi: float           # σ − 2πκ
    margin_ab: float            # κ − √(A/π)
    holds_2pi: bool
    holds_AB: bool
    holds_isoperimetric: bool   # σ² ≥ 4πA
    equality: bool


def capacity_inequalities(c: Curve) -> CapacityReport:
    """
    Check σ ≥ 2πκ and the Ahlfors-Beurling estimate κ ≥ √(A/π).

    Both hold with equality exactly for circles. The wedge is checked through
    its lens image (σ = 4θ csc θ).

    Raises:
        CapacityUnknownError: For Sampled curves
    """
    kappa = analytic_capacity(c)
    if isinstance(c, WedgeBoundary):
        sigma, area = lens_arc_length(c.theta), lens_area(c.theta)
    else:
        sigma, area = arc_length(c), abs(enclosed_area(c))

    margin_2pi = sigma - TWO_PI * kappa
    margin_ab = kappa - math.sqrt(area / math.pi)
    tol = 1e-12
    return {
        "sigma": sigma,
        "kappa": kappa,
        "area": area,
        "margin_2pi": margin_2pi,
        "margin_ab": margin_ab,
        "holds_2pi": margin_2pi >= -tol * sigma,
        "holds_AB": margin_ab >= -tol * kappa,
        "holds_isoperimetric": sigma ** 2 - 4.0 * math.pi * area >= -tol * sigma ** 2,
        "equality": abs(margin_2pi) <= tol * sigma and abs(margin_ab) <= tol * kappa,
    }


# ============================================================================
# WINDING NUMBERS AND SIDES
# ============================================================================

def winding_number_points(points: np.ndarray, z: complex) -> float:
    """Sum of argument increments of (ζ_j − z) around the closed polygon, over 2π."""
    rel = points - z
    ratio = np.roll(rel, -1) / rel
    return float(np.sum(np.angle(ratio)) / TWO_PI)


def winding_number(c: Curve, z: complex) -> float:
    """
    Winding number of the curve around z.

    Canonical curves answer exactly (1.0 inside, 0.0 outside; the wedge is
    closed through infinity). Sampled curves sum argument increments, so the
    result is ±1 or 0 up to resolution, signed by the orientation.

    Raises:
        OnCurveError: If z coincides with a node or lies on a canonical curve
    """
    z = complex(z)
    if isinstance(c, Sampled):
        if np.any(c.points == z):
            raise OnCurveError(f"z={z!r} is a node of the curve.", point=z)
        return winding_number_points(c.points, z)

    if isinstance(c, Circle):
        level = abs(z - c.center) - c.radius
    elif isinstance(c, Ellipse):
        level = (z.real / c.r) ** 2 + z.imag ** 2 - 1.0
    else:
        if z == 0:
            raise OnCurveError("z=0 is the corner of the wedge.", point=z)
        level = abs(math.atan2(z.imag, z.real)) - c.theta
    if level == 0:
        raise OnCurveError(f"z={z!r} lies on the curve.", point=z)
    return 1.0 if level < 0 else 0.0


ELLIPSE_DISTANCE_SAMPLES = 128
ELLIPSE_DISTANCE_NEWTON_STEPS = 8


def _ellipse_distance(r: float, z: complex) -> float:
    """Nearest sample on E_r as the start, then Newton on ½|ζ(t) − z|²."""
    ts = np.linspace(0.0, 2.0 * math.pi, ELLIPSE_DISTANCE_SAMPLES, endpoint=False)
    gaps = np.abs(r * np.cos(ts) + 1j * np.sin(ts) - z)
    t = float(ts[np.argmin(gaps)])
    for _ in range(ELLIPSE_DISTANCE_NEWTON_STEPS):
        rel = complex(r * math.cos(t), math.sin(t)) - z
        d1 = complex(-r * math.sin(t), math.cos(t))
        d2 = complex(-r * math.cos(t), -math.sin(t))
        slope = (rel.conjugate() * d1).real
        curvature = abs(d1) ** 2 + (rel.conjugate() * d2).real
        if curvature <= 0.0:
            break
        step = slope / curvature
        t -= step
        if abs(step) < 1e-15:
            break
    return min(abs(complex(r * math.cos(t), math.sin(t)) - z), float(np.min(gaps)))


def distance_to_curve(c: Curve, z: complex) -> float:
    """
    Euclidean distance from z to the curve.

    Exact for circles and wedges, Newton-refined foot point for ellipses,
    node distance for Sampled curves.
    """
    z = complex(z)
    if isinstance(c, Circle):
        return abs(abs(z - c.center) - c.radius)
    if isinstance(c, Ellipse):
        return _ellipse_distance(c.r, z)
    if isinstance(c, WedgeBoundary):
        rho = abs(z)
        gap = abs(abs(math.atan2(z.imag, z.real)) - c.theta)
        return rho * math.sin(gap) if gap < math.pi / 2 else rho
    return float(np.min(np.abs(c.points - z)))


# ============================================================================
# PUSHFORWARD AND QUADRATURE
# ============================================================================

def _check_node_count(n: int) -> None:
    if n % 2 or n < 16:
        raise UnsupportedCurveError(
            f"Node count n={n} must be even and at least 16 for the periodic trapezoid rule."
        )


def curve_pushforward(M: MoebiusMap, c: Curve, n: int) -> Sampled:
    """
    Sample the Möbius image Φ(γ) with chain-rule derivatives.

    Args:
        M: Möbius map whose pole is off the curve
        c: A bounded curve
        n: Node count for canonical curves (Sampled curves keep their nodes)

    Returns:
        Sampled curve with orientation flipped when the pole lies inside γ

    Raises:
        PoleError: If the pole lies on the curve
        UnboundedCurveError: For the wedge boundary

    Example:
        >>> img = curve_pushforward(disc_automorphism(0.3), Circle(), 64)
        >>> bool(np.allclose(np.abs(img.points), 1.0))
        True
    """
    base = sample(c, n)
    z, dz, d2z = base.points, base.derivatives, base.second_derivatives

    pole = M.pole
    orientation = base.orientation
    if not is_infinity(pole):
        diameter = 2.0 * float(np.max(np.abs(z - z.mean())))
        gap = float(np.min(np.abs(z - pole)))
        if gap <= POLE_PROXIMITY * diameter:
            raise PoleError(
                f"Pole {pole!r} of the Möbius map lies on the curve (distance {gap:.3g}).",
                point=pole,
            )
        if abs(winding_number_points(z, pole)) > 0.5:
            orientation = -orientation

    den = M.c * z + M.d
    w = (M.a * z + M.b) / den
    d1 = M.det / den ** 2
    d2 = -2.0 * M.c * M.det / den ** 3
    logger.debug("Pushed forward %d nodes, orientation %+d", base.n, orientation)
    return Sampled(
        points=w,
        derivatives=d1 * dz,
        second_derivatives=d2 * dz ** 2 + d1 * d2z,
        orientation=orientation,
    )


@dataclass(frozen=True)
class QuadratureRule:
    """
    Periodic trapezoid rule on a bounded curve.

    weights are arc-length weights Δt·|z′(t_j)|, so Σ weights ≈ σ(γ).
    """

    nodes: np.ndarray
    step: float
    points: np.ndarray
    derivatives: np.ndarray
    second_derivatives: np.ndarray
    weights: np.ndarray
    orientation: int = 1

    @property
    def n(self) -> int:
        return int(self.nodes.shape[0])

    @property
    def speed(self) -> np.ndarray:
        return np.abs(self.derivatives)

    @property
    def tangents(self) -> np.ndarray:
        """Unit tangents with the curve's interior on the left."""
        return self.orientation * self.derivatives / self.speed

    @property
    def max_spacing(self) -> float:
        return float(np.max(self.weights))

    def halved(self) -> "QuadratureRule":
        """Every other node; needs n divisible by 4."""
        if self.n % 4:
            raise UnsupportedCurveError(f"Cannot halve a rule with n={self.n} nodes.")
        s = slice(0, None, 2)
        return QuadratureRule(
            nodes=self.nodes[s],
            step=2.0 * self.step,
            points=self.points[s],
            derivatives=self.derivatives[s],
            second_derivatives=self.second_derivatives[s],
            weights=2.0 * self.weights[s],
            orientation=self.orientation,
        )


def quadrature(c: Curve, n: Optional[int] = None) -> QuadratureRule:
    """
    Periodic trapezoid rule with n uniform nodes on [0, 2π).

    Args:
        c: A bounded curve
        n: Even node count >= 16; Sampled curves use their own nodes and
           reject a different n

    Returns:
        QuadratureRule with nodes, points, derivatives and arc-length weights

    Raises:
        UnboundedCurveError: For the wedge boundary
        UnsupportedCurveError: For odd or too small n
    """
    if isinstance(c, WedgeBoundary):
        raise UnboundedCurveError(
            "The wedge boundary is handled by closed forms, not by quadrature."
        )
    if isinstance(c, Sampled):
        if n is not None and n != c.n:
            raise UnsupportedCurveError(
                f"Sampled curve has {c.n} nodes; a rule with n={n} would need interpolation."
            )
        base = c
    else:
        if n is None:
            raise UnsupportedCurveError("A node count is required for canonical curves.")
        base = sample(c, n)

    step = TWO_PI / base.n
    return QuadratureRule(
        nodes=step * np.arange(base.n),
        step=step,
        points=base.points,
        derivatives=base.derivatives,
        second_derivatives=base.second_derivatives,
        weights=step * np.abs(base.derivatives),
        orientation=base.orientation,
    )
