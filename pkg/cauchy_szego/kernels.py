"""
Cauchy and Szegő kernels on the canonical curves.

Szegő kernels come from explicit Riemann maps through the transformation law

    S(z, ζ) = √Φ′(z) · S_D(Φ(z), Φ(ζ)) · conj(√Φ′(ζ)),  S_D(a, b) = 1/(2π(1 − a b̄))

with Φ the map of the requested side onto the unit disc: affine/inversion for
circles, a theta quotient inside the ellipse, an inverse Joukowski map outside
it, and powers of z on the two sides of the wedge.
"""

import cmath
import logging
import math
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np

from cauchy_szego.errors import (
    DomainError,
    OnCurveError,
    SideMismatchError,
    UnsupportedCurveError,
)
from cauchy_szego.geometry import (
    Circle,
    Curve,
    Ellipse,
    QuadratureRule,
    Sampled,
    ScalarPoint,
    WedgeBoundary,
    curve_point,
    curve_tangent,
    distance_to_curve,
    is_infinity,
    winding_number,
)
from cauchy_szego.specfun import ellint_K, ellint_Pi, theta, theta_prime
from config.settings import get_settings

logger = logging.getLogger(__name__)

FOUR_PI_SQ = 4.0 * math.pi ** 2

# Below this |x| the sinc Taylor polynomial is used
SINC_TAYLOR_CUT = 1e-4


class DomainSide(str, Enum):
    """Interior is Ω₊ (left of a counterclockwise curve), exterior is Ω₋."""

    INTERIOR = "interior"
    EXTERIOR = "exterior"

    @property
    def sign(self) -> int:
        return 1 if self is DomainSide.INTERIOR else -1


class RiemannMapValue(NamedTuple):
    value: complex
    derivative: complex


def _orientation(c: Curve) -> int:
    return c.orientation if isinstance(c, Sampled) else 1


def side_of(c: Curve, z: complex) -> DomainSide:
    """Side of the curve containing the finite point z."""
    w = winding_number(c, z)
    return DomainSide.INTERIOR if abs(abs(w) - 1.0) < 0.5 else DomainSide.EXTERIOR


def _require_side(c: Curve, side: DomainSide, z: complex) -> None:
    actual = side_of(c, z)
    if actual is not side:
        raise SideMismatchError(f"z={z!r} lies in the {actual.value}, not the {side.value}.")


# ============================================================================
# CAUCHY KERNEL AND ITS NORM
# ============================================================================

def cauchy_kernel(c: Curve, side: DomainSide, z: complex, t: float) -> complex:
    """
    Cauchy kernel C±(z, ζ) = ±T(ζ)/(2πi(ζ − z)) at ζ = ζ(t).

    Args:
        c: The curve
        side: INTERIOR for the + kernel, EXTERIOR for the − kernel
        z: Evaluation point off the curve
        t: Curve parameter of ζ

    Raises:
        OnCurveError: If z coincides with ζ(t)

    Example:
        >>> cauchy_kernel(Circle(), DomainSide.INTERIOR, 0j, 0.0)
        (0.15915494309189535+0j)
    """
    zeta = curve_point(c, t)
    z = complex(z)
    if abs(zeta - z) <= get_settings().on_curve_tol:
        raise OnCurveError(f"z={z!r} coincides with the curve point at t={t!r}.", point=z)
    tangent = _orientation(c) * curve_tangent(c, t)
    return side.sign * tangent / (2j * math.pi * (zeta - z))


def quadrature_resolves(rule: QuadratureRule, z: complex, collar_spacings: Optional[float] = None) -> bool:
    """True when z is further from the nodes than collar_spacings node spacings."""
    if collar_spacings is None:
        collar_spacings = get_settings().collar_spacings
    gap = float(np.min(np.abs(rule.points - complex(z))))
    return gap > collar_spacings * rule.max_spacing


def cauchy_norm_sq(c: Curve, z: complex, rule: QuadratureRule) -> float:
    """
    ‖C(z, ·)‖² = (1/4π²) ∫ dσ(ζ)/|ζ − z|² by the rule's trapezoid sum.

    The value is the same on both sides. Points inside the quadrature collar
    are still evaluated, with a warning, since the rule may not resolve the
    near-singular integrand there.

    Raises:
        OnCurveError: If z coincides with a node
    """
    z = complex(z)
    dist = np.abs(rule.points - z)
    if np.any(dist <= get_settings().on_curve_tol):
        raise OnCurveError(f"z={z!r} lies on the curve.", point=z)
    if not quadrature_resolves(rule, z):
        logger.warning("z=%r is within the quadrature collar; the Cauchy norm may be inaccurate", z)
    return float(np.sum(rule.weights / dist ** 2) / FOUR_PI_SQ)


def circle_cauchy_norm_sq(c: Circle, z: complex) -> float:
    """Closed form ρ/(2π|ρ² − |z − center|²|) of the Cauchy norm on a circle."""
    rho = c.radius
    gap = abs(rho ** 2 - abs(complex(z) - c.center) ** 2)
    if gap == 0:
        raise OnCurveError(f"z={z!r} lies on the circle.", point=complex(z))
    return rho / (2.0 * math.pi * gap)


# ============================================================================
# WEDGE CLOSED FORMS
# ============================================================================

def sinc(x: float) -> float:
    """sin(x)/x with sinc(0) = 1."""
    if abs(x) < SINC_TAYLOR_CUT:
        x2 = x * x
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return math.sin(x) / x


def wedge_I(r: float, alpha: float) -> float:
    """
    ∫₀^∞ dx / |x − r e^{iα}|² = 1/(r · sinc(π − α)).

    Args:
        r: Distance of the point from the origin, r > 0
        alpha: Angle between the point and the ray, in (0, 2π)

    Raises:
        DomainError: If r <= 0 or alpha is outside (0, 2π)
    """
    if r <= 0:
        raise DomainError(f"wedge_I needs r > 0, got r={r!r}.")
    if not 0.0 < alpha < 2.0 * math.pi:
        raise DomainError(f"wedge_I needs alpha in (0, 2π), got alpha={alpha!r}.")
    return 1.0 / (r * sinc(math.pi - alpha))


def normalize_wedge_angle(theta: float, phi: float) -> float:
    """Representative of phi in [−θ, 2π − θ)."""
    return (phi + theta) % (2.0 * math.pi) - theta


def _wedge_polar(theta: float, r: float, phi: float):
    if not 0.0 < theta < math.pi / 2:
        raise DomainError(f"Wedge half-angle theta={theta!r} is outside (0, π/2).")
    if r <= 0:
        raise OnCurveError("r=0 is the corner of the wedge.", point=0j)
    phi = normalize_wedge_angle(theta, phi)
    if phi == -theta or phi == theta:
        raise OnCurveError(
            f"phi={phi!r} lies on the wedge boundary.", point=complex(cmath.rect(r, phi))
        )
    return phi


def wedge_cauchy_norm_sq(theta: float, r: float, phi: float) -> float:
    """
    ‖C(re^{iφ}, ·)‖² on γ_θ: (1/4π²)·[I(r, angle to the upper ray) + I(r, angle to the lower ray)].

    Inside W_θ the angles are θ − φ and θ + φ; inside V_θ they are φ − θ and
    φ + θ.

    Raises:
        OnCurveError: If re^{iφ} lies on the wedge boundary
    """
    phi = _wedge_polar(theta, r, phi)
    if abs(phi) < theta:
        total = wedge_I(r, theta - phi) + wedge_I(r, theta + phi)
    else:
        total = wedge_I(r, phi - theta) + wedge_I(r, phi + theta)
    return total / FOUR_PI_SQ


def wedge_szego_diag(theta: float, r: float, phi: float) -> float:
    """
    S(z, z) at z = re^{iφ}: 1/(8rθ)·sec(πφ/2θ) in W_θ, and
    1/(8r(π − θ))·sec((π/2)(π − φ)/(π − θ)) in V_θ.
    """
    phi = _wedge_polar(theta, r, phi)
    if abs(phi) < theta:
        return 1.0 / (8.0 * r * theta * math.cos(math.pi * phi / (2.0 * theta)))
    outer = math.pi - theta
    return 1.0 / (8.0 * r * outer * math.cos(0.5 * math.pi * (math.pi - phi) / outer))


def _half_plane_disc_map(z: complex, beta: float):
    """Ψ(z) = (1 − z^β)/(1 + z^β) and √Ψ′(z) = i√(2β)·z^((β−1)/2)/(1 + z^β)."""
    w = z ** beta
    value = (1.0 - w) / (1.0 + w)
    derivative = -2.0 * beta * w / (z * (1.0 + w) ** 2)
    sqrt_derivative = 1j * math.sqrt(2.0 * beta) * z ** (0.5 * (beta - 1.0)) / (1.0 + w)
    return value, derivative, sqrt_derivative


def wedge_riemann_map(theta: float, side: DomainSide, z: complex) -> RiemannMapValue:
    """
    Riemann map of either side of γ_θ onto the unit disc.

    On W_θ, Ψ_θ(z) = (1 − z^{π/2θ})/(1 + z^{π/2θ}); on V_θ, Ψ_{π−θ}(−z).

    Raises:
        SideMismatchError: If z is not on the requested side
        OnCurveError: If z lies on the wedge boundary
    """
    z = complex(z)
    _wedge_polar(theta, abs(z), cmath.phase(z) if z != 0 else 0.0)
    _require_side(WedgeBoundary(theta=theta), side, z)
    value, derivative, _ = _wedge_map_data(theta, side, z)
    return RiemannMapValue(value, derivative)


def _wedge_map_data(theta: float, side: DomainSide, z: complex):
    if side is DomainSide.INTERIOR:
        return _half_plane_disc_map(z, math.pi / (2.0 * theta))
    value, derivative, _ = _half_plane_disc_map(-z, math.pi / (2.0 * (math.pi - theta)))
    beta = math.pi / (2.0 * (math.pi - theta))
    root = math.sqrt(2.0 * beta) * (-z) ** (0.5 * (beta - 1.0)) / (1.0 + (-z) ** beta)
    return value, -derivative, root


# ============================================================================
# ELLIPSE
# ============================================================================

def ellipse_nome(r: float) -> float:
    """q = ((r − 1)/(r + 1))², the nome of the ellipse E_r."""
    return ((r - 1.0) / (r + 1.0)) ** 2


def ellipse_cauchy_norm0(r: float) -> float:
    """
    ‖C(0, ·)‖² on E_r in closed form:

        (1/(π² r))·[(r² + 1)·Π(1 − r², k) − K(k)],  k = √(1 − 1/r²)

    Args:
        r: Semi-axis ratio, r >= 1 (r = 1 gives the circle value 1/2π)

    Raises:
        DomainError: If r < 1
    """
    if r < 1.0:
        raise DomainError(f"Ellipse parameter r={r!r} must be >= 1.")
    if r == 1.0:
        return 1.0 / (2.0 * math.pi)
    k = math.sqrt(1.0 - 1.0 / r ** 2)
    bracket = (r * r + 1.0) * ellint_Pi(1.0 - r * r, k) - ellint_K(k)
    return bracket / (math.pi ** 2 * r)


def _inside_ellipse(r: float, z: complex) -> float:
    return (z.real / r) ** 2 + z.imag ** 2 - 1.0


def _theta_quotient(r: float, z) -> tuple:
    """Θ_r(z) = θ₁(w, q)/θ₄(w, q), w = arcsin(z/√(r² − 1)), and Θ_r′(z); no domain check."""
    focal = math.sqrt(r * r - 1.0)
    q = ellipse_nome(r)
    zz = np.asarray(z, dtype=complex)
    flat = np.atleast_1d(zz)
    w = np.arcsin(flat / focal)
    t1, t4 = theta(1, w, q), theta(4, w, q)
    d1, d4 = theta_prime(1, w, q), theta_prime(4, w, q)
    value = t1 / t4
    dtheta = (d1 * t4 - t1 * d4) / t4 ** 2

    # dw/dz = 1/(focal·cos w) on the branch of w itself; cos w vanishes at the foci
    cos_w = np.cos(w)
    singular = np.abs(cos_w) < 1e-8
    derivative = dtheta / (focal * np.where(singular, 1.0, cos_w))
    if np.any(singular):
        h = 1e-6j
        _, dp = _theta_quotient(r, flat[singular] + h)
        _, dm = _theta_quotient(r, flat[singular] - h)
        derivative[singular] = 0.5 * (dp + dm)
    return value.reshape(zz.shape), derivative.reshape(zz.shape)


def ellipse_riemann_map(r: float, z: complex) -> RiemannMapValue:
    """
    Riemann map Θ_r of the interior of E_r onto the unit disc with Θ_r(0) = 0.

        Θ_r(z) = θ₁(w, q)/θ₄(w, q),  w = arcsin(z/√(r² − 1)),  q = ((r − 1)/(r + 1))²

    The principal arcsin has its cut on the real axis beyond the foci;
    Θ_r is continuous across it because θ₁/θ₄ is symmetric under w ↦ π − w.

    Args:
        r: Semi-axis ratio, r > 1 (r = 1 gives the identity map of the disc)
        z: Point strictly inside E_r

    Returns:
        RiemannMapValue(value, derivative)

    Raises:
        DomainError: If z is not strictly inside E_r or r < 1

    Example:
        >>> ellipse_riemann_map(2.0, 0j).value
        0j
    """
    z = complex(z)
    if r < 1.0:
        raise DomainError(f"Ellipse parameter r={r!r} must be >= 1.")
    if _inside_ellipse(r, z) >= 0:
        raise DomainError(f"z={z!r} is not strictly inside the ellipse E_{r:g}.")
    if r == 1.0:
        return RiemannMapValue(z, 1.0 + 0j)
    value, derivative = _theta_quotient(r, z)
    return RiemannMapValue(complex(value), complex(derivative))


def _joukowski_inverse(r: float, z):
    """Ψ_r(z) = (r + 1)/(z + s), s = z·√(1 − (r² − 1)/z²); returns Ψ, Ψ′ and √Ψ′."""
    z = np.asarray(z, dtype=complex)
    s = z * np.sqrt(1.0 - (r * r - 1.0) / z ** 2)
    value = (r + 1.0) / (z + s)
    derivative = -value / s
    sqrt_derivative = 1j * value * np.sqrt((1.0 + z / s) / (r + 1.0))
    return value, derivative, sqrt_derivative


def ellipse_exterior_map(r: float, z: complex) -> RiemannMapValue:
    """
    Riemann map Ψ_r of the exterior of E_r onto the unit disc, Ψ_r(∞) = 0.

    Ψ_r(z) = (r + 1)/(z + √(z² − (r² − 1))) with the root behaving like z at
    infinity; for r = 2 this is 3/(z + √(z² − 3)).

    Raises:
        DomainError: If z is not strictly outside E_r or r < 1
    """
    z = complex(z)
    if r < 1.0:
        raise DomainError(f"Ellipse parameter r={r!r} must be >= 1.")
    if _inside_ellipse(r, z) <= 0:
        raise DomainError(f"z={z!r} is not strictly outside the ellipse E_{r:g}.")
    if r == 1.0:
        return RiemannMapValue(1.0 / z, -1.0 / z ** 2)
    value, derivative, _ = _joukowski_inverse(r, z)
    return RiemannMapValue(complex(value), complex(derivative))


# ============================================================================
# SZEGŐ KERNEL
# ============================================================================

def _map_data(c: Curve, side: DomainSide, z):
    """
    Φ(z) and the holomorphic branch of √Φ′(z) for the side's Riemann map.

    Accepts points on the curve as well, so it is shared by the diagonal and
    by boundary evaluation.
    """
    if isinstance(c, Circle):
        rel = np.asarray(z, dtype=complex) - c.center
        if side is DomainSide.INTERIOR:
            return rel / c.radius, np.full_like(rel, 1.0 / math.sqrt(c.radius))
        return c.radius / rel, 1j * math.sqrt(c.radius) / rel
    if isinstance(c, Ellipse):
        if c.r == 1.0:
            return _map_data(Circle(), side, z)
        if side is DomainSide.INTERIOR:
            value, derivative = _theta_quotient(c.r, z)
            # Re Θ_r′ > 0 on the closed ellipse, so the principal root is holomorphic
            return value, np.sqrt(derivative)
        value, _, root = _joukowski_inverse(c.r, z)
        return value, root
    if isinstance(c, WedgeBoundary):
        zz = np.asarray(z, dtype=complex)
        value, _, root = _wedge_map_data(c.theta, side, zz)
        return value, root
    raise UnsupportedCurveError(
        "No explicit Riemann map for sampled curves; use the boundary operator solve."
    )


def _check_strictly_inside(c: Curve, side: DomainSide, z: complex) -> None:
    if distance_to_curve(c, z) <= get_settings().on_curve_tol:
        raise OnCurveError(f"z={z!r} lies on the curve.", point=z)
    _require_side(c, side, z)


def szego_diag(c: Curve, side: DomainSide, z: ScalarPoint) -> float:
    """
    Szegő kernel diagonal S±(z, z) = |Φ′(z)| / (2π(1 − |Φ(z)|²)).

    Args:
        c: Circle, Ellipse or WedgeBoundary
        side: Side of the curve containing z
        z: Point strictly inside that side; INFINITY on the exterior of a
           bounded curve gives exactly 0

    Raises:
        SideMismatchError: If z lies on the other side
        OnCurveError: If z lies on the curve
        UnsupportedCurveError: For Sampled curves

    Example:
        >>> round(szego_diag(Circle(), DomainSide.INTERIOR, 0j) * 2 * math.pi, 12)
        1.0
    """
    if isinstance(c, Sampled):
        raise UnsupportedCurveError(
            "Szegő kernels of sampled curves come from the boundary operator solve."
        )
    if is_infinity(z):
        if isinstance(c, WedgeBoundary):
            raise OnCurveError("Infinity lies on the wedge boundary.")
        if side is DomainSide.INTERIOR:
            raise SideMismatchError("Infinity lies in the exterior of a bounded curve.")
        return 0.0

    z = complex(z)
    _check_strictly_inside(c, side, z)
    if isinstance(c, WedgeBoundary):
        return wedge_szego_diag(c.theta, abs(z), cmath.phase(z))
    value, root = _map_data(c, side, z)
    value, root = complex(value), complex(root)
    return abs(root) ** 2 / (2.0 * math.pi * (1.0 - abs(value) ** 2))


def szego_boundary_kernel(c: Curve, side: DomainSide, z: complex, t):
    """
    Off-diagonal Szegő kernel S±(z, ζ(t)) by the transformation law.

    Args:
        c: Circle, Ellipse or WedgeBoundary
        side: Side of the curve containing z
        z: Point strictly inside that side
        t: Curve parameter of ζ, scalar or array

    Returns:
        Complex scalar for scalar t, complex ndarray otherwise

    Raises:
        UnsupportedCurveError: For Sampled curves (no Riemann map)
        SideMismatchError: If z lies on the other side
    """
    if isinstance(c, Sampled):
        raise UnsupportedCurveError("No explicit Riemann map for sampled curves.")
    z = complex(z)
    _check_strictly_inside(c, side, z)
    scalar = np.ndim(t) == 0
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    zeta = np.array([curve_point(c, tj) for tj in ts])

    phi_z, root_z = _map_data(c, side, z)
    phi_zeta, root_zeta = _map_data(c, side, zeta)
    kernel = complex(root_z) * np.conj(root_zeta) / (
        2.0 * math.pi * (1.0 - complex(phi_z) * np.conj(phi_zeta))
    )
    return complex(kernel[0]) if scalar else kernel


def szego_row(c: Curve, side: DomainSide, z: complex, rule: QuadratureRule) -> np.ndarray:
    """S±(z, ζ_j) at all nodes of a rule on a canonical bounded curve."""
    z = complex(z)
    _check_strictly_inside(c, side, z)
    phi_z, root_z = _map_data(c, side, z)
    phi_zeta, root_zeta = _map_data(c, side, rule.points)
    return complex(root_z) * np.conj(root_zeta) / (
        2.0 * math.pi * (1.0 - complex(phi_z) * np.conj(phi_zeta))
    )


def cauchy_row(side: DomainSide, z: complex, rule: QuadratureRule) -> np.ndarray:
    """C±(z, ζ_j) at all nodes of a rule."""
    return side.sign * rule.tangents / (2j * math.pi * (rule.points - complex(z)))


def cauchy_szego_distance_sq(c: Curve, side: DomainSide, z: complex, rule: QuadratureRule) -> float:
    """
    ∫ |C(z, ζ) − S(z, ζ)|² dσ(ζ), which equals S(z, z)(Λ(γ, z)² − 1).

    Raises:
        UnsupportedCurveError: For curves without an explicit Riemann map
    """
    diff = cauchy_row(side, z, rule) - szego_row(c, side, z, rule)
    return float(np.sum(rule.weights * np.abs(diff) ** 2))
