"""
Special functions used by the ellipse formulas.

Complete elliptic integrals of the first, second and third kind (Whittaker and
Watson conventions), the elliptic nome and its inverse, the Jacobi theta
functions θ₁..θ₄ with their z-derivatives, and Jacobi's sn as a theta quotient.

K and E come from the arithmetic-geometric mean; Π comes from Carlson's
symmetric forms R_F and R_J. Theta series are summed term by term until a term
bound drops below THETA_TOL times the running sum.
"""

import logging
import math
from typing import Union

import numpy as np
from numpy.typing import ArrayLike

from cauchy_szego.errors import DomainError, PoleError

logger = logging.getLogger(__name__)

THETA_TOL = 1e-16
THETA_MAX_TERMS = 200

# Carlson duplication stops once every argument is within this relative spread
CARLSON_ERRTOL = 1e-3

AGM_MAX_ITER = 64


# ============================================================================
# DOMAIN CHECKS
# ============================================================================

def _check_modulus(k: float, allow_one: bool = False) -> float:
    k = float(k)
    if allow_one:
        if not 0.0 <= k <= 1.0:
            raise DomainError(f"Elliptic modulus k={k!r} is outside [0, 1].")
    elif not 0.0 <= k < 1.0:
        raise DomainError(
            f"Elliptic modulus k={k!r} is outside [0, 1). K(k) diverges at k=1."
        )
    return k


def _check_nome(q: float) -> float:
    q = float(q)
    if not 0.0 <= q < 1.0:
        raise DomainError(
            f"Nome q={q!r} is outside [0, 1). The theta series do not converge at q=1."
        )
    return q


# ============================================================================
# ARITHMETIC-GEOMETRIC MEAN AND K, E
# ============================================================================

def agm(a: float, b: float) -> float:
    """
    Arithmetic-geometric mean of two nonnegative reals.

    Args:
        a: First argument
        b: Second argument

    Returns:
        The common limit of the arithmetic and geometric mean sequences
    """
    if a < 0 or b < 0:
        raise DomainError(f"agm needs nonnegative arguments, got a={a!r}, b={b!r}.")
    if a == 0 or b == 0:
        return 0.0
    for _ in range(AGM_MAX_ITER):
        if abs(a - b) <= 1e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def ellint_K(k: float) -> float:
    """
    Complete elliptic integral of the first kind K(k).

    Args:
        k: Elliptic modulus in [0, 1)

    Returns:
        ∫₀¹ dt / √((1 − t²)(1 − k²t²))

    Raises:
        DomainError: If k is outside [0, 1)

    Example:
        >>> ellint_K(0.0)
        1.5707963267948966
    """
    k = _check_modulus(k)
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - k * k)))


def ellint_E(k: float) -> float:
    """
    Complete elliptic integral of the second kind E(k).

    Uses the AGM together with the sum of the squared half-differences
    c_n, so no quadrature is involved.

    Args:
        k: Elliptic modulus in [0, 1]

    Returns:
        ∫₀¹ √((1 − k²t²) / (1 − t²)) dt

    Raises:
        DomainError: If k is outside [0, 1]
    """
    k = _check_modulus(k, allow_one=True)
    if k == 1.0:
        return 1.0

    a, b, c = 1.0, math.sqrt(1.0 - k * k), k
    power = 0.5
    total = power * c * c
    for _ in range(AGM_MAX_ITER):
        if abs(c) <= 1e-17 * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        power *= 2.0
        total += power * c * c
    K = math.pi / (2.0 * a)
    return K * (1.0 - total)


# ============================================================================
# CARLSON SYMMETRIC FORMS
# ============================================================================

def _rf(x: float, y: float, z: float) -> float:
    """Carlson R_F(x, y, z) by duplication."""
    xn, yn, zn = x, y, z
    while True:
        mu = (xn + yn + zn) / 3.0
        xndev = 2.0 - (mu + xn) / mu
        yndev = 2.0 - (mu + yn) / mu
        zndev = 2.0 - (mu + zn) / mu
        if max(abs(xndev), abs(yndev), abs(zndev)) < CARLSON_ERRTOL:
            break
        xr, yr, zr = math.sqrt(xn), math.sqrt(yn), math.sqrt(zn)
        lamda = xr * (yr + zr) + yr * zr
        xn = (xn + lamda) * 0.25
        yn = (yn + lamda) * 0.25
        zn = (zn + lamda) * 0.25

    e2 = xndev * yndev - zndev * zndev
    e3 = xndev * yndev * zndev
    s = 1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0
    return s / math.sqrt(mu)


def _rc(x: float, y: float) -> float:
    """Carlson R_C(x, y) for y > 0."""
    xn, yn = x, y
    while True:
        mu = (xn + yn + yn) / 3.0
        sn = (yn + mu) / mu - 2.0
        if abs(sn) < CARLSON_ERRTOL:
            break
        lamda = 2.0 * math.sqrt(xn) * math.sqrt(yn) + yn
        xn = (xn + lamda) * 0.25
        yn = (yn + lamda) * 0.25

    s = sn * sn * (0.3 + sn * (1.0 / 7.0 + sn * (0.375 + sn * 9.0 / 22.0)))
    return (1.0 + s) / math.sqrt(mu)


def _rj(x: float, y: float, z: float, p: float) -> float:
    """Carlson R_J(x, y, z, p) for p > 0."""
    xn, yn, zn, pn = x, y, z, p
    sigma = 0.0
    power4 = 1.0
    while True:
        mu = (xn + yn + zn + pn + pn) * 0.2
        xndev = (mu - xn) / mu
        yndev = (mu - yn) / mu
        zndev = (mu - zn) / mu
        pndev = (mu - pn) / mu
        if max(abs(xndev), abs(yndev), abs(zndev), abs(pndev)) < CARLSON_ERRTOL:
            break
        xr, yr, zr = math.sqrt(xn), math.sqrt(yn), math.sqrt(zn)
        lamda = xr * (yr + zr) + yr * zr
        alfa = pn * (xr + yr + zr) + xr * yr * zr
        alfa = alfa * alfa
        beta = pn * (pn + lamda) * (pn + lamda)
        sigma += power4 * _rc(alfa, beta)
        power4 *= 0.25
        xn = (xn + lamda) * 0.25
        yn = (yn + lamda) * 0.25
        zn = (zn + lamda) * 0.25
        pn = (pn + lamda) * 0.25

    c1, c2, c3, c4 = 3.0 / 14.0, 1.0 / 3.0, 3.0 / 22.0, 3.0 / 26.0
    ea = xndev * (yndev + zndev) + yndev * zndev
    eb = xndev * yndev * zndev
    ec = pndev * pndev
    e2 = ea - 3.0 * ec
    e3 = eb + 2.0 * pndev * (ea - ec)
    s1 = 1.0 + e2 * (-c1 + 0.75 * c3 * e2 - 1.5 * c4 * e3)
    s2 = eb * (0.5 * c2 + pndev * (-c3 - c3 + pndev * c4))
    s3 = pndev * ea * (c2 - pndev * c3) - c2 * pndev * ec
    return 3.0 * sigma + power4 * (s1 + s2 + s3) / (mu * math.sqrt(mu))


def ellint_Pi(n: float, k: float) -> float:
    """
    Complete elliptic integral of the third kind Π(n, k).

    The characteristic enters as (1 − n t²), so the ellipse formulas use
    n = 1 − r² ≤ 0.

    Args:
        n: Characteristic, n < 1
        k: Elliptic modulus in [0, 1)

    Returns:
        ∫₀¹ dt / ((1 − n t²) √((1 − t²)(1 − k²t²)))

    Raises:
        DomainError: If n ≥ 1 or k is outside [0, 1)

    Example:
        >>> round(ellint_Pi(-1.0, 0.0), 12) == round(math.pi / (2 * math.sqrt(2)), 12)
        True
    """
    k = _check_modulus(k)
    n = float(n)
    if n >= 1.0:
        raise DomainError(
            f"Characteristic n={n!r} must be < 1; the integrand has a pole inside [0, 1]."
        )
    if n == 0.0:
        return ellint_K(k)
    kc2 = 1.0 - k * k
    return _rf(0.0, kc2, 1.0) + n / 3.0 * _rj(0.0, kc2, 1.0, 1.0 - n)


# ============================================================================
# NOME AND INVERSE NOME
# ============================================================================

def nome(k: float) -> float:
    """
    Elliptic nome q(k) = exp(−π K(k′) / K(k)).

    Args:
        k: Elliptic modulus in [0, 1)

    Returns:
        q in [0, 1), with q(0) = 0
    """
    k = _check_modulus(k)
    if k == 0.0:
        return 0.0
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    # K(k')/K(k) = agm(1, k')/agm(1, k)
    return math.exp(-math.pi * agm(1.0, kp) / agm(1.0, k))


def inverse_nome(q: float) -> float:
    """
    Elliptic modulus k(q) = θ₂(0, q)² / θ₃(0, q)².

    Args:
        q: Nome in [0, 1)

    Returns:
        k in [0, 1) with nome(k) == q

    Raises:
        DomainError: If q is outside [0, 1)
    """
    q = _check_nome(q)
    if q == 0.0:
        return 0.0
    t2, t3, _ = theta_constants(q)
    return (t2 / t3) ** 2


# ============================================================================
# JACOBI THETA FUNCTIONS
# ============================================================================

def _theta_series(j: int, z: ArrayLike, q: float, derivative: bool) -> Union[complex, np.ndarray]:
    if j not in (1, 2, 3, 4):
        raise DomainError(f"Theta index j={j!r} must be one of 1, 2, 3, 4.")
    q = _check_nome(q)

    scalar = np.ndim(z) == 0
    zz = np.asarray(z, dtype=complex)
    abs_im = np.abs(zz.imag)

    total = np.zeros_like(zz)
    if j in (3, 4) and not derivative:
        total += 1.0
    if q == 0.0:
        return complex(total) if scalar else total

    log_q = math.log(q)
    half_integer = j in (1, 2)
    start = 0 if half_integer else 1

    terms = 0
    for m in range(start, start + THETA_MAX_TERMS):
        if half_integer:
            freq = 2 * m + 1
            coef = 2.0 * math.exp((m + 0.5) ** 2 * log_q)
        else:
            freq = 2 * m
            coef = 2.0 * math.exp(m * m * log_q)
        if j in (1, 4) and m % 2 == 1:
            coef = -coef
        arg = freq * zz

        if j == 1:
            term = coef * (freq * np.cos(arg) if derivative else np.sin(arg))
        elif derivative:
            term = -coef * freq * np.sin(arg)
        else:
            term = coef * np.cos(arg)

        total = total + term
        terms += 1

        # |sin|, |cos| <= cosh(Im); the bound cannot vanish by accident the way a term can
        bound = abs(coef) * np.cosh(freq * abs_im) * (freq if derivative else 1)
        if np.all(bound <= THETA_TOL * np.abs(total)) or abs(coef) == 0.0:
            break
    else:
        logger.warning("Theta series j=%d hit the %d-term cap at q=%.6g", j, THETA_MAX_TERMS, q)

    return complex(total) if scalar else total


def theta(j: int, z: ArrayLike, q: float) -> Union[complex, np.ndarray]:
    """
    Jacobi theta function θ_j(z, q) in the Whittaker and Watson normalisation.

        θ₁ = 2 Σ (−1)ⁿ q^((n+½)²) sin((2n+1)z)
        θ₂ = 2 Σ q^((n+½)²) cos((2n+1)z)
        θ₃ = 1 + 2 Σ q^(n²) cos(2nz)
        θ₄ = 1 + 2 Σ (−1)ⁿ q^(n²) cos(2nz)

    Args:
        j: Theta index, one of 1..4
        z: Complex argument, scalar or array
        q: Nome in [0, 1)

    Returns:
        Complex scalar for scalar z, complex ndarray otherwise

    Raises:
        DomainError: If j is not in 1..4 or q is outside [0, 1)
    """
    return _theta_series(j, z, q, derivative=False)


def theta_prime(j: int, z: ArrayLike, q: float) -> Union[complex, np.ndarray]:
    """z-derivative of θ_j, summed from the term-by-term differentiated series."""
    return _theta_series(j, z, q, derivative=True)


def theta_constants(q: float) -> tuple:
    """
    Theta constants (θ₂(0, q), θ₃(0, q), θ₄(0, q)).

    For q above e^{−π} the imaginary transformation of the nome,
    q′ = exp(π²/ln q), is applied first, so the constants stay accurate for
    q close to 1 where the direct series would need more than THETA_MAX_TERMS
    terms.

    Args:
        q: Nome in [0, 1)

    Returns:
        Tuple (θ₂, θ₃, θ₄) of reals
    """
    q = _check_nome(q)
    if q <= math.exp(-math.pi):
        return (theta(2, 0.0, q).real, theta(3, 0.0, q).real, theta(4, 0.0, q).real)
    log_q = -math.log(q)
    q_dual = math.exp(-math.pi ** 2 / log_q)
    scale = math.sqrt(math.pi / log_q)
    return (
        scale * theta(4, 0.0, q_dual).real,
        scale * theta(3, 0.0, q_dual).real,
        scale * theta(2, 0.0, q_dual).real,
    )


def theta1_prime_at0(q: float) -> float:
    """
    θ₁′(0, q), which equals θ₂(0, q) θ₃(0, q) θ₄(0, q) by Jacobi's identity.

    Args:
        q: Nome in [0, 1)

    Returns:
        The derivative as a real number
    """
    return theta_prime(1, 0.0, q).real


# ============================================================================
# JACOBI sn
# ============================================================================

def jacobi_sn(u: complex, k: float) -> complex:
    """
    Jacobi's elliptic function sn(u, k) as a quotient of theta functions.

        sn(u, k) = (θ₃(0, q) / θ₂(0, q)) · θ₁(v, q) / θ₄(v, q),  v = u / θ₃(0, q)²

    Args:
        u: Complex argument
        k: Elliptic modulus in [0, 1)

    Returns:
        sn(u, k) as a complex number

    Raises:
        DomainError: If k is outside [0, 1)
        PoleError: If u is a pole of sn (θ₄(v, q) vanishes)

    Example:
        >>> abs(jacobi_sn(ellint_K(0.5), 0.5) - 1) < 1e-12
        True
    """
    k = _check_modulus(k)
    u = complex(u)
    if k == 0.0:
        return complex(np.sin(u))

    q = nome(k)
    t2, t3, _ = theta_constants(q)
    v = u / (t3 * t3)
    num = theta(1, v, q)
    den = theta(4, v, q)
    if abs(den) <= 1e-13 * max(abs(num), 1.0):
        raise PoleError(f"sn(u, k={k:.17g}) has a pole at u={u!r}.", point=u)
    return (t3 / t2) * num / den
