"""
Nyström discretisation of the boundary Cauchy transform and the operators built on it.

All matrices live in the symmetrised frame D^{1/2} M D^{-1/2}, D = diag(arc-length
weights), where the weighted L²(γ) inner product becomes the Euclidean one and
the discrete adjoint is the conjugate transpose. Vectors in this frame are node
values scaled by √w.

The kernel z′(t)/(z(t) − z(s)) is split into ½cot((t − s)/2)·√(|z′(t)|/|z′(s)|)
and a smooth remainder. The cotangent part is integrated with the alternating
(odd-offset) trapezoid rule and is Hermitian in the symmetrised frame, so the
Kerzman-Stein matrix A = C − C† only sees the smooth remainder.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import scipy.linalg

from cauchy_szego.errors import (
    ConditioningError,
    DomainError,
    FrameError,
    NonConvergenceError,
    OnCurveError,
    SideMismatchError,
)
from cauchy_szego.geometry import (
    Curve,
    Sampled,
    counterclockwise,
    quadrature,
    winding_number_points,
)
from cauchy_szego.kernels import DomainSide
from config.settings import NumericSettings, get_settings

logger = logging.getLogger(__name__)

DUMP_MAGIC = "KSTMAT"


@dataclass
class BoundaryOperatorMatrix:
    """
    A discretised boundary operator together with its quadrature data.

    entries are in the symmetrised frame when symmetrized is True. points and
    tangents (unit, interior on the left) are kept so that kernel rows at
    off-curve points can be formed in the same frame.
    """

    entries: np.ndarray
    weights: np.ndarray
    symmetrized: bool
    side: DomainSide
    points: np.ndarray
    tangents: np.ndarray

    def __post_init__(self):
        n = self.entries.shape[0]
        if self.entries.shape != (n, n):
            raise DomainError(f"Operator matrix must be square, got shape {self.entries.shape}.")
        if n % 2:
            raise DomainError(f"Operator matrix needs an even node count, got n={n}.")
        if np.any(self.weights <= 0):
            raise DomainError("Quadrature weights must be positive.")

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    def with_entries(self, entries: np.ndarray, side: Optional[DomainSide] = None) -> "BoundaryOperatorMatrix":
        return BoundaryOperatorMatrix(
            entries=entries,
            weights=self.weights,
            symmetrized=self.symmetrized,
            side=self.side if side is None else side,
            points=self.points,
            tangents=self.tangents,
        )


@dataclass
class NormalizedSzegoVector:
    """s_z = S(·, z)/√S(z, z) in the symmetrised frame; unit Euclidean norm."""

    values: np.ndarray
    z: complex
    side: DomainSide
    szego_diag: float = field(default=float("nan"))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


def _require_frame(M: BoundaryOperatorMatrix) -> None:
    if not M.symmetrized:
        raise FrameError("Operator matrix is not in the symmetrised frame.")


# ============================================================================
# ASSEMBLY
# ============================================================================

def discretize_cauchy(
    c: Curve,
    side: DomainSide,
    n: Optional[int] = None,
    settings: Optional[NumericSettings] = None,
) -> BoundaryOperatorMatrix:
    """
    Nyström matrix of the boundary Cauchy transform C± on a smooth closed curve.

    C₊ = ½I + PV; C₋ = I − C₊ on the same nodes.

    Args:
        c: Circle, Ellipse or Sampled curve (clockwise samples are reversed)
        side: INTERIOR for C₊, EXTERIOR for C₋
        n: Even node count >= 32 for canonical curves; defaults to the
           configured node count. Sampled curves use their own nodes.
        settings: Node defaults and the dense cap (default from the environment)

    Returns:
        BoundaryOperatorMatrix in the symmetrised frame

    Raises:
        UnsupportedCurveError: For odd or too small n
        UnboundedCurveError: For the wedge boundary
        DomainError: If n exceeds the dense cap

    Example:
        >>> C = discretize_cauchy(Circle(), DomainSide.INTERIOR, 64)
        >>> C.entries.shape
        (64, 64)
    """
    settings = settings or get_settings()
    curve = counterclockwise(c)
    if isinstance(curve, Sampled):
        rule = quadrature(curve)
    else:
        rule = quadrature(curve, settings.nodes if n is None else n)

    n = rule.n
    if n < 32:
        raise DomainError(f"Node count n={n} is below 32.")
    if n > settings.max_nodes:
        raise DomainError(f"Node count n={n} exceeds the dense cap of {settings.max_nodes}.")

    z, dz, d2z = rule.points, rule.derivatives, rule.second_derivatives
    speed = rule.speed
    step = rule.step

    idx = np.arange(n)
    offset = (idx[None, :] - idx[:, None]) % n
    odd = offset % 2 == 1
    off_diag = offset != 0

    with np.errstate(divide="ignore", invalid="ignore"):
        half_angle = 0.5 * step * offset
        cot = np.where(off_diag, 0.5 / np.tan(half_angle), 0.0)
        ratio = np.sqrt(speed[None, :] / speed[:, None])
        kernel = np.where(off_diag, dz[None, :] / (z[None, :] - z[:, None]), 0.0)
    remainder = kernel - cot * ratio
    diag = d2z / (2.0 * dz) - (d2z * np.conj(dz)).real / (2.0 * speed ** 2)
    remainder[idx, idx] = diag

    # symmetrised frame: entry (s, t) picks up √(speed_s/speed_t)
    sym = np.sqrt(speed[:, None] / speed[None, :])
    entries = (np.where(odd, 2.0 * step * cot, 0.0) + step * remainder * sym) / (2j * math.pi)
    entries[idx, idx] += 0.5

    if side is DomainSide.EXTERIOR:
        entries = np.eye(n) - entries

    logger.debug("Assembled %s Cauchy matrix with n=%d", side.value, n)
    return BoundaryOperatorMatrix(
        entries=entries,
        weights=rule.weights,
        symmetrized=True,
        side=side,
        points=z,
        tangents=rule.tangents,
    )


def kerzman_stein(Cmat: BoundaryOperatorMatrix) -> BoundaryOperatorMatrix:
    """
    A = C − C†, skew-Hermitian by construction.

    Raises:
        FrameError: If Cmat is not symmetrised
    """
    _require_frame(Cmat)
    A = Cmat.entries - Cmat.entries.conj().T
    return Cmat.with_entries(A)


# ============================================================================
# NORMS AND SPECTRA
# ============================================================================

def operator_norm(
    M: BoundaryOperatorMatrix,
    x0: Optional[np.ndarray] = None,
    max_iter: Optional[int] = None,
    tol: Optional[float] = None,
    settings: Optional[NumericSettings] = None,
) -> float:
    """
    Largest singular value by power iteration on M†M.

    The default start vector is the dominant eigenvector of the Hermitian
    matrix −i(M − M†). For a near-idempotent M this already lies in the top
    singular block, so the iteration does not stall on the cluster of
    singular values at 1.

    Args:
        M: Operator matrix in the symmetrised frame
        x0: Optional start vector
        max_iter: Iteration cap (default from settings)
        tol: Relative stagnation tolerance on the Rayleigh quotient

    Returns:
        ‖M‖ in the weighted L² norm

    Raises:
        FrameError: If M is not symmetrised
        NonConvergenceError: If the cap is hit; the exception carries the
            best estimate
    """
    _require_frame(M)
    settings = settings or get_settings()
    max_iter = settings.power_max_iter if max_iter is None else max_iter
    tol = settings.power_tol if tol is None else tol

    mat = M.entries
    mat_h = mat.conj().T
    if x0 is None:
        vals, vecs = scipy.linalg.eigh(-1j * (mat - mat_h))
        top = int(np.argmax(np.abs(vals)))
        if abs(vals[top]) > 1e-12:
            x = vecs[:, top]
        else:
            # M is (numerically) Hermitian; any generic vector will do
            x = np.ones(M.n, dtype=complex)
    else:
        x = np.asarray(x0, dtype=complex)
    x = x / np.linalg.norm(x)

    previous = 0.0
    for iteration in range(1, max_iter + 1):
        y = mat @ x
        estimate = float(np.vdot(y, y).real)
        x = mat_h @ y
        size = np.linalg.norm(x)
        if size == 0.0:
            return 0.0
        x = x / size
        if iteration > 1 and abs(estimate - previous) <= tol * estimate:
            logger.info("Power iteration converged after %d steps: %.17g", iteration, math.sqrt(estimate))
            return math.sqrt(estimate)
        previous = estimate

    raise NonConvergenceError(
        f"Power iteration did not converge in {max_iter} steps.",
        estimate=math.sqrt(previous),
        iterations=max_iter,
    )


def spectrum_A(Amat: BoundaryOperatorMatrix, count: Optional[int] = None) -> List[float]:
    """
    Folded spectrum of the skew-Hermitian Kerzman-Stein matrix.

    A has eigenvalues ±iλ_l; this returns the |λ| values of the Hermitian
    matrix −iA sorted in descending order, keeping multiplicities.

    Args:
        Amat: Kerzman-Stein matrix in the symmetrised frame
        count: Number of values to return (all when None)

    Raises:
        FrameError: If Amat is not symmetrised or not skew-Hermitian
        NonConvergenceError: If the eigensolver fails
    """
    _require_frame(Amat)
    A = Amat.entries
    residual = float(np.max(np.abs(A + A.conj().T)))
    if residual > 1e-10 * max(1.0, float(np.max(np.abs(A)))):
        raise FrameError(f"Matrix is not skew-Hermitian (residual {residual:.3g}).")
    try:
        values = scipy.linalg.eigvalsh(-1j * A)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise NonConvergenceError(f"Eigensolver failed: {exc}", estimate=float("nan"), iterations=0)
    folded = np.sort(np.abs(values))[::-1]
    if count is not None:
        folded = folded[:count]
    return [float(v) for v in folded]


# ============================================================================
# KERNEL ROWS AND THE KERZMAN-STEIN-TRUMMER SOLVE
# ============================================================================

def cauchy_row(Cmat: BoundaryOperatorMatrix, z: complex) -> np.ndarray:
    """
    √w_t·C±(z, ζ_t): the Cauchy kernel at an off-curve point, in the symmetrised frame.

    ‖C(z, ·)‖² is the squared Euclidean norm of this vector.

    Raises:
        OnCurveError: If z coincides with a node
        SideMismatchError: If z is not on the side of Cmat
    """
    z = complex(z)
    rel = Cmat.points - z
    if np.any(np.abs(rel) <= get_settings().on_curve_tol):
        raise OnCurveError(f"z={z!r} lies on the curve.", point=z)
    inside = abs(winding_number_points(Cmat.points, z)) > 0.5
    side = DomainSide.INTERIOR if inside else DomainSide.EXTERIOR
    if side is not Cmat.side:
        raise SideMismatchError(f"z={z!r} lies in the {side.value}, not the {Cmat.side.value}.")
    return np.sqrt(Cmat.weights) * Cmat.side.sign * Cmat.tangents / (2j * math.pi * rel)


class KSTSolver:
    """
    Solves (I − A) s = conj C(z, ·) for the Szegő column s = conj S(z, ·).

    This is the column form of C = S(I + A). The LU factorisation is computed
    once and reused for every z.
    """

    def __init__(
        self,
        Cmat: BoundaryOperatorMatrix,
        Amat: BoundaryOperatorMatrix,
        settings: Optional[NumericSettings] = None,
    ):
        _require_frame(Cmat)
        _require_frame(Amat)
        settings = settings or get_settings()
        system = np.eye(Cmat.n) - Amat.entries
        condition = float(np.linalg.cond(system, 1))
        if condition > settings.condition_limit:
            raise ConditioningError(
                f"I - A has 1-norm condition number {condition:.3g}, above {settings.condition_limit:.3g}.",
                condition=condition,
            )
        if condition > 1e3:
            logger.warning("I - A is poorly conditioned (%.3g)", condition)
        self.Cmat = Cmat
        self.Amat = Amat
        self.condition = condition
        self._lu = scipy.linalg.lu_factor(system)
        logger.debug("Factored I - A (n=%d, cond=%.3g)", Cmat.n, condition)

    def solve(self, z: complex) -> Tuple[NormalizedSzegoVector, float, np.ndarray]:
        row = cauchy_row(self.Cmat, z)
        s = scipy.linalg.lu_solve(self._lu, np.conj(row))
        diag = float(np.vdot(s, s).real)
        unit = NormalizedSzegoVector(values=s / math.sqrt(diag), z=complex(z),
                                     side=self.Cmat.side, szego_diag=diag)
        return unit, diag, row

    def lambda_at(self, z: complex) -> float:
        _, diag, row = self.solve(z)
        return math.sqrt(float(np.vdot(row, row).real) / diag)


def szego_via_kst(
    Cmat: BoundaryOperatorMatrix, Amat: BoundaryOperatorMatrix, z: complex
) -> Tuple[NormalizedSzegoVector, float]:
    """
    Szegő kernel at z from the Kerzman-Stein-Trummer system.

    Args:
        Cmat: Cauchy matrix of the side containing z
        Amat: kerzman_stein(Cmat)
        z: Point strictly inside that side

    Returns:
        (s_z, S(z, z)) with s_z unit-normalised and S(z, z) = ‖S(z, ·)‖²

    Raises:
        ConditioningError: If I − A is ill-conditioned
        SideMismatchError: If z is on the wrong side

    Example:
        >>> C = discretize_cauchy(Circle(), DomainSide.INTERIOR, 64)
        >>> _, S00 = szego_via_kst(C, kerzman_stein(C), 0j)
        >>> round(S00 * 2 * math.pi, 8)
        1.0
    """
    unit, diag, _ = KSTSolver(Cmat, Amat).solve(z)
    return unit, diag


def berezin_A(Amat: BoundaryOperatorMatrix, s_z: NormalizedSzegoVector) -> complex:
    """First-order Berezin transform ⟨A s_z, s_z⟩; vanishes identically."""
    s = s_z.values
    return complex(np.vdot(s, Amat.entries @ s))


def berezin_A2(Amat: BoundaryOperatorMatrix, s_z: NormalizedSzegoVector) -> float:
    """
    ⟨A² s_z, s_z⟩ = −‖A s_z‖², which equals 1 − Λ(γ, z)².

    Args:
        Amat: Kerzman-Stein matrix in the symmetrised frame
        s_z: Unit-normalised Szegő vector

    Returns:
        The (real, nonpositive) Berezin value
    """
    s = s_z.values
    As = Amat.entries @ s
    return float(np.vdot(s, Amat.entries @ As).real)


def kst_lambda(Cmat: BoundaryOperatorMatrix, Amat: BoundaryOperatorMatrix, z: complex) -> float:
    """Λ(γ, z) = ‖C(z, ·)‖/√S(z, z) from the discrete Cauchy row and the KST Szegő diagonal."""
    return KSTSolver(Cmat, Amat).lambda_at(z)


# ============================================================================
# BINARY DUMP
# ============================================================================

def dump_matrix(M: BoundaryOperatorMatrix, path: Union[str, Path]) -> Path:
    """
    Write the matrix as an ASCII header `KSTMAT n side` and a newline, then
    n·n row-major complex entries as little-endian 64-bit float pairs.

    Raises:
        OSError: If the file cannot be written
    """
    path = Path(path)
    header = f"{DUMP_MAGIC} {M.n} {M.side.value}\n".encode("ascii")
    body = np.ascontiguousarray(M.entries, dtype="<c16").tobytes()
    path.write_bytes(header + body)
    logger.info("Wrote %d x %d matrix to %s", M.n, M.n, path)
    return path


def load_matrix(path: Union[str, Path]) -> Tuple[np.ndarray, DomainSide]:
    """Read a dump written by dump_matrix; returns (entries, side)."""
    raw = Path(path).read_bytes()
    newline = raw.index(b"\n")
    magic, n_text, side_text = raw[:newline].decode("ascii").split()
    if magic != DUMP_MAGIC:
        raise DomainError(f"Not a {DUMP_MAGIC} file: {path}")
    n = int(n_text)
    entries = np.frombuffer(raw[newline + 1:], dtype="<c16").reshape(n, n)
    return entries, DomainSide(side_text)
