"""Projective points, affine charts, projective transforms and isometry classification."""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ArgumentError, ChartError

logger = logging.getLogger(__name__)

POINT_TOLERANCE = 1e-12
CHART_TOLERANCE = 1e-12
DEGENERACY_TOLERANCE = 1e-9
DEFECTIVE_CONDITION = 1e6


def canonical_vectors(vectors: np.ndarray) -> np.ndarray:
    """Normalize rows to unit Euclidean norm with first nonzero entry positive.

    Args:
        vectors: Array of shape (m, k) of nonzero homogeneous vectors.

    Returns:
        Array of the same shape holding canonical representatives.
    """
    v = np.array(vectors, dtype=float, copy=True)
    norms = np.linalg.norm(v, axis=-1, keepdims=True)
    v = v / norms
    significant = np.abs(v) > POINT_TOLERANCE
    first = np.argmax(significant, axis=-1)
    lead = np.take_along_axis(v, first[..., None], axis=-1)
    return np.where(lead < 0, -v, v)


class HomogeneousPoint:
    """A point of projective space stored as a canonical unit vector."""

    __slots__ = ("_coords",)

    def __init__(self, coords: Sequence[float]):
        arr = np.asarray(coords, dtype=float).ravel()
        if arr.size < 2 or not np.all(np.isfinite(arr)):
            raise ArgumentError("homogeneous coordinates must be finite with length >= 2")
        if np.linalg.norm(arr) == 0.0:
            raise ArgumentError("homogeneous coordinates must be nonzero")
        canon = canonical_vectors(arr[None, :])[0]
        canon.setflags(write=False)
        self._coords = canon

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def dimension(self) -> int:
        """Dimension n of the projective space P(R^{n+1})."""
        return self._coords.size - 1

    def key(self, quantum: float = 1e-9) -> Tuple[int, ...]:
        """Quantized canonical coordinates, usable as a dictionary key."""
        return tuple(int(v) for v in np.rint(self._coords / quantum))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HomogeneousPoint):
            return NotImplemented
        if other._coords.shape != self._coords.shape:
            return False
        return bool(np.max(np.abs(self._coords - other._coords)) <= POINT_TOLERANCE)

    __hash__ = None

    def __repr__(self) -> str:
        inner = ", ".join(f"{v:.12g}" for v in self._coords)
        return f"HomogeneousPoint([{inner}])"


@dataclass(frozen=True)
class AffineChart:
    """Affine chart where homogeneous coordinate `index` is set to 1."""

    index: int = 0

    def lift(self, points: np.ndarray) -> np.ndarray:
        """Homogeneous vectors (chart coordinate 1) for affine points of shape (..., n)."""
        pts = np.asarray(points, dtype=float)
        ones = np.ones(pts.shape[:-1] + (1,))
        return np.concatenate([pts[..., :self.index], ones, pts[..., self.index:]], axis=-1)

    def project(self, vectors: np.ndarray) -> np.ndarray:
        """Affine coordinates of homogeneous vectors of shape (..., n+1).

        Raises:
            ChartError: If any vector is at infinity for this chart.
        """
        vecs = np.asarray(vectors, dtype=float)
        lead = vecs[..., self.index]
        scale = np.linalg.norm(vecs, axis=-1)
        if np.any(np.abs(lead) <= CHART_TOLERANCE * scale):
            raise ChartError(f"point at infinity for chart index {self.index}")
        rest = np.delete(vecs, self.index, axis=-1)
        return rest / lead[..., None]

    def to_affine(self, point: HomogeneousPoint) -> np.ndarray:
        return self.project(point.coords)

    def from_affine(self, x: Sequence[float]) -> HomogeneousPoint:
        return HomogeneousPoint(self.lift(np.asarray(x, dtype=float)))

    def normalize(self, vectors: np.ndarray) -> np.ndarray:
        """Rescale homogeneous vectors so the chart coordinate equals 1."""
        vecs = np.asarray(vectors, dtype=float)
        lead = vecs[..., self.index]
        if np.any(lead == 0.0):
            raise ChartError(f"point at infinity for chart index {self.index}")
        return vecs / lead[..., None]


class ProjectiveTransform:
    """An invertible projective transformation with |det| normalized to 1."""

    __slots__ = ("_matrix",)

    def __init__(self, matrix: Sequence[Sequence[float]]):
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise ArgumentError(f"expected a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ArgumentError("matrix entries must be finite")
        det = np.linalg.det(m)
        cond = np.linalg.cond(m)
        if det == 0.0 or not np.isfinite(cond) or cond > 1e15:
            raise ArgumentError("matrix is not invertible")
        m = m / abs(det) ** (1.0 / m.shape[0])
        m.setflags(write=False)
        self._matrix = m

    @classmethod
    def _trusted(cls, matrix: np.ndarray) -> "ProjectiveTransform":
        """Wrap an already normalized matrix without re-validating it."""
        obj = cls.__new__(cls)
        m = np.array(matrix, dtype=float)
        m.setflags(write=False)
        obj._matrix = m
        return obj

    @classmethod
    def identity(cls, size: int) -> "ProjectiveTransform":
        return cls._trusted(np.eye(size))

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def size(self) -> int:
        return self._matrix.shape[0]

    def __matmul__(self, other: "ProjectiveTransform") -> "ProjectiveTransform":
        return ProjectiveTransform._trusted(self._matrix @ other._matrix)

    def inverse(self) -> "ProjectiveTransform":
        return ProjectiveTransform._trusted(np.linalg.inv(self._matrix))

    def power(self, k: int) -> "ProjectiveTransform":
        base = self if k >= 0 else self.inverse()
        return ProjectiveTransform._trusted(np.linalg.matrix_power(base._matrix, abs(k)))

    def apply(self, point: HomogeneousPoint) -> HomogeneousPoint:
        return HomogeneousPoint(self._matrix @ point.coords)

    __call__ = apply

    def apply_affine(self, points: np.ndarray, chart: AffineChart = AffineChart()) -> np.ndarray:
        """Image of affine points of shape (..., n) in the same chart."""
        lifted = chart.lift(points)
        return chart.project(lifted @ self._matrix.T)

    def __repr__(self) -> str:
        return f"ProjectiveTransform({self._matrix.tolist()!r})"


class IsometryType(Enum):
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"


@dataclass(frozen=True)
class SpectralData:
    """Classification of a transform with its spectral invariants.

    Eigenvalues are sorted by decreasing modulus, with the overall sign chosen
    so that the dominant eigenvalue has nonnegative real part.
    """

    kind: IsometryType
    eigenvalues: np.ndarray
    attracting: Optional[HomogeneousPoint]
    repelling: Optional[HomogeneousPoint]
    translation_length: float
    lambda_one: float


@dataclass(frozen=True)
class SpectralBatch:
    """Vectorized classification of a stack of matrices."""

    kinds: np.ndarray
    translation_lengths: np.ndarray
    lambda_one: np.ndarray
    eigenvalues: np.ndarray
    attracting: np.ndarray
    repelling: np.ndarray

    @property
    def hyperbolic(self) -> np.ndarray:
        return self.kinds == _KIND_CODES[IsometryType.HYPERBOLIC]


_KIND_CODES = {IsometryType.HYPERBOLIC: 0, IsometryType.PARABOLIC: 1, IsometryType.ELLIPTIC: 2}
_CODE_KINDS = {code: kind for kind, code in _KIND_CODES.items()}


def _real_vectors(vecs: np.ndarray) -> np.ndarray:
    # remove the complex phase using the largest entry, then drop imaginary parts
    idx = np.argmax(np.abs(vecs), axis=-1)
    pivot = np.take_along_axis(vecs, idx[..., None], axis=-1)
    return np.real(vecs / pivot)


def spectral_batch(matrices: np.ndarray) -> SpectralBatch:
    """Classify a stack of square matrices.

    Args:
        matrices: Array of shape (m, k, k).

    Returns:
        SpectralBatch with per-matrix kind codes, translation lengths, log of the
        dominant eigenvalue modulus (determinant-normalized) and fixed-point vectors.
    """
    mats = np.asarray(matrices, dtype=float)
    if mats.ndim != 3:
        raise ArgumentError("expected a stack of matrices")
    m, k, _ = mats.shape
    if m == 0:
        empty = np.zeros((0,))
        return SpectralBatch(np.zeros((0,), dtype=int), empty, empty,
                             np.zeros((0, k), dtype=complex), np.zeros((0, k)), np.zeros((0, k)))
    vals, vecs = np.linalg.eig(mats)
    order = np.argsort(-np.abs(vals), axis=1, kind="stable")
    vals = np.take_along_axis(vals, order, axis=1)
    vecs = np.take_along_axis(vecs, order[:, None, :], axis=2)
    flip = vals[:, 0].real < 0
    vals[flip] = -vals[flip]

    moduli = np.abs(vals)
    logmod = np.log(moduli)
    with np.errstate(all="ignore"):
        vec_cond = np.linalg.cond(vecs)
        mat_cond = np.linalg.cond(mats)
    defective = ~(vec_cond <= DEFECTIVE_CONDITION)
    eps = np.finfo(float).eps
    widened = np.maximum(DEGENERACY_TOLERANCE, 10.0 * (eps * mat_cond) ** (1.0 / k))
    tol = np.where(defective, widened, DEGENERACY_TOLERANCE)

    spread = logmod[:, 0] - logmod[:, -1]
    top_real = np.abs(vals[:, 0].imag) <= tol * moduli[:, 0]
    bottom_real = np.abs(vals[:, -1].imag) <= tol * moduli[:, -1]
    top_simple = (logmod[:, 0] - logmod[:, 1]) > tol
    bottom_simple = (logmod[:, -2] - logmod[:, -1]) > tol
    hyperbolic = (spread > tol) & top_real & bottom_real & top_simple & bottom_simple
    parabolic = ~hyperbolic & defective & (spread <= tol)

    kinds = np.full(m, _KIND_CODES[IsometryType.ELLIPTIC], dtype=int)
    kinds[parabolic] = _KIND_CODES[IsometryType.PARABOLIC]
    kinds[hyperbolic] = _KIND_CODES[IsometryType.HYPERBOLIC]
    lengths = np.where(hyperbolic, 0.5 * spread, 0.0)
    lambda_one = logmod[:, 0] - logmod.mean(axis=1)
    attracting = _real_vectors(vecs[:, :, 0])
    repelling = _real_vectors(vecs[:, :, -1])
    return SpectralBatch(kinds, lengths, lambda_one, vals, attracting, repelling)


def classify(gamma: ProjectiveTransform, domain=None) -> SpectralData:
    """Classify a transform as hyperbolic, parabolic or elliptic.

    Args:
        gamma: The transform; assumed to preserve `domain`.
        domain: Optional ConvexDomain; when given, fixed points of a hyperbolic
            element are checked against its boundary and a warning is logged
            if they are off by more than 1e-6.

    Returns:
        SpectralData for gamma.
    """
    batch = spectral_batch(gamma.matrix[None, :, :])
    kind = _CODE_KINDS[int(batch.kinds[0])]
    attracting = repelling = None
    if kind is IsometryType.HYPERBOLIC:
        attracting = HomogeneousPoint(batch.attracting[0])
        repelling = HomogeneousPoint(batch.repelling[0])
        if domain is not None:
            residual = max(domain.boundary_residual(domain.chart.to_affine(attracting)),
                           domain.boundary_residual(domain.chart.to_affine(repelling)))
            if residual > 1e-6:
                logger.warning("fixed points of hyperbolic element are %.3g off the boundary", residual)
    eigenvalues = batch.eigenvalues[0].copy()
    eigenvalues.setflags(write=False)
    return SpectralData(
        kind=kind,
        eigenvalues=eigenvalues,
        attracting=attracting,
        repelling=repelling,
        translation_length=float(batch.translation_lengths[0]),
        lambda_one=float(batch.lambda_one[0]),
    )


def translation_length(gamma: ProjectiveTransform) -> float:
    """Half the log ratio of extreme eigenvalue moduli, or 0 if not hyperbolic."""
    return classify(gamma).translation_length


def kind_from_code(code: int) -> IsometryType:
    return _CODE_KINDS[int(code)]
