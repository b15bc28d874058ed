"""MRC combining and (weighted) maximum-likelihood detection against analytic centers."""
import numpy as np
import pandas as pd
from dataclasses import dataclass
from mimo_utils.errors import ConfigError, DomainError, ShapeError

REGION_GRID_SIZE = 512
REGION_EXTENT_FACTOR = 1.5


@dataclass(frozen=True, eq=False)
class DetectorSpec:
    """Centers E_l with weights w_l; the decided index minimizes w_l * |xhat - E_l|."""
    centers: np.ndarray
    weights: np.ndarray
    alpha: float = 0.0

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=complex).reshape(-1)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if centers.size == 0:
            raise ConfigError("detector needs at least one center")
        if weights.shape != centers.shape:
            raise ShapeError(f"{weights.size} weights for {centers.size} centers")
        if not np.all(weights > 0):
            raise DomainError("detector weights must be positive")
        if not 0 <= self.alpha <= 1:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.alpha == 0 and np.any(weights != 1):
            raise ConfigError("alpha = 0 requires unit weights")
        object.__setattr__(self, 'centers', centers)
        object.__setattr__(self, 'weights', weights)

    def __len__(self):
        return self.centers.size


def mrc_estimate(h_hat, r):
    """x_hat = H_hat^H r, one soft estimate per user."""
    h_hat = np.asarray(h_hat, dtype=complex)
    if h_hat.ndim == 1:
        h_hat = h_hat.reshape(-1, 1)
    r = np.asarray(getattr(r, 'entries', r), dtype=complex).reshape(-1, 1)
    if h_hat.ndim != 2 or h_hat.shape[0] != r.shape[0]:
        raise ShapeError(f"channel estimate of shape {h_hat.shape} does not match {r.shape[0]} observations")
    return (h_hat.conj().T @ r).reshape(-1)


def make_weights(variances, alpha):
    if not 0 <= alpha <= 1:
        raise ConfigError(f"alpha must lie in [0, 1], got {alpha}")
    variances = np.asarray(variances, dtype=float)
    denominator = 1 + alpha * (variances - 1)
    if np.any(denominator <= 0):
        raise DomainError("weight denominator 1 + alpha*(V - 1) must be positive")
    return 1 / denominator


def make_detector(table, alpha):
    """Detector over a MomentTable's expected values, weighted by its variances."""
    return DetectorSpec(table.expected, make_weights(table.variance, alpha), alpha)


def weighted_distances(xhat, spec):
    diff = np.asarray(xhat, dtype=complex)[..., None] - spec.centers
    # explicit re^2 + im^2: rotating everything by j permutes nothing
    return spec.weights * np.sqrt(diff.real ** 2 + diff.imag ** 2)


def detect(xhat, spec):
    # np.argmin keeps the first minimum: ties go to the lowest index
    return int(np.argmin(weighted_distances(complex(xhat), spec)))


def detect_many(xhats, spec):
    xhats = np.asarray(xhats, dtype=complex)
    if xhats.size == 0:
        return np.zeros(xhats.shape, dtype=int)
    return np.argmin(weighted_distances(xhats, spec), axis=-1)


def rasterize_regions(spec, grid_size=REGION_GRID_SIZE, extent=None):
    """Classify a grid_size x grid_size lattice over [-extent, extent]^2.

    Rows run over the imaginary axis (outer) then the real axis, so the
    frame can be pivoted straight into an image.
    """
    if grid_size < 2:
        raise ConfigError(f"grid_size must be >= 2, got {grid_size}")
    if extent is None:
        extent = REGION_EXTENT_FACTOR * float(np.max(np.abs(spec.centers)))
    if not extent > 0:
        raise ConfigError(f"extent must be positive, got {extent}")

    axis = np.linspace(-extent, extent, grid_size)
    im, re = np.meshgrid(axis, axis, indexing='ij')
    points = np.empty(re.shape, dtype=complex)
    points.real = re
    points.imag = im
    decided = detect_many(points, spec)
    return pd.DataFrame({'re': re.reshape(-1), 'im': im.reshape(-1),
                         'decided_index': decided.reshape(-1)})
