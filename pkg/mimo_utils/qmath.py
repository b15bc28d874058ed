import numpy as np
from dataclasses import dataclass
from mimo_utils.errors import DomainError

# arcsin arguments drift past +-1 by a few ulps in the moment formulas
OMEGA_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class QuantizedMatrix:
    """Output of the 1-bit ADC pair: every entry is sqrt((rho*K+1)/2)*(+-1 +-j)."""
    entries: np.ndarray
    rho: float
    k_users: int = 1

    @property
    def scale(self):
        return np.sqrt((self.rho * self.k_users + 1) / 2)

    @property
    def shape(self):
        return self.entries.shape


def omega(w):
    """Arcsine law (2/pi)*arcsin(w), with arguments within OMEGA_TOL of +-1 clamped."""
    w_arr = np.asarray(w, dtype=float)
    if not np.all(np.isfinite(w_arr)):
        bad = w_arr[~np.isfinite(w_arr)].ravel()[0]
        raise DomainError(f"omega argument must be finite, got {bad}")
    outside = np.abs(w_arr) > 1 + OMEGA_TOL
    if np.any(outside):
        bad = w_arr[outside].ravel()[0]
        raise DomainError(f"omega argument {bad!r} lies outside [-1, 1]")
    out = (2 / np.pi) * np.arcsin(np.clip(w_arr, -1.0, 1.0))
    if np.ndim(w) == 0:
        return float(out)
    return out


def sgn(x):
    # sgn(0) = +1 keeps the quantizer total
    return np.where(np.asarray(x) >= 0, 1.0, -1.0)


def quantize(c, rho, k_users=1):
    if rho <= 0:
        raise DomainError(f"rho must be positive, got {rho}")
    if k_users < 1:
        raise DomainError(f"k_users must be >= 1, got {k_users}")
    if isinstance(c, QuantizedMatrix):
        c = c.entries
    c = np.asarray(c, dtype=complex)
    scale = np.sqrt((rho * k_users + 1) / 2)

    entries = np.empty(c.shape, dtype=complex)
    entries.real = scale * sgn(c.real)
    entries.imag = scale * sgn(c.imag)
    return QuantizedMatrix(entries, rho, k_users)
