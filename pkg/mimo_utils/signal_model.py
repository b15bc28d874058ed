"""Channel and noise draws plus the pilot/data receive models at the 1-bit ADCs."""
import numpy as np
from dataclasses import dataclass, replace
from mimo_utils.chest import as_pilot_matrix
from mimo_utils.errors import DomainError, ShapeError
from mimo_utils.qmath import quantize

UINT64_LIMIT = 2 ** 64

# substream offsets inside one trial, fixed so phases never share noise
CHANNEL_SUBSTREAM = 0
PILOT_NOISE_SUBSTREAM = 1
DATA_NOISE_SUBSTREAM = 2
SYMBOL_SUBSTREAM = 3


@dataclass(frozen=True)
class RngStream:
    """Counter-style random stream keyed by (seed, stream_id, substream).

    stream_id is the trial index. Identical keys always rebuild the same
    generator, so draws never depend on thread count or scheduling.
    """
    seed: int
    stream_id: int
    substream: int = 0

    def __post_init__(self):
        for name in ('seed', 'stream_id', 'substream'):
            value = getattr(self, name)
            if not 0 <= value < UINT64_LIMIT:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {value}")

    def spawn(self, substream):
        return replace(self, substream=substream)

    def generator(self):
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, self.substream))
        return np.random.default_rng(seq)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    h: np.ndarray  # M x K, i.i.d. CN(0, 1)

    def __post_init__(self):
        h = np.asarray(self.h, dtype=complex)
        if h.ndim == 1:
            h = h.reshape(-1, 1)
        if h.ndim != 2 or h.size == 0:
            raise ShapeError(f"channel must be a non-empty M x K matrix, got shape {h.shape}")
        object.__setattr__(self, 'h', h)

    @property
    def m_antennas(self):
        return self.h.shape[0]

    @property
    def k_users(self):
        return self.h.shape[1]


def _generator(rng):
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


def sample_cn01(rows, cols, rng):
    """i.i.d. CN(0, 1) matrix: N(0, 1/2) real and imaginary parts.

    rng is either an RngStream (a fresh generator is built from its key) or a
    numpy Generator that is consumed.
    """
    if rows < 1 or cols < 1:
        raise DomainError(f"rows and cols must be >= 1, got ({rows}, {cols})")
    gen = _generator(rng)
    re = gen.standard_normal((rows, cols))
    im = gen.standard_normal((rows, cols))
    out = np.empty((rows, cols), dtype=complex)
    out.real = re * np.sqrt(0.5)
    out.imag = im * np.sqrt(0.5)
    return out


def draw_channel(m_antennas, k_users, rng):
    return ChannelRealization(sample_cn01(m_antennas, k_users, rng.spawn(CHANNEL_SUBSTREAM)))


def _check_rho(rho):
    if rho <= 0:
        raise DomainError(f"rho must be positive, got {rho}")


def uplink_data_rx(h, x, rho, rng, noise=None):
    """r = Q(sqrt(rho)*H*x + z), returned as an M x 1 QuantizedMatrix.

    noise overrides the data-phase AWGN draw (tests pass zeros).
    """
    _check_rho(rho)
    x = np.asarray(x, dtype=complex).reshape(-1, 1)
    if x.shape[0] != h.k_users:
        raise ShapeError(f"symbol vector has {x.shape[0]} entries, channel has {h.k_users} users")
    if noise is None:
        noise = sample_cn01(h.m_antennas, 1, rng.spawn(DATA_NOISE_SUBSTREAM))
    noise = np.asarray(noise, dtype=complex)
    if noise.size != h.m_antennas:
        raise ShapeError(f"data noise must have {h.m_antennas} entries, got {noise.size}")
    noise = noise.reshape(h.m_antennas, 1)
    y = np.sqrt(rho) * (h.h @ x) + noise
    return quantize(y, rho, h.k_users)


def uplink_pilot_rx(h, pilots, rho, rng, noise=None):
    """R_p = Q(sqrt(rho)*H*P^H + Z_p), returned as an M x tau QuantizedMatrix."""
    _check_rho(rho)
    p = as_pilot_matrix(pilots).entries
    tau, k_users = p.shape
    if k_users != h.k_users:
        raise ShapeError(f"pilot matrix has {k_users} columns, channel has {h.k_users} users")
    if noise is None:
        noise = sample_cn01(h.m_antennas, tau, rng.spawn(PILOT_NOISE_SUBSTREAM))
    noise = np.asarray(noise, dtype=complex)
    if noise.shape != (h.m_antennas, tau):
        raise ShapeError(f"pilot noise must be {h.m_antennas} x {tau}, got {noise.shape}")
    y_p = np.sqrt(rho) * (h.h @ p.conj().T) + noise
    return quantize(y_p, rho, h.k_users)
