"""Pilots and the scaled least-squares channel estimator for 1-bit pilot observations."""
import math
import numpy as np
from dataclasses import dataclass
from mimo_utils.errors import DegeneratePilotError, DomainError, ShapeError
from mimo_utils.qmath import omega

PILOT_TOL = 1e-12
ORTHO_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Pilot:
    """Single-user pilot p: tau unit-modulus entries."""
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex).reshape(-1)
        if entries.size == 0:
            raise DomainError("pilot must have at least one entry")
        _check_unit_modulus(entries)
        object.__setattr__(self, 'entries', entries)

    @property
    def tau(self):
        return self.entries.size

    @property
    def matrix(self):
        return PilotMatrix(self.entries.reshape(-1, 1))


@dataclass(frozen=True, eq=False)
class PilotMatrix:
    """tau x K pilot matrix with orthogonal unit-modulus columns (P^H P = tau I)."""
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim == 1:
            entries = entries.reshape(-1, 1)
        if entries.ndim != 2 or entries.size == 0:
            raise ShapeError(f"pilot matrix must be tau x K, got shape {entries.shape}")
        tau, k_users = entries.shape
        if tau < k_users:
            raise DomainError(f"pilot length {tau} is shorter than the number of users {k_users}")
        _check_unit_modulus(entries)
        gram = entries.conj().T @ entries
        if np.max(np.abs(gram - tau * np.eye(k_users))) > ORTHO_TOL:
            raise DomainError("pilot columns are not orthogonal (P^H P != tau I)")
        object.__setattr__(self, 'entries', entries)

    @property
    def tau(self):
        return self.entries.shape[0]

    @property
    def k_users(self):
        return self.entries.shape[1]


@dataclass(frozen=True)
class EstimationConstants:
    delta: float
    upsilon: float

    def __post_init__(self):
        if not self.upsilon > 0:
            raise DomainError(f"upsilon must be positive, got {self.upsilon}")


def _check_unit_modulus(entries):
    # no silent renormalization: a wrong pilot is a config error
    worst = np.max(np.abs(np.abs(entries) - 1))
    if worst > PILOT_TOL:
        raise DomainError(f"pilot entries must have unit modulus (max deviation {worst:.3e})")


def as_pilot_matrix(pilot):
    if isinstance(pilot, PilotMatrix):
        return pilot
    if isinstance(pilot, Pilot):
        return pilot.matrix
    return PilotMatrix(pilot)


def dft_pilot(tau):
    """Second column of the tau-point DFT matrix: p_u = exp(-j*(u-1)*2*pi/tau)."""
    if tau < 1:
        raise DomainError(f"pilot length must be >= 1, got {tau}")
    return Pilot(np.exp(-2j * np.pi * np.arange(tau) / tau))


def dft_pilot_matrix(tau, k_users=1):
    """Columns 2..K+1 of the tau-point DFT matrix, one orthogonal pilot per user."""
    if tau < 1:
        raise DomainError(f"pilot length must be >= 1, got {tau}")
    if not 1 <= k_users <= tau:
        raise DomainError(f"need 1 <= k_users <= tau, got k_users={k_users}, tau={tau}")
    u = np.arange(tau).reshape(-1, 1)
    k = np.arange(1, k_users + 1).reshape(1, -1)
    return PilotMatrix(np.exp(-2j * np.pi * u * k / tau))


def _off_diagonal_fsum(terms):
    mask = ~np.eye(terms.shape[0], dtype=bool)
    return math.fsum(terms[mask].tolist())


def delta_general(pilots, rho):
    """Delta for any number of users, summed over ordered pairs u != v."""
    if rho <= 0:
        raise DomainError(f"rho must be positive, got {rho}")
    p = as_pilot_matrix(pilots).entries
    k_users = p.shape[1]
    # gram[u, v] = sum_i P[u, i] * conj(P[v, i])
    gram = np.einsum('ui,vi->uv', p, p.conj())
    c = rho * k_users + 1
    terms = gram.real * omega(rho * gram.real / c) + gram.imag * omega(rho * gram.imag / c)
    return _off_diagonal_fsum(terms) / k_users


def _pair_sum(p, rho):
    cross = np.conj(p)[:, None] * p[None, :]  # p_u^* p_v
    outer = p[:, None] * np.conj(p)[None, :]  # p_u p_v^*
    if rho is None:
        re_arg, im_arg = outer.real, outer.imag
    else:
        re_arg = rho * outer.real / (rho + 1)
        im_arg = rho * outer.imag / (rho + 1)
    terms = cross.real * omega(re_arg) - cross.imag * omega(im_arg)
    return _off_diagonal_fsum(terms)


def delta_single(pilot, rho):
    """Single-user Delta, evaluated directly on the pilot vector."""
    if rho <= 0:
        raise DomainError(f"rho must be positive, got {rho}")
    p = pilot.entries if isinstance(pilot, Pilot) else Pilot(pilot).entries
    return _pair_sum(p, rho)


def delta_bar(pilot):
    """High-SNR limit of delta_single (rho/(rho+1) -> 1)."""
    p = pilot.entries if isinstance(pilot, Pilot) else Pilot(pilot).entries
    return _pair_sum(p, None)


def upsilon(rho, k_users, tau, delta):
    if rho <= 0:
        raise DomainError(f"rho must be positive, got {rho}")
    if tau + delta == 0:
        raise DegeneratePilotError(f"tau + delta vanishes (tau={tau}, delta={delta})")
    return (2 / np.pi) * rho / (rho * k_users + 1) ** 2 * tau ** 2 / (tau + delta) ** 2


def estimation_constants(pilots, rho):
    P = as_pilot_matrix(pilots)
    if P.k_users == 1:
        delta = delta_single(P.entries[:, 0], rho)
    else:
        delta = delta_general(P, rho)
    return EstimationConstants(delta, upsilon(rho, P.k_users, P.tau, delta))


def estimate_channel(r_p, pilots, constants):
    """Scaled LS estimate H_hat = sqrt(Upsilon) * R_p * P (M x K)."""
    P = as_pilot_matrix(pilots)
    r_p = np.asarray(getattr(r_p, 'entries', r_p), dtype=complex)
    if r_p.ndim != 2 or r_p.shape[1] != P.tau:
        raise ShapeError(f"pilot observation of shape {r_p.shape} does not match pilot length {P.tau}")
    return np.sqrt(constants.upsilon) * (r_p @ P.entries)
