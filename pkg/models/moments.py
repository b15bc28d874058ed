"""Closed-form mean and variance of MRC-estimated symbols under 1-bit quantization.

Single-user case. For a transmit symbol s and pilot p of length tau:

    E(s) = sqrt(2 rho / pi) M tau / (tau + Delta)
           * sum_u conj(p_u) [Omega(rho Re[p_u s] / d) + j Omega(rho Im[p_u s] / d)]
    d    = sqrt((rho + 1)(rho |s|^2 + 1))
    V(s) = (2/pi) rho M tau^2 / (tau + Delta) - |E(s)|^2 / M

V is the total variance E|s_hat - E|^2 of the complex estimate. The rho -> inf
limits of E/sqrt(rho) and V/rho replace Delta by delta_bar and the Omega
arguments by Re[p_u s]/|s|, Im[p_u s]/|s|.
"""
import math
import warnings
import numpy as np
import pandas as pd
from dataclasses import dataclass
from mimo_utils.chest import EstimationConstants, Pilot, delta_bar, delta_single, upsilon
from mimo_utils.common_utils import split_complex, write_csv
from mimo_utils.errors import DomainError, InconsistencyError
from mimo_utils.qmath import omega
from models.constellation import get_constellation

VARIANCE_FLOOR_TOL = 1e-9
IDENTITY_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class MomentTable:
    symbols: np.ndarray
    expected: np.ndarray
    variance: np.ndarray
    constants: EstimationConstants
    rho: float
    m_antennas: int
    tau: int

    def __len__(self):
        return len(self.symbols)

    @property
    def total_power(self):
        """(2/pi) rho M tau^2 / (tau + Delta): variance plus |E|^2 / M for every symbol."""
        return _total_power(self.rho, self.m_antennas, self.tau, self.constants.delta)

    def identity_residual(self):
        lhs = self.variance + _abs2(self.expected) / self.m_antennas
        return np.abs(lhs - self.total_power) / self.total_power

    def to_frame(self):
        s_re, s_im = split_complex(self.symbols)
        e_re, e_im = split_complex(self.expected)
        return pd.DataFrame({'symbol_re': s_re, 'symbol_im': s_im,
                             'e_re': e_re, 'e_im': e_im, 'var': self.variance})

    def write_csv(self, path):
        return write_csv(self.to_frame(), path)


@dataclass(frozen=True, eq=False)
class AsymptoticMoments:
    symbols: np.ndarray
    expected_scaled: np.ndarray   # lim E / sqrt(rho)
    variance_scaled: np.ndarray   # lim V / rho
    delta_bar: float

    def to_frame(self):
        s_re, s_im = split_complex(self.symbols)
        e_re, e_im = split_complex(self.expected_scaled)
        return pd.DataFrame({'symbol_re': s_re, 'symbol_im': s_im,
                             'e_scaled_re': e_re, 'e_scaled_im': e_im,
                             'var_scaled': self.variance_scaled})


def _abs2(z):
    # re^2 + im^2 is symmetric under z -> j z, abs() is not guaranteed to be
    z = np.asarray(z, dtype=complex)
    return z.real ** 2 + z.imag ** 2


def _pilot_entries(pilot):
    return pilot.entries if isinstance(pilot, Pilot) else Pilot(pilot).entries


def _total_power(rho, m_antennas, tau, delta):
    return (2 / np.pi) * rho * m_antennas * tau ** 2 / (tau + delta)


def _phase_sum(p, re_arg, im_arg):
    """sum_u conj(p_u) (Omega(re_arg_u) + j Omega(im_arg_u)), exactly rounded per component."""
    g = np.empty(p.shape, dtype=complex)
    g.real = omega(re_arg)
    g.imag = omega(im_arg)
    terms = np.conj(p) * g
    return complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))


def expected_symbol(s, pilot, rho, m_antennas, delta):
    if rho <= 0:
        raise DomainError(f"rho must be positive, got {rho}")
    p = _pilot_entries(pilot)
    tau = p.size
    s = complex(s)
    d = np.sqrt((rho + 1) * (rho * float(_abs2(s)) + 1))
    ps = p * s
    acc = _phase_sum(p, rho * ps.real / d, rho * ps.imag / d)
    return np.sqrt(2 / np.pi * rho) * m_antennas * tau / (tau + delta) * acc


def symbol_variance(s, pilot, rho, m_antennas, delta, expected=None):
    """Total variance of the estimate; tiny negative round-off is floored at 0 with a warning."""
    tau = _pilot_entries(pilot).size
    if expected is None:
        expected = expected_symbol(s, pilot, rho, m_antennas, delta)
    value = _total_power(rho, m_antennas, tau, delta) - float(_abs2(expected)) / m_antennas
    if value < -VARIANCE_FLOOR_TOL:
        raise InconsistencyError(f"variance {value!r} for symbol {s} is negative")
    if value < 0:
        warnings.warn(f"variance {value!r} for symbol {s} floored at 0", RuntimeWarning)
        value = 0.0
    return value


def asymptotic_moments(constellation, pilot, m_antennas):
    constellation = get_constellation(constellation)
    p = _pilot_entries(pilot)
    tau = p.size
    d_bar = delta_bar(p)
    symbols = constellation.array
    expected = np.empty(len(symbols), dtype=complex)
    for idx, s in enumerate(symbols):
        if s == 0:
            raise DomainError("asymptotic moments are undefined for a symbol at the origin")
        ps = p * s
        magnitude = np.sqrt(_abs2(s))
        expected[idx] = _phase_sum(p, ps.real / magnitude, ps.imag / magnitude)
    expected *= np.sqrt(2 / np.pi) * m_antennas * tau / (tau + d_bar)
    variance = (2 / np.pi) * m_antennas * tau ** 2 / (tau + d_bar) - _abs2(expected) / m_antennas
    return AsymptoticMoments(symbols, expected, variance, d_bar)


def moment_table(constellation, pilot, rho, m_antennas):
    """E and V for every symbol; Delta and Upsilon are computed once and shared."""
    constellation = get_constellation(constellation)
    p = _pilot_entries(pilot)
    tau = p.size
    delta = delta_single(p, rho)
    constants = EstimationConstants(delta, upsilon(rho, 1, tau, delta))

    symbols = constellation.array
    expected = np.array([expected_symbol(s, p, rho, m_antennas, delta) for s in symbols])
    variance = np.array([symbol_variance(s, p, rho, m_antennas, delta, e)
                         for s, e in zip(symbols, expected)])
    table = MomentTable(symbols, expected, variance, constants, rho, m_antennas, tau)
    worst = np.max(table.identity_residual())
    if worst > IDENTITY_RTOL:
        raise InconsistencyError(f"variance identity violated by {worst:.3e} (relative)")
    return table
