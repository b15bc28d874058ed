"""Long Monte Carlo checks of the SER curves and the moment formulas (run with --runslow)."""
import dataclasses
import numpy as np
import pytest
from harness import SimConfig, run_alpha_sweep, run_asymptotic, run_moments, run_ser, sample_estimates
from mimo_utils.chest import dft_pilot
from mimo_utils.common_utils import db_to_linear
from models.constellation import qam16
from models.moments import moment_table

pytestmark = pytest.mark.slow

INNER = complex(1, 1) / np.sqrt(10)
OUTER = complex(3, 3) / np.sqrt(10)
THREADS = 4


def ser_config(**changes):
    base = SimConfig(seed=20240101, m_antennas=128, tau=32, snr_db=10.0, trials=100000, threads=THREADS)
    return dataclasses.replace(base, **changes)


@pytest.mark.parametrize("snr_db", [0.0, 10.0])
def test_moments_match_monte_carlo(snr_db):
    config = SimConfig(seed=77, m_antennas=64, tau=32, snr_db=snr_db, sweep='scatter', threads=THREADS)
    table = run_moments(config)
    for idx in range(16):
        xhats = sample_estimates(config, idx, trials=100000, stream_offset=idx * 100000)
        assert abs(xhats.mean() - table.expected[idx]) < 4 * np.sqrt(table.variance[idx] / xhats.size)
        spread = np.abs(xhats - table.expected[idx]) ** 2
        assert abs(spread.mean() - table.variance[idx]) < 4 * spread.std() / np.sqrt(spread.size)


def test_high_snr_collapse():
    c = qam16()
    inner, outer = c.index_of(INNER), c.index_of(OUTER)
    gaps = []
    for snr_db in (0.0, 10.0, 20.0, 40.0):
        table = moment_table(c, dft_pilot(32), db_to_linear(snr_db), 64)
        gaps.append(abs(table.expected[inner] - table.expected[outer]) / abs(table.expected[outer]))
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.05

    config = SimConfig(seed=1, m_antennas=64, tau=32, snr_db=60.0, sweep='moments')
    scaled = run_moments(config).expected / np.sqrt(db_to_linear(60.0))
    np.testing.assert_allclose(scaled, run_asymptotic(config).expected_scaled, rtol=1e-2)


def test_ser_approaches_quarter_at_high_snr():
    trials = 10000
    results = run_ser(ser_config(m_antennas=64, snr_db=(30.0, 40.0, 60.0), trials=trials))
    ser = {r.snr_db: r.ser for r in results}
    # at 30 dB the outer/inner means still differ by a few percent
    assert ser[30.0] < ser[60.0]
    margin = 3 * np.sqrt(0.25 * 0.75 / trials)
    for snr_db in (40.0, 60.0):
        assert abs(ser[snr_db] - 0.25) <= margin


def test_ser_has_interior_minimum_over_snr():
    grid = (0.0, 2.0, 4.0, 6.0, 8.0, 12.0, 20.0, 30.0)
    ser = [r.ser for r in run_ser(ser_config(snr_db=grid))]
    best = int(np.argmin(ser))
    assert 0 < best < len(grid) - 1
    assert ser[-1] > 2 * ser[best]


def test_longer_pilots_help():
    ser = {r.tau: r.ser for r in run_ser(ser_config(tau=(4, 8, 32)))}
    assert ser[8] < ser[4]
    assert ser[32] < ser[4] / 2


def test_weighted_detector_helps():
    grid = (0.0, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2)
    results = run_alpha_sweep(ser_config(snr_db=5.0, alpha=grid, sweep='alpha'))
    unweighted = results[0].ser
    assert results[0].alpha == 0.0
    assert min(r.ser for r in results[1:]) <= unweighted / 1.5


def test_more_antennas_help():
    ser = {r.m_antennas: r.ser for r in run_ser(ser_config(m_antennas=(64, 128), snr_db=4.0))}
    assert ser[128] < ser[64]


def test_trade_off_minimum_with_large_array():
    grid = (0.0, 2.0, 4.0, 6.0, 8.0)
    ser = [r.ser for r in run_ser(ser_config(m_antennas=256, snr_db=grid))]
    assert 0 < int(np.argmin(ser)) < len(grid) - 1
