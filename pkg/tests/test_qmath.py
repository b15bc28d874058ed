"""Tests for the arcsine law and the 1-bit quantizer."""
import numpy as np
import pytest
from mimo_utils.errors import DomainError
from mimo_utils.qmath import QuantizedMatrix, omega, quantize, sgn


class TestOmega:
    def test_endpoints_and_origin(self):
        assert omega(0.0) == 0.0
        assert omega(1.0) == pytest.approx(1.0, abs=1e-15)
        assert omega(-1.0) == pytest.approx(-1.0, abs=1e-15)

    def test_half(self):
        # arcsin(1/2) = pi/6
        assert omega(0.5) == pytest.approx(1 / 3, rel=1e-14)

    def test_odd(self):
        w = np.linspace(-1, 1, 201)
        np.testing.assert_allclose(omega(-w), -omega(w), rtol=0, atol=1e-15)

    def test_monotone(self):
        w = np.linspace(-1, 1, 1001)
        assert np.all(np.diff(omega(w)) > 0)

    def test_clamps_round_off(self):
        assert omega(1 + 1e-13) == pytest.approx(1.0, abs=1e-15)
        assert omega(-1 - 1e-13) == pytest.approx(-1.0, abs=1e-15)

    def test_scalar_in_scalar_out(self):
        assert isinstance(omega(0.25), float)
        assert omega(np.array([0.25])).shape == (1,)

    @pytest.mark.parametrize("bad", [1.1, -1.5, np.nan, np.inf])
    def test_rejects_outside_domain(self, bad):
        with pytest.raises(DomainError):
            omega(bad)


class TestQuantize:
    def test_sign_of_zero_is_positive(self):
        q = quantize(np.array([0.0 + 0.0j]), rho=1.0)
        assert q.entries[0] == 1 + 1j
        assert sgn(0.0) == 1.0

    def test_output_alphabet(self):
        rng = np.random.default_rng(5)
        c = rng.standard_normal((8, 6)) + 1j * rng.standard_normal((8, 6))
        q = quantize(c, rho=3.0, k_users=2)
        scale = np.sqrt((3.0 * 2 + 1) / 2)
        assert q.shape == (8, 6)
        np.testing.assert_array_equal(np.abs(q.entries.real), scale)
        np.testing.assert_array_equal(np.abs(q.entries.imag), scale)
        np.testing.assert_array_equal(np.sign(q.entries.real), np.where(c.real >= 0, 1, -1))
        np.testing.assert_array_equal(np.sign(q.entries.imag), np.where(c.imag >= 0, 1, -1))

    def test_idempotent(self):
        rng = np.random.default_rng(6)
        c = rng.standard_normal(50) + 1j * rng.standard_normal(50)
        once = quantize(c, rho=10.0)
        twice = quantize(once, rho=10.0)
        np.testing.assert_array_equal(once.entries, twice.entries)

    def test_sign_equivariant(self):
        rng = np.random.default_rng(7)
        c = rng.standard_normal((16, 4)) + 1j * rng.standard_normal((16, 4))
        assert np.all(c.real != 0) and np.all(c.imag != 0)
        np.testing.assert_array_equal(quantize(-c, rho=2.0).entries, -quantize(c, rho=2.0).entries)

    def test_scale_property(self):
        q = quantize([1 - 1j], rho=4.0)
        assert isinstance(q, QuantizedMatrix)
        assert q.scale == pytest.approx(np.sqrt(2.5))
        assert q.entries[0] == pytest.approx(np.sqrt(2.5) * (1 - 1j))

    @pytest.mark.parametrize("rho, k_users", [(0.0, 1), (-1.0, 1), (1.0, 0)])
    def test_rejects_bad_parameters(self, rho, k_users):
        with pytest.raises(DomainError):
            quantize([1j], rho=rho, k_users=k_users)
