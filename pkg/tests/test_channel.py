import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from risce.channel import (
    NEG_INF_DB,
    ChannelRealization,
    CorrelationSpec,
    RiceanLinkSpec,
    SteeringSpec,
    correlation_matrix,
    draw_bs_ris,
    draw_realization,
    draw_ricean,
    effective_channel,
    path_gain,
    path_gain_db,
    snr_db,
    steering_vector,
)
from risce.config import InvalidParameterError, PathLossSpec, Scenario

# sin(pi*sqrt2)/(pi*sqrt2), 30-digit mpmath evaluation
SINC_SQRT2 = -0.216954294377476369356864039063


class TestPathGain:
    def test_reference_distance(self):
        assert path_gain_db(PathLossSpec("exponent", -30.0, 1.0, 2.0)) == pytest.approx(-30.0)

    def test_exponent_at_100m(self):
        assert path_gain_db(PathLossSpec("exponent", -30.0, 100.0, 2.0)) == pytest.approx(-70.0)

    def test_direct_db(self):
        spec = PathLossSpec("direct_db", -30.0, 30.167, -81.7077)
        assert path_gain_db(spec) == pytest.approx(-111.7077)
        assert path_gain(spec) == pytest.approx(10 ** (-11.17077))

    @pytest.mark.parametrize("d", [0.0, -1.0])
    def test_non_positive_distance(self, d):
        with pytest.raises(InvalidParameterError):
            path_gain(PathLossSpec("exponent", -30.0, d, 2.0))

    def test_negative_exponent_rejected(self):
        with pytest.raises(InvalidParameterError):
            path_gain(PathLossSpec("exponent", -30.0, 10.0, -1.0))


class TestSteering:
    def test_single_element(self):
        np.testing.assert_array_equal(steering_vector(SteeringSpec(1, 1, 0.5, 33.0, 12.0)), [1.0])

    def test_broadside_all_ones(self):
        a = steering_vector(SteeringSpec(4, 3, 0.5, 90.0, 0.0))
        np.testing.assert_allclose(a, np.ones(12), atol=1e-12)

    def test_half_wavelength_alternation(self):
        a = steering_vector(SteeringSpec(2, 1, 0.5, 90.0, 90.0))
        np.testing.assert_allclose(a, [1.0, -1.0], atol=1e-12)

    def test_z_axis_uses_its_own_length(self):
        # K_y=1 leaves only the z progression, which must have K_z entries
        a = steering_vector(SteeringSpec(1, 5, 0.25, 60.0, 10.0))
        expected = np.exp(2j * np.pi * 0.25 * np.arange(5) * np.cos(np.deg2rad(60.0)))
        np.testing.assert_allclose(a, expected, atol=1e-12)

    @given(
        ky=st.integers(1, 12),
        kz=st.integers(1, 12),
        lam=st.floats(0.05, 3.0),
        th=st.floats(-180, 180),
        om=st.floats(-180, 180),
    )
    def test_unit_modulus_and_length(self, ky, kz, lam, th, om):
        a = steering_vector(SteeringSpec(ky, kz, lam, th, om))
        assert a.shape == (ky * kz,)
        np.testing.assert_allclose(np.abs(a), 1.0, atol=1e-12)

    def test_invalid(self):
        with pytest.raises(InvalidParameterError):
            steering_vector(SteeringSpec(0, 1, 0.5, 0, 0))


class TestCorrelation:
    def test_unit_diagonal(self):
        R = correlation_matrix(CorrelationSpec(4, 5, 0.3))
        np.testing.assert_array_equal(np.diag(R), 1.0)

    def test_pair(self):
        spec = CorrelationSpec(2, 1, 0.25)
        R = correlation_matrix(spec)
        d_r = np.sin(np.pi * 0.5) / (np.pi * 0.5)
        np.testing.assert_allclose(R, [[1, d_r], [d_r, 1]], atol=1e-12)
        assert spec.nearest_neighbour == pytest.approx(d_r)

    def test_diagonal_neighbour(self):
        R = correlation_matrix(CorrelationSpec(2, 2, 0.5))
        # elements 0=(0,0) and 3=(1,1)
        assert R[0, 3] == pytest.approx(SINC_SQRT2, abs=1e-9)

    def test_grid_mismatch(self):
        with pytest.raises(InvalidParameterError):
            correlation_matrix(CorrelationSpec(2, 3, 0.5), n=7)

    @settings(max_examples=30)
    @given(ky=st.integers(1, 9), kz=st.integers(1, 9), lam=st.floats(0.05, 2.0))
    def test_hermitian_psd(self, ky, kz, lam):
        R = correlation_matrix(CorrelationSpec(ky, kz, lam))
        np.testing.assert_allclose(R, R.conj().T, atol=1e-12)
        assert np.linalg.eigvalsh(R).min() >= -1e-9
        assert abs(CorrelationSpec(ky, kz, lam).nearest_neighbour) <= 1.0


def _link(beta=2.0, kappa=1.0, ky=3, kz=4, lam=0.5):
    return RiceanLinkSpec(beta, kappa, SteeringSpec(ky, kz, lam, 71.95, 25.1), CorrelationSpec(ky, kz, lam))


class TestRicean:
    def test_los_limit(self, rng):
        spec = _link(kappa=1e12)
        h = draw_ricean(spec, rng)
        target = np.sqrt(spec.beta) * steering_vector(spec.steering)
        assert np.linalg.norm(h - target) / np.linalg.norm(target) < 1e-4

    def test_rayleigh_power(self, rng):
        # kappa=0 with R=I (lambda=0.5 on a line -> sinc(integer)=0 off-diagonal)
        spec = _link(beta=3.0, kappa=0.0, ky=1, kz=6, lam=0.5)
        np.testing.assert_allclose(correlation_matrix(spec.correlation), np.eye(6), atol=1e-12)
        h = draw_ricean(spec, rng, size=100_000)
        mean_power = np.mean(np.sum(np.abs(h) ** 2, axis=1)) / 6
        assert mean_power == pytest.approx(3.0, rel=0.02)

    @pytest.mark.parametrize("kappa", [0.0, 0.5, 1.0, 10.0])
    def test_mean_vector(self, rng, kappa):
        spec = _link(beta=2.0, kappa=kappa)
        n_draws = 100_000
        h = draw_ricean(spec, rng, size=n_draws)
        mean = h.mean(axis=0)
        expect = np.sqrt(spec.beta * kappa / (1 + kappa)) * steering_vector(spec.steering)
        # per-entry scattered variance beta/(1+kappa) (unit diagonal), split over re/im
        se = np.sqrt(spec.beta / (1 + kappa) / 2 / n_draws)
        assert np.all(np.abs(mean.real - expect.real) < 3 * se)
        assert np.all(np.abs(mean.imag - expect.imag) < 3 * se)

    @pytest.mark.parametrize("kappa", [0.0, 1.0, 4.0])
    def test_power_moment(self, rng, kappa):
        spec = _link(beta=0.7, kappa=kappa, ky=4, kz=4, lam=0.3)
        N = 16
        a = steering_vector(spec.steering)
        h = draw_ricean(spec, rng, size=100_000)
        emp = np.mean(np.sum(np.abs(h) ** 2, axis=1))
        theory = spec.beta * (kappa / (1 + kappa) * np.vdot(a, a).real + N / (1 + kappa))
        assert emp == pytest.approx(theory, rel=0.02)


class TestBsRis:
    def test_scalar(self):
        np.testing.assert_array_equal(draw_bs_ris(1.0, np.ones(1), np.ones(1)), [[1.0]])

    @given(m=st.integers(1, 6), n=st.integers(1, 20), th=st.floats(0, 180), om=st.floats(-90, 90),
           beta=st.floats(1e-6, 10.0))
    def test_rank_one_and_norm(self, m, n, th, om, beta):
        a_b = steering_vector(SteeringSpec(1, m, 0.5, th, om))
        a_r = steering_vector(SteeringSpec(1, n, 0.37, om, th))
        H = draw_bs_ris(beta, a_b, a_r)
        assert H.shape == (m, n)
        if m > 1 and n > 1:
            minors = H[:-1, :-1] * H[1:, 1:] - H[:-1, 1:] * H[1:, :-1]
            assert np.max(np.abs(minors)) <= 1e-12 * max(1.0, beta)
        assert np.linalg.norm(H) ** 2 == pytest.approx(beta * m * n, rel=1e-9)


def _real(h_bu, H_br, h_ru, p=10.0, s2=-65.0):
    return ChannelRealization(np.asarray(h_bu, complex), np.asarray(H_br, complex), np.asarray(h_ru, complex), p, s2)


class TestEffectiveChannel:
    def test_no_ris(self):
        r = _real([1 + 1j], np.zeros((1, 0)), [])
        np.testing.assert_array_equal(effective_channel(r, []), [1 + 1j])

    def test_identity_reflection(self, rng):
        r = draw_realization(Scenario().replace(**{"ris.N": 12}), rng)
        np.testing.assert_allclose(effective_channel(r, np.zeros(12)), r.h_bu + r.H_br @ r.h_ru)

    def test_hand_example(self):
        r = _real([1], [[1, 1]], [1, -1])
        np.testing.assert_allclose(effective_channel(r, [0, 1]), [3.0])

    def test_length_mismatch(self):
        r = _real([1], [[1, 1]], [1, -1])
        with pytest.raises(InvalidParameterError):
            effective_channel(r, [0, 1, 1])

    def test_non_binary(self):
        r = _real([1], [[1, 1]], [1, -1])
        with pytest.raises(InvalidParameterError):
            effective_channel(r, [0, 2])


class TestSnr:
    def test_db_arithmetic(self):
        assert snr_db(_real([1.0], np.zeros((1, 0)), []), []) == pytest.approx(75.0)

    def test_zero_channel(self):
        assert snr_db(_real([0.0], np.zeros((1, 0)), []), []) == NEG_INF_DB

    @given(delta=st.floats(-30, 30), bits=st.lists(st.integers(0, 1), min_size=8, max_size=8))
    @settings(max_examples=50)
    def test_power_shift(self, delta, bits):
        r = draw_realization(Scenario().replace(**{"ris.N": 8}), np.random.default_rng(5))
        shifted = ChannelRealization(r.h_bu, r.H_br, r.h_ru, r.p_dBm + delta, r.sigma2_dBm)
        assert snr_db(shifted, bits) - snr_db(r, bits) == pytest.approx(delta, abs=1e-9)

    @given(seed=st.integers(0, 2**32 - 1), bits=st.lists(st.integers(0, 1), min_size=10, max_size=10))
    @settings(max_examples=50)
    def test_complement_symmetry(self, seed, bits):
        r = draw_realization(Scenario().replace(**{"ris.N": 10}), np.random.default_rng(seed))
        r = ChannelRealization(np.zeros_like(r.h_bu), r.H_br, r.h_ru, r.p_dBm, r.sigma2_dBm)
        x = np.array(bits)
        assert snr_db(r, x) == pytest.approx(snr_db(r, 1 - x), abs=1e-9)


def test_realization_shapes_and_rank(rng):
    sc = Scenario().replace(**{"bs.M": 4, "ris.N": 30})
    r = draw_realization(sc, rng)
    assert r.h_bu.shape == (4,) and r.H_br.shape == (4, 30) and r.h_ru.shape == (30,)
    s = np.linalg.svd(r.H_br, compute_uv=False)
    assert s[1] <= 1e-9 * s[0]


def test_direct_link_shared_across_n():
    sc = Scenario()
    a = draw_realization(sc, np.random.default_rng(3), 0)
    b = draw_realization(sc, np.random.default_rng(3), 64)
    np.testing.assert_array_equal(a.h_bu, b.h_bu)
