import io
import math

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.stats import poisson

from jcpurity import (
    DegenerateState,
    InvalidDistribution,
    cat_state,
    coherent_state,
    custom_state,
    fock_state,
    gaussian_state,
    read_state_table,
    squeezed_coherent_state,
    stats,
    write_state_table,
)
from jcpurity.fock import GUARD_BAND


def ladder(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), 1)


def squeezed_by_expm(r, alpha, dim=260):
    """S(r) D(alpha)|0> from dense matrix exponentials in a large Fock box."""
    a = ladder(dim)
    ad = a.T
    squeeze = expm(0.5 * r * (a @ a - ad @ ad))
    displace = expm(alpha * (ad - a))
    vac = np.zeros(dim)
    vac[0] = 1.0
    return squeeze @ displace @ vac


class TestCoherent:
    def test_matches_poisson_pmf(self):
        st = coherent_state(49.0)
        n = np.arange(st.n_max + 1)
        np.testing.assert_allclose(st.probs, poisson.pmf(n, 49.0), rtol=1e-10, atol=1e-300)

    def test_moments_and_peak(self, coherent49):
        s = stats(coherent49)
        assert s.mean == pytest.approx(49.0, abs=1e-9)
        assert s.variance == pytest.approx(49.0, abs=1e-8)
        assert s.peak_index in (48, 49)

    def test_tail_is_certified(self, coherent49):
        assert coherent49.tail_mass < 1e-12
        n_cut = coherent49.n_max - GUARD_BAND
        assert poisson.sf(n_cut, 49.0) < 1e-12

    def test_phase_profile_is_linear(self):
        st = coherent_state(4.0, 0.3)
        np.testing.assert_allclose(st.phases, 0.3 * np.arange(st.n_max + 1))

    def test_vacuum(self):
        st = coherent_state(0.0)
        assert st.n_max == 0
        assert st.probs[0] == 1.0

    def test_negative_mean_rejected(self):
        with pytest.raises(ValueError):
            coherent_state(-1.0)


class TestCat:
    def test_even_cat_has_no_odd_photons(self):
        st = cat_state(49.0, 0.0)
        assert np.all(st.probs[1::2] == 0.0)
        assert st.probs.sum() == pytest.approx(1.0, abs=1e-14)

    def test_odd_cat(self):
        st = cat_state(9.0, math.pi)
        assert np.all(st.probs[0::2] == 0.0)

    def test_matches_superposition_of_coherent_amplitudes(self):
        m, phi = 6.0, 1.1
        n = np.arange(60)
        a = math.sqrt(m)
        amp = np.exp(-m / 2) * a ** n / np.sqrt([float(math.factorial(k)) for k in n])
        psi = amp + np.exp(1j * phi) * amp * (-1.0) ** n
        ref = abs(psi) ** 2 / np.sum(abs(psi) ** 2)
        st = cat_state(m, phi)
        np.testing.assert_allclose(st.probs, ref[: st.n_max + 1], atol=1e-15)

    def test_odd_vacuum_cat_is_degenerate(self):
        with pytest.raises(DegenerateState):
            cat_state(0.0, math.pi)


class TestSqueezed:
    @pytest.mark.parametrize("r, alpha", [(0.3, 2.0), (0.75, 3.0), (0.75, 6.5)])
    def test_matches_matrix_exponential(self, r, alpha):
        psi = squeezed_by_expm(r, alpha)
        st = squeezed_coherent_state(r, alpha)
        ref = abs(psi[: st.n_max + 1]) ** 2
        np.testing.assert_allclose(st.probs, ref, atol=1e-12)

    def test_figure_state_moments(self):
        s = stats(squeezed_coherent_state(0.75, 14.72))
        assert s.mean == pytest.approx(49.0237, abs=1e-3)
        assert s.variance == pytest.approx(13.0547, abs=1e-3)

    def test_analytic_moments(self):
        # <n> = alpha^2 e^{-2r} + sinh^2 r,  Var = alpha^2 e^{-4r} + sinh^2(2r) / 2
        r, alpha = 0.75, 14.72
        s = stats(squeezed_coherent_state(r, alpha))
        assert s.mean == pytest.approx(alpha ** 2 * math.exp(-2 * r) + math.sinh(r) ** 2, rel=1e-10)
        assert s.variance == pytest.approx(alpha ** 2 * math.exp(-4 * r) + math.sinh(2 * r) ** 2 / 2, rel=1e-9)

    def test_zero_squeezing_is_coherent(self):
        np.testing.assert_allclose(squeezed_coherent_state(0.0, 3.0).probs, coherent_state(9.0).probs)

    def test_large_arguments_stay_finite(self):
        st = squeezed_coherent_state(2.5, 40.0)
        assert np.all(np.isfinite(st.probs))
        assert st.probs.sum() == pytest.approx(1.0, abs=1e-12)


class TestGaussian:
    def test_moments(self):
        s = stats(gaussian_state(49.0, 49.0))
        assert s.mean == pytest.approx(49.0, abs=1e-6)
        assert s.variance == pytest.approx(49.0 + 0.0, rel=1e-3)

    def test_mass_below_zero_rejected(self):
        with pytest.raises(DegenerateState):
            gaussian_state(1.0, 25.0)


class TestTruncation:
    @pytest.mark.parametrize("eps", [1e-8, 1e-10, 1e-12, 1e-14])
    def test_tail_below_eps(self, eps):
        st = coherent_state(49.0, eps_trunc=eps)
        assert st.tail_mass < eps

    def test_tighter_eps_keeps_more(self):
        assert coherent_state(49.0, eps_trunc=1e-14).n_max > coherent_state(49.0, eps_trunc=1e-8).n_max

    def test_truncation_stability(self):
        coarse = coherent_state(49.0, eps_trunc=1e-10)
        fine = coherent_state(49.0, eps_trunc=1e-14)
        k = coarse.n_max + 1
        assert np.max(abs(coarse.probs - fine.probs[:k])) < 1e-10


class TestFockAndCustom:
    def test_fock(self):
        st = fock_state(3)
        assert list(st.probs) == [0, 0, 0, 1]
        assert not st.truncated

    def test_negative_fock(self):
        with pytest.raises(InvalidDistribution):
            fock_state(-1)

    def test_custom_normalises(self):
        st = custom_state([1, 3], [0.0, 0.5])
        np.testing.assert_allclose(st.probs, [0.25, 0.75])

    @pytest.mark.parametrize("bad", [[], [-1.0, 2.0], [np.nan], [0.0, 0.0]])
    def test_custom_rejects(self, bad):
        with pytest.raises(InvalidDistribution):
            custom_state(bad)

    def test_arrays_are_read_only(self, coherent49):
        with pytest.raises(ValueError):
            coherent49.probs[0] = 1.0


class TestStateTable:
    def test_round_trip(self):
        st = coherent_state(4.0, 0.2)
        text = write_state_table(st)
        back = read_state_table(io.StringIO(text))
        np.testing.assert_array_equal(back.probs, st.probs)
        np.testing.assert_array_equal(back.phases, st.phases)
        assert write_state_table(back) == text

    def test_gaps_filled_with_zero(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("# comment\nn,p_n,alpha_n\n0,1,0\n3,1,0.5\n")
        st = read_state_table(path)
        np.testing.assert_allclose(st.probs, [0.5, 0, 0, 0.5])
        assert st.phases[3] == 0.5

    def test_malformed(self):
        with pytest.raises(InvalidDistribution):
            read_state_table(io.StringIO("n,p_n\n0,abc\n"))
