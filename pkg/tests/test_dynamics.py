import math

import numpy as np
import pytest
from scipy.linalg import expm

from jcpurity import (
    EXCITED,
    AtomAmplitudes,
    NormalizationError,
    PeakMismatch,
    TruncationLeak,
    WindowViolation,
    atom_density,
    atom_density_curve,
    cat_state,
    coherent_state,
    entropy,
    evolve,
    field_density,
    field_purity,
    fock_state,
    half_revival_time,
    initial_joint,
    mixed_phase_purity,
    phase_averaged_density,
    predicted_disentangled,
    product_fidelity,
    purity,
    revival_time,
)


def jc_hamiltonian(n_levels, g, omega):
    """Dense resonant JC Hamiltonian on |n, s>, index 2n + s with s = 0 (+), 1 (-)."""
    dim = 2 * n_levels
    h = np.zeros((dim, dim))
    for n in range(n_levels):
        h[2 * n, 2 * n] = omega * (n + 0.5)
        h[2 * n + 1, 2 * n + 1] = omega * (n - 0.5)
        if n + 1 < n_levels:
            h[2 * n, 2 * (n + 1) + 1] = h[2 * (n + 1) + 1, 2 * n] = g * math.sqrt(n + 1)
    return h


def flat(state):
    return state.vector().reshape(-1)


@pytest.fixture(scope="module")
def small_field():
    return coherent_state(4.0, 0.4, eps_trunc=1e-15)


class TestExactEvolution:
    @pytest.mark.parametrize("t", [0.0, 0.37, 2.9, 13.3])
    def test_matches_matrix_exponential(self, small_field, t):
        atom = AtomAmplitudes.normalized(0.6, 0.8j)
        psi0 = initial_joint(atom, small_field, g=1.3, omega=2.1)
        h = jc_hamiltonian(psi0.rot_plus.size, 1.3, 2.1)
        ref = expm(-1j * h * t) @ flat(psi0)
        assert np.max(abs(flat(evolve(psi0, t)) - ref)) < 1e-12

    def test_unitarity(self, coherent49):
        psi = evolve(initial_joint(AtomAmplitudes.normalized(1, 1j), coherent49), 31.4)
        assert psi.norm2() == pytest.approx(1.0, abs=1e-13)

    def test_composition(self, coherent49):
        psi0 = initial_joint(EXCITED, coherent49)
        a = evolve(evolve(psi0, 7.5), 4.25)
        b = evolve(psi0, 11.75)
        assert np.max(abs(flat(a) - flat(b))) < 1e-12

    def test_top_plus_slot_stays_empty(self, coherent49):
        psi = evolve(initial_joint(AtomAmplitudes.normalized(1, 1), coherent49), 9.0)
        assert psi.rot_plus[-1] == 0

    def test_negative_time_rejected(self, coherent49):
        with pytest.raises(ValueError):
            evolve(initial_joint(EXCITED, coherent49), -1.0)

    def test_truncation_leak_detected(self):
        crude = coherent_state(49.0, eps_trunc=1e-2)
        with pytest.raises(TruncationLeak):
            evolve(initial_joint(EXCITED, crude), 1.0)

    def test_atom_normalisation_enforced(self):
        with pytest.raises(NormalizationError):
            AtomAmplitudes(1.0, 1.0)


class TestReducedStates:
    def test_curve_matches_pointwise(self, coherent49):
        psi0 = initial_joint(AtomAmplitudes.normalized(2, 1j), coherent49)
        times = np.array([0.0, 1.1, 22.2, 47.0])
        p_plus, p_minus, coh = atom_density_curve(psi0, times)
        for k, t in enumerate(times):
            rho = atom_density(evolve(psi0, t))
            assert p_plus[k] == pytest.approx(rho.p_plus, abs=1e-13)
            assert p_minus[k] == pytest.approx(rho.p_minus, abs=1e-13)
            assert abs(coh[k] - rho.coherence) < 1e-13

    def test_density_matches_partial_trace(self, small_field):
        psi = evolve(initial_joint(AtomAmplitudes.normalized(1, 2), small_field, omega=3.0), 2.2)
        v = psi.vector()
        rho_ref = v.T @ v.conj()
        assert np.max(abs(atom_density(psi).matrix() - rho_ref)) < 1e-14

    def test_rabi_vacuum(self):
        psi0 = initial_joint(EXCITED, fock_state(0))
        times = np.linspace(0, 10, 101)
        p_plus, p_minus, coh = atom_density_curve(psi0, times)
        np.testing.assert_allclose(p_plus, np.cos(times) ** 2, atol=1e-14)
        assert np.max(abs(coh)) < 1e-15

    def test_purity_equals_field_purity(self, coherent49):
        psi = evolve(initial_joint(AtomAmplitudes.normalized(1, 0.5), coherent49), 17.0)
        assert purity(atom_density(psi)) == pytest.approx(field_purity(field_density(psi)), abs=1e-12)

    def test_cat_coherence_vanishes(self):
        psi0 = initial_joint(EXCITED, cat_state(49.0))
        _, _, coh = atom_density_curve(psi0, np.linspace(0, 50, 500))
        assert np.max(abs(coh)) == 0.0

    def test_entropy_limits(self):
        from jcpurity import AtomDensity

        assert entropy(AtomDensity(1.0, 0.0, 0.0)) == 0.0
        assert entropy(AtomDensity(0.5, 0.5, 0.0)) == pytest.approx(math.log(2))
        assert entropy(AtomDensity(0.5, 0.5, 0.5)) == pytest.approx(0.0, abs=1e-7)

    def test_mixed_phase_purity(self):
        assert mixed_phase_purity(1.0) == 1.0
        assert mixed_phase_purity(0.5) == 0.5

    def test_phase_averaged_matches_formula(self, coherent49):
        t = 13.0
        rho = phase_averaged_density(coherent49, t, n_draws=2000, seed=4)
        p = atom_density(evolve(initial_joint(EXCITED, coherent49), t)).p_plus
        assert rho.p_plus == pytest.approx(p, abs=1e-12)
        assert purity(rho) == pytest.approx(mixed_phase_purity(p), abs=3 / math.sqrt(2000))

    def test_phase_average_is_seeded(self, coherent49):
        a = phase_averaged_density(coherent49, 5.0, n_draws=50, seed=11)
        b = phase_averaged_density(coherent49, 5.0, n_draws=50, seed=11)
        assert a == b


class TestOmegaIndependence:
    def test_purity_curves(self, coherent49):
        times = np.linspace(0, 50, 300)
        curves = []
        for omega in (0.1, 1.0, 100.0):
            p, m, c = atom_density_curve(initial_joint(EXCITED, coherent49, omega=omega), times)
            curves.append(p ** 2 + m ** 2 + 2 * abs(c) ** 2)
        assert np.max(abs(curves[0] - curves[1])) < 1e-12
        assert np.max(abs(curves[0] - curves[2])) < 1e-12


class TestRevivals:
    def test_revival_time(self):
        assert revival_time(49.0) == pytest.approx(2 * math.pi * math.sqrt(50))
        assert revival_time(49.0, shifted=False) == pytest.approx(2 * math.pi * 7)
        assert half_revival_time(49.0) == pytest.approx(math.pi * math.sqrt(50))

    def test_purity_near_half_revival(self, coherent49):
        t0 = half_revival_time(49.0)
        rho = atom_density(evolve(initial_joint(EXCITED, coherent49), t0))
        assert purity(rho) > 0.99
        assert abs(rho.coherence) == pytest.approx(0.5, abs=0.01)


class TestDisentangle:
    @pytest.mark.parametrize("a, b", [(1, 0), (1, 1), (1, 1j), (0.3, 1)])
    def test_fidelity(self, coherent49, a, b):
        psi0 = initial_joint(AtomAmplitudes.normalized(a, b), coherent49)
        t0 = half_revival_time(49.0)
        atom, field = predicted_disentangled(psi0, t0)
        assert product_fidelity(atom, field, evolve(psi0, t0)) > 0.98

    def test_atom_factor_independent_of_initial_atom(self, coherent49):
        t0 = half_revival_time(49.0)
        factors = [
            predicted_disentangled(initial_joint(AtomAmplitudes.normalized(a, b), coherent49), t0)[0]
            for a, b in [(1, 0), (1, 1), (0.2, 1j)]
        ]
        assert all(f == factors[0] for f in factors)

    def test_peak_mismatch(self):
        psi0 = initial_joint(AtomAmplitudes.normalized(1, 1), coherent_state(49.0), coherent_state(100.0))
        with pytest.raises(PeakMismatch):
            predicted_disentangled(psi0, half_revival_time(49.0))

    def test_window(self, coherent49):
        psi0 = initial_joint(EXCITED, coherent49)
        with pytest.raises(WindowViolation):
            predicted_disentangled(psi0, 5.0)
