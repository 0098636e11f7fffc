import math

import numpy as np
import pytest

from jcpurity import (
    EXCITED,
    AtomDensity,
    ConfigurationError,
    EmptyDesign,
    atom_density,
    atom_density_curve,
    cauchy_schwarz_gap,
    design_distribution,
    evolve,
    initial_joint,
    mixed_phase_purity,
    phase_sensitivity,
    purity,
)

POLE_FREE = 0.52428738


def purity_curve(state, ts):
    p, m, c = atom_density_curve(initial_joint(EXCITED, state), ts)
    return p ** 2 + m ** 2 + 2 * abs(c) ** 2


class TestGap:
    def test_pure(self):
        assert cauchy_schwarz_gap(AtomDensity(0.5, 0.5, 0.5)) == 0.0

    def test_maximally_mixed(self):
        assert cauchy_schwarz_gap(AtomDensity(0.5, 0.5, 0.0)) == 0.25

    def test_relation_to_purity(self):
        rho = AtomDensity(0.7, 0.3, 0.2 + 0.1j)
        assert purity(rho) == pytest.approx(1 - 2 * cauchy_schwarz_gap(rho), abs=1e-15)

    def test_coherent_evolution(self, coherent49):
        psi0 = initial_joint(EXCITED, coherent49)
        ts = np.linspace(0, 50, 2001)
        p, m, c = atom_density_curve(psi0, ts)
        gap = p * m - abs(c) ** 2
        assert gap.min() >= -1e-12
        early = cauchy_schwarz_gap(atom_density(evolve(psi0, 5.0)))
        late = cauchy_schwarz_gap(atom_density(evolve(psi0, math.pi * math.sqrt(50))))
        assert early > 0.2
        assert late < 0.005


class TestDesign:
    def test_pole_free_purifies(self):
        res = design_distribution(POLE_FREE, 1.0, 40)
        assert res.rejected_indices == []
        assert res.support >= 5
        assert res.achieved_purity > 0.999
        assert np.all(res.state.phases == 0)

    def test_purity_is_measured_not_assumed(self):
        res = design_distribution(POLE_FREE, 1.0, 40)
        rho = atom_density(evolve(initial_joint(EXCITED, res.state), res.t_f))
        assert res.achieved_purity == purity(rho)

    def test_small_beta_concentrates_on_vacuum(self):
        g = 0.9
        res = design_distribution(g, 1e-14, 30)
        assert res.state.probs[0] > 1 - 1e-12
        assert res.achieved_purity == pytest.approx(math.cos(g) ** 4 + math.sin(g) ** 4, abs=1e-10)

    def test_pole_truncates(self):
        k = 9
        g = math.pi / (2 * math.sqrt(k + 1))
        res = design_distribution(g, 1.0, 40)
        assert res.rejected_indices == [k]
        assert res.state.n_max <= k - 1

    def test_pole_at_one_is_empty(self):
        with pytest.raises(EmptyDesign):
            design_distribution(math.pi / (2 * math.sqrt(2)), 1.0, 40)

    @pytest.mark.parametrize("args", [(0.0, 1.0, 10), (1.0, 0.0, 10), (1.0, 1.0, -1)])
    def test_bad_inputs(self, args):
        with pytest.raises(ConfigurationError):
            design_distribution(*args)

    def test_bad_floor(self):
        with pytest.raises(ConfigurationError):
            design_distribution(1.0, 1.0, 10, cos_floor=1.5)

    def test_ratio_reported(self):
        res = design_distribution(POLE_FREE, 1.0, 40)
        assert res.p_ratio == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("g_tf", np.linspace(0.3, 12.0, 60))
    @pytest.mark.parametrize("beta2", [0.3, 1.0, 3.0])
    def test_boundary_defect_bound(self, g_tf, beta2):
        try:
            res = design_distribution(g_tf, beta2, 60)
        except EmptyDesign:
            return
        if res.sign_consistent:
            assert res.achieved_purity >= 1 - 2 * res.boundary_defect - 1e-12

    @pytest.mark.xfail(strict=True, reason="pole-free recursion leaves the unpaired n = 0 weight; purity 0.82 here")
    def test_pole_free_support_alone_purifies(self):
        res = design_distribution(0.3, 1.0, 40)
        assert res.rejected_indices == [] and res.support >= 5
        assert res.achieved_purity > 0.999

    def test_generic_times_are_not_pure(self):
        g_tf = 2.029107
        res = design_distribution(g_tf, 1.0, 40)
        assert res.achieved_purity > 0.999
        ts = np.linspace(0, 2 * g_tf, 4001)
        pur = purity_curve(res.state, ts)
        generic = (ts > 0.02) & (abs(ts - g_tf) > 0.05)
        assert pur[generic].max() < 1 - 1e-3


class TestPhaseSensitivity:
    def test_zero_perturbation(self, coherent49):
        assert phase_sensitivity(coherent49, 22.2, 0.0) == 0.0

    def test_continuity(self, coherent49):
        assert abs(phase_sensitivity(coherent49, 22.2, 1e-6)) < 1e-4

    def test_full_randomisation(self, coherent49):
        t0 = math.pi * math.sqrt(50)
        psi = evolve(initial_joint(EXCITED, coherent49), t0)
        rho = atom_density(psi)
        base = purity(rho)
        # independent uniform phases keep only the diagonal of |sum u_n conj(v_n)|^2
        expected = mixed_phase_purity(rho.p_plus) + 2 * np.sum(abs(psi.rot_plus) ** 2 * abs(psi.rot_minus) ** 2)
        drop = phase_sensitivity(coherent49, t0, math.pi, n_draws=400, seed=2)
        assert base + drop == pytest.approx(expected, abs=0.01)
        assert base + drop - mixed_phase_purity(rho.p_plus) < 0.05

    def test_seeded(self, coherent49):
        a = phase_sensitivity(coherent49, 10.0, 0.5, n_draws=10, seed=7)
        assert a == phase_sensitivity(coherent49, 10.0, 0.5, n_draws=10, seed=7)
