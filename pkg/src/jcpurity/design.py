"""Cauchy-Schwarz purity gap and field states engineered to purify the atom.

With the atom initially excited, the doublet rotation at time ``t_f`` gives

    <n,+|psi> = cos(g t_f sqrt(n+1)) sqrt(q_n),   <n,-|psi> = -i sin(g t_f sqrt n) sqrt(q_{n-1}).

The atom is pure exactly when these two Fock vectors are parallel, which is the
recursion ``q_n cos^2(g t_f sqrt(n+1)) = beta2 q_{n-1} sin^2(g t_f sqrt n)``.
Solving it forward from ``q_0 = 1`` makes the bulk parallel; the two ends
(``n = 0`` of the upper vector and ``n = N+1`` of the lower one) have no
partner, and a sign flip of ``cos(g t_f sqrt(n+1)) / sin(g t_f sqrt n)`` inside
the support breaks the parallelism too. ``DesignResult`` reports both so the
achieved purity, which is always measured by forward evolution, can be read.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .dynamics import (
    EXCITED,
    AtomAmplitudes,
    AtomDensity,
    atom_density,
    evolve,
    initial_joint,
    purity,
)
from .errors import ConfigurationError, EmptyDesign, UnnormalizableDesign
from .fock import FieldState

__all__ = [
    "DEFAULT_COS_FLOOR",
    "DesignResult",
    "cauchy_schwarz_gap",
    "design_distribution",
    "phase_sensitivity",
]

DEFAULT_COS_FLOOR = 1e-3
_SUPPORT_CUT = 1e-300
_SIGN_CUT = 1e-12


def cauchy_schwarz_gap(rho: AtomDensity) -> float:
    """``p_+ p_- - |c|^2``; zero exactly when the reduced atomic state is pure."""
    return rho.p_plus * rho.p_minus - abs(rho.coherence) ** 2


@dataclass(frozen=True, eq=False)
class DesignResult:
    state: FieldState
    beta2: float
    t_f: float
    achieved_purity: float
    rejected_indices: list = field(default_factory=list)
    p_ratio: float = math.nan
    boundary_defect: float = 0.0
    sign_consistent: bool = True

    @property
    def support(self) -> int:
        return int(np.count_nonzero(self.state.probs > 1e-6))


def design_distribution(g_tf: float, beta2: float, n_max: int,
                        cos_floor: float = DEFAULT_COS_FLOOR, g: float = 1.0) -> DesignResult:
    """Solve the purification recursion up to ``n_max`` and verify by evolution.

    The recursion stops before the first ``n >= 1`` with
    ``|cos(g_tf sqrt(n+1))| < cos_floor``; that ``n`` is reported in
    ``rejected_indices``. ``p_ratio`` is ``p_+/p_-`` at ``t_f``, the value
    ``beta2`` would take at a self-consistent solution.
    """
    if not g_tf > 0:
        raise ConfigurationError(f"g_tf must be > 0, got {g_tf}")
    if not beta2 > 0:
        raise ConfigurationError(f"beta2 must be > 0, got {beta2}")
    if not 0 < cos_floor < 1:
        raise ConfigurationError(f"cos_floor must lie in (0, 1), got {cos_floor}")
    if int(n_max) < 0:
        raise ConfigurationError(f"n_max must be >= 0, got {n_max}")
    n_max = int(n_max)

    logq, stop = kernels.design_log_weights(float(g_tf), math.log(beta2), n_max, float(cos_floor))
    rejected = [int(stop)] if stop <= n_max else []
    if stop == 1:
        raise EmptyDesign(
            f"cos(g_tf sqrt 2) = {math.cos(g_tf * math.sqrt(2.0)):.3e} is below the floor; "
            "only n = 0 would remain"
        )
    logq = np.asarray(logq[:stop], dtype=float)
    if np.any(np.isnan(logq)) or np.any(np.isposinf(logq)):
        raise UnnormalizableDesign("recursion weights left the representable range")
    probs = np.exp(logq - logq.max())
    probs /= probs.sum()
    if not np.all(np.isfinite(probs)):
        raise UnnormalizableDesign("designed distribution could not be normalised")
    nz = np.flatnonzero(probs > _SUPPORT_CUT)
    probs = probs[: nz[-1] + 1]
    state = FieldState(probs, np.zeros(probs.size), 0.0, label="designed")

    t_f = g_tf / g
    rho = atom_density(evolve(initial_joint(EXCITED, state, g=g), t_f))
    top = probs.size - 1
    defect = probs[0] * math.cos(g_tf) ** 2 + probs[top] * math.sin(g_tf * math.sqrt(top + 1.0)) ** 2
    n = np.arange(1, top + 1, dtype=float)
    signs = np.sign(np.cos(g_tf * np.sqrt(n + 1.0)) * np.sin(g_tf * np.sqrt(n)))
    signs = signs[(probs[1:] > _SIGN_CUT) & (probs[:-1] > _SIGN_CUT)]
    return DesignResult(
        state=state,
        beta2=float(beta2),
        t_f=t_f,
        achieved_purity=purity(rho),
        rejected_indices=rejected,
        p_ratio=rho.p_plus / rho.p_minus if rho.p_minus > 0 else math.inf,
        boundary_defect=float(defect),
        sign_consistent=bool(signs.size == 0 or np.all(signs == signs[0])),
    )


def phase_sensitivity(state: FieldState, t: float, perturbation: float, n_draws: int = 100,
                      seed: int | None = 0, atom: AtomAmplitudes = EXCITED, g: float = 1.0,
                      omega: float | None = None) -> float:
    """Mean change of purity at ``t`` when every ``alpha_n`` is jittered by U[-perturbation, perturbation]."""
    if perturbation < 0:
        raise ValueError("perturbation must be >= 0")
    rng = np.random.default_rng(seed)

    def purity_at(phases):
        field_state = FieldState(state.probs, phases, state.tail_mass, label=state.label)
        return purity(atom_density(evolve(initial_joint(atom, field_state, g=g, omega=omega), t)))

    base = purity_at(state.phases)
    jitter = rng.uniform(-perturbation, perturbation, size=(n_draws, state.n_max + 1))
    deltas = [purity_at(state.phases + row) - base for row in jitter]
    return float(np.mean(deltas))
