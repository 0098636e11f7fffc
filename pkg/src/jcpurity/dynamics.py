"""Exact resonant Jaynes-Cummings evolution and reduced-state functionals.

At resonance the Hamiltonian splits into the singlet ``|0,->`` and the
doublets ``{|n,+>, |n+1,->}``, each rotating at ``g sqrt(n+1)``. States are
kept in the frame co-rotating with the free Hamiltonian: the rotating-frame
amplitudes only see the doublet rotations and the elapsed time ``t`` carries
the common free phase ``exp(-i w (n + 1/2) t)`` of doublet n. Atom purity is
built from rotating-frame quantities only, which makes it independent of the
mode frequency to rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .errors import NormalizationError, PeakMismatch, TruncationLeak, WindowViolation
from .fock import FieldState, custom_state, stats

__all__ = [
    "DEFAULT_OMEGA_OVER_G",
    "LEAK_TOL",
    "AtomAmplitudes",
    "JointState",
    "AtomDensity",
    "FieldDensity",
    "initial_joint",
    "evolve",
    "atom_density",
    "atom_density_curve",
    "purity",
    "entropy",
    "field_density",
    "field_purity",
    "mixed_phase_purity",
    "phase_averaged_density",
    "predicted_disentangled",
    "product_fidelity",
    "half_revival_time",
    "revival_time",
]

DEFAULT_OMEGA_OVER_G = 49.0
LEAK_TOL = 1e-8
EXCITED = None  # set below, after AtomAmplitudes


@dataclass(frozen=True)
class AtomAmplitudes:
    """Atomic state ``a_plus |+> + a_minus |->``."""

    a_plus: complex
    a_minus: complex

    def __post_init__(self):
        norm2 = abs(self.a_plus) ** 2 + abs(self.a_minus) ** 2
        if abs(norm2 - 1.0) > 1e-12:
            raise NormalizationError(f"|a|^2 + |b|^2 = {norm2!r}, expected 1")
        object.__setattr__(self, "a_plus", complex(self.a_plus))
        object.__setattr__(self, "a_minus", complex(self.a_minus))

    @classmethod
    def normalized(cls, a_plus, a_minus) -> "AtomAmplitudes":
        norm = math.sqrt(abs(a_plus) ** 2 + abs(a_minus) ** 2)
        if norm == 0.0:
            raise NormalizationError("atomic amplitudes are both zero")
        return cls(complex(a_plus) / norm, complex(a_minus) / norm)

    def vector(self) -> np.ndarray:
        return np.array([self.a_plus, self.a_minus])


EXCITED = AtomAmplitudes(1.0, 0.0)


@dataclass(frozen=True, eq=False)
class JointState:
    """Joint atom-field state on ``|n, s>``, n = 0..n_max+1.

    ``rot_plus[n]`` and ``rot_minus[n]`` are the rotating-frame amplitudes of
    ``|n,+>`` and ``|n,->``. The top entry of ``rot_plus`` is always zero: its
    doublet partner ``|n_max+2,->`` lies outside the arrays, so the doublet
    stays empty and the representation is closed under evolution.
    """

    rot_plus: np.ndarray
    rot_minus: np.ndarray
    g: float = 1.0
    omega: float = DEFAULT_OMEGA_OVER_G
    t: float = 0.0
    truncated: bool = False

    def __post_init__(self):
        for name in ("rot_plus", "rot_minus"):
            arr = np.array(getattr(self, name), dtype=complex)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.rot_plus.shape != self.rot_minus.shape or self.rot_plus.ndim != 1:
            raise ValueError("amplitude arrays must be 1-d and of equal length")

    @property
    def n_max(self) -> int:
        """Largest Fock index held (the leakage slot of ``|n,->`` included)."""
        return self.rot_plus.size - 1

    def _free_phase(self, shift: float) -> np.ndarray:
        # exp(-i w t (n + shift)); w t is reduced mod 2 pi once so both spin
        # components of a doublet share bit-identical phase factors.
        wt = math.fmod(self.omega * self.t, 2.0 * math.pi)
        n = np.arange(self.rot_plus.size, dtype=float)
        return np.exp(-1j * wt * (n + shift))

    @property
    def amp_plus(self) -> np.ndarray:
        """Schrodinger-picture amplitudes of ``|n,+>``."""
        return self._free_phase(0.5) * self.rot_plus

    @property
    def amp_minus(self) -> np.ndarray:
        """Schrodinger-picture amplitudes of ``|n,->``."""
        return self._free_phase(-0.5) * self.rot_minus

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.rot_plus) ** 2) + np.sum(np.abs(self.rot_minus) ** 2))

    def vector(self) -> np.ndarray:
        """Schrodinger state as an (n_max+2, 2) array indexed [n, s], s = (+, -)."""
        return np.stack([self.amp_plus, self.amp_minus], axis=1)


@dataclass(frozen=True)
class AtomDensity:
    """Reduced atomic density matrix ``[[p_plus, coherence], [conj, p_minus]]``."""

    p_plus: float
    p_minus: float
    coherence: complex

    def matrix(self) -> np.ndarray:
        c = self.coherence
        return np.array([[self.p_plus, c], [np.conj(c), self.p_minus]])


@dataclass(frozen=True, eq=False)
class FieldDensity:
    matrix: np.ndarray


# --------------------------------------------------------------------------
# construction and evolution
# --------------------------------------------------------------------------

def initial_joint(atom: AtomAmplitudes, field_plus: FieldState,
                  field_minus: FieldState | None = None, g: float = 1.0,
                  omega: float | None = None) -> JointState:
    """``a|+> (x) |gamma_+> + b|-> (x) |gamma_->``; ``field_minus`` defaults to ``field_plus``."""
    if field_minus is None:
        field_minus = field_plus
    if omega is None:
        omega = DEFAULT_OMEGA_OVER_G * g
    n_top = max(field_plus.n_max, field_minus.n_max)
    size = n_top + 2
    plus = np.zeros(size, dtype=complex)
    minus = np.zeros(size, dtype=complex)
    plus[: field_plus.n_max + 1] = atom.a_plus * field_plus.amplitudes
    minus[: field_minus.n_max + 1] = atom.a_minus * field_minus.amplitudes
    state = JointState(
        plus, minus, g=float(g), omega=float(omega), t=0.0,
        truncated=bool(
            (atom.a_plus != 0 and field_plus.truncated)
            or (atom.a_minus != 0 and field_minus.truncated)
        ),
    )
    if abs(state.norm2() - 1.0) > 1e-8:
        raise NormalizationError(f"initial state norm^2 = {state.norm2()!r}")
    return state


def _doublets(state: JointState):
    x = state.rot_plus
    y = np.append(state.rot_minus[1:], 0.0)
    return x, y, complex(state.rot_minus[0])


def _check_leak(state: JointState):
    # Doublet populations are constants of motion, so the top-doublet weight
    # does not depend on t; it only signals a too-short truncation.
    if state.truncated:
        top = state.rot_plus.size - 2
        leak = abs(state.rot_plus[top]) ** 2 + abs(state.rot_minus[top + 1]) ** 2
        if leak > LEAK_TOL:
            raise TruncationLeak(f"top doublet n={top} holds probability {leak:.3e}")


def evolve(state: JointState, t: float) -> JointState:
    """Exact evolution by ``t`` (doublet rotation by ``g t sqrt(n+1)``)."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    _check_leak(state)
    x, y, singlet = _doublets(state)
    theta = state.g * t * np.sqrt(np.arange(1, x.size + 1, dtype=float))
    cos, sin = np.cos(theta), np.sin(theta)
    plus = cos * x - 1j * sin * y
    partner = cos * y - 1j * sin * x
    minus = np.empty_like(plus)
    minus[0] = singlet
    minus[1:] = partner[:-1]
    return replace(state, rot_plus=plus, rot_minus=minus, t=state.t + t)


# --------------------------------------------------------------------------
# reduced states
# --------------------------------------------------------------------------

def atom_density(state: JointState) -> AtomDensity:
    """Partial trace over the field. ``coherence = <+|rho_A|->``."""
    p_plus = float(np.sum(np.abs(state.rot_plus) ** 2))
    p_minus = float(np.sum(np.abs(state.rot_minus) ** 2))
    wt = math.fmod(state.omega * state.t, 2.0 * math.pi)
    coherence = complex(np.vdot(state.rot_minus, state.rot_plus)) * complex(math.cos(wt), -math.sin(wt))
    return AtomDensity(p_plus, p_minus, coherence)


def atom_density_curve(state0: JointState, times):
    """Vectorised ``atom_density(evolve(state0, t))`` over an array of times.

    Returns ``(p_plus, p_minus, coherence)`` arrays.
    """
    _check_leak(state0)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    x, y, singlet = _doublets(state0)
    gts = state0.g * times
    p_plus, coh = kernels.rotate_observables(
        np.ascontiguousarray(x), np.ascontiguousarray(y), singlet, np.ascontiguousarray(gts)
    )
    total = state0.norm2()
    wt = np.fmod(state0.omega * (state0.t + times), 2.0 * math.pi)
    coh = coh * np.exp(-1j * wt)
    return p_plus, total - p_plus, coh


def purity(rho: AtomDensity) -> float:
    """``Tr rho_A^2 = p_+^2 + p_-^2 + 2|c|^2``."""
    return rho.p_plus ** 2 + rho.p_minus ** 2 + 2.0 * abs(rho.coherence) ** 2


def entropy(rho: AtomDensity) -> float:
    """von Neumann entropy (natural log) of the 2x2 reduced state."""
    radius = math.sqrt((rho.p_plus - 0.5) ** 2 + abs(rho.coherence) ** 2)
    total = 0.0
    for lam in (0.5 + radius, 0.5 - radius):
        if lam > 0.0:
            total -= lam * math.log(lam)
    return total


def mixed_phase_purity(p_plus):
    """Atom purity after averaging over uniformly random field phases: ``1 + 2 p (p - 1)``."""
    return 1.0 + 2.0 * p_plus * (p_plus - 1.0)


def field_density(state: JointState) -> FieldDensity:
    """``rho_gamma(m, n) = c+_m conj(c+_n) + c-_m conj(c-_n)`` (Schrodinger picture)."""
    plus, minus = state.amp_plus, state.amp_minus
    return FieldDensity(np.outer(plus, plus.conj()) + np.outer(minus, minus.conj()))


def field_purity(rho: FieldDensity) -> float:
    return float(np.sum(np.abs(rho.matrix) ** 2))


def phase_averaged_density(field: FieldState, t: float, n_draws: int = 2000,
                           seed: int | None = 0, atom: AtomAmplitudes = EXCITED,
                           g: float = 1.0, omega: float | None = None) -> AtomDensity:
    """Atomic density matrix averaged over ``n_draws`` uniformly random phase profiles.

    Each draw replaces the field phases by independent uniform angles on
    [0, 2 pi) and evolves exactly; the returned matrix is the ensemble mean.
    """
    rng = np.random.default_rng(seed)
    base = initial_joint(atom, field, g=g, omega=omega)
    size = base.rot_plus.size
    angles = rng.uniform(0.0, 2.0 * np.pi, size=(n_draws, field.n_max + 1))
    rot = np.ones((n_draws, size), dtype=complex)
    rot[:, : field.n_max + 1] = np.exp(1j * (angles - field.phases))
    theta = base.g * t * np.sqrt(np.arange(1, size + 1, dtype=float))
    cos, sin = np.cos(theta), np.sin(theta)
    x = base.rot_plus * rot
    y = np.append(base.rot_minus[1:], 0.0) * np.roll(rot, -1, axis=1)
    y[:, -1] = 0.0
    plus = cos * x - 1j * sin * y
    partner = cos * y - 1j * sin * x
    singlet = base.rot_minus[0] * rot[:, 0]
    p_plus = np.mean(np.sum(np.abs(plus) ** 2, axis=1))
    coh = np.mean(plus[:, 0] * np.conj(singlet) + np.sum(plus[:, 1:] * np.conj(partner[:, :-1]), axis=1))
    wt = math.fmod(base.omega * t, 2.0 * math.pi)
    return AtomDensity(float(p_plus), float(1.0 - p_plus), complex(coh * np.exp(-1j * wt)))


# --------------------------------------------------------------------------
# revivals and mid-collapse disentanglement
# --------------------------------------------------------------------------

def revival_time(n_mean: float, g: float = 1.0, nu: int = 1, shifted: bool = True) -> float:
    """``2 pi nu sqrt(n_mean + 1) / g``; ``shifted=False`` gives ``2 pi nu sqrt(n_mean) / g``."""
    if n_mean < 0 or g <= 0:
        raise ValueError("need n_mean >= 0 and g > 0")
    root = math.sqrt(n_mean + 1.0) if shifted else math.sqrt(n_mean)
    return 2.0 * math.pi * nu * root / g


def half_revival_time(n_mean: float, g: float = 1.0) -> float:
    return 0.5 * revival_time(n_mean, g, 1)


def _component_field(amps):
    weight = float(np.sum(np.abs(amps) ** 2))
    if weight < 1e-14:
        return None
    return custom_state(np.abs(amps) ** 2 / weight, np.angle(amps))


def predicted_disentangled(state0: JointState, t: float):
    """Product-state prediction near the half revival.

    Returns ``(atom, field)``: ``atom`` is ``(|+> + i e^{i w t} e^{-i da}|->)/sqrt 2``
    with ``da`` the phase step of the initial field at its mean photon number,
    and ``field`` the normalised Fock vector (length ``n_max + 2``)

        gamma_n = -e^{-i w (n+1/2) t} (c+_n sin(g t sqrt n) + i c-_{n+1} cos(g t sqrt n))

    with ``c+_n = a sqrt(p+_n) e^{i alpha+_n}`` and ``c-_n = b sqrt(p-_n) e^{i alpha-_n}``
    taken from ``state0``.
    """
    if state0.t != 0.0:
        raise ValueError("predicted_disentangled expects the initial (t = 0) state")
    comps = [f for f in (_component_field(state0.rot_plus), _component_field(state0.rot_minus)) if f]
    moments = [stats(f) for f in comps]
    if len(moments) == 2:
        spread = max(moments[0].std, moments[1].std)
        if abs(moments[0].peak_index - moments[1].peak_index) > spread:
            raise PeakMismatch(
                f"field peaks at n={moments[0].peak_index} and n={moments[1].peak_index} "
                f"differ by more than sigma_n={spread:.3g}"
            )
    n_mean = moments[0].mean
    t0 = half_revival_time(n_mean, state0.g)
    half_width = 0.5 * math.sqrt(n_mean + 1.0) / state0.g
    if abs(t - t0) > half_width:
        raise WindowViolation(f"|t - t0| = {abs(t - t0):.3g} exceeds {half_width:.3g} (t0 = {t0:.6g})")

    ref = comps[0]
    k = min(max(int(round(n_mean)), 1), ref.n_max)
    delta_alpha = float(ref.phases[k] - ref.phases[k - 1])
    wt = math.fmod(state0.omega * t, 2.0 * math.pi)
    atom = AtomAmplitudes(1.0 / math.sqrt(2.0), 1j * np.exp(1j * (wt - delta_alpha)) / math.sqrt(2.0))

    gt = state0.g * t
    root = np.sqrt(np.arange(state0.rot_plus.size, dtype=float))
    partner = np.append(state0.rot_minus[1:], 0.0)
    field = -(state0.rot_plus * np.sin(gt * root) + 1j * partner * np.cos(gt * root))
    field = field * replace(state0, t=t)._free_phase(0.5)
    field /= np.linalg.norm(field)
    return atom, field


def product_fidelity(atom: AtomAmplitudes, field: np.ndarray, state: JointState) -> float:
    """``|<atom (x) field | state>|^2`` for normalised inputs."""
    predicted = np.outer(field, atom.vector())
    return float(abs(np.vdot(predicted, state.vector())) ** 2)
