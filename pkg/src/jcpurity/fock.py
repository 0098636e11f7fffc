"""Photon-number representations of pure single-mode field states.

A field state ``|gamma> = sum_n sqrt(p_n) exp(i alpha_n) |n>`` is stored as the
truncated arrays ``p_n`` and ``alpha_n``. Every constructor evaluates its
distribution as log-probabilities and exponentiates only at the end, so
Poisson weights at large mean and Hermite products of high order never
overflow.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, xlogy
from scipy.stats import norm

from . import kernels
from .errors import DegenerateState, InvalidDistribution, NumericalInstability

__all__ = [
    "DEFAULT_EPS_TRUNC",
    "GUARD_BAND",
    "FieldState",
    "FieldStats",
    "coherent_state",
    "cat_state",
    "squeezed_coherent_state",
    "gaussian_state",
    "fock_state",
    "custom_state",
    "stats",
    "write_state_table",
    "read_state_table",
]

DEFAULT_EPS_TRUNC = 1e-12
GUARD_BAND = 10


@dataclass(frozen=True, eq=False)
class FieldState:
    """Truncated photon-number distribution ``probs`` with phases ``phases``.

    ``tail_mass`` is the probability discarded above ``n_max`` before the
    retained weights were renormalised.
    """

    probs: np.ndarray
    phases: np.ndarray
    tail_mass: float = 0.0
    label: str = field(default="custom", compare=False)

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        phases = np.array(self.phases, dtype=float)
        if probs.ndim != 1 or probs.shape != phases.shape:
            raise InvalidDistribution("probs and phases must be 1-d arrays of equal length")
        probs.setflags(write=False)
        phases.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "phases", phases)

    @property
    def n_max(self) -> int:
        return self.probs.size - 1

    @property
    def amplitudes(self) -> np.ndarray:
        """Fock amplitudes ``sqrt(p_n) exp(i alpha_n)``."""
        return np.sqrt(self.probs) * np.exp(1j * self.phases)

    @property
    def truncated(self) -> bool:
        return self.tail_mass > 0.0


@dataclass(frozen=True)
class FieldStats:
    mean: float
    variance: float
    peak_index: int

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


def stats(state: FieldState) -> FieldStats:
    n = np.arange(state.probs.size, dtype=float)
    mean = float(n @ state.probs)
    variance = float(((n - mean) ** 2) @ state.probs)
    return FieldStats(mean, max(variance, 0.0), int(np.argmax(state.probs)))


# --------------------------------------------------------------------------
# truncation
# --------------------------------------------------------------------------

def _grow_and_truncate(logp_fn, guess, eps_trunc):
    """Evaluate ``logp_fn`` on 0..M for growing M and cut the tail below ``eps_trunc``.

    M is doubled until the distribution at the top of the grid is negligible,
    so the mass beyond the grid cannot affect the cut. The cut index is the
    smallest N with sum_{n>N} p_n < eps_trunc, extended by ``GUARD_BAND``
    indices; trailing exact zeros are then dropped.

    Returns (probs, tail_mass) with probs already renormalised.
    """
    if not 0.0 < eps_trunc < 1.0:
        raise ValueError(f"eps_trunc must lie in (0, 1), got {eps_trunc}")
    m = max(int(math.ceil(guess)), 32)
    while True:
        logp = np.asarray(logp_fn(m), dtype=float)
        if np.any(np.isnan(logp)):
            raise NumericalInstability("log-probability evaluated to NaN")
        p = np.exp(logp)
        top = p[-GUARD_BAND:].max()
        peak = int(np.argmax(p))
        if m - peak > 2 * GUARD_BAND and top < 1e-6 * eps_trunc:
            break
        if m > 10_000_000:
            raise DegenerateState("distribution does not decay within 10^7 photons")
        m *= 2
    # tail[k] = sum_{n > k} p_n, accumulated from the top to avoid cancellation
    tail = np.concatenate([np.cumsum(p[::-1])[::-1][1:], [0.0]])
    cut = int(np.argmax(tail < eps_trunc)) + GUARD_BAND
    cut = min(cut, m)
    nonzero = np.flatnonzero(p[: cut + 1] > 0.0)
    if nonzero.size == 0:
        raise DegenerateState("distribution has no mass")
    cut = int(nonzero[-1])
    kept = p[: cut + 1]
    tail_mass = float(tail[cut])
    return kept / kept.sum(), tail_mass


# --------------------------------------------------------------------------
# constructors
# --------------------------------------------------------------------------

def coherent_state(mean_photons: float, phase_alpha: float = 0.0,
                   eps_trunc: float = DEFAULT_EPS_TRUNC) -> FieldState:
    """Coherent state with Poisson weights of mean ``mean_photons`` and phases ``n * phase_alpha``."""
    if not mean_photons >= 0.0:
        raise ValueError(f"mean_photons must be >= 0, got {mean_photons}")
    m = float(mean_photons)

    def logp(top):
        n = np.arange(top + 1, dtype=float)
        return -m + xlogy(n, m) - gammaln(n + 1.0)

    probs, tail = _grow_and_truncate(logp, m + 12.0 * math.sqrt(m) + 40.0, eps_trunc)
    phases = phase_alpha * np.arange(probs.size, dtype=float)
    return FieldState(probs, phases, tail, label="coherent")


def cat_state(mean_photons: float, phi: float = 0.0,
              eps_trunc: float = DEFAULT_EPS_TRUNC) -> FieldState:
    """Cat state ``N(|a> + e^{i phi}|-a>)`` with real ``a``, ``|a|^2 = mean_photons``.

    p_n = |a|^{2n} [1 + (-1)^n cos phi] / [n! (e^{|a|^2} + e^{-|a|^2} cos phi)]
    """
    if not mean_photons >= 0.0:
        raise ValueError(f"mean_photons must be >= 0, got {mean_photons}")
    m = float(mean_photons)
    cos_phi = math.cos(phi)
    norm_arg = math.exp(-2.0 * m) * cos_phi
    if norm_arg <= -1.0:
        raise DegenerateState(f"cat state with |alpha|^2={m}, phi={phi} has zero norm")
    log_norm = m + math.log1p(norm_arg)
    if not math.isfinite(log_norm):
        raise DegenerateState("cat-state normalisation underflowed")

    def logp(top):
        n = np.arange(top + 1, dtype=float)
        parity = np.where(np.arange(top + 1) % 2 == 0, 1.0, -1.0)
        with np.errstate(divide="ignore"):
            interference = np.log1p(parity * cos_phi)
        return xlogy(n, m) - gammaln(n + 1.0) + interference - log_norm

    probs, tail = _grow_and_truncate(logp, m + 12.0 * math.sqrt(m) + 40.0, eps_trunc)
    return FieldState(probs, np.zeros(probs.size), tail, label="cat")


def squeezed_coherent_state(r: float, alpha: float,
                            eps_trunc: float = DEFAULT_EPS_TRUNC) -> FieldState:
    """Squeezed coherent state ``S(r)|alpha>``, ``S(r) = exp(r (a^2 - a^dag^2) / 2)``, real alpha.

    p_n = tanh(r)^n / (n! 2^n cosh r) exp(-alpha^2 (1 - tanh r)) H_n(alpha / sqrt(sinh 2r))^2

    ``r = 0`` is the coherent state itself (the Hermite form is singular there).
    """
    if not r >= 0.0:
        raise ValueError(f"squeezing parameter must be >= 0, got {r}")
    alpha = float(alpha)
    if r == 0.0:
        state = coherent_state(alpha * alpha, 0.0, eps_trunc)
        return FieldState(state.probs, state.phases, state.tail_mass, label="squeezed")
    tanh = math.tanh(r)
    x = alpha / math.sqrt(math.sinh(2.0 * r))
    offset = -math.log(math.cosh(r)) - alpha * alpha * (1.0 - tanh)

    def logp(top):
        log_h, _, fail = kernels.log_hermite(top, x)
        if fail >= 0:
            raise NumericalInstability(f"Hermite recurrence diverged at n={fail}", index=fail)
        n = np.arange(top + 1, dtype=float)
        return n * math.log(tanh) - gammaln(n + 1.0) - n * math.log(2.0) + offset + 2.0 * log_h

    mean_guess = alpha * alpha * math.exp(-2.0 * r) + math.sinh(r) ** 2
    spread = abs(alpha) * math.exp(r) + math.sinh(2.0 * r) + 1.0
    probs, tail = _grow_and_truncate(logp, mean_guess + 15.0 * spread + 40.0, eps_trunc)
    return FieldState(probs, np.zeros(probs.size), tail, label="squeezed")


def gaussian_state(mean: float, sigma2: float, phase_slope: float = 0.0,
                   eps_trunc: float = DEFAULT_EPS_TRUNC) -> FieldState:
    """Discretised Gaussian weights ``exp(-(n - mean)^2 / 2 sigma2)`` on n >= 0, renormalised."""
    if not (mean > 0.0 and sigma2 > 0.0):
        raise ValueError(f"need mean > 0 and sigma2 > 0, got {mean}, {sigma2}")
    sigma = math.sqrt(sigma2)
    below = norm.cdf((-0.5 - mean) / sigma)
    if below > 0.1:
        raise DegenerateState(
            f"{below:.1%} of the Gaussian mass lies at n < 0 (mean={mean}, sigma2={sigma2})"
        )

    def logp(top):
        n = np.arange(top + 1, dtype=float)
        raw = -((n - mean) ** 2) / (2.0 * sigma2)
        # the continuous normaliser is only a first guess; _grow_and_truncate renormalises
        return raw - math.log(math.sqrt(2.0 * math.pi * sigma2) * (1.0 - below))

    probs, tail = _grow_and_truncate(logp, mean + 12.0 * sigma + 40.0, eps_trunc)
    phases = phase_slope * np.arange(probs.size, dtype=float)
    return FieldState(probs, phases, tail, label="gaussian")


def fock_state(n: int) -> FieldState:
    n = int(n)
    if n < 0:
        raise InvalidDistribution(f"Fock index must be >= 0, got {n}")
    probs = np.zeros(n + 1)
    probs[n] = 1.0
    return FieldState(probs, np.zeros(n + 1), 0.0, label="fock")


def custom_state(probs, phases=None) -> FieldState:
    """Normalise user-supplied weights. ``phases`` default to zero."""
    probs = np.asarray(probs, dtype=float)
    if probs.ndim != 1 or probs.size == 0:
        raise InvalidDistribution("probs must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(probs)) or np.any(probs < 0.0):
        raise InvalidDistribution("probs must be finite and non-negative")
    total = probs.sum()
    if total <= 0.0:
        raise InvalidDistribution("probs have zero total mass")
    if phases is None:
        phases = np.zeros(probs.size)
    phases = np.asarray(phases, dtype=float)
    if phases.shape != probs.shape:
        raise InvalidDistribution("phases must have the same length as probs")
    if not np.all(np.isfinite(phases)):
        raise InvalidDistribution("phases must be finite")
    return FieldState(probs / total, phases, 0.0, label="custom")


# --------------------------------------------------------------------------
# text table  n,p_n,alpha_n
# --------------------------------------------------------------------------

def write_state_table(state: FieldState, stream=None) -> str:
    """Write ``n,p_n,alpha_n`` rows (17 significant digits). Returns the text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "p_n", "alpha_n"])
    for n, (p, a) in enumerate(zip(state.probs, state.phases)):
        writer.writerow([n, f"{p:.17g}", f"{a:.17g}"])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def read_state_table(source) -> FieldState:
    """Read a table written by :func:`write_state_table` (path or text stream).

    Missing indices are filled with zero weight; the result is renormalised.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, newline="") as fh:
            text = fh.read()
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    if rows and not rows[0][0].strip().lstrip("-").isdigit():
        rows = rows[1:]
    if not rows:
        raise InvalidDistribution("state table is empty")
    try:
        index = [int(r[0]) for r in rows]
        p = [float(r[1]) for r in rows]
        a = [float(r[2]) if len(r) > 2 else 0.0 for r in rows]
    except (ValueError, IndexError) as exc:
        raise InvalidDistribution(f"malformed state table: {exc}") from None
    if min(index) < 0:
        raise InvalidDistribution("negative Fock index in state table")
    probs = np.zeros(max(index) + 1)
    phases = np.zeros(max(index) + 1)
    probs[index] = p
    phases[index] = a
    return custom_state(probs, phases)
