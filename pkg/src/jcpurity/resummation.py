"""Poisson-resummed, stationary-phase approximation to the atomic purity.

The exact purity is a functional of three oscillatory photon-number series,

    Sc + i Ss = sum_n p_n exp(2i gt sqrt(n+1)),   S = sum_n p_n sin(gt / (2 sqrt(n+1))),

with ``Tr rho_A^2 ~ (1 + Sc^2 + Ss^2 + S^2 - 2 S Ss) / 2`` when the phase steps of
the field are constant. Poisson summation turns ``Sc + i Ss`` into a sum over
revival orders nu of integrals

    f_nu(t) = int_0^inf dn p(n) exp(2i gt sqrt(n+1) - 2 pi i nu n),

where ``p(n)`` continues ``p_n`` to real n. nu = 0 is the collapse envelope,
nu >= 1 are the revivals centred at ``gt = 2 pi nu sqrt(n)``. Each order adds
``w_nu = |f_nu|^2 / 2 - S_env Im f_nu`` to the purity.

Two continuations are supported: a Gaussian of matching mean and variance, and
(for coherent fields) the Poisson closed form where nu >= 1 reduces to an
explicit Gaussian-in-time revival term. ``f_nu`` can also be integrated
numerically, which replaces the stationary-phase estimate when the validity
window ``(n+1)/(nu pi) << sigma^2 << n^2`` fails.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln

from . import kernels
from .errors import InvalidModel, QuadratureNoConvergence
from .fock import FieldState, stats

__all__ = [
    "R_MIN",
    "Family",
    "ResumModel",
    "ValidityReport",
    "ValidityWarning",
    "validity",
    "series_Sc_Ss",
    "series_S",
    "coherence_approx",
    "purity_series",
    "envelope_f0",
    "envelope_S",
    "w0",
    "w_nu",
    "w_nu_quadrature",
    "purity_resummed",
    "half_revival_purity",
    "f_nu_quadrature",
    "resummed_Sc_Ss",
    "default_nu_max",
    "is_peaked",
]

R_MIN = 10.0
QUAD_TOL = 1e-6
_GL10 = leggauss(10)
_GL20 = leggauss(20)


class ValidityWarning(UserWarning):
    """The stationary-phase validity window is not satisfied."""


class Family(enum.Enum):
    GAUSSIAN = "gaussian"
    POISSON = "poisson"


def default_nu_max(gt_max: float, n_mean: float) -> int:
    return int(math.ceil(gt_max / (2.0 * math.pi * math.sqrt(n_mean)))) + 2


def is_peaked(state: FieldState, core: float = 1e-2) -> bool:
    """Single-humped distribution: unimodal wherever ``p_n > core * max p``.

    The far tails of squeezed states oscillate harmlessly and are ignored; a
    cat state's alternating zeros fall inside the core and fail.
    """
    p = state.probs
    idx = np.flatnonzero(p > core * p.max())
    if idx.size < 3:
        return False
    d = np.sign(np.diff(p[idx[0]: idx[-1] + 1]))
    d = d[d != 0]
    return bool(np.count_nonzero(d[1:] != d[:-1]) <= 1)


@dataclass(frozen=True)
class ResumModel:
    n_mean: float
    sigma2: float
    family: Family = Family.GAUSSIAN
    nu_max: int = 3
    g: float = 1.0

    def __post_init__(self):
        if not (self.n_mean > 0 and self.sigma2 > 0):
            raise InvalidModel(f"need n_mean > 0 and sigma2 > 0, got {self.n_mean}, {self.sigma2}")
        if int(self.nu_max) < 1:
            raise InvalidModel(f"nu_max must be >= 1, got {self.nu_max}")
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "nu_max", int(self.nu_max))

    @classmethod
    def from_state(cls, state: FieldState, family=Family.GAUSSIAN, nu_max: int = 3,
                   g: float = 1.0) -> "ResumModel":
        """Continuation parameters from the moments of the actual distribution."""
        st = stats(state)
        return cls(st.mean, st.variance, family, nu_max, g)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    def density(self, n):
        """Continuation ``p(n)`` of the photon-number distribution to real n >= 0."""
        n = np.asarray(n, dtype=float)
        if self.family is Family.POISSON:
            m = self.n_mean
            with np.errstate(invalid="ignore"):
                out = np.exp(-m + n * math.log(m) - gammaln(n + 1.0))
            return np.where(n > -1.0, out, 0.0)
        return np.exp(-((n - self.n_mean) ** 2) / (2.0 * self.sigma2)) / math.sqrt(
            2.0 * math.pi * self.sigma2
        )


@dataclass(frozen=True)
class ValidityReport:
    nu: int
    lower_ratio: float
    upper_ratio: float
    ok: bool


def validity(model: ResumModel, nu: int) -> ValidityReport:
    """Ratios for ``(n+1)/(nu pi) << sigma^2 << n^2``; ``ok`` when both reach ``R_MIN``."""
    if nu < 1:
        raise ValueError(f"nu must be >= 1, got {nu}")
    lower = model.sigma2 / ((model.n_mean + 1.0) / (nu * math.pi))
    upper = model.n_mean ** 2 / model.sigma2
    return ValidityReport(nu, lower, upper, lower >= R_MIN and upper >= R_MIN)


# --------------------------------------------------------------------------
# exact series
# --------------------------------------------------------------------------

def _scalar_or_array(t, *arrays):
    if np.ndim(t) == 0:
        out = tuple(float(a[0]) for a in arrays)
    else:
        out = arrays
    return out if len(out) > 1 else out[0]


def _series(state: FieldState, t, g):
    gts = g * np.atleast_1d(np.asarray(t, dtype=float))
    return kernels.series_sums(np.ascontiguousarray(state.probs), np.ascontiguousarray(gts))


def series_Sc_Ss(state: FieldState, t, g: float = 1.0):
    """``(sum p_n cos 2gt sqrt(n+1), sum p_n sin 2gt sqrt(n+1))``."""
    sc, ss, _ = _series(state, t, g)
    return _scalar_or_array(t, sc, ss)


def series_S(state: FieldState, t, g: float = 1.0):
    """``sum p_n sin(gt / (2 sqrt(n+1)))``."""
    _, _, s = _series(state, t, g)
    return _scalar_or_array(t, s)


def coherence_approx(state: FieldState, t, g: float = 1.0):
    """``|c| ~ |Ss - S| / 2``; only meaningful for peaked, phase-regular fields.

    Fields with alternating support (cat states) have ``c = 0`` exactly while
    this estimate stays finite.
    """
    _, ss, s = _series(state, t, g)
    return _scalar_or_array(t, 0.5 * np.abs(ss - s))


def purity_series(state: FieldState, t, g: float = 1.0):
    """``(1 + Sc^2 + Ss^2 + S^2 - 2 S Ss) / 2`` from the exact series."""
    sc, ss, s = _series(state, t, g)
    return _scalar_or_array(t, 0.5 * (1.0 + sc ** 2 + ss ** 2 + s ** 2 - 2.0 * s * ss))


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------

def envelope_f0(model: ResumModel, t):
    """Collapse envelope ``exp(-(gt sigma)^2 / 2n) exp(2i gt sqrt(n+1))``."""
    gt = model.g * np.asarray(t, dtype=float)
    n = model.n_mean
    return np.exp(-(gt ** 2) * model.sigma2 / (2.0 * n)) * np.exp(2j * gt * math.sqrt(n + 1.0))


def envelope_S(model: ResumModel, t):
    """``exp(-(gt sigma)^2 / 32 n^3) sin(gt / (2 sqrt(n+1)))``."""
    gt = model.g * np.asarray(t, dtype=float)
    n = model.n_mean
    return np.exp(-(gt ** 2) * model.sigma2 / (32.0 * n ** 3)) * np.sin(gt / (2.0 * math.sqrt(n + 1.0)))


def _poisson_S(model, gt):
    # the coherent-field specialisation writes the slow factor with sqrt(n)
    n = model.n_mean
    return np.exp(-((gt / (2.0 * n)) ** 2) / 8.0) * np.sin(gt / (2.0 * math.sqrt(n)))


def w0(model: ResumModel, t):
    gt = model.g * np.asarray(t, dtype=float)
    n, s2 = model.n_mean, model.sigma2
    slow = np.sin(gt / (2.0 * math.sqrt(n + 1.0)))
    return 0.5 * (
        np.exp(-(gt ** 2) * s2 / n)
        - 2.0 * np.exp(-(gt ** 2) * s2 * (1.0 + 1.0 / (16.0 * n ** 2)) / (2.0 * n))
        * slow * np.sin(2.0 * gt * math.sqrt(n + 1.0))
    )


def w_nu(model: ResumModel, t, nu: int):
    """Stationary-phase revival term of order ``nu >= 1``."""
    if nu < 1:
        raise ValueError("w_nu needs nu >= 1; use w0 for nu = 0")
    gt = model.g * np.asarray(t, dtype=float)
    n = model.n_mean
    chirp = np.sin(gt ** 2 / (2.0 * math.pi * nu) - math.pi / 4.0)
    if model.family is Family.POISSON:
        centre = 2.0 * math.pi * nu * math.sqrt(n)
        shape = np.exp(-((gt - centre) ** 2) / (math.pi ** 2 * nu ** 2))
        return 0.5 * (
            gt ** 2 / (4.0 * math.pi ** 3 * nu ** 3 * n) * shape
            - gt / math.sqrt(math.pi ** 3 * nu ** 3 * n)
            * np.sqrt(shape) * _poisson_S(model, gt) * chirp
        )
    width = gt / (math.pi * math.sqrt(2.0 * nu ** 3))
    p_stat = model.density((gt / (2.0 * math.pi * nu)) ** 2)
    return 0.5 * (
        (width * p_stat) ** 2
        - 2.0 * width * p_stat * envelope_S(model, t) * chirp
    )


def half_revival_purity(model: ResumModel) -> float:
    """Leading purity at half the first revival, including its small-variance terms."""
    n, s2 = model.n_mean, model.sigma2
    if n < 10:
        warnings.warn(f"half-revival estimate assumes n >> 1, got n = {n}", ValidityWarning, stacklevel=2)
    pi2 = math.pi ** 2
    return 0.5 * (
        1.0
        + math.exp(-s2 * pi2 / (16.0 * n ** 2))
        + math.exp(-s2 * pi2)
        - 2.0 * math.exp(-s2 * pi2 / 2.0) * math.sin(2.0 * math.pi * n)
    )


# --------------------------------------------------------------------------
# numerical f_nu
# --------------------------------------------------------------------------

def _gl(nodes_weights, a, b, fn):
    x, w = nodes_weights
    half = 0.5 * (b - a)
    pts = 0.5 * (b + a)[:, None] + half[:, None] * x[None, :]
    return half * (fn(pts) @ w)


def f_nu_quadrature(model: ResumModel, state: FieldState | None, t: float, nu: int,
                    tol: float = QUAD_TOL, window=None, max_splits: int = 10_000) -> complex:
    """``int p(n) exp(2i gt sqrt(n+1) - 2 pi i nu n) dn`` by adaptive Gauss-Legendre panels.

    The integration range defaults to ``[max(0, n - 8 sigma), n + 8 sigma]``.
    Initial panels equidistribute the local phase rate
    ``|gt / sqrt(n+1) - 2 pi nu|`` (a quarter period per panel) together with
    the width of ``p``; panels whose 10- and 20-point rules disagree are bisected
    until the summed disagreement is below ``tol``.

    When ``state`` is given its mean and variance replace the model's.
    """
    if state is not None:
        st = stats(state)
        model = ResumModel(st.mean, st.variance, model.family, model.nu_max, model.g)
    gt = model.g * float(t)
    sigma = model.sigma
    if window is None:
        lo, hi = max(0.0, model.n_mean - 8.0 * sigma), model.n_mean + 8.0 * sigma
    else:
        lo, hi = map(float, window)

    def integrand(n):
        return model.density(n) * np.exp(1j * (2.0 * gt * np.sqrt(n + 1.0) - 2.0 * math.pi * nu * n))

    grid = np.linspace(lo, hi, 2049)
    rate = np.abs(gt / np.sqrt(grid + 1.0) - 2.0 * math.pi * nu) / (0.5 * math.pi) + 4.0 / sigma
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (rate[1:] + rate[:-1]) * np.diff(grid))])
    n_panels = max(4, int(math.ceil(cum[-1])))
    edges = np.interp(np.linspace(0.0, cum[-1], n_panels + 1), cum, grid)

    a, b = edges[:-1], edges[1:]
    total = 0.0 + 0.0j
    err_total = 0.0
    splits = 0
    span = hi - lo
    while a.size:
        coarse = _gl(_GL10, a, b, integrand)
        fine = _gl(_GL20, a, b, integrand)
        err = np.abs(fine - coarse)
        good = err <= tol * (b - a) / span
        total += fine[good].sum()
        err_total += err[good].sum()
        splits += int((~good).sum())
        if splits > max_splits:
            raise QuadratureNoConvergence(
                f"f_nu quadrature (nu={nu}, gt={gt:.6g}) exceeded {max_splits} panel splits",
                err_total + err[~good].sum(),
            )
        mid = 0.5 * (a[~good] + b[~good])
        a, b = np.concatenate([a[~good], mid]), np.concatenate([mid, b[~good]])
    if err_total > tol:
        raise QuadratureNoConvergence(f"f_nu quadrature (nu={nu}, gt={gt:.6g})", err_total)
    return complex(total)


def w_nu_quadrature(model: ResumModel, t, nu: int, state: FieldState | None = None):
    """Order-``nu`` purity term with ``f_nu`` integrated numerically."""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    f = np.array([f_nu_quadrature(model, state, ti, nu) for ti in ts])
    gt = model.g * ts
    slow = _poisson_S(model, gt) if model.family is Family.POISSON else envelope_S(model, ts)
    out = 0.5 * np.abs(f) ** 2 - slow * f.imag
    return float(out[0]) if np.ndim(t) == 0 else out


def resummed_Sc_Ss(model: ResumModel, t: float, nus, p0: float = 0.0) -> complex:
    """``sum_{nu in nus} f_nu(t) + p0 exp(2i gt) / 2`` with every f_nu integrated over [0, n + 8 sigma]."""
    gt = model.g * float(t)
    window = (0.0, model.n_mean + 8.0 * model.sigma)
    total = sum(f_nu_quadrature(model, None, t, nu, window=window) for nu in nus)
    return complex(total + 0.5 * p0 * np.exp(2j * gt))


# --------------------------------------------------------------------------
# the analytic purity
# --------------------------------------------------------------------------

def purity_resummed(model: ResumModel, t, quadrature_nu=(), state: FieldState | None = None,
                    warn: bool = True):
    """Analytic purity: collapse/slow term + w_0 + sum_{nu=1}^{nu_max} w_nu.

    Orders listed in ``quadrature_nu`` use :func:`w_nu_quadrature` instead of
    the stationary-phase closed form. A :class:`ValidityWarning` is issued when
    the nu = 1 validity window fails; the value is still returned.
    """
    if warn:
        report = validity(model, 1)
        if not report.ok:
            warnings.warn(
                f"validity window fails for nu=1 (lower ratio {report.lower_ratio:.3g}, "
                f"upper ratio {report.upper_ratio:.3g}, need >= {R_MIN:g})",
                ValidityWarning, stacklevel=2,
            )
    ts = np.asarray(t, dtype=float)
    gt = model.g * ts
    n = model.n_mean
    total = 0.5 + 0.5 * np.exp(-(gt ** 2) * model.sigma2 / (16.0 * n ** 3)) * np.sin(
        gt / (2.0 * math.sqrt(n + 1.0))
    ) ** 2
    total = total + w0(model, ts)
    quadrature_nu = set(int(q) for q in quadrature_nu)
    for nu in range(1, model.nu_max + 1):
        if nu in quadrature_nu:
            total = total + w_nu_quadrature(model, ts, nu, state)
        else:
            total = total + w_nu(model, ts, nu)
    return float(total) if np.ndim(t) == 0 else total
