"""Hot numeric kernels with a numba path and a pure-numpy path.

Every kernel exists in two flavours with identical signatures:

* ``*_numpy``: vectorised numpy (or plain Python for inherently sequential
  recurrences). Always available.
* ``*_numba``: explicit loops compiled with ``numba.njit``. ``None`` when numba
  is not installed.

The public names (``log_hermite``, ``rotate_observables``, ...) are bound to
one of the two at import time, see :mod:`jcpurity._accel`. ``BACKENDS`` maps
``"numpy"``/``"numba"`` to the full set so tests and benchmarks can pin one.
"""
import math

import numpy as np

from ._accel import USE_NUMBA, njit

__all__ = [
    "BACKENDS",
    "ACTIVE_BACKEND",
    "log_hermite",
    "rotate_observables",
    "series_sums",
    "design_log_weights",
]

# Rows of the time grid processed per block by the numpy kernels; bounds the
# size of the (times x Fock) temporaries.
_BLOCK = 2048
_RESCALE_HI = 1e150
_RESCALE_LO = 1e-150


# --------------------------------------------------------------------------
# Hermite polynomials H_n(x), n = 0..n_max, as (log|H_n|, sign H_n)
# --------------------------------------------------------------------------

def _log_hermite_loops(n_max, x):
    logabs = np.empty(n_max + 1)
    sign = np.empty(n_max + 1)
    logabs[0] = 0.0
    sign[0] = 1.0
    if n_max == 0:
        return logabs, sign, -1
    # Scaled pair (h_prev, h_cur) = (H_{k-1}, H_k) * exp(-scale).
    h_prev = 1.0
    h_cur = 2.0 * x
    scale = 0.0
    for k in range(1, n_max + 1):
        if k > 1:
            h_next = 2.0 * x * h_cur - 2.0 * (k - 1) * h_prev
            h_prev = h_cur
            h_cur = h_next
            big = max(abs(h_prev), abs(h_cur))
            if big > _RESCALE_HI or (0.0 < big < _RESCALE_LO):
                h_prev /= big
                h_cur /= big
                scale += np.log(big)
        if not np.isfinite(h_cur):
            return logabs, sign, k
        if h_cur == 0.0:
            logabs[k] = -np.inf
            sign[k] = 0.0
        else:
            logabs[k] = np.log(abs(h_cur)) + scale
            sign[k] = 1.0 if h_cur > 0.0 else -1.0
    return logabs, sign, -1


def log_hermite_numpy(n_max, x):
    """Physicists' Hermite polynomials via the scaled three-term recurrence.

    Returns ``(logabs, sign, fail_index)``; ``fail_index`` is -1 on success and
    otherwise the first order at which the recurrence produced a non-finite
    value.
    """
    n_max = int(n_max)
    x = float(x)
    logabs = [0.0] * (n_max + 1)
    sign = [1.0] * (n_max + 1)
    fail = -1
    if n_max > 0:
        h_prev, h_cur, scale = 1.0, 2.0 * x, 0.0
        for k in range(1, n_max + 1):
            if k > 1:
                h_prev, h_cur = h_cur, 2.0 * x * h_cur - 2.0 * (k - 1) * h_prev
                big = max(abs(h_prev), abs(h_cur))
                if big > _RESCALE_HI or 0.0 < big < _RESCALE_LO:
                    h_prev /= big
                    h_cur /= big
                    scale += math.log(big)
            if not math.isfinite(h_cur):
                fail = k
                break
            if h_cur == 0.0:
                logabs[k], sign[k] = -math.inf, 0.0
            else:
                logabs[k] = math.log(abs(h_cur)) + scale
                sign[k] = math.copysign(1.0, h_cur)
    return np.array(logabs), np.array(sign), fail


log_hermite_numba = njit(_log_hermite_loops)


# --------------------------------------------------------------------------
# Resonant doublet rotation evaluated on a time grid
# --------------------------------------------------------------------------
#
# Rotating-frame amplitudes: x[n] = <n,+|psi>, y[n] = <n+1,-|psi> (the doublet
# partner), singlet = <0,-|psi>. For each gt the doublet n is rotated by
# theta = gt*sqrt(n+1). Returned: p_plus(gt) and the rotating-frame coherence
# sum_n <n,+|psi><psi|n,-> (the free phase exp(-i w t) is applied by callers).

def rotate_observables_numpy(x, y, singlet, gts):
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    gts = np.asarray(gts, dtype=float)
    root = np.sqrt(np.arange(1, x.size + 1, dtype=float))
    p_plus = np.empty(gts.size)
    coh = np.empty(gts.size, dtype=complex)
    for start in range(0, gts.size, _BLOCK):
        theta = np.outer(gts[start:start + _BLOCK], root)
        cos, sin = np.cos(theta), np.sin(theta)
        xt = cos * x - 1j * sin * y
        yt = cos * y - 1j * sin * x
        p_plus[start:start + _BLOCK] = np.sum(xt.real ** 2 + xt.imag ** 2, axis=1)
        coh[start:start + _BLOCK] = (
            xt[:, 0] * np.conj(singlet)
            + np.sum(xt[:, 1:] * np.conj(yt[:, :-1]), axis=1)
        )
    return p_plus, coh


def _rotate_observables_loops(x, y, singlet, gts):
    n_t = gts.size
    n_f = x.size
    p_plus = np.empty(n_t)
    coh = np.empty(n_t, dtype=np.complex128)
    for i in range(n_t):
        gt = gts[i]
        acc_p = 0.0
        acc_c = 0.0 + 0.0j
        y_prev = singlet
        for n in range(n_f):
            theta = gt * np.sqrt(n + 1.0)
            c = np.cos(theta)
            s = np.sin(theta)
            xt = c * x[n] - 1j * s * y[n]
            yt = c * y[n] - 1j * s * x[n]
            acc_p += xt.real * xt.real + xt.imag * xt.imag
            acc_c += xt * np.conj(y_prev)
            y_prev = yt
        p_plus[i] = acc_p
        coh[i] = acc_c
    return p_plus, coh


rotate_observables_numba = njit(_rotate_observables_loops)


# --------------------------------------------------------------------------
# Oscillatory photon-number series on a time grid
# --------------------------------------------------------------------------
#
#   Sc = sum p_n cos(2 gt sqrt(n+1)),  Ss = sum p_n sin(2 gt sqrt(n+1)),
#   S  = sum p_n sin(gt / (2 sqrt(n+1)))

def series_sums_numpy(p, gts):
    p = np.asarray(p, dtype=float)
    gts = np.asarray(gts, dtype=float)
    root = np.sqrt(np.arange(1, p.size + 1, dtype=float))
    out = np.empty((3, gts.size))
    for start in range(0, gts.size, _BLOCK):
        block = gts[start:start + _BLOCK]
        fast = 2.0 * np.outer(block, root)
        slow = np.outer(block, 0.5 / root)
        out[0, start:start + _BLOCK] = np.cos(fast) @ p
        out[1, start:start + _BLOCK] = np.sin(fast) @ p
        out[2, start:start + _BLOCK] = np.sin(slow) @ p
    return out[0], out[1], out[2]


def _series_sums_loops(p, gts):
    n_t = gts.size
    sc = np.empty(n_t)
    ss = np.empty(n_t)
    s = np.empty(n_t)
    for i in range(n_t):
        gt = gts[i]
        a = 0.0
        b = 0.0
        c = 0.0
        for n in range(p.size):
            root = np.sqrt(n + 1.0)
            a += p[n] * np.cos(2.0 * gt * root)
            b += p[n] * np.sin(2.0 * gt * root)
            c += p[n] * np.sin(0.5 * gt / root)
        sc[i] = a
        ss[i] = b
        s[i] = c
    return sc, ss, s


series_sums_numba = njit(_series_sums_loops)


# --------------------------------------------------------------------------
# Purifying-distribution recursion in log space
# --------------------------------------------------------------------------
#
#   log q_0 = 0
#   log q_n = log q_{n-1} + log beta2 + 2 log|sin(g_tf sqrt n)| - 2 log|cos(g_tf sqrt(n+1))|
#
# stops at the first n whose |cos(g_tf sqrt(n+1))| < cos_floor. Returns the
# weights for 0..stop-1 (padded with -inf) and stop (n_max + 1 if no pole).

def design_log_weights_numpy(g_tf, log_beta2, n_max, cos_floor):
    n = np.arange(1, n_max + 1, dtype=float)
    cos = np.cos(g_tf * np.sqrt(n + 1.0))
    poles = np.flatnonzero(np.abs(cos) < cos_floor)
    stop = int(poles[0]) + 1 if poles.size else n_max + 1
    logq = np.full(n_max + 1, -np.inf)
    logq[0] = 0.0
    if stop > 1:
        k = n[: stop - 1]
        with np.errstate(divide="ignore"):
            step = (
                log_beta2
                + 2.0 * np.log(np.abs(np.sin(g_tf * np.sqrt(k))))
                - 2.0 * np.log(np.abs(cos[: stop - 1]))
            )
        logq[1:stop] = np.cumsum(step)
    return logq, stop


def _design_log_weights_loops(g_tf, log_beta2, n_max, cos_floor):
    logq = np.full(n_max + 1, -np.inf)
    logq[0] = 0.0
    stop = n_max + 1
    for n in range(1, n_max + 1):
        cos = np.cos(g_tf * np.sqrt(n + 1.0))
        if abs(cos) < cos_floor:
            stop = n
            break
        sin = abs(np.sin(g_tf * np.sqrt(float(n))))
        if sin == 0.0 or logq[n - 1] == -np.inf:
            logq[n] = -np.inf
        else:
            logq[n] = logq[n - 1] + log_beta2 + 2.0 * np.log(sin) - 2.0 * np.log(abs(cos))
    return logq, stop


design_log_weights_numba = njit(_design_log_weights_loops)


BACKENDS = {
    "numpy": {
        "log_hermite": log_hermite_numpy,
        "rotate_observables": rotate_observables_numpy,
        "series_sums": series_sums_numpy,
        "design_log_weights": design_log_weights_numpy,
    }
}
if log_hermite_numba is not None:
    BACKENDS["numba"] = {
        "log_hermite": log_hermite_numba,
        "rotate_observables": rotate_observables_numba,
        "series_sums": series_sums_numba,
        "design_log_weights": design_log_weights_numba,
    }

ACTIVE_BACKEND = "numba" if USE_NUMBA else "numpy"

log_hermite = BACKENDS[ACTIVE_BACKEND]["log_hermite"]
rotate_observables = BACKENDS[ACTIVE_BACKEND]["rotate_observables"]
series_sums = BACKENDS[ACTIVE_BACKEND]["series_sums"]
design_log_weights = BACKENDS[ACTIVE_BACKEND]["design_log_weights"]
