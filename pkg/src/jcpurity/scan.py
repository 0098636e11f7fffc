"""Time-grid sweeps and their CSV / gnuplot representation."""
from __future__ import annotations

import io
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dynamics
from .dynamics import JointState
from .fock import FieldState
from .resummation import ResumModel, ValidityWarning, purity_resummed, validity

__all__ = [
    "COLUMNS",
    "ScanResult",
    "run_scan",
    "validity_flags",
    "write_csv",
    "read_csv",
    "format_csv",
    "gnuplot_script",
]

COLUMNS = ("gt", "purity_exact", "purity_resummed", "p_plus", "abs_c", "entropy", "cs_gap", "validity_flags")


@dataclass(eq=False)
class ScanResult:
    """Column arrays, one entry per grid point, plus ``#`` metadata lines."""

    gt: np.ndarray
    purity_exact: np.ndarray
    purity_resummed: np.ndarray
    p_plus: np.ndarray
    abs_c: np.ndarray
    entropy: np.ndarray
    cs_gap: np.ndarray
    validity_flags: np.ndarray
    metadata: list = field(default_factory=list)

    def __len__(self):
        return self.gt.size

    def columns(self):
        return [getattr(self, name) for name in COLUMNS]

    @property
    def has_resummed(self) -> bool:
        return bool(np.any(np.isfinite(self.purity_resummed)))


def _entropy(p_plus, abs_c):
    radius = np.sqrt((p_plus - 0.5) ** 2 + abs_c ** 2)
    out = np.zeros_like(p_plus)
    for lam in (0.5 + radius, 0.5 - radius):
        safe = np.where(lam > 0.0, lam, 1.0)
        out -= np.where(lam > 0.0, lam * np.log(safe), 0.0)
    return out


def validity_flags(model: ResumModel | None, gts) -> np.ndarray:
    """Bit ``nu-1`` is set where ``gt`` lies in revival ``nu``'s window and that order is invalid."""
    gts = np.asarray(gts, dtype=float)
    flags = np.zeros(gts.size, dtype=np.int64)
    if model is None:
        return flags
    spacing = 2.0 * math.pi * math.sqrt(model.n_mean)
    for nu in range(1, model.nu_max + 1):
        if not validity(model, nu).ok:
            near = np.abs(gts - nu * spacing) <= 0.5 * spacing
            flags |= np.where(near, 1 << (nu - 1), 0)
    return flags


def _chunk(state0: JointState, gts, model, quadrature_nu, field_state):
    times = gts / state0.g
    p_plus, p_minus, coh = dynamics.atom_density_curve(state0, times)
    abs_c = np.abs(coh)
    exact = p_plus ** 2 + p_minus ** 2 + 2.0 * abs_c ** 2
    if model is None:
        resummed = np.full(gts.size, np.nan)
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            resummed = purity_resummed(model, times, quadrature_nu, field_state, warn=False)
    return exact, resummed, p_plus, abs_c, _entropy(p_plus, abs_c), p_plus * p_minus - abs_c ** 2


def run_scan(state0: JointState, gts, model: ResumModel | None = None, quadrature_nu=(),
             field_state: FieldState | None = None, workers: int = 1, metadata=()) -> ScanResult:
    """Exact (and optionally resummed) purity on the ``g t`` grid ``gts``.

    Chunks of the grid run on a thread pool; rows come back in grid order.
    """
    gts = np.asarray(gts, dtype=float)
    if model is not None and model.g != state0.g:
        raise ValueError("model and state disagree on g")
    workers = max(1, int(workers))
    pieces = np.array_split(gts, min(workers * 4, gts.size) if workers > 1 else 1)
    if workers == 1:
        parts = [_chunk(state0, p, model, quadrature_nu, field_state) for p in pieces]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda p: _chunk(state0, p, model, quadrature_nu, field_state), pieces))
    cols = [np.concatenate([part[i] for part in parts]) for i in range(6)]
    return ScanResult(gts, *cols, validity_flags(model, gts), list(metadata))


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------

def _fmt(x) -> str:
    return "%.17g" % x


def format_csv(result: ScanResult) -> str:
    buf = io.StringIO()
    for line in result.metadata:
        buf.write(f"# {line}\n")
    buf.write(",".join(COLUMNS) + "\n")
    cols = result.columns()
    for i in range(len(result)):
        row = [_fmt(c[i]) for c in cols[:-1]] + [str(int(cols[-1][i]))]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def write_csv(result: ScanResult, path=None) -> str:
    """Write to ``path`` (if given) and return the text."""
    text = format_csv(result)
    if path is not None:
        Path(path).write_text(text)
    return text


def read_csv(source) -> ScanResult:
    """Parse a scan CSV from a path or an open text stream."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text()
    metadata, rows, header = [], [], None
    for line in text.splitlines():
        if line.startswith("#"):
            metadata.append(line[2:] if line.startswith("# ") else line[1:])
        elif header is None:
            header = line.split(",")
            if tuple(header) != COLUMNS:
                raise ValueError(f"unexpected CSV header {line!r}")
        elif line.strip():
            rows.append(line.split(","))
    if header is None:
        raise ValueError("CSV has no header row")
    data = np.array([[float(v) for v in r[:-1]] for r in rows]).reshape(len(rows), len(COLUMNS) - 1)
    flags = np.array([int(r[-1]) for r in rows], dtype=np.int64)
    return ScanResult(*(data[:, i] for i in range(len(COLUMNS) - 1)), flags, metadata)


def gnuplot_script(csv_path, title: str = "atomic purity", with_resummed: bool = False) -> str:
    """A gnuplot script plotting purity against gt from ``csv_path``."""
    lines = [
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set key autotitle columnhead",
        f"set title '{title}'",
        "set xlabel 'gt'",
        "set ylabel 'Tr rho_A^2'",
        "set yrange [0.45:1.02]",
        f"plot '{csv_path}' using 1:2 with lines lw 1.5 title 'exact'"
        + (", \\\n     '' using 1:3 with lines dt 2 title 'resummed'" if with_resummed else ""),
    ]
    return "\n".join(lines) + "\n"
