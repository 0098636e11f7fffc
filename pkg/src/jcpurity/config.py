"""Run configuration: field-state specs, atom specs and flat key=value files."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fock
from .dynamics import AtomAmplitudes
from .errors import ConfigurationError
from .fock import FieldState

__all__ = [
    "STATE_KINDS",
    "DEFAULTS",
    "StateSpec",
    "RunConfig",
    "parse_bool",
    "parse_complex",
    "parse_int_list",
    "read_config_file",
]

STATE_KINDS = ("coherent", "cat", "squeezed", "gaussian", "fock", "custom")

# Field-state keys; ``minus_``-prefixed copies describe the field paired with |->.
STATE_KEYS = ("state", "nbar", "phi", "r", "alpha", "phase", "sigma2", "slope", "n", "path")

DEFAULTS = {
    "state": "coherent",
    "nbar": 49.0,
    "phi": 0.0,
    "r": 0.75,
    "alpha": 14.72,
    "phase": 0.0,
    "sigma2": None,
    "slope": 0.0,
    "n": 0,
    "path": None,
    "eps_trunc": fock.DEFAULT_EPS_TRUNC,
    "atom_a": 1.0 + 0j,
    "atom_b": 0.0 + 0j,
    "g": 1.0,
    "omega": None,
    "gt_min": 0.0,
    "gt_max": 50.0,
    "gt_steps": 5000,
    "resum": False,
    "family": None,
    "nu_max": None,
    "quadrature_nu": (),
    "out": None,
    "plot": None,
    "seed": 0,
    "workers": 1,
    "phase_noise": 0.0,
    "g_tf": None,
    "beta2": 1.0,
    "n_max": 40,
    "cos_floor": 1e-3,
}


def parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"not a boolean: {text!r}")


def parse_complex(text) -> complex:
    try:
        return complex(str(text).replace(" ", ""))
    except ValueError:
        raise ConfigurationError(f"not a complex number: {text!r}") from None


def parse_int_list(text) -> tuple:
    if isinstance(text, (tuple, list)):
        return tuple(int(v) for v in text)
    items = [v for v in str(text).replace(";", ",").split(",") if v.strip()]
    try:
        return tuple(int(v) for v in items)
    except ValueError:
        raise ConfigurationError(f"not a list of integers: {text!r}") from None


def read_config_file(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment. Keys may use ``-`` or ``_``.

    Values stay strings; the caller converts them with the flag's own parser.
    """
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


@dataclass(frozen=True)
class StateSpec:
    """One member of the field-state family with its parameters."""

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in STATE_KINDS:
            raise ConfigurationError(f"unknown state {self.kind!r}; choose from {', '.join(STATE_KINDS)}")

    @classmethod
    def from_options(cls, opts: dict, prefix: str = "") -> "StateSpec":
        def get(key):
            return opts.get(prefix + key, DEFAULTS.get(key))

        kind = get("state")
        if kind == "coherent":
            params = {"nbar": float(get("nbar")), "phase": float(get("phase"))}
        elif kind == "cat":
            params = {"nbar": float(get("nbar")), "phi": float(get("phi"))}
        elif kind == "squeezed":
            params = {"r": float(get("r")), "alpha": float(get("alpha"))}
        elif kind == "gaussian":
            nbar = float(get("nbar"))
            sigma2 = get("sigma2")
            params = {"nbar": nbar, "sigma2": nbar if sigma2 is None else float(sigma2),
                      "slope": float(get("slope"))}
        elif kind == "fock":
            params = {"n": int(get("n"))}
        else:
            if get("path") is None:
                raise ConfigurationError("custom state needs a path to an n,p_n,alpha_n table")
            params = {"path": str(get("path"))}
        return cls(kind, params)

    def build(self, eps_trunc: float = fock.DEFAULT_EPS_TRUNC) -> FieldState:
        p = self.params
        try:
            if self.kind == "coherent":
                return fock.coherent_state(p["nbar"], p["phase"], eps_trunc)
            if self.kind == "cat":
                return fock.cat_state(p["nbar"], p["phi"], eps_trunc)
            if self.kind == "squeezed":
                return fock.squeezed_coherent_state(p["r"], p["alpha"], eps_trunc)
            if self.kind == "gaussian":
                return fock.gaussian_state(p["nbar"], p["sigma2"], p["slope"], eps_trunc)
            if self.kind == "fock":
                return fock.fock_state(p["n"])
            return fock.read_state_table(p["path"])
        except OSError as exc:
            raise ConfigurationError(f"cannot read state table: {exc}") from None
        except ValueError as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(str(exc)) from None

    def describe(self) -> str:
        args = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.kind}({args})"


@dataclass(frozen=True)
class RunConfig:
    state: StateSpec
    minus_state: StateSpec | None
    atom_a: complex
    atom_b: complex
    g: float
    omega: float | None
    gt_min: float
    gt_max: float
    gt_steps: int
    eps_trunc: float
    resum: bool
    family: str | None
    nu_max: int | None
    quadrature_nu: tuple
    out: str | None
    plot: str | None
    seed: int
    workers: int
    phase_noise: float
    g_tf: float | None
    beta2: float
    n_max: int
    cos_floor: float
    options: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.gt_min < self.gt_max:
            raise ConfigurationError(f"need gt_min < gt_max, got {self.gt_min}, {self.gt_max}")
        if self.gt_steps < 2:
            raise ConfigurationError(f"gt_steps must be >= 2, got {self.gt_steps}")
        if self.gt_min < 0:
            raise ConfigurationError("gt_min must be >= 0")
        if not self.g > 0:
            raise ConfigurationError(f"g must be > 0, got {self.g}")
        if not 0 < self.eps_trunc < 1:
            raise ConfigurationError(f"eps_trunc must lie in (0, 1), got {self.eps_trunc}")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        if self.family not in (None, "gaussian", "poisson"):
            raise ConfigurationError(f"family must be gaussian or poisson, got {self.family!r}")
        if self.nu_max is not None and self.nu_max < 1:
            raise ConfigurationError("nu_max must be >= 1")
        if self.phase_noise < 0:
            raise ConfigurationError("phase_noise must be >= 0")

    @classmethod
    def from_options(cls, opts: dict) -> "RunConfig":
        merged = {**DEFAULTS, **opts}
        has_minus = any(k.startswith("minus_") for k in opts)
        return cls(
            state=StateSpec.from_options(merged),
            # unspecified minus_ keys inherit from the |+> field
            minus_state=StateSpec.from_options(
                {k: opts.get("minus_" + k, merged[k]) for k in STATE_KEYS}
            ) if has_minus else None,
            atom_a=parse_complex(merged["atom_a"]),
            atom_b=parse_complex(merged["atom_b"]),
            g=float(merged["g"]),
            omega=None if merged["omega"] is None else float(merged["omega"]),
            gt_min=float(merged["gt_min"]),
            gt_max=float(merged["gt_max"]),
            gt_steps=int(merged["gt_steps"]),
            eps_trunc=float(merged["eps_trunc"]),
            resum=parse_bool(merged["resum"]),
            family=merged["family"],
            nu_max=None if merged["nu_max"] is None else int(merged["nu_max"]),
            quadrature_nu=parse_int_list(merged["quadrature_nu"]),
            out=merged["out"],
            plot=merged["plot"],
            seed=int(merged["seed"]),
            workers=int(merged["workers"]),
            phase_noise=float(merged["phase_noise"]),
            g_tf=None if merged["g_tf"] is None else float(merged["g_tf"]),
            beta2=float(merged["beta2"]),
            n_max=int(merged["n_max"]),
            cos_floor=float(merged["cos_floor"]),
            options=merged,
        )

    def atom(self) -> AtomAmplitudes:
        norm = math.hypot(abs(self.atom_a), abs(self.atom_b))
        if norm == 0.0:
            raise ConfigurationError("atom amplitudes are both zero")
        return AtomAmplitudes.normalized(self.atom_a, self.atom_b)

    def grid(self) -> np.ndarray:
        return np.linspace(self.gt_min, self.gt_max, self.gt_steps)

    def metadata(self) -> list:
        """``key=value`` lines describing the resolved run, for CSV headers."""
        lines = [f"state={self.state.describe()}"]
        if self.minus_state is not None:
            lines.append(f"minus_state={self.minus_state.describe()}")
        for key in ("atom_a", "atom_b", "g", "omega", "gt_min", "gt_max", "gt_steps", "eps_trunc",
                    "resum", "family", "nu_max", "quadrature_nu", "seed", "phase_noise"):
            value = getattr(self, key)
            if isinstance(value, tuple):
                value = ",".join(map(str, value))
            lines.append(f"{key}={value}")
        return lines
