"""``jcpurity`` command line: scan, compare, design, disentangle, state.

Every option may also come from ``--config FILE`` (flat ``key = value`` lines,
keys spelled like the long flags); flags given on the command line win.
Exit status is 0 on success, 2 for configuration errors and 3 for numerical
failures.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    STATE_KINDS,
    RunConfig,
    parse_bool,
    parse_complex,
    parse_int_list,
    read_config_file,
)
from .design import design_distribution
from .dynamics import (
    AtomAmplitudes,
    atom_density,
    evolve,
    half_revival_time,
    initial_joint,
    predicted_disentangled,
    product_fidelity,
    purity,
)
from .errors import ConfigurationError, NumericalFailure
from .fock import FieldState, stats, write_state_table
from .resummation import Family, ResumModel, default_nu_max, is_peaked, validity
from .scan import ScanResult, gnuplot_script, run_scan, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def _state_options(parser, prefix=""):
    dash = f"--{prefix}"
    parser.add_argument(f"{dash}state", choices=STATE_KINDS)
    parser.add_argument(f"{dash}nbar", type=float, help="mean photon number (coherent, cat, gaussian)")
    parser.add_argument(f"{dash}phi", type=float, help="cat-state relative phase")
    parser.add_argument(f"{dash}r", type=float, help="squeezing parameter")
    parser.add_argument(f"{dash}alpha", type=float, help="squeezed-state coherent amplitude (real)")
    parser.add_argument(f"{dash}phase", type=float, help="coherent-state phase of alpha")
    parser.add_argument(f"{dash}sigma2", type=float, help="gaussian photon-number variance")
    parser.add_argument(f"{dash}slope", type=float, help="gaussian linear phase slope")
    parser.add_argument(f"{dash}n", type=int, help="Fock index")
    parser.add_argument(f"{dash}path", help="custom n,p_n,alpha_n table")


def _common_parser():
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="flat key = value file; flags override it")
    _state_options(common)
    common.add_argument("--eps-trunc", type=float, help="Fock truncation tail mass")
    common.add_argument("--atom-a", type=parse_complex, help="amplitude of |+> (complex)")
    common.add_argument("--atom-b", type=parse_complex, help="amplitude of |-> (complex)")
    common.add_argument("--g", type=float, help="coupling constant")
    common.add_argument("--omega", type=float, help="mode frequency (default 49 g)")
    common.add_argument("--gt-min", type=float)
    common.add_argument("--gt-max", type=float)
    common.add_argument("--gt-steps", type=int)
    common.add_argument("--resum", action=argparse.BooleanOptionalAction,
                        help="add the resummed analytic purity column")
    common.add_argument("--family", choices=[f.value for f in Family])
    common.add_argument("--nu-max", type=int)
    common.add_argument("--quadrature-nu", type=parse_int_list, metavar="LIST",
                        help="revival orders whose term is integrated numerically, e.g. 1,2")
    common.add_argument("--out", help="output file (default: stdout where applicable)")
    common.add_argument("--plot", help="also write a gnuplot script to this path")
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--phase-noise", type=float,
                        help="jitter field phases by U[-x, x] (seeded) before evolving")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="jcpurity", description="Atomic purity in the resonant Jaynes-Cummings model.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("scan", parents=[common], help="purity on a gt grid, written as CSV")
    sub.add_parser("compare", parents=[common], help="exact versus resummed purity report")
    design = sub.add_parser("design", parents=[common], argument_default=argparse.SUPPRESS,
                            help="field state that purifies the atom at g t_f")
    design.add_argument("--g-tf", type=float)
    design.add_argument("--beta2", type=float)
    design.add_argument("--n-max", type=int)
    design.add_argument("--cos-floor", type=float)
    design.add_argument("--scan-out", help="CSV of the forward purity scan on [0, 2 g t_f]")
    dis = sub.add_parser("disentangle", parents=[common], argument_default=argparse.SUPPRESS,
                         help="fidelity of the half-revival product-state prediction")
    _state_options(dis, prefix="minus-")
    sub.add_parser("state", parents=[common], help="dump the n,p_n,alpha_n table of a field state")
    return parser


def _converters(parser: argparse.ArgumentParser, command: str) -> dict:
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    out = {}
    for action in sub.choices[command]._actions:
        if not action.option_strings or action.dest in ("help", "config"):
            continue
        if isinstance(action, argparse.BooleanOptionalAction):
            conv = parse_bool
        else:
            conv = action.type or str
        out[action.dest] = (conv, action.choices)
    return out


def resolve_options(argv=None) -> tuple[str, dict]:
    """Parse ``argv`` and merge it over the config file. Returns ``(command, options)``."""
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    options = {}
    config_path = args.pop("config", None)
    if config_path is not None:
        converters = _converters(parser, command)
        for key, text in read_config_file(config_path).items():
            if key not in converters:
                raise ConfigurationError(f"unknown config key {key!r} for '{command}'")
            conv, choices = converters[key]
            try:
                value = conv(text)
            except (TypeError, ValueError) as exc:
                raise ConfigurationError(f"config key {key}: {exc}") from None
            if choices is not None and value not in choices:
                raise ConfigurationError(f"config key {key}: {value!r} not in {list(choices)}")
            options[key] = value
    options.update(args)
    return command, options


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _emit(text: str, path=None):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _report(pairs):
    width = max(len(k) for k, _ in pairs)
    return "".join(f"{k.ljust(width)} : {v}\n" for k, v in pairs)


def _fmt(x) -> str:
    return "%.10g" % x


def _field(cfg: RunConfig, spec) -> FieldState:
    state = spec.build(cfg.eps_trunc)
    if cfg.phase_noise > 0:
        rng = np.random.default_rng(cfg.seed)
        jitter = rng.uniform(-cfg.phase_noise, cfg.phase_noise, size=state.n_max + 1)
        state = FieldState(state.probs, state.phases + jitter, state.tail_mass, label=state.label)
    return state


def _joint(cfg: RunConfig, atom: AtomAmplitudes | None = None):
    plus = _field(cfg, cfg.state)
    minus = _field(cfg, cfg.minus_state) if cfg.minus_state is not None else None
    return plus, initial_joint(atom or cfg.atom(), plus, minus, g=cfg.g, omega=cfg.omega)


def _model(cfg: RunConfig, field: FieldState) -> ResumModel:
    st = stats(field)
    if st.variance <= 0:
        raise ConfigurationError("resummation needs a distribution with non-zero variance")
    family = cfg.family or ("poisson" if cfg.state.kind == "coherent" else "gaussian")
    nu_max = cfg.nu_max or default_nu_max(cfg.gt_max, st.mean)
    return ResumModel(st.mean, st.variance, Family(family), nu_max, cfg.g)


def _excited_only(cfg: RunConfig) -> bool:
    atom = cfg.atom()
    return atom.a_minus == 0 and cfg.minus_state is None


def _write_plot(cfg: RunConfig, csv_path, title, with_resummed):
    if cfg.plot is None:
        return
    if csv_path is None:
        raise ConfigurationError("--plot needs the CSV written to a file (--out)")
    Path(cfg.plot).write_text(gnuplot_script(csv_path, title, with_resummed))


def _regions(gts, mask):
    """Contiguous ``[start, stop]`` gt ranges where ``mask`` holds."""
    out = []
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return out
    breaks = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate([[idx[0]], idx[breaks + 1]])
    stops = np.concatenate([idx[breaks], [idx[-1]]])
    return [(gts[a], gts[b]) for a, b in zip(starts, stops)]


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_scan(cfg: RunConfig) -> ScanResult:
    field, state0 = _joint(cfg)
    model = None
    meta = cfg.metadata()
    if cfg.resum:
        if not _excited_only(cfg):
            print("warning: resummation assumes an initially excited atom; column left empty", file=sys.stderr)
        elif not is_peaked(field):
            print(f"warning: {cfg.state.kind} distribution is not single-peaked; "
                  "resummed column left empty", file=sys.stderr)
        else:
            model = _model(cfg, field)
            meta.append(f"model=n_mean={model.n_mean!r},sigma2={model.sigma2!r},"
                        f"family={model.family.value},nu_max={model.nu_max}")
    result = run_scan(state0, cfg.grid(), model, cfg.quadrature_nu if model else (),
                      workers=cfg.workers, metadata=meta)
    _emit(write_csv(result), cfg.out)
    _write_plot(cfg, cfg.out, f"{cfg.state.describe()}", model is not None)
    return result


def _deviation(result: ScanResult):
    diff = np.abs(result.purity_exact - result.purity_resummed)
    return float(diff.max()), float(diff.mean()), float(result.gt[np.argmax(diff)])


def cmd_compare(cfg: RunConfig) -> dict:
    field, state0 = _joint(cfg)
    if not _excited_only(cfg):
        raise ConfigurationError("compare needs an initially excited atom (atom-a = 1, atom-b = 0)")
    if not is_peaked(field):
        raise ConfigurationError(f"compare needs a single-peaked distribution; {cfg.state.kind} is not")
    model = _model(cfg, field)
    gts = cfg.grid()
    base = run_scan(state0, gts, model, (), workers=cfg.workers, metadata=cfg.metadata())
    max_dev, mean_dev, at = _deviation(base)
    pairs = [
        ("state", cfg.state.describe()),
        ("model", f"n_mean={_fmt(model.n_mean)} sigma2={_fmt(model.sigma2)} "
                  f"family={model.family.value} nu_max={model.nu_max}"),
    ]
    for nu in range(1, model.nu_max + 1):
        rep = validity(model, nu)
        pairs.append((f"validity nu={nu}", f"lower={_fmt(rep.lower_ratio)} upper={_fmt(rep.upper_ratio)} "
                                            f"{'ok' if rep.ok else 'FAIL'}"))
    flagged = _regions(gts, base.validity_flags != 0)
    pairs.append(("flagged gt", "; ".join(f"[{_fmt(a)}, {_fmt(b)}]" for a, b in flagged) or "none"))
    pairs += [("max |dev|", _fmt(max_dev)), ("at gt", _fmt(at)), ("mean |dev|", _fmt(mean_dev))]
    summary = {"max_dev": max_dev, "mean_dev": mean_dev, "result": base}
    final = base
    if cfg.quadrature_nu:
        quad = run_scan(state0, gts, model, cfg.quadrature_nu, workers=cfg.workers,
                        metadata=cfg.metadata())
        q_max, q_mean, q_at = _deviation(quad)
        label = ",".join(map(str, cfg.quadrature_nu))
        pairs += [(f"max |dev| (quadrature nu={label})", _fmt(q_max)),
                  ("at gt (quadrature)", _fmt(q_at)),
                  ("mean |dev| (quadrature)", _fmt(q_mean))]
        summary.update(quad_max_dev=q_max, quad_mean_dev=q_mean, quad_result=quad)
        final = quad
    sys.stdout.write(_report(pairs))
    if cfg.out:
        write_csv(final, cfg.out)
        _write_plot(cfg, cfg.out, cfg.state.describe(), True)
    return summary


def cmd_design(cfg: RunConfig, scan_out=None):
    if cfg.g_tf is None:
        raise ConfigurationError("design needs --g-tf")
    result = design_distribution(cfg.g_tf, cfg.beta2, cfg.n_max, cfg.cos_floor, cfg.g)
    gts = np.linspace(0.0, 2.0 * cfg.g_tf, cfg.gt_steps)
    state0 = initial_joint(AtomAmplitudes(1.0, 0.0), result.state, g=cfg.g, omega=cfg.omega)
    scan = run_scan(state0, gts, workers=cfg.workers,
                    metadata=[f"design g_tf={cfg.g_tf!r} beta2={cfg.beta2!r} n_max={cfg.n_max}"])
    interior = gts > 0
    k = int(np.argmax(np.where(interior, scan.purity_exact, -np.inf)))
    st = stats(result.state)
    sys.stdout.write(_report([
        ("g t_f", _fmt(cfg.g_tf)),
        ("beta2", _fmt(cfg.beta2)),
        ("achieved purity", "%.15f" % result.achieved_purity),
        ("support (p > 1e-6)", str(result.support)),
        ("n_max kept", str(result.state.n_max)),
        ("mean, variance", f"{_fmt(st.mean)}, {_fmt(st.variance)}"),
        ("rejected indices", ",".join(map(str, result.rejected_indices)) or "none"),
        ("p_+/p_- at t_f", _fmt(result.p_ratio)),
        ("boundary defect", _fmt(result.boundary_defect)),
        ("sign consistent", str(result.sign_consistent)),
        ("scan peak (gt > 0)", f"{_fmt(scan.purity_exact[k])} at gt = {_fmt(gts[k])}"),
    ]))
    if cfg.out:
        _emit(write_state_table(result.state), cfg.out)
    if scan_out:
        write_csv(scan, scan_out)
        _write_plot(cfg, scan_out, f"designed state, g t_f = {cfg.g_tf}", False)
    return result, scan


def cmd_disentangle(cfg: RunConfig) -> dict:
    plus, state0 = _joint(cfg)
    t0 = half_revival_time(stats(plus).mean, cfg.g)
    atom, field = predicted_disentangled(state0, t0)
    evolved = evolve(state0, t0)
    fidelity = product_fidelity(atom, field, evolved)
    pur = purity(atom_density(evolved))
    sys.stdout.write(_report([
        ("atom", f"a={cfg.atom().a_plus:.10g} b={cfg.atom().a_minus:.10g}"),
        ("fields", f"{cfg.state.describe()} / {(cfg.minus_state or cfg.state).describe()}"),
        ("g t0", _fmt(cfg.g * t0)),
        ("fidelity", "%.12f" % fidelity),
        ("purity at t0", "%.12f" % pur),
        ("atom factor", f"({atom.a_plus:.12g}) |+> + ({atom.a_minus:.12g}) |->"),
    ]))
    return {"fidelity": fidelity, "purity": pur, "atom": atom, "t0": t0}


def cmd_state(cfg: RunConfig) -> FieldState:
    state = _field(cfg, cfg.state)
    st = stats(state)
    header = (f"# {cfg.state.describe()} n_max={state.n_max} tail_mass={state.tail_mass:.3e} "
              f"mean={st.mean!r} variance={st.variance!r}\n")
    _emit(header + write_state_table(state), cfg.out)
    return state


COMMANDS = {
    "scan": cmd_scan,
    "compare": cmd_compare,
    "design": cmd_design,
    "disentangle": cmd_disentangle,
    "state": cmd_state,
}


def main(argv=None) -> int:
    try:
        command, options = resolve_options(argv)
        scan_out = options.pop("scan_out", None)
        cfg = RunConfig.from_options(options)
        if command == "design":
            cmd_design(cfg, scan_out)
        else:
            COMMANDS[command](cfg)
    except ConfigurationError as exc:
        print(f"jcpurity: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"jcpurity: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
