"""Batch command-line front end.

Loads windows, lattices, or gallery entries, runs one analysis per
invocation, and emits machine-diffable artifacts: a summary JSON on
stdout, plus (under --out DIR) a JSON-lines event stream, the same
summary as a file, and a fixed-column CSV (spec-size, low, high) with
the profile data behind the verdict.  Outputs carry no timestamps and
all iteration is seeded, so identical configurations produce identical
bytes.

Exit codes: 0 on success, 1 when the analysis completes with a failure
verdict (not certified, not tight, not equal, diagnosis inconclusive,
oracle mismatch, gallery signature broken), 2 on input errors such as
unreadable paths, malformed JSON (reported with line and column), or
invalid parameter combinations.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from .model import (
    DiscreteGaborSystem,
    GridError,
    LatticeError,
    LatticeParams,
    StepFunction,
)
from .correlations import (
    CorrelationFamily,
    cc_check,
    condition_a_partial_sums,
    correlation_family,
    ucc_check,
)
from .zak import ZakWindow, gk_from_zak, zak_transform
from .zakmat import a_field, dual_window, frame_bounds
from .walnut import convergence_diagnose
from .oracle import frame_matrix, walnut_discrete
from .classify import (
    ShiftInvariantSystem,
    equal_frame_operator,
    lp_extension_check,
    schur_upper_bound,
    tight_check,
    wiener_extension_check,
)
from . import gallery as gallery_mod

__all__ = ["RunConfig", "CliInputError", "run", "main"]

CSV_HEADER = "spec-size,low,high"
ORACLE_TOL = 1e-10

_REGIMES = {"sym": "symmetric", "norm": "norm", "uncond": "unconditional"}


class CliInputError(Exception):
    """Bad input: unreadable file, malformed JSON, invalid combination."""


@dataclass(frozen=True)
class RunConfig:
    """One resolved invocation; identical configs yield identical bytes."""

    command: str
    inputs: Tuple[str, ...]
    lattice: LatticeParams
    lattice2: Optional[LatticeParams]
    resolution: int
    k_max: int
    nu_samples: int
    seed: int
    out_dir: Optional[str]
    options: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {
            "command": self.command,
            "inputs": list(self.inputs),
            "a": str(self.lattice.a),
            "b": str(self.lattice.b),
            "a2": str(self.lattice2.a) if self.lattice2 else None,
            "b2": str(self.lattice2.b) if self.lattice2 else None,
            "resolution": self.resolution,
            "k_max": self.k_max,
            "nu_samples": self.nu_samples,
            "seed": self.seed,
            "out_dir": self.out_dir,
            "options": {k: v for k, v in sorted(self.options.items())},
        }


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc
    if value <= 0:
        raise argparse.ArgumentTypeError(f"lattice parameters must be positive: {text!r}")
    return value


def _epsilon_list(text: str) -> Tuple[float, ...]:
    try:
        values = tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad epsilon list: {text!r}") from exc
    if not values or any(not 0 < e for e in values):
        raise argparse.ArgumentTypeError("epsilons must be positive")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", type=_fraction, default=Fraction(1), metavar="NUM/DEN")
    common.add_argument("--b", type=_fraction, default=Fraction(1), metavar="NUM/DEN")
    common.add_argument("--resolution", type=int, default=1, metavar="R")
    common.add_argument("--kmax", type=int, default=64, metavar="K")
    common.add_argument("--nu-samples", type=int, default=512, metavar="V")
    common.add_argument("--seed", type=int, default=7, metavar="S")
    common.add_argument("--out", default=None, metavar="DIR")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("input", nargs="?", default=None, metavar="JSON")
    source.add_argument("--gallery", default=None, metavar="NAME",
                        help="use a gallery entry instead of an input file")

    parser = argparse.ArgumentParser(
        prog="gaborwalnut",
        description="Walnut-series analyses of Weyl-Heisenberg frame operators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("gk", parents=[common, source],
                   help="correlation family and per-k sup moduli")
    sub.add_parser("cc", parents=[common, source],
                   help="sup-sum condition check")
    ucc = sub.add_parser("ucc", parents=[common, source],
                         help="uniform tail condition check")
    ucc.add_argument("--eps", type=_epsilon_list, default=(0.5, 0.1, 0.01),
                     metavar="E1,E2,...")
    sub.add_parser("cond-a", parents=[common, source],
                   help="adjoint-lattice coefficient partial sums")
    zakp = sub.add_parser("zak", parents=[common, source],
                          help="sample the Zak transform on a square grid")
    zakp.add_argument("--lam", type=_fraction, default=Fraction(1), metavar="NUM/DEN")
    sub.add_parser("bounds", parents=[common, source],
                   help="frame-bound bracket via the Zak matrix field")
    sub.add_parser("dual", parents=[common, source],
                   help="canonical dual window via spectral inversion")
    diag = sub.add_parser("walnut-diag", parents=[common, source],
                          help="partial-sum convergence diagnostics")
    diag.add_argument("--regime", choices=sorted(_REGIMES), required=True)
    diag.add_argument("--subsets", choices=("all", "aligned", "greedy", "random"),
                      default="all")
    sub.add_parser("tight", parents=[common, source],
                   help="tight-frame classification")
    equal = sub.add_parser("equal", parents=[common],
                           help="equality of two frame operators")
    equal.add_argument("window1", metavar="JSON1")
    equal.add_argument("window2", metavar="JSON2")
    equal.add_argument("--a2", type=_fraction, default=None, metavar="NUM/DEN")
    equal.add_argument("--b2", type=_fraction, default=None, metavar="NUM/DEN")
    schur = sub.add_parser("schur", parents=[common],
                           help="shift-invariant upper bound certificate")
    schur.add_argument("windows", nargs="+", metavar="JSON")
    extend = sub.add_parser("extend", parents=[common, source],
                            help="operator extension checks beyond L2")
    extend.add_argument("--space", choices=("lp", "wiener"), required=True)
    extend.add_argument("--trials", type=int, default=40, metavar="T")
    gal = sub.add_parser("gallery", parents=[common],
                         help="list or replay the counterexample gallery")
    gal.add_argument("action", choices=("list", "run"))
    gal.add_argument("name", nargs="?", default=None, metavar="NAME")
    over = sub.add_parser("oracle-verify", parents=[common],
                          help="random discrete systems against the dense oracle")
    over.add_argument("--trials", type=int, default=20, metavar="T")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    options = {}
    inputs: Tuple[str, ...] = ()
    if args.command == "equal":
        inputs = (args.window1, args.window2)
    elif args.command == "schur":
        inputs = tuple(args.windows)
    elif getattr(args, "input", None) is not None:
        inputs = (args.input,)
    for key in ("gallery", "eps", "lam", "regime", "subsets", "space",
                "trials", "action", "name"):
        if hasattr(args, key) and getattr(args, key) is not None:
            value = getattr(args, key)
            options[key] = str(value) if isinstance(value, Fraction) else value
    lattice2 = None
    if args.command == "equal":
        lattice2 = LatticeParams(
            args.a2 if args.a2 is not None else args.a,
            args.b2 if args.b2 is not None else args.b,
        )
    for name, value in (("resolution", args.resolution), ("kmax", args.kmax),
                        ("nu-samples", args.nu_samples)):
        if value < 1:
            raise CliInputError(f"--{name} must be a positive integer")
    return RunConfig(
        command=args.command,
        inputs=inputs,
        lattice=LatticeParams(args.a, args.b),
        lattice2=lattice2,
        resolution=args.resolution,
        k_max=args.kmax,
        nu_samples=args.nu_samples,
        seed=args.seed,
        out_dir=args.out,
        options=options,
    )


# ---------------------------------------------------------------------------
# input loading
# ---------------------------------------------------------------------------


def _read_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliInputError(f"{path}: {exc.strerror or exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliInputError(
            f"{path}: parse error at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(obj, dict):
        raise CliInputError(f"{path}: expected a JSON object")
    return obj


def _load_window(path: str) -> StepFunction:
    obj = _read_json(path)
    try:
        return StepFunction.from_json_obj(obj)
    except (KeyError, TypeError, ValueError, GridError) as exc:
        raise CliInputError(f"{path}: invalid window object: {exc}") from exc


def _load_source(cfg: RunConfig, want: str):
    """Resolve the analysis subject.

    Returns (window, family, truncation_echo).  window is None for
    family-only sources; family is None when want == "window" skipped it.
    Sources: a window/Zak/correlation-family JSON file, or --gallery NAME.
    """
    name = cfg.options.get("gallery")
    if name is not None and cfg.inputs:
        raise CliInputError("give either an input file or --gallery, not both")
    if name is not None:
        try:
            entry = gallery_mod.build(name)
        except (ValueError, NotImplementedError) as exc:
            raise CliInputError(str(exc)) from exc
        echo = {"gallery": entry.name, **entry.params}
        if entry.kind == "window":
            fam = entry.family() if want == "family" else None
            return entry.obj, fam, echo
        if want == "window":
            raise CliInputError(
                f"gallery entry {entry.name!r} has no window object (kind {entry.kind})"
            )
        fam = entry.family()
        if fam is None:
            raise CliInputError(
                f"gallery entry {entry.name!r} is analytic-only; "
                "replay it with: gallery run"
            )
        return None, fam, echo
    if not cfg.inputs:
        raise CliInputError("an input file or --gallery NAME is required")
    path = cfg.inputs[0]
    obj = _read_json(path)
    if "entries" in obj:
        if want == "window":
            raise CliInputError(f"{path}: this command needs a window, not a family")
        try:
            fam = CorrelationFamily.from_json_obj(obj)
        except (KeyError, TypeError, ValueError, GridError, LatticeError) as exc:
            raise CliInputError(f"{path}: invalid family object: {exc}") from exc
        return None, fam, {"exact_tail": fam.exact_tail}
    if "t_cells" in obj:
        if want == "window":
            raise CliInputError(f"{path}: this command needs a window, not Zak data")
        try:
            zw = ZakWindow.from_json_obj(obj)
        except (KeyError, TypeError, ValueError) as exc:
            raise CliInputError(f"{path}: invalid Zak object: {exc}") from exc
        return None, gk_from_zak(zw, k_max=cfg.k_max), {"k_max": cfg.k_max}
    g = _load_window(path)
    fam = None
    if want == "family":
        try:
            fam = correlation_family(g, cfg.lattice)
        except (GridError, LatticeError) as exc:
            raise CliInputError(str(exc)) from exc
    return g, fam, {"exact_tail": True}


# ---------------------------------------------------------------------------
# command handlers: each returns (exit_code, report_obj, csv_rows)
# ---------------------------------------------------------------------------


def _cmd_gk(cfg: RunConfig):
    _, fam, echo = _load_source(cfg, "family")
    ks, mags = fam.magnitude_table()
    rows = [(int(k), float(m.max()), float(m.max())) for k, m in zip(ks, mags)]
    report = {
        "truncation": echo,
        "k_range": [int(k) for k in ks],
        "sup_moduli": {str(k): float(m.max()) for k, m in zip(ks, mags)},
        "exact_tail": fam.exact_tail,
    }
    if len(ks) <= 129:
        report["family"] = fam.to_json_obj()
    else:
        report["family_omitted"] = True
    return 0, report, rows


def _cmd_cc(cfg: RunConfig):
    _, fam, echo = _load_source(cfg, "family")
    rep = cc_check(fam)
    rows = [(int(k), float(v), float(v)) for k, v in rep.tail_profile]
    code = 0 if rep.verdict == "holds" else 1
    return code, {"truncation": echo, **rep.to_json_obj()}, rows


def _cmd_ucc(cfg: RunConfig):
    _, fam, echo = _load_source(cfg, "family")
    rep = ucc_check(fam, cfg.options["eps"])
    rows = [(int(k), float(v), float(v)) for k, v in rep.tail_profile]
    code = 0 if rep.verdict == "holds" else 1
    return code, {"truncation": echo, **rep.to_json_obj()}, rows


def _cmd_cond_a(cfg: RunConfig):
    g, _, echo = _load_source(cfg, "window")
    try:
        sums = condition_a_partial_sums(g, cfg.lattice, cfg.k_max, cfg.k_max)
    except (GridError, LatticeError) as exc:
        raise CliInputError(str(exc)) from exc
    rows = [(int(r), float(t), float(t)) for r, t in sums.running]
    report = {
        "truncation": {**echo, "k_range": cfg.k_max, "l_range": cfg.k_max},
        "total": float(sums.total),
        "running": [[int(r), float(t)] for r, t in sums.running],
    }
    return 0, report, rows


def _cmd_zak(cfg: RunConfig):
    g, _, echo = _load_source(cfg, "window")
    lam = Fraction(cfg.options.get("lam", "1"))
    points = cfg.nu_samples
    grid = zak_transform(g, lam, points, points)
    mod = np.abs(grid.values)
    rows = [(i, float(mod[i].min()), float(mod[i].max())) for i in range(points)]
    report = {
        "truncation": {**echo, "t_points": points, "nu_points": points},
        "lam": str(lam),
        "modulus_min": float(mod.min()),
        "modulus_max": float(mod.max()),
        "diagnostics": {k: float(v) for k, v in sorted(grid.diagnostics.items())},
    }
    if points * points <= 4096:
        report["re"] = np.real(grid.values).tolist()
        report["im"] = np.imag(grid.values).tolist()
    else:
        report["values_omitted"] = True
    return 0, report, rows


def _cmd_bounds(cfg: RunConfig):
    g, _, echo = _load_source(cfg, "window")
    try:
        field_ = a_field(g, None, cfg.lattice, cfg.resolution, nu_points=cfg.nu_samples)
    except (GridError, LatticeError) as exc:
        raise CliInputError(str(exc)) from exc
    fb = frame_bounds(field_)
    rows = [(int(n), float(alo), float(bhi)) for n, alo, _, _, bhi in fb.refinements]
    report = {
        "truncation": {**echo, "nu_points_initial": cfg.nu_samples,
                       "resolution": cfg.resolution},
        **fb.to_json_obj(),
    }
    return 0, report, rows


def _cmd_dual(cfg: RunConfig):
    g, _, echo = _load_source(cfg, "window")
    try:
        res = dual_window(g, cfg.lattice, cfg.resolution,
                          k_trunc=cfg.k_max, nu_points=cfg.nu_samples)
    except (GridError, LatticeError) as exc:
        raise CliInputError(str(exc)) from exc
    fb = res.bracket
    rows = [(int(n), float(alo), float(bhi)) for n, alo, _, _, bhi in fb.refinements]
    report = {
        "truncation": {**echo, "k_trunc": res.k_trunc, "nu_points": res.nu_points},
        "window": res.window.to_json_obj(),
        "wr_deviation": float(res.wr_deviation),
        "bracket": fb.to_json_obj(),
    }
    return 0, report, rows


def _cmd_walnut_diag(cfg: RunConfig):
    g, fam, echo = _load_source(cfg, "family")
    source = fam if fam is not None else (g, cfg.lattice)
    regime = _REGIMES[cfg.options["regime"]]
    rep = convergence_diagnose(
        source,
        regime,
        k_max=cfg.k_max,
        subset_strategy=cfg.options.get("subsets", "all"),
        nu_points=cfg.nu_samples,
        seed=cfg.seed,
    )
    rows = [(int(size), float(low), float(high))
            for _, size, low, high in rep.norm_profile]
    report = {
        "truncation": {**echo, "k_max": cfg.k_max, "nu_points": cfg.nu_samples},
        **rep.to_json_obj(),
    }
    code = 0 if rep.verdict in ("bounded", "growing") else 1
    return code, report, rows


def _cmd_tight(cfg: RunConfig):
    g, _, echo = _load_source(cfg, "window")
    try:
        verdict = tight_check(g, cfg.lattice)
    except (GridError, LatticeError) as exc:
        raise CliInputError(str(exc)) from exc
    code = 0 if verdict.verdict in ("normalized-tight", "tight") else 1
    return code, {"truncation": echo, **verdict.to_json_obj()}, None


def _cmd_equal(cfg: RunConfig):
    g = _load_window(cfg.inputs[0])
    h = _load_window(cfg.inputs[1])
    try:
        verdict = equal_frame_operator(g, cfg.lattice, h, cfg.lattice2)
    except (GridError, LatticeError) as exc:
        raise CliInputError(str(exc)) from exc
    code = 0 if verdict.verdict == "equal" else 1
    return code, verdict.to_json_obj(), None


def _cmd_schur(cfg: RunConfig):
    generators = [_load_window(path) for path in cfg.inputs]
    try:
        sys_ = ShiftInvariantSystem(generators, cfg.lattice.a)
        rep = schur_upper_bound(sys_, k_max=cfg.k_max, nu_resolution=cfg.nu_samples)
    except (GridError, LatticeError) as exc:
        raise CliInputError(str(exc)) from exc
    report = {
        "truncation": {"k_max": cfg.k_max, "nu_resolution": cfg.nu_samples},
        **rep.to_json_obj(),
    }
    code = 0 if rep.verdict == "certified" else 1
    return code, report, None


def _cmd_extend(cfg: RunConfig):
    g, _, echo = _load_source(cfg, "window")
    check = lp_extension_check if cfg.options["space"] == "lp" else wiener_extension_check
    try:
        rep = check(g, cfg.lattice, trials=cfg.options.get("trials", 40), seed=cfg.seed)
    except (GridError, LatticeError) as exc:
        raise CliInputError(str(exc)) from exc
    rows = None
    if cfg.options["space"] == "lp":
        rows = [(int(d), float(aligned), float(glob))
                for d, aligned, _, glob in rep.witness_profile]
    report = {"truncation": {**echo, "trials": cfg.options.get("trials", 40)},
              **rep.to_json_obj()}
    code = 0 if rep.verdict == "bounded" else 1
    return code, report, rows


def _cmd_gallery(cfg: RunConfig):
    action = cfg.options["action"]
    if action == "list":
        report = {
            "entries": list(gallery_mod.entry_names()),
            "aliases": gallery_mod.alias_map(),
            "out_of_scope": gallery_mod.out_of_scope(),
        }
        return 0, report, None
    name = cfg.options.get("name")
    if not name:
        raise CliInputError("gallery run needs an entry NAME")
    try:
        entry = gallery_mod.build(name)
    except (ValueError, NotImplementedError) as exc:
        raise CliInputError(str(exc)) from exc
    rep = gallery_mod.verify(entry)
    rows = [(i, float(c.value), float(c.value))
            for i, c in enumerate(rep.checks) if c.value is not None]
    report = {
        "truncation": dict(entry.params),
        "entry": entry.to_json_obj(),
        "verify": rep.to_json_obj(),
    }
    return (0 if rep.passed else 1), report, rows


def _cmd_oracle_verify(cfg: RunConfig):
    trials = cfg.options.get("trials", 20)
    if trials < 1:
        raise CliInputError("--trials must be a positive integer")
    rng = np.random.default_rng(cfg.seed)
    sizes = (16, 24, 36, 48, 60, 72, 96, 120, 144)
    results = []
    worst = 0.0
    for t in range(trials):
        n = int(rng.choice(sizes))
        divisors = [d for d in range(1, n + 1) if n % d == 0]
        a_d = int(rng.choice(divisors))
        l_mod = int(rng.choice([d for d in divisors if d * a_d <= n]))
        window = rng.normal(size=n) + 1j * rng.normal(size=n)
        sys_ = DiscreteGaborSystem(n, a_d, l_mod, window)
        dense = frame_matrix(sys_).matrix
        dev = 0.0
        for _ in range(10):
            f = rng.normal(size=n) + 1j * rng.normal(size=n)
            dev = max(dev, float(np.max(np.abs(walnut_discrete(sys_, f) - dense @ f))))
        worst = max(worst, dev)
        results.append({"trial": t, "N": n, "a_d": a_d, "L": l_mod, "deviation": dev})
    rows = [(r["trial"], r["deviation"], r["deviation"]) for r in results]
    report = {
        "truncation": {"trials": trials, "vectors_per_trial": 10},
        "tolerance": ORACLE_TOL,
        "max_deviation": worst,
        "trials": results,
    }
    return (0 if worst <= ORACLE_TOL else 1), report, rows


_HANDLERS = {
    "gk": _cmd_gk,
    "cc": _cmd_cc,
    "ucc": _cmd_ucc,
    "cond-a": _cmd_cond_a,
    "zak": _cmd_zak,
    "bounds": _cmd_bounds,
    "dual": _cmd_dual,
    "walnut-diag": _cmd_walnut_diag,
    "tight": _cmd_tight,
    "equal": _cmd_equal,
    "schur": _cmd_schur,
    "extend": _cmd_extend,
    "gallery": _cmd_gallery,
    "oracle-verify": _cmd_oracle_verify,
}


# ---------------------------------------------------------------------------
# artifacts
# ---------------------------------------------------------------------------


def _write_artifacts(cfg: RunConfig, code: int, report: dict, rows) -> dict:
    summary = {
        "config": cfg.to_json_obj(),
        "exit_code": code,
        "report": report,
    }
    artifacts = {"summary": summary}
    if cfg.out_dir is not None:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        events = [
            {"event": "config", **cfg.to_json_obj()},
            {"event": "report", "command": cfg.command, "report": report},
            {"event": "exit", "code": code},
        ]
        stream = "".join(json.dumps(e, sort_keys=True) + "\n" for e in events)
        (out / "report.jsonl").write_text(stream)
        (out / "summary.json").write_text(
            json.dumps(summary, sort_keys=True, indent=2) + "\n"
        )
        artifacts["jsonl"] = str(out / "report.jsonl")
        artifacts["summary_path"] = str(out / "summary.json")
        if rows is not None:
            body = CSV_HEADER + "\n" + "".join(
                f"{size},{low},{high}\n" for size, low, high in rows
            )
            (out / "profile.csv").write_text(body)
            artifacts["csv"] = str(out / "profile.csv")
    return artifacts


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute one configuration; write artifacts; return the exit code."""
    stdout = stdout if stdout is not None else sys.stdout
    code, report, rows = _HANDLERS[cfg.command](cfg)
    artifacts = _write_artifacts(cfg, code, report, rows)
    stdout.write(json.dumps(artifacts["summary"], sort_keys=True, indent=2) + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config_from_args(args)
        return run(cfg)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
