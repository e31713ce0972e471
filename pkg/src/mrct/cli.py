"""Command-line interface: ``mrct <command> [options]``.

Commands: ``sample-size``, ``cp``, ``solve-fraction``, ``pairs``,
``simulate`` and ``reproduce``. Every command accepts ``--config`` (TOML or
JSON, ``schema = 1``, keys named like the long options with underscores),
``--json`` for a machine-readable run record and ``--out`` for CSV output.
Values resolve as command-line flags, then the config file, then defaults.

Exit codes: 0 ok, 2 invalid input, 3 enumeration budget exceeded,
4 unattainable target, 5 degenerate simulation (no rejections).
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import sys
import warnings
from importlib import metadata
from pathlib import Path
from typing import Any

from . import consistency_one as c1
from . import consistency_two as c2
from . import scenarios
from .design import BinaryEndpoint, DesignParams, NormalEndpoint, RegionAllocation, overall_sample_size
from .errors import DegenerateSimulation, EnumerationBudgetExceeded, UnattainableTarget
from .quadrature import IntegrationError
from .simulate import OneStudyScenario, SimConfig, TwoStudyScenario, empirical_cp, resolve_threads

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_UNATTAINABLE = 4
EXIT_DEGENERATE = 5
CONFIG_SCHEMA = 1

DEFAULTS: dict[str, Any] = {
    "endpoint": "normal",
    "d": None,
    "sigma2_t": None,
    "sigma2_c": None,
    "p_t": None,
    "p_c": None,
    "d2": None,
    "sigma2_t2": None,
    "sigma2_c2": None,
    "p_t2": None,
    "p_c2": None,
    "alpha": 0.025,
    "power": 0.8,
    "pi": 0.5,
    "gamma": 0.2,
    "ratio": 1.0,
    "studies": 1,
    "criterion": 1,
    "k": None,
    "fk": None,
    "fk2": None,
    "f1": None,
    "fractions": None,
    "method": "analytic",
    "reps": 10_000,
    "seed": None,
    "threads": None,
    "tie_policy": "strict",
    "split": "total",
    "sigma_source": "design",
    "pair_c": False,
    "pair_f1": None,
    "c": None,
    "f1_grid": None,
    "table": None,
    "example": None,
    "section4": False,
    "no_simulate": False,
}

# options that only shape output, never results; not stored in configs
_OUTPUT_KEYS = {"config", "json", "out", "command"}


class UsageError(ValueError):
    """Invalid combination of options."""


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:  # pragma: no cover
        return "0+unknown"


def fmt_fraction(f: float) -> str:
    """``0.230 (23.0%)``."""
    return f"{f:.3f} ({100.0 * f:.1f}%)"


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


# ---------------------------------------------------------------------------
# argument parsing


def _add_global(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run options")
    g.add_argument("--config", type=Path, help="TOML or JSON config file (schema = 1), or a saved run record")
    g.add_argument("--json", action="store_true", help="print a JSON run record instead of text")
    g.add_argument("--out", type=Path, help="write (or append, for simulate) CSV output here")
    g.add_argument("--seed", type=int, help="Monte Carlo seed")
    g.add_argument("--threads", type=int, help="worker threads (default: $MRCT_THREADS or 1)")


def _add_design(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("design")
    g.add_argument("--alpha", type=float, help="one-sided significance level (default 0.025)")
    g.add_argument("--power", type=float, help="power 1-beta (default 0.8)")
    g.add_argument("--ratio", type=float, help="treatment:control randomization ratio r (default 1)")


def _add_endpoint(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("endpoint (suffix 2 = second study; defaults to the first study's values)")
    g.add_argument("--endpoint", choices=("normal", "binary"))
    g.add_argument("--d", type=float, help="normal: treatment-control mean difference")
    g.add_argument("--sigma2-t", type=float, help="normal: treatment-arm variance")
    g.add_argument("--sigma2-c", type=float, help="normal: control-arm variance")
    g.add_argument("--p-t", type=float, help="binary: treatment response rate")
    g.add_argument("--p-c", type=float, help="binary: control response rate")
    g.add_argument("--studies", type=int, choices=(1, 2), help="number of trials (default 1)")
    g.add_argument("--d2", type=float)
    g.add_argument("--sigma2-t2", type=float)
    g.add_argument("--sigma2-c2", type=float)
    g.add_argument("--p-t2", type=float)
    g.add_argument("--p-c2", type=float)


def _add_consistency(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("consistency")
    g.add_argument("--criterion", type=int, choices=(1, 2),
                   help="1 = region retains pi of the overall effect; 2 = all regions positive")
    g.add_argument("--pi", type=float, help="retained share of the overall effect (default 0.5)")
    g.add_argument("--gamma", type=float, help="consistency risk; target CP = 1 - gamma (default 0.2)")
    g.add_argument("--method", choices=("analytic", "exact", "mc"),
                   help="analytic (normal approximation), exact (binary enumeration) or mc")
    g.add_argument("--reps", type=int, help="Monte Carlo replications (default 10000)")
    g.add_argument("--tie-policy", choices=("strict", "inclusive"),
                   help="binary regional sign test: > 0 (strict, default) or >= 0")
    g.add_argument("--split", choices=("total", "per_arm"),
                   help="regional integer sizes: split each regional total into arms (total, default) "
                        "or apportion each arm separately (per_arm)")
    g.add_argument("--sigma-source", choices=("design", "actual"),
                   help="two studies: sd of D from d/(z_a+z_b) (design) or integer N (actual)")


def _add_allocation(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("regional allocation")
    g.add_argument("--fk", type=float, help="criterion 1: fraction of the region of interest")
    g.add_argument("--fk2", type=float, help="criterion 1, two studies: study-2 fraction (default --fk)")
    g.add_argument("--k", type=int, help="criterion 2: number of regions")
    g.add_argument("--f1", type=float, help="criterion 2: region-1 fraction, others share the rest equally")
    g.add_argument("--fractions", type=_float_list, help="criterion 2: explicit fractions, e.g. 0.2,0.3,0.5")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mrct",
        description="Regional consistency probabilities and regional sample fractions for MRCTs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample-size", help="overall per-arm sample sizes")
    _add_endpoint(p)
    _add_design(p)
    _add_global(p)

    p = sub.add_parser("cp", help="consistency probability of an allocation")
    _add_endpoint(p)
    _add_design(p)
    _add_consistency(p)
    _add_allocation(p)
    _add_global(p)

    p = sub.add_parser("solve-fraction", help="smallest regional fraction reaching 1 - gamma")
    _add_endpoint(p)
    _add_design(p)
    _add_consistency(p)
    p.add_argument("--k", type=int, help="criterion 2: number of regions")
    p.add_argument("--pair-c", action="store_true",
                   help="two homogeneous studies: solve c = 1/f1 + 1/f2 and list fraction pairs")
    p.add_argument("--pair-f1", type=float, help="two studies: study-1 fraction; solve the study-2 fraction")
    p.add_argument("--f1-grid", type=_float_list, help="study-1 fractions for --pair-c")
    _add_global(p)

    p = sub.add_parser("pairs", help="fraction pairs sharing c = 1/f1 + 1/f2")
    _add_design(p)
    p.add_argument("--pi", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--c", type=float, help="value of c (default: solved from alpha, power, pi, gamma)")
    p.add_argument("--f1-grid", type=_float_list, help="study-1 fractions (default 0.01 to 2/c by 0.01)")
    _add_global(p)

    p = sub.add_parser("simulate", help="empirical CP by trial simulation")
    _add_endpoint(p)
    _add_design(p)
    _add_consistency(p)
    _add_allocation(p)
    _add_global(p)

    p = sub.add_parser("reproduce", help="regenerate a standard scenario table or example as CSV")
    which = p.add_mutually_exclusive_group()
    which.add_argument("--table", type=int, help="scenario table 1-6")
    which.add_argument("--example", type=int, help="worked example 1-4")
    which.add_argument("--section4", action="store_true", help="two-trial lipid-lowering program")
    p.add_argument("--reps", type=int, help="replications (tables: 10000, examples: 100000)")
    p.add_argument("--no-simulate", action="store_true", help="tables: skip the empirical CP column")
    _add_global(p)
    return parser


def _subparser_keys(parser: argparse.ArgumentParser, command: str) -> set[str]:
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    return {a.dest for a in sub.choices[command]._actions if a.dest not in ("help",)} - _OUTPUT_KEYS


# ---------------------------------------------------------------------------
# configuration


def load_config(path: Path) -> dict:
    """Read a TOML/JSON config (or a JSON run record) into a flat dict.

    Raises:
        UsageError: unreadable file, wrong schema version.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            data = tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise UsageError(f"cannot parse config {path}: {exc}") from exc
    if isinstance(data, dict) and "config" in data and "command" in data:
        data = data["config"]  # a saved run record
    if not isinstance(data, dict):
        raise UsageError("config must be a table/object")
    data = {k.replace("-", "_"): v for k, v in data.items()}
    schema = data.pop("schema", None)
    if schema != CONFIG_SCHEMA:
        raise UsageError(f"config needs schema = {CONFIG_SCHEMA}, got {schema!r}")
    return data


def resolve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    """Flags over config over defaults, restricted to the command's keys."""
    keys = _subparser_keys(parser, args.command)
    cfg: dict = {}
    if getattr(args, "config", None) is not None:
        cfg = load_config(args.config)
        unknown = sorted(set(cfg) - keys)
        if unknown:
            raise UsageError(f"unknown config key(s) for {args.command}: {', '.join(unknown)}")
    out = {}
    for key in sorted(keys):
        value = DEFAULTS.get(key)
        if key in cfg:
            value = cfg[key]
        flag = getattr(args, key, None)
        if flag is not None and flag is not False:
            value = flag
        out[key] = value
    return out


# ---------------------------------------------------------------------------
# building objects from the resolved config


def _params(cfg: dict) -> DesignParams:
    return DesignParams(
        alpha=cfg["alpha"],
        beta=round(1.0 - cfg["power"], 12),
        pi=cfg.get("pi", DEFAULTS["pi"]),
        gamma=cfg.get("gamma", DEFAULTS["gamma"]),
        r=cfg.get("ratio", 1.0),
    )


def _endpoint(cfg: dict, study: int, required: bool):
    sfx = "" if study == 1 else "2"

    def get(name):
        v = cfg.get(name + sfx)
        return cfg.get(name) if v is None else v

    if cfg["endpoint"] == "binary":
        p_t, p_c = get("p_t"), get("p_c")
        if p_t is None or p_c is None:
            if required:
                raise UsageError("binary endpoint needs --p-t and --p-c")
            return None
        return BinaryEndpoint(p_t, p_c)
    d = get("d")
    if d is None:
        if required:
            raise UsageError("normal endpoint needs --d (and --sigma2-t/--sigma2-c)")
        return None
    s_t = get("sigma2_t")
    s_c = get("sigma2_c")
    s_t = 1.0 if s_t is None else s_t
    s_c = s_t if s_c is None else s_c
    return NormalEndpoint(s_t, s_c, d)


def _plan(cfg: dict, params: DesignParams, study: int = 1, required: bool = True):
    ep = _endpoint(cfg, study, required)
    if ep is None:
        # unit-effect placeholder; design-exact analytic CPs do not depend on it
        ep = NormalEndpoint(1.0, 1.0, 1.0)
    return overall_sample_size(ep, params)


def _two_plan(cfg: dict, params: DesignParams, required: bool) -> c2.TwoStudyPlan:
    return c2.TwoStudyPlan(_plan(cfg, params, 1, required), _plan(cfg, params, 2, required), params)


def _allocation(cfg: dict) -> RegionAllocation:
    if cfg.get("fractions"):
        return RegionAllocation(tuple(cfg["fractions"]))
    k = cfg.get("k")
    if k is None:
        raise UsageError("criterion 2 needs --k, --fractions, or --k with --f1")
    if cfg.get("f1") is not None:
        return RegionAllocation.equal_rest(cfg["f1"], k)
    return RegionAllocation.equal(k)


def _roi_allocations(cfg: dict) -> tuple[RegionAllocation, RegionAllocation]:
    fk = cfg.get("fk")
    if fk is None:
        raise UsageError("criterion 1 needs --fk")
    fk2 = fk if cfg.get("fk2") is None else cfg["fk2"]
    return RegionAllocation.region_of_interest(fk), RegionAllocation.region_of_interest(fk2)


def _estimate_dict(est: c1.CpEstimate) -> dict:
    return {k: v for k, v in vars(est).items() if v is not None}


def _simulate(cfg: dict, params: DesignParams) -> dict:
    if cfg.get("seed") is None:
        raise UsageError("Monte Carlo needs --seed")
    crit = cfg["criterion"]
    if crit == 1:
        a1, a2 = _roi_allocations(cfg)
    else:
        a1 = a2 = _allocation(cfg)
    if cfg["studies"] == 1:
        scenario = OneStudyScenario(_plan(cfg, params), a1, criterion=crit)
    else:
        plan = _two_plan(cfg, params, required=True)
        scenario = TwoStudyScenario(plan.study1, plan.study2, a1, a2, criterion=crit)
    sim = SimConfig(
        scenario, params, replications=cfg["reps"], seed=cfg["seed"],
        tie_policy=cfg["tie_policy"], threads=resolve_threads(cfg.get("threads")), split=cfg["split"],
    )
    res = empirical_cp(sim)
    return {
        "cp": res.empirical_cp,
        "mc_se": res.mc_se,
        "rejections": res.rejections,
        "consistent": res.consistent_given_rejection,
        "replications": res.replications,
        "method": "monte_carlo",
    }


# ---------------------------------------------------------------------------
# commands; each returns (results dict, text lines, csv rows or None)


def cmd_sample_size(cfg: dict):
    params = _params(cfg)
    results = {}
    lines = []
    for s in range(1, cfg["studies"] + 1):
        plan = _plan(cfg, params, s, required=True)
        results[f"study{s}"] = {"n_t": plan.n_t, "n_c": plan.n_c, "n": plan.n}
        tag = f"study {s}: " if cfg["studies"] == 2 else ""
        lines.append(f"{tag}N_t={plan.n_t} N_c={plan.n_c} N={plan.n}")
    return results, lines, [dict(study=k, **v) for k, v in results.items()]


def cmd_cp(cfg: dict):
    params = _params(cfg)
    method, crit, studies = cfg["method"], cfg["criterion"], cfg["studies"]
    if method == "mc":
        res = _simulate(cfg, params)
        return res, [f"CP={res['cp']:.4f} (mc_se {res['mc_se']:.4f}, {res['rejections']} rejections)"], [res]
    if method == "exact":
        if crit != 2 or cfg["endpoint"] != "binary":
            raise UsageError("exact mode is for criterion 2 with a binary endpoint")
        alloc = _allocation(cfg)
        if studies == 1:
            est = c1.cp_criterion2_binary(
                _plan(cfg, params), alloc, params, "exact", tie_policy=cfg["tie_policy"], split=cfg["split"]
            )
        else:
            est = c2.cp_criterion2_pooled_binary(
                _two_plan(cfg, params, True), alloc, alloc, "exact", tie_policy=cfg["tie_policy"],
                split=cfg["split"],
            )
    elif crit == 1 and studies == 1:
        if cfg.get("fk") is None:
            raise UsageError("criterion 1 needs --fk")
        est = c1.cp_criterion1(params, cfg["fk"])
    elif crit == 1:
        fk = cfg.get("fk")
        if fk is None:
            raise UsageError("criterion 1 needs --fk")
        pair = c2.FractionPair(fk, fk if cfg.get("fk2") is None else cfg["fk2"])
        est = c2.cp_criterion1_pooled(_two_plan(cfg, params, False), pair, sigma_source=cfg["sigma_source"])
    elif studies == 1:
        est = c1.cp_criterion2(params, _allocation(cfg))
    else:
        alloc = _allocation(cfg)
        est = c2.cp_criterion2_pooled(_two_plan(cfg, params, False), alloc, alloc, cfg["sigma_source"])
    res = {"cp": est.value, **_estimate_dict(est)}
    return res, [f"CP={est.value:.4f} ({est.method})"], [res]


def _solution_dict(sol: c1.FractionSolution) -> dict:
    return {"fraction": sol.fraction, "percent": round(sol.percent, 1), "root": sol.root, "cp": sol.cp,
            "target": sol.target}


def _pairs_output(c: float, grid) -> tuple[list[dict], list[str]]:
    rows, lines = [], []
    for pair in c2.enumerate_fraction_pairs(c, grid):
        rows.append({"f1": round(pair.f1, 3), "f2": round(pair.f2, 3), "c": c})
        lines.append(f"  f1={fmt_fraction(pair.f1)}  f2={fmt_fraction(pair.f2)}")
    return rows, lines


def cmd_solve_fraction(cfg: dict):
    params = _params(cfg)
    crit, studies, method = cfg["criterion"], cfg["studies"], cfg["method"]
    if crit == 1 and studies == 1:
        sol = c1.solve_fk_criterion1(params)
    elif crit == 1 and cfg.get("pair_c"):
        hom = c2.solve_c_homogeneous(params)
        rows, lines = _pairs_output(hom.c, cfg.get("f1_grid"))
        res = {"c": hom.c, "c_root": hom.c_root, "f_equal": hom.f_equal, "cp": hom.cp, "pairs": rows}
        head = [f"c={hom.c:.3f} (equal fractions {fmt_fraction(hom.f_equal)}, CP {hom.cp:.4f})"]
        return res, head + lines, rows
    elif crit == 1 and cfg.get("pair_f1") is not None:
        plan = _two_plan(cfg, params, False)
        sol = c2.solve_pair_partner(plan, cfg["pair_f1"], sigma_source=cfg["sigma_source"])
        res = {"f1": cfg["pair_f1"], **_solution_dict(sol)}
        return res, [f"f1={fmt_fraction(cfg['pair_f1'])}  f2={fmt_fraction(sol.fraction)}  CP={sol.cp:.4f}"], [res]
    elif crit == 1:
        sol = c2.solve_fk_pooled_equal(_two_plan(cfg, params, False), sigma_source=cfg["sigma_source"])
    else:
        k = cfg.get("k")
        if k is None:
            raise UsageError("criterion 2 needs --k")
        if method == "analytic":
            if studies == 1:
                sol = c1.solve_f1_criterion2(params, k)
            else:
                sol = c2.solve_f1_criterion2_pooled(_two_plan(cfg, params, False), k,
                                                    sigma_source=cfg["sigma_source"])
        else:
            if cfg["endpoint"] != "binary":
                raise UsageError("exact/mc fraction solving is for binary endpoints; use --method analytic")
            mode = "exact" if method == "exact" else "monte_carlo"
            if mode == "monte_carlo" and cfg.get("seed") is None:
                raise UsageError("Monte Carlo needs --seed")
            kw = dict(mode=mode, replications=cfg["reps"], seed=cfg.get("seed"), tie_policy=cfg["tie_policy"],
                      threads=resolve_threads(cfg.get("threads")), split=cfg["split"])
            if studies == 1:
                sol = c1.solve_f1_criterion2_binary(_endpoint(cfg, 1, True), params, k, **kw)
            else:
                sol = c2.solve_f1_criterion2_pooled_binary(_two_plan(cfg, params, True), k, **kw)
    res = _solution_dict(sol)
    return res, [f"fraction={fmt_fraction(sol.fraction)}  CP={sol.cp:.4f} (target {sol.target:.3f})"], [res]


def cmd_pairs(cfg: dict):
    c = cfg.get("c")
    if c is None:
        c = c2.solve_c_homogeneous(_params(cfg)).c
    rows, lines = _pairs_output(c, cfg.get("f1_grid"))
    return {"c": c, "pairs": rows}, [f"c={c:.3f}"] + lines, rows


def cmd_simulate(cfg: dict):
    res = _simulate(cfg, _params(cfg))
    line = (f"empirical CP={res['cp']:.4f}  mc_se={res['mc_se']:.4f}  "
            f"rejections={res['rejections']}/{res['replications']}")
    return res, [line], [res]


def cmd_reproduce(cfg: dict):
    seed = 0 if cfg.get("seed") is None else cfg["seed"]
    threads = resolve_threads(cfg.get("threads"))
    if cfg.get("table") is not None:
        if cfg["table"] not in scenarios.TABLE_IDS:
            raise UsageError(f"unknown table {cfg['table']}; choose from {scenarios.TABLE_IDS}")
        rows = scenarios.reproduce_table(cfg["table"], seed, cfg.get("reps") or 10_000, threads,
                                         simulate=not cfg.get("no_simulate"))
    elif cfg.get("example") is not None:
        if cfg["example"] not in scenarios.EXAMPLE_IDS:
            raise UsageError(f"unknown example {cfg['example']}; choose from {scenarios.EXAMPLE_IDS}")
        rows = scenarios.reproduce_example(cfg["example"], seed, cfg.get("reps") or 100_000, threads)
    elif cfg.get("section4"):
        rows = scenarios.reproduce_program()
    else:
        raise UsageError("reproduce needs --table, --example or --section4")
    return {"rows": rows}, None, rows


COMMANDS = {
    "sample-size": cmd_sample_size,
    "cp": cmd_cp,
    "solve-fraction": cmd_solve_fraction,
    "pairs": cmd_pairs,
    "simulate": cmd_simulate,
    "reproduce": cmd_reproduce,
}


# ---------------------------------------------------------------------------
# output


def _csv_text(rows: list[dict]) -> str:
    import io

    buf = io.StringIO()
    fields: list[str] = []
    for r in rows:
        fields.extend(k for k in r if k not in fields)
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if v is None else v) for k, v in r.items() if not isinstance(v, (list, dict))})
    return buf.getvalue()


def write_csv(path: Path, rows: list[dict], append: bool = False) -> None:
    text = _csv_text(rows)
    if append and path.exists() and path.stat().st_size > 0:
        text = text.split("\n", 1)[1]  # header already present
        with path.open("a", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        path.write_text(text, encoding="utf-8", newline="")


def run_record(command: str, cfg: dict, results: dict) -> dict:
    return {
        "command": command,
        "config": {"schema": CONFIG_SCHEMA, **cfg},
        "results": results,
        "seed": cfg.get("seed"),
        "version": _version(),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args, parser)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            results, lines, rows = COMMANDS[args.command](cfg)
        for w in caught:
            print(f"note: {w.message}", file=sys.stderr)
    except UnattainableTarget as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNATTAINABLE
    except EnumerationBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except DegenerateSimulation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except IntegrationError as exc:  # pragma: no cover - numerical failure
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if args.out is not None and rows:
        write_csv(args.out, rows, append=args.command == "simulate")
    if args.json:
        print(json.dumps(run_record(args.command, cfg, results), indent=2, default=float))
    elif lines is None:
        if args.out is None:
            sys.stdout.write(_csv_text(rows))
        else:
            print(f"wrote {len(rows)} rows to {args.out}")
    else:
        print("\n".join(lines))
    params_warnings = []
    if {"alpha", "power"} <= cfg.keys():
        try:
            params_warnings = _params(cfg).warnings
        except ValueError:
            pass
    for w in params_warnings:
        print(f"note: {w}", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
