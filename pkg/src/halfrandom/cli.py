"""Command-line entry point.

Every subcommand reads its settings from built-in defaults, then an optional
``--config`` file, then explicit flags (later sources win). ``--print-config``
prints the effective settings in the config-file format and exits.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import asdict, dataclass, field, fields

from .errors import InvalidArgument, InvalidParams, StrategyError, UnsupportedRecord, UnsupportedSize
from .experiments import TrialSpec, bias_sweep, derive_trial_seed, distribution_equivalence_test, run_trials
from .game import GameConfig, play_game, read_record, validate_record, write_record
from .graph_core import read_snapshot
from .properties import PropertyId, check_property
from .strategies import make_breaker, make_maker
from .structure import (AnalysisParams, assemble_hamilton_cycle, bad_count_bound, build_saviour_digraph,
                        classify_vertices, extract_path_cover, maker_containment_check,
                        verify_digraph_invariants)

SCHEMA = "# halfrandom-config v1"
DOMAIN_ERRORS = (InvalidArgument, InvalidParams, UnsupportedSize, UnsupportedRecord, StrategyError, OSError)


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    n: int = 500
    a: int = 1
    b: int = 1
    maker: str = "uniform"
    breaker: str = "isolation:eps=0.3"
    property: str = "min_degree:1"
    trials: int = 100
    seed: int | None = None
    jobs: int = 1
    paper_horizon: float | None = None
    horizon: int | None = None
    max_rounds: int | None = None
    stop: str = "exhausted"
    a_grid: list = field(default_factory=lambda: [1, 2, 3, 4, 5, 6, 7, 8])
    games: int = 100000
    prefix_len: int = 4
    alpha: float = 0.05
    k: int = 2
    eps: float | None = None
    assemble: bool = False
    record: str | None = None
    graph: str | None = None
    check: list = field(default_factory=lambda: ["hamiltonian"])
    out: str | None = None

    def dumps(self) -> str:
        lines = [SCHEMA]
        for f in fields(self):
            lines.append(f"{f.name} = {json.dumps(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, base: "ExperimentConfig | None" = None) -> "ExperimentConfig":
        cfg = asdict(base or cls())
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines or lines[0] != SCHEMA:
            raise UsageError(f"config must start with the header '{SCHEMA}'")
        types = {f.name: f.type for f in fields(cls)}
        known = set(types)
        for ln in lines[1:]:
            if ln.startswith("#"):
                continue
            key, sep, value = ln.partition("=")
            key = key.strip()
            if not sep or key not in known:
                raise UsageError(f"bad config line: {ln!r}")
            try:
                cfg[key] = json.loads(value.strip())
            except json.JSONDecodeError as exc:
                raise UsageError(f"bad value for {key}: {value.strip()!r}") from exc
            if not _type_ok(cfg[key], types[key]):
                raise UsageError(f"{key} must be of type {types[key]}, got {value.strip()}")
        return cls(**cfg)


def _type_ok(value, annotation: str) -> bool:
    allowed = {name.strip() for name in annotation.split("|")}
    if value is None:
        return "None" in allowed
    if isinstance(value, bool):
        return "bool" in allowed
    if isinstance(value, int):
        return bool(allowed & {"int", "float"})
    checks = {"float": float, "str": str, "list": list}
    return any(isinstance(value, checks[name]) for name in allowed if name in checks)


def _paper_horizon(text: str) -> float:
    key, sep, value = text.partition("=")
    if sep and key.strip() != "alpha":
        raise argparse.ArgumentTypeError("expected alpha=<value>")
    try:
        return float(value if sep else key)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad alpha in {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _bool(text: str) -> bool:
    if text.lower() in ("1", "true", "yes"):
        return True
    if text.lower() in ("0", "false", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    sup = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False, argument_default=sup)
    common.add_argument("--config", help="config file in the halfrandom-config v1 format")
    common.add_argument("--print-config", action="store_true", help="print the effective config and exit")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output path (record file, or prefix for .csv/.json)")

    game = argparse.ArgumentParser(add_help=False, argument_default=sup)
    game.add_argument("--n", type=int)
    game.add_argument("--a", type=int)
    game.add_argument("--b", type=int)
    game.add_argument("--maker", help="uniform | permutation")
    game.add_argument("--breaker", help="isolation:eps=<x> | random | smallest | none")
    game.add_argument("--property", help="min_degree:<k> | connected | k_connected:<k> | hamiltonian | hamilton_connected")

    mc = argparse.ArgumentParser(add_help=False, argument_default=sup)
    mc.add_argument("--trials", type=int)
    mc.add_argument("--jobs", type=int)
    mc.add_argument("--paper-horizon", dest="paper_horizon", type=_paper_horizon, metavar="alpha=<x>")
    mc.add_argument("--horizon", type=int, help="evaluate the win after this many rounds")

    parser = argparse.ArgumentParser(prog="halfrandom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common, game], help="play one game and write its record")
    p.add_argument("--max-rounds", dest="max_rounds", type=int, default=sup)
    p.add_argument("--stop", choices=["exhausted", "property", "round-cap"], default=sup)

    sub.add_parser("trials", parents=[common, game, mc], help="estimate Maker's win probability")

    p = sub.add_parser("sweep", parents=[common, game, mc], help="win probability across Maker biases")
    p.add_argument("--a-grid", dest="a_grid", type=_int_list, default=sup, metavar="1,2,...")

    p = sub.add_parser("analyze", parents=[common], help="structural analysis of a record file")
    p.add_argument("--record", default=sup)
    p.add_argument("--alpha", type=float, default=sup)
    p.add_argument("--k", type=int, default=sup)
    p.add_argument("--eps", type=float, default=sup)
    p.add_argument("--assemble", type=_bool, nargs="?", const=True, default=sup)

    p = sub.add_parser("props", parents=[common], help="check properties of a graph snapshot")
    p.add_argument("--graph", default=sup)
    p.add_argument("--check", action="append", default=sup)

    p = sub.add_parser("equiv", parents=[common], help="uniform versus permutation Maker play-sequences")
    p.add_argument("--n", type=int, default=sup)
    p.add_argument("--breaker", default=sup)
    p.add_argument("--games", type=int, default=sup)
    p.add_argument("--prefix-len", dest="prefix_len", type=int, default=sup)

    p = sub.add_parser("verify", parents=[common], help="invariant audit over random games")
    p.add_argument("--n", type=int, default=sup)
    p.add_argument("--games", type=int, default=sup)
    p.add_argument("--breaker", default=sup)
    p.add_argument("--alpha", type=float, default=sup)
    p.add_argument("--a-grid", dest="a_grid", type=_int_list, default=sup, metavar="1,2,...")
    return parser


def resolve_config(ns: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if getattr(ns, "config", None):
        with open(ns.config) as fh:
            cfg = ExperimentConfig.loads(fh.read())
    values = asdict(cfg)
    for f in fields(ExperimentConfig):
        if hasattr(ns, f.name):
            values[f.name] = getattr(ns, f.name)
    if isinstance(values["check"], list):
        flat = []
        for item in values["check"]:
            flat.extend(x for x in str(item).split(",") if x)
        values["check"] = flat
    return ExperimentConfig(**values)


def _seed(cfg: ExperimentConfig) -> int:
    if cfg.seed is None:
        cfg.seed = random.SystemRandom().getrandbits(64)
        print(f"seed={cfg.seed}", file=sys.stderr)
    return cfg.seed


def _trial_spec(cfg: ExperimentConfig) -> TrialSpec:
    return TrialSpec(GameConfig(cfg.n, cfg.a, cfg.b), cfg.maker, cfg.breaker, PropertyId.parse(cfg.property),
                     cfg.trials, _seed(cfg), cfg.horizon, cfg.paper_horizon)


def _emit(cfg: ExperimentConfig, csv_text: str, json_text: str, out) -> None:
    if cfg.out:
        with open(cfg.out + ".csv", "w") as fh:
            fh.write(csv_text)
        with open(cfg.out + ".json", "w") as fh:
            fh.write(json_text)
    else:
        out.write(json_text)


def cmd_simulate(cfg, out):
    prop = PropertyId.parse(cfg.property) if cfg.stop == "property" else None
    config = GameConfig(cfg.n, cfg.a, cfg.b, cfg.max_rounds, cfg.stop, prop)
    record = play_game(config, make_maker(cfg.maker), make_breaker(cfg.breaker), _seed(cfg))
    if cfg.out:
        write_record(record, cfg.out)
    else:
        out.write(record.to_text())


def cmd_trials(cfg, out):
    report = run_trials(_trial_spec(cfg), cfg.jobs)
    _emit(cfg, report.to_csv(), report.to_json(), out)


def cmd_sweep(cfg, out):
    report = bias_sweep(_trial_spec(cfg), cfg.a_grid, cfg.jobs)
    _emit(cfg, report.to_csv(), report.to_json(), out)


def analysis_report(record, alpha: float, k: int = 2, eps: float | None = None, assemble: bool = False) -> dict:
    params = AnalysisParams(alpha, record.config.n, k, eps)
    cls = classify_vertices(record, params)
    d = build_saviour_digraph(record, params, cls)
    audit = verify_digraph_invariants(d, record.maker_graph(cls.t))
    report = {
        "validation": asdict(validate_record(record)),
        "t": cls.t,
        "clamped": cls.clamped,
        "bad": sorted(cls.bad),
        "bad_bound": bad_count_bound(params, cls.t, record.config.b),
        "candidates": {str(v): {"kind": ev.kind, "round": ev.round} for v, ev in sorted(cls.candidates.items())},
        "digraph": {"arcs": [list(a) for a in d.arcs],
                    "invariants": {"passed": audit.passed, "violated": audit.violated,
                                   "witness": audit.witness}},
    }
    if k == 2:
        cover = extract_path_cover(d, cls)
        report["path_cover"] = {"ok": cover.ok, "deficient": cover.deficient, "paths": cover.paths,
                                "violation": cover.check(cls.bad, d) if cover.ok else None}
    try:
        res = maker_containment_check(record, range(record.config.a * cls.t), params, cls)
        report["containment"] = {"holds": res.holds, "witness": res.witness, "checked": res.checked}
    except UnsupportedRecord as exc:
        report["containment"] = {"unsupported": str(exc)}
    if assemble:
        res = assemble_hamilton_cycle(record, AnalysisParams(alpha, record.config.n, 2, eps))
        report["assembly"] = {"ok": res.ok, "cycle": res.cycle, "stage": res.stage, "reason": res.reason}
    return report


def cmd_analyze(cfg, out):
    if not cfg.record:
        raise UsageError("analyze needs --record")
    record = read_record(cfg.record)
    text = json.dumps(analysis_report(record, cfg.alpha, cfg.k, cfg.eps, cfg.assemble), indent=2) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)


def cmd_props(cfg, out):
    if not cfg.graph:
        raise UsageError("props needs --graph")
    g = read_snapshot(cfg.graph)
    for name in cfg.check:
        p = PropertyId.parse(name)
        out.write(f"{p} {'true' if check_property(g, p, backtracking=True) else 'false'}\n")


def cmd_equiv(cfg, out):
    breaker = cfg.breaker
    rep = distribution_equivalence_test(cfg.n, breaker, cfg.games, cfg.prefix_len, _seed(cfg))
    out.write(json.dumps(rep.summary(), indent=2, sort_keys=True) + "\n")


def verify_games(n: int, games: int, seed: int, breaker: str, alpha: float, a_grid) -> dict:
    """Play random games and audit every deterministic structural invariant."""
    params = AnalysisParams(alpha, n, 2)
    failures = []
    counts = {"games": 0, "bad_vertices": 0, "candidates": 0, "arcs": 0, "covers": 0}
    for i in range(games):
        s = derive_trial_seed(seed, i)
        a = a_grid[random.Random(s).randrange(len(a_grid))]
        maker = "permutation" if i % 2 == 0 else "uniform"
        config = GameConfig(n, a, 1, max_rounds=params.t, stop="round-cap")
        rec = play_game(config, make_maker(maker), make_breaker(breaker), s)
        problems = []
        v = validate_record(rec)
        if not v.valid:
            problems.append(f"record: {v.reason}")
        cls = classify_vertices(rec, params)
        if len(cls.bad) > bad_count_bound(params, cls.t):
            problems.append("bad count bound")
        d = build_saviour_digraph(rec, params, cls)
        audit = verify_digraph_invariants(d, rec.maker_graph(cls.t))
        if not audit.passed:
            problems.append(f"digraph {audit.violated}")
        cover = extract_path_cover(d, cls)
        if cover.ok:
            counts["covers"] += 1
            bad = cover.check(cls.bad, d)
            if bad:
                problems.append(f"path cover: {bad}")
        cc = maker_containment_check(rec, range(a * cls.t), params, cls)
        if not cc.holds:
            problems.append(f"containment {cc.witness}")
        counts["games"] += 1
        counts["bad_vertices"] += len(cls.bad)
        counts["candidates"] += len(cls.candidates)
        counts["arcs"] += len(d.arcs)
        if problems:
            failures.append({"game": i, "seed": s, "a": a, "maker": maker, "problems": problems})
    return {"n": n, "alpha": alpha, "t": params.t, **counts, "failures": failures}


def cmd_verify(cfg, out):
    n = cfg.n
    summary = verify_games(n, cfg.games, _seed(cfg), cfg.breaker, cfg.alpha, cfg.a_grid)
    out.write(json.dumps(summary, indent=2) + "\n")
    return 1 if summary["failures"] else 0


COMMANDS = {
    "simulate": cmd_simulate, "trials": cmd_trials, "sweep": cmd_sweep, "analyze": cmd_analyze,
    "props": cmd_props, "equiv": cmd_equiv, "verify": cmd_verify,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(ns)
        if getattr(ns, "print_config", False):
            out.write(cfg.dumps())
            return 0
        return COMMANDS[ns.command](cfg, out) or 0
    except UsageError as exc:
        print(f"halfrandom: usage error: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f"halfrandom: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
