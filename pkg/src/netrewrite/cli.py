"""Command-line entry point: ``netrewrite <subcommand> ...``.

Exit codes: 0 success (empty results included), 1 usage or configuration
error, 2 bad input, 3 backend failure.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from netrewrite.boolexpr import CircuitSyntaxError
from netrewrite.detectors import DETECTORS, get_detector, match_details, verdict
from netrewrite.fixtures import FIXTURES, fixture_text
from netrewrite.llm.backends import BackendConfig, BackendError, ConfigError, make_backend
from netrewrite.netlist import Netlist, NetlistError, characterize, emit_netlist, parse_netlist
from netrewrite.pipeline import (
    ALL_STRATEGIES,
    DEFAULT_ATTEMPTS,
    DEFAULT_INPUT_CAP,
    DEFAULT_REPEATS,
    DEFAULT_SAMPLE_COUNT,
    CampaignTarget,
    CoverageError,
    DictionaryValidationError,
    MappingStrategy,
    build_dictionary,
    load_dictionary,
    pirate_netlist,
    run_campaign,
    save_dictionary,
    variant_seed,
    verify_equivalence,
)

log = logging.getLogger("netrewrite")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_BACKEND = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


# -- configuration -------------------------------------------------------------


@dataclass
class RunConfig:
    subcommand: str = ""
    netlists: list[str] = field(default_factory=list)
    backend: dict = field(default_factory=lambda: {"kind": "oracle"})
    M: int = DEFAULT_ATTEMPTS
    N: int = DEFAULT_REPEATS
    seed: int = 0
    strategies: list[str] = field(default_factory=lambda: ["all"])
    detectors: dict = field(default_factory=lambda: {name: {} for name in DETECTORS})
    dictionary: str | None = None
    output_dir: str = "runs"
    workers: int = 1
    input_cap: int = DEFAULT_INPUT_CAP
    sample_count: int = DEFAULT_SAMPLE_COUNT

    def validate(self) -> None:
        if self.M < 1:
            raise ConfigError("M must be >= 1")
        if self.N < 0:
            raise ConfigError("N must be >= 0")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        self.strategy_list()
        self.detector_list()

    def strategy_list(self) -> list[MappingStrategy]:
        if any(s.lower() == "all" for s in self.strategies):
            return list(ALL_STRATEGIES)
        try:
            return [MappingStrategy.parse(s) for s in self.strategies]
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def detector_list(self):
        out = []
        for name, opts in self.detectors.items():
            try:
                det = get_detector(name)
            except KeyError as exc:
                raise ConfigError(exc.args[0]) from None
            opts = dict(opts or {})
            try:
                out.append(det.with_options(opts.pop("threshold", None), **opts))
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        return out

    def snapshot(self) -> dict:
        return dict(self.__dict__)


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path}: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config {path}: top level must be a mapping")
    unknown = set(data) - set(RunConfig.__dataclass_fields__)
    if unknown:
        raise ConfigError(f"config {path}: unknown keys {sorted(unknown)}")
    return data


def make_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(**load_config(getattr(args, "config", None)))
    cfg.subcommand = args.command
    for name in ("M", "N", "seed", "workers", "input_cap", "sample_count", "dictionary"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "output_dir", None):
        cfg.output_dir = args.output_dir
    if getattr(args, "netlists", None):
        cfg.netlists = list(args.netlists)
    if getattr(args, "strategy", None):
        cfg.strategies = [args.strategy]
    backend = dict(cfg.backend)
    for key in ("kind", "endpoint", "model", "api_key_env", "script_path"):
        value = getattr(args, f"backend_{key}", None)
        if value is not None:
            backend[key] = value
    cfg.backend = backend
    cfg.validate()
    return cfg


def make_run_dir(cfg: RunConfig, explicit: str | None = None) -> Path:
    if explicit:
        run_dir = Path(explicit)
    else:
        stamp = _dt.datetime.now().strftime("%Y%m%d-%H%M%S")
        base = Path(cfg.output_dir) / f"{cfg.subcommand}-{stamp}"
        run_dir, k = base, 1
        while run_dir.exists():
            k += 1
            run_dir = base.with_name(f"{base.name}-{k}")
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.yaml").write_text(
        yaml.safe_dump(cfg.snapshot(), sort_keys=False), encoding="utf-8"
    )
    return run_dir


# -- input helpers ---------------------------------------------------------------


def read_source(arg: str) -> tuple[str, str]:
    """(name, text) for a path or ``fixture:NAME``."""
    if arg.startswith("fixture:"):
        name = arg.split(":", 1)[1]
        if name not in FIXTURES:
            raise InputError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
        return name, fixture_text(name)
    path = Path(arg)
    try:
        return path.stem, path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{arg}: {exc.strerror or exc}") from None


def read_netlist_arg(arg: str) -> tuple[str, str, Netlist]:
    name, text = read_source(arg)
    try:
        return name, text, parse_netlist(text)
    except NetlistError as exc:
        raise InputError(f"{arg}: {exc}") from None


def read_dictionary_arg(path: str):
    try:
        return load_dictionary(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    except (DictionaryValidationError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


# -- subcommands -------------------------------------------------------------------


def cmd_characterize(args) -> int:
    netlists = [read_netlist_arg(p)[2] for p in args.netlists]
    counts: dict = {}
    for nl in netlists:
        for gt, n in nl.gate_counts().items():
            counts[gt] = counts.get(gt, 0) + n
    rows = [(gt.op.value, gt.fan_in, counts[gt]) for gt in characterize(*netlists)]
    if args.json:
        print(json.dumps([{"operator": o, "fan_in": f, "count": c} for o, f, c in rows], indent=2))
        return EXIT_OK
    print(f"{'operator':<9}{'fan_in':>7}{'count':>7}")
    for op, fan_in, count in rows:
        print(f"{op:<9}{fan_in:>7}{count:>7}")
    return EXIT_OK


def cmd_transform(args) -> int:
    cfg = make_config(args)
    if not cfg.netlists:
        raise UsageError("no netlists given")
    netlists = [read_netlist_arg(p)[2] for p in cfg.netlists]
    backend = make_backend(BackendConfig.from_dict(cfg.backend))
    run_dir = make_run_dir(cfg, args.run_dir)
    dictionary = build_dictionary(
        characterize(*netlists),
        backend,
        cfg.M,
        workers=cfg.workers,
        transcript_dir=run_dir / "transcripts",
    )
    out = Path(args.out) if args.out else run_dir / "dictionary.json"
    save_dictionary(dictionary, out)
    aborted = 0
    for s in dictionary.sessions:
        line = f"{s.gate_type!s:<8} {s.operator_set!s:<12} {s.status:<10} attempts={s.attempts_used}"
        if s.error:
            line += f"  ({s.error})"
            aborted += 1
        print(line)
    (run_dir / "sessions.json").write_text(
        json.dumps([s.summary() for s in dictionary.sessions], indent=2) + "\n", encoding="utf-8"
    )
    print(f"{len(dictionary)} entries written to {out}")
    return EXIT_BACKEND if aborted else EXIT_OK


def cmd_pirate(args) -> int:
    cfg = make_config(args)
    name, _, netlist = read_netlist_arg(args.netlist)
    if not cfg.dictionary:
        raise UsageError("pirate needs --dictionary")
    dictionary = read_dictionary_arg(cfg.dictionary)
    run_dir = make_run_dir(cfg, args.run_dir)
    results = []
    for strategy in cfg.strategy_list():
        for r in range(1, cfg.N + 1):
            rng = random.Random(variant_seed(cfg.seed, name, strategy, r))
            try:
                pirated = pirate_netlist(netlist, dictionary, strategy, rng)
            except CoverageError as exc:
                raise InputError(str(exc)) from None
            path = run_dir / f"{name}_{strategy.value}_{r}.v"
            path.write_text(emit_netlist(pirated), encoding="utf-8")
            v = verify_equivalence(netlist, pirated, cfg.input_cap, cfg.sample_count, rng)
            results.append({"file": path.name, "strategy": strategy.value, "repeat": r, **v.as_dict()})
            print(f"{path.name}: {v.status} ({v.vectors} vectors)")
    (run_dir / "verdicts.json").write_text(json.dumps(results, indent=2) + "\n", encoding="utf-8")
    bad = [r for r in results if r["status"] == "not_equivalent"]
    if bad:
        print(f"{len(bad)} variant(s) NOT equivalent", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def _detector_selection(args):
    names = args.detector or list(DETECTORS)
    thresholds = {}
    for item in args.threshold or []:
        det, _, value = item.partition("=")
        try:
            thresholds[det] = float(value)
        except ValueError:
            raise UsageError(f"bad --threshold {item!r}; expected NAME=VALUE") from None
    flags = {
        "k": args.k,
        "w": args.w,
        "min_match_len": args.min_match_len,
        "min_run": args.min_run,
        "iterations": args.iterations,
    }
    out = []
    for name in names:
        try:
            det = get_detector(name)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
        params = {k: v for k, v in flags.items() if v is not None and k in det.params}
        out.append(det.with_options(thresholds.pop(name, None), **params))
    if thresholds:
        raise UsageError(f"--threshold for unselected detector(s): {sorted(thresholds)}")
    return out


def cmd_detect(args) -> int:
    detectors = _detector_selection(args)
    _, a_text, a = read_netlist_arg(args.file_a)
    _, b_text, b = read_netlist_arg(args.file_b)
    results = {}
    for det in detectors:
        s = det.score(a, b, a_text, b_text)
        results[det.name] = {
            "score": s.value,
            "threshold": det.threshold,
            "verdict": verdict(s, det.threshold),
            "params": det.params,
        }
        print(f"{det.name:<15} {s.value:.4f}  (threshold {det.threshold})  {results[det.name]['verdict']}")
    if args.json:
        Path(args.json).write_text(json.dumps(results, indent=2) + "\n", encoding="utf-8")
    if args.details:
        det_k = args.k or DETECTORS["moss-analog"].params["k"]
        det_w = args.w or DETECTORS["moss-analog"].params["w"]
        mml = args.min_match_len or DETECTORS["jplag-analog"].params["min_match_len"]
        Path(args.details).write_text(
            json.dumps(match_details(a_text, b_text, det_k, det_w, mml), indent=2) + "\n",
            encoding="utf-8",
        )
    return EXIT_OK


def cmd_campaign(args) -> int:
    cfg = make_config(args)
    targets = []
    for arg in cfg.netlists:
        name, text, nl = read_netlist_arg(arg)
        targets.append(CampaignTarget(name, nl, text))
    if len({t.name for t in targets}) != len(targets):
        raise InputError("netlist names (file stems) must be unique within a campaign")
    run_dir = make_run_dir(cfg, args.run_dir)
    if cfg.dictionary:
        dictionary = read_dictionary_arg(cfg.dictionary)
    else:
        backend = make_backend(BackendConfig.from_dict(cfg.backend))
        dictionary = build_dictionary(
            characterize(*(t.netlist for t in targets)),
            backend,
            cfg.M,
            workers=cfg.workers,
            transcript_dir=run_dir / "transcripts",
        )
        save_dictionary(dictionary, run_dir / "dictionary.json")
        aborted = [s for s in dictionary.sessions if s.status == "aborted"]
        if aborted:
            for s in aborted:
                print(f"session {s.gate_type} {s.operator_set} aborted: {s.error}", file=sys.stderr)
            return EXIT_BACKEND
    report = run_campaign(
        targets,
        dictionary,
        cfg.strategy_list(),
        cfg.N,
        cfg.detector_list(),
        cfg.seed,
        workers=cfg.workers,
        input_cap=cfg.input_cap,
        sample_count=cfg.sample_count,
        metadata={
            "backend": cfg.backend.get("kind"),
            "M": cfg.M,
            "N": cfg.N,
            "netlists": [t.name for t in targets],
        },
    )
    (run_dir / "report.json").write_text(report.to_json(), encoding="utf-8")
    table = report.table()
    (run_dir / "report.txt").write_text(table + "\n", encoding="utf-8")
    print(table)
    print(f"report written to {run_dir / 'report.json'}")
    return EXIT_OK


def cmd_verify(args) -> int:
    _, _, a = read_netlist_arg(args.file_a)
    _, _, b = read_netlist_arg(args.file_b)
    try:
        v = verify_equivalence(a, b, args.input_cap, args.sample_count, random.Random(args.seed))
    except NetlistError as exc:
        raise InputError(str(exc)) from None
    print(json.dumps(v.as_dict(), indent=2))
    return EXIT_OK if v.ok else EXIT_INPUT


# -- argument parsing ----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _backend_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("backend")
    g.add_argument("--backend", dest="backend_kind", choices=["oracle", "scripted", "http"])
    g.add_argument("--endpoint", dest="backend_endpoint")
    g.add_argument("--model", dest="backend_model")
    g.add_argument("--api-key-env", dest="backend_api_key_env")
    g.add_argument("--script", dest="backend_script_path", help="reply script for --backend scripted")


def _run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML run configuration; flags override it")
    p.add_argument("--output-dir", help="parent of the timestamped run directory")
    p.add_argument("--run-dir", help="exact run directory (skips timestamping)")
    p.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netrewrite", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("characterize", help="list unique gate types")
    p.add_argument("netlists", nargs="+", metavar="NETLIST")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser("transform", help="build a transformation dictionary")
    p.add_argument("netlists", nargs="*", metavar="NETLIST")
    p.add_argument("-M", type=int, help="attempts per session")
    p.add_argument("-o", "--out", help="dictionary path (default: in the run directory)")
    _backend_flags(p)
    _run_flags(p)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("pirate", help="write pirated variants of a netlist")
    p.add_argument("netlist")
    p.add_argument("-d", "--dictionary")
    p.add_argument("-s", "--strategy", help="NAND, NOR, AND_NOT, OR_NOT, RANDOM or all")
    p.add_argument("-N", type=int, help="variants per strategy")
    p.add_argument("--seed", type=int)
    p.add_argument("--input-cap", type=int)
    p.add_argument("--sample-count", type=int)
    _run_flags(p)
    p.set_defaults(func=cmd_pirate)

    p = sub.add_parser("detect", help="score two netlists with the detectors")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--detector", action="append", help=f"one of {', '.join(DETECTORS)}; repeatable")
    p.add_argument("--threshold", action="append", metavar="NAME=VALUE")
    p.add_argument("--k", type=int)
    p.add_argument("--w", type=int)
    p.add_argument("--min-match-len", type=int)
    p.add_argument("--min-run", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--json", metavar="PATH", help="write scores as JSON")
    p.add_argument("--details", metavar="PATH", help="write shared fingerprints and tiles as JSON")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("campaign", help="run a full piracy campaign from a config")
    p.add_argument("config")
    p.add_argument("-N", type=int)
    p.add_argument("-M", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("-d", "--dictionary")
    p.add_argument("--output-dir")
    p.add_argument("--run-dir")
    p.add_argument("--workers", type=int)
    _backend_flags(p)
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("verify", help="check two netlists for equivalence")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--input-cap", type=int, default=DEFAULT_INPUT_CAP)
    p.add_argument("--sample-count", type=int, default=DEFAULT_SAMPLE_COUNT)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"netrewrite: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, NetlistError, CircuitSyntaxError, CoverageError) as exc:
        print(f"netrewrite: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BackendError as exc:
        print(f"netrewrite: backend failure: {exc}", file=sys.stderr)
        return EXIT_BACKEND


if __name__ == "__main__":
    sys.exit(main())
