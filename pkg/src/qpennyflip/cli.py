"""Command-line entry point: ``run``, ``verify`` and ``classify``.

Config files are either JSON objects or flat ``key = value`` lines (``#``
starts a comment).  Keys match the long flag names with dashes or
underscores.  Flags override the file, which overrides scenario defaults.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields
from importlib import metadata
from pathlib import Path

from . import experiments as ex
from . import verify as vf

FORMATS = ("csv", "json")


@dataclass
class CliConfig:
    scenario: str = "sim1"
    runs: int | None = None
    max_gen: int | None = None
    pop_size: int | None = None
    mutation_rate: float | None = None
    mutation_std: float | None = None
    seed: int = 0
    out: str = "out"
    workers: int = 1
    format: tuple[str, ...] = FORMATS

    def spec(self) -> ex.ScenarioSpec:
        base = ex.scenario(self.scenario)
        return base.with_overrides(n_runs=self.runs, max_gen=self.max_gen, pop_size=self.pop_size,
                                   mutation_rate=self.mutation_rate, mutation_std=self.mutation_std,
                                   rng_seed=self.seed)


_CASTS = {"scenario": str, "runs": int, "max_gen": int, "pop_size": int, "mutation_rate": float,
          "mutation_std": float, "seed": int, "out": str, "workers": int}
_ALIASES = {"n_runs": "runs", "rng_seed": "seed", "formats": "format"}


class ConfigError(ValueError):
    pass


def _parse_formats(value) -> tuple[str, ...]:
    items = value if isinstance(value, (list, tuple)) else str(value).split(",")
    items = tuple(s.strip().lower() for s in items if str(s).strip())
    bad = [s for s in items if s not in FORMATS]
    if bad or not items:
        raise ConfigError(f"format: expected a subset of {FORMATS}, got {value!r}")
    return items


def coerce(key: str, value):
    key = key.strip().replace("-", "_")
    key = _ALIASES.get(key, key)
    if key == "format":
        return key, _parse_formats(value)
    if key not in _CASTS:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        cast = _CASTS[key]
        if cast is int and isinstance(value, float) and not value.is_integer():
            raise ValueError
        return key, cast(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot read {value!r} as {_CASTS[key].__name__}") from None


def load_config_file(path: str | Path) -> dict:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path}: {exc}") from None
        items = raw.items()
    else:
        items = []
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"config file {path} line {n}: expected key = value")
            k, v = line.split("=", 1)
            items.append((k, v.strip()))
    return dict(coerce(k, v) for k, v in items)


def resolve_config(args: argparse.Namespace) -> CliConfig:
    values = load_config_file(args.config) if args.config else {}
    for f in fields(CliConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    return CliConfig(**values)


def build_id() -> str:
    try:
        return f"qpennyflip {metadata.version('artifact')}"
    except metadata.PackageNotFoundError:
        return "qpennyflip (not installed)"


def cmd_run(args) -> int:
    cfg = resolve_config(args)
    spec = cfg.spec()
    if cfg.workers < 1:
        raise ConfigError("workers: must be >= 1")
    if spec.n_runs < 1:
        raise ConfigError("runs: must be >= 1")
    batch = ex.run_batch(spec, workers=cfg.workers)
    manifest = {"seed": cfg.seed, "build": build_id(), "formats": list(cfg.format),
                "command": ["run", "--scenario", spec.id, "--runs", str(spec.n_runs),
                            "--max-gen", str(spec.ga.max_gen), "--pop-size", str(spec.ga.pop_size),
                            "--mutation-rate", repr(spec.ga.mutation_rate),
                            "--mutation-std", repr(spec.ga.mutation_std), "--seed", str(cfg.seed)]}
    written = ex.write_artifacts(batch, Path(cfg.out), cfg.format, manifest)
    for p in written:
        print(p)
    return 0


def _verify_oracles() -> tuple[bool, dict]:
    gaps = vf.oracle_report()
    ok = all(g < 1e-12 for g in gaps.values())
    failing = [k for k, g in gaps.items() if g >= 1e-12]
    return ok, {"max_deviation": gaps, "tolerance": 1e-12, "failing": failing}


def _verify_ne() -> tuple[bool, dict]:
    certs = vf.ne_report()
    out, failing = {}, []
    for name, cert in certs.items():
        d = cert.to_dict()
        d["expected"] = vf.EXPECTED_VERDICT[name]
        out[name] = d
        if cert.verdict != d["expected"]:
            failing.append(name)
    return not failing, {"certificates": out, "failing": failing}


def _verify_cycle() -> tuple[bool, dict]:
    links = vf.cyclic_dominance_table()
    rows = [{"winner": l.winner, "q": [vf.describe_move(m) for m in l.q_strategy],
             "picard_pair": list(l.picard_name), "probs": list(vf.CYCLE_PROBS),
             "payoff_q": list(l.payoff_q), "holds": l.holds} for l in links]
    # the last winner is the strategy the first link beat
    closes = links[-1].picard_name == links[0].picard_name
    failing = [i for i, l in enumerate(links) if not l.holds]
    if not closes:
        failing.append("loop does not close")
    return not failing, {"links": rows, "closes": closes, "failing": failing}


VERIFY_TARGETS = {"oracles": _verify_oracles, "ne": _verify_ne, "cycle": _verify_cycle}


def cmd_verify(args) -> int:
    ok, report = VERIFY_TARGETS[args.target]()
    report = {"target": args.target, "passed": ok, **report}
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if not ok:
        print(f"verify {args.target} failed: {report['failing'][0]}", file=sys.stderr)
        return 1
    return 0


def cmd_classify(args) -> int:
    result = ex.histogram_from_artifacts(Path(args.batch_dir))
    text = json.dumps(result, indent=2, sort_keys=True)
    out = Path(args.out) if args.out else Path(args.batch_dir) / "categories.json"
    out.write_text(text + "\n")
    print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpennyflip", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a batch of GA simulations")
    run.add_argument("--scenario", choices=sorted(ex.SCENARIOS))
    run.add_argument("--runs", type=int)
    run.add_argument("--max-gen", dest="max_gen", type=int)
    run.add_argument("--pop-size", dest="pop_size", type=int)
    run.add_argument("--mutation-rate", dest="mutation_rate", type=float)
    run.add_argument("--mutation-std", dest="mutation_std", type=float)
    run.add_argument("--seed", type=int)
    run.add_argument("--out")
    run.add_argument("--workers", type=int)
    run.add_argument("--format", type=_parse_formats, help="csv, json or csv,json")
    run.add_argument("--config", help="JSON or key=value config file")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="run an oracle or certificate suite")
    ver.add_argument("target", choices=sorted(VERIFY_TARGETS))
    ver.add_argument("--out", help="write the JSON report here instead of stdout")
    ver.set_defaults(func=cmd_verify)

    cls = sub.add_parser("classify", help="category histogram of a batch directory")
    cls.add_argument("batch_dir")
    cls.add_argument("--out", help="default: <batch_dir>/categories.json")
    cls.set_defaults(func=cmd_classify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
