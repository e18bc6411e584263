"""Command-line front end: ``pgl3ekr --q 2,3 --suite all --format json``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from .errors import EKRError, NotPrimePower, ResourceExceeded
from .gf import prime_power
from .group import MAX_ENUM_Q
from .pairspace import dump_N
from .verify import DEFAULT_SEED, MAX_FORMULA_Q, SUITES, Config, context, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass(frozen=True)
class CliConfig:
    q_list: tuple[int, ...]
    suite: str
    format: str
    out: str | None
    workers: int
    seed: int
    budget: float
    dump_n: str | None


def _q_list(text: str) -> tuple[int, ...]:
    try:
        qs = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad q list {text!r}") from None
    if not qs:
        raise argparse.ArgumentTypeError("empty q list")
    return qs


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pgl3ekr", description="Verify the EKR property of PGL(3,q) on PG(2,q) at small q.")
    p.add_argument("--q", type=_q_list, default=(2,), help="comma-separated field orders, e.g. 2,3")
    p.add_argument("--suite", default="all", choices=SUITES)
    p.add_argument("--format", default="text", choices=("text", "json"))
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="seed for sampled checks (default 0x454B52)")
    p.add_argument("--budget", type=float, default=300.0, help="time budget in seconds for the coclique search")
    p.add_argument("--dump-n", dest="dump_n", help="write N in the NMAT binary format (q is appended for several q)")
    p.add_argument("--version", action="version", version=__version__)
    return p


def parse_config(argv) -> CliConfig:
    a = build_parser().parse_args(argv)
    for q in a.q:
        try:
            prime_power(q)
        except NotPrimePower:
            raise _UsageError(f"q={q} is not a prime power") from None
        limit = MAX_FORMULA_Q if a.suite == "formula" else MAX_ENUM_Q
        if q > limit:
            raise _UsageError(f"q={q} exceeds {limit} for suite {a.suite!r}")
    if a.budget <= 0:
        raise _UsageError("budget must be positive")
    return CliConfig(a.q, a.suite, a.format, a.out, a.workers, a.seed, a.budget, a.dump_n)


def report_json(cfg: CliConfig, reports) -> dict:
    conf = asdict(cfg)
    conf["q_list"] = list(cfg.q_list)
    return {
        "version": __version__,
        "config": conf,
        "checks": [asdict(c) for r in reports for c in r.checks],
    }


def report_text(cfg: CliConfig, reports) -> str:
    lines = [f"pgl3ekr {__version__}  suite={cfg.suite}  seed={cfg.seed:#x}  workers={cfg.workers}"]
    for r in reports:
        for c in r.checks:
            line = f"{c.status.upper():8} q={c.q}  {c.id:22} {c.elapsed_ms:>8} ms"
            if c.status != "pass":
                line += f"  expected={json.dumps(c.expected)} computed={json.dumps(c.computed)}"
            if c.note:
                line += f"  # {c.note}"
            lines.append(line)
    checks = [c for r in reports for c in r.checks]
    counts = {s: sum(c.status == s for c in checks) for s in ("pass", "fail", "skipped", "flagged")}
    lines.append(", ".join(f"{v} {k}" for k, v in counts.items()))
    return "\n".join(lines) + "\n"


def _dump(cfg: CliConfig, q: int, config: Config) -> None:
    path = Path(cfg.dump_n)
    if len(cfg.q_list) > 1:
        path = path.with_name(f"{path.stem}_q{q}{path.suffix}")
    dump_N(context(q, config).N, path)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except _UsageError as e:
        print(f"pgl3ekr: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)

    config = Config(seed=cfg.seed, workers=cfg.workers, budget=cfg.budget)
    reports = []
    try:
        for q in cfg.q_list:
            reports.append(run_suite(q, cfg.suite, config))
            if cfg.dump_n and q <= MAX_ENUM_Q:
                _dump(cfg, q, config)
    except (ResourceExceeded, MemoryError) as e:
        print(f"pgl3ekr: resource exhausted: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except EKRError as e:
        print(f"pgl3ekr: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    if cfg.format == "json":
        text = json.dumps(report_json(cfg, reports), indent=2) + "\n"
    else:
        text = report_text(cfg, reports)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)

    failed = [c for r in reports for c in r.checks if c.status == "fail"]
    if any(c.note.startswith(("ResourceExceeded", "MemoryError")) for c in failed):
        return EXIT_RESOURCE
    return EXIT_FAIL if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
