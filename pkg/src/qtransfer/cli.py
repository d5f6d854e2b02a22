"""Command line front end: ``verify`` runs checks, ``pattern`` prints the vanishing grid."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path

from .config import CHECKS, Config, ConfigError

TOOL = "qtransfer"


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def pattern_render(grid) -> tuple[str, dict]:
    """Axis-labelled character grid (``#`` nonzero, ``.`` zero), rows from the top ``alpha_2`` down."""
    data = grid.to_json()
    a1lo, a1hi = grid.a1_range
    a2lo, a2hi = grid.a2_range
    width = max(len(str(x)) for x in (a1lo, a1hi, a2lo, a2hi)) + 1
    lines = ["a2\\a1".rjust(6) + "".join(str(a1).rjust(width) for a1 in range(a1lo, a1hi + 1))]
    for a2, row in zip(range(a2hi, a2lo - 1, -1), data["rows_top_down"]):
        lines.append(str(a2).rjust(6) + "".join(ch.rjust(width) for ch in row))
    return "\n".join(lines), data


@dataclass
class RunReport:
    version: str
    config: Config
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json(self) -> dict:
        return {
            "tool": TOOL,
            "version": self.version,
            "config": self.config.to_json(),
            "checks": [r.to_json() for r in self.results],
            "pass": self.passed,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"


def run(cfg: Config) -> RunReport:
    """Run the selected checks on a thread pool; the report keeps the configured order."""
    from .checks import run_check

    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [pool.submit(run_check, name, cfg) for name in cfg.checks]
        results = [f.result() for f in futures]
    return RunReport(_version(), cfg, results)


def _parse_box(text: str) -> tuple[int, int, int, int]:
    try:
        box = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad box {text!r}") from exc
    if len(box) != 4 or box[0] > box[1] or box[2] > box[3]:
        raise argparse.ArgumentTypeError("box must be a1min,a1max,a2min,a2max")
    return box


def _parse_only(text: str) -> list[str]:
    names = [x.strip() for x in text.split(",") if x.strip()]
    unknown = sorted(set(names) - set(CHECKS))
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown checks {unknown}; choose from {', '.join(CHECKS)}")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL, description="Numerical and symbolic checks of transfer-matrix identities.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run checks and write a JSON report")
    verify.add_argument("--config", type=Path, help="JSON config file (defaults apply to missing keys)")
    verify.add_argument("--only", type=_parse_only, help="comma-separated check names")
    verify.add_argument("--seed", type=int)
    verify.add_argument("--out", type=Path, help="report path (default: config 'out', else stdout summary only)")
    verify.add_argument("--workers", type=int)
    verify.add_argument("--quiet", action="store_true", help="no per-check lines")

    pattern = sub.add_parser("pattern", help="print the nonzero grid of two-row transfer matrices")
    pattern.add_argument("--box", type=_parse_box, default=(-3, 5, -3, 5),
                         help="a1min,a1max,a2min,a2max; write --box=-3,5,-3,5 when it starts with a minus")
    pattern.add_argument("--N", type=int, default=2)
    pattern.add_argument("--n", type=int, default=1)
    pattern.add_argument("--seed", type=int, default=42)
    pattern.add_argument("--json", type=Path, help="also write the grid as JSON")
    return parser


def _margin(report) -> float:
    if report.tolerance > 0:
        return report.relative_residual / report.tolerance
    return 0.0 if report.relative_residual == 0 else float("inf")


def _verify(args, parser) -> int:
    try:
        cfg = Config.load(args.config)
        cfg = cfg.with_overrides(seed=args.seed, checks=args.only, workers=args.workers,
                                 out=str(args.out) if args.out else None)
    except ConfigError as exc:
        parser.error(str(exc))
    report = run(cfg)
    if not args.quiet:
        for result in report.results:
            status = "PASS" if result.passed else "FAIL"
            worst = max((_margin(r) for r in result.reports), default=0.0)
            line = f"{status}  {result.name:<22} worst residual/tolerance {worst:.3e}"
            if result.error:
                line += f"  ({result.error})"
            print(line)
            if not result.passed:
                for r in result.reports:
                    if not r.passed:
                        print(f"      {r.line()}  {json.dumps(r.parameters)}")
        print("overall:", "PASS" if report.passed else "FAIL")
    if cfg.out:
        Path(cfg.out).write_text(report.dumps())
    return 0 if report.passed else 1


def _pattern(args, parser) -> int:
    from .checks import make_chain
    from .identities import fig1_pattern

    if args.N < 2:
        parser.error("the two-row pattern needs N >= 2")
    try:
        cfg = Config.from_mapping({"seed": args.seed, "N_max": max(2, args.N), "n": args.n})
    except ConfigError as exc:
        parser.error(str(exc))
    chain = make_chain(cfg, f"fig1:{args.N}", args.N, args.n)
    grid = fig1_pattern(chain.family(), args.box)
    text, data = pattern_render(grid)
    print(text)
    print(f"mismatches with the straightening rule: {len(grid.mismatches)}")
    if args.json:
        args.json.write_text(json.dumps({**data, "chain": chain.to_json()}, indent=2) + "\n")
    return 0 if not grid.mismatches else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        return _verify(args, parser)
    return _pattern(args, parser)


if __name__ == "__main__":
    sys.exit(main())
