"""Command line: ``match``, ``eval`` and ``track``.

Every matcher option can come from a flag, an environment variable
(``ANNEALMATCH_`` + upper-cased flag name with dashes as underscores, e.g.
``ANNEALMATCH_SEED``), a JSON config file (``--config``, keys named like
the flags) or the built-in default, in that order of precedence.

Exit status: 0 success, 1 runtime failure, 2 invalid configuration.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .alignment import load_alignment, save_alignment
from .annealing import SAConfig
from .errors import MatcherError
from .evaluation import PUBLISHED_CONFERENCE, evaluate, evaluate_track
from .matrix import DEFAULT_FLOOR
from .ontology import load_ontology
from .pipeline import MatchConfig, match
from .text import StopList
from .wordnet import WordNetTaxonomy

logger = logging.getLogger("annealmatch")

ENV_PREFIX = "ANNEALMATCH_"

# option name -> (type, default)
OPTIONS = {
    "onto1": (str, None),
    "onto2": (str, None),
    "wordnet": (str, None),
    "stoplist": (str, None),
    "out": (str, None),
    "seed": (int, 0),
    "threshold": (float, 0.5),
    "temperature": (float, 1.0),
    "cooling": (float, 0.95),
    "iters-per-temp": (int, None),
    "min-temp": (float, 1e-4),
    "restarts": (int, 3),
    "floor": (float, DEFAULT_FLOOR),
    "format": (str, "text"),
}


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    onto1: Path | None = None
    onto2: Path | None = None
    wordnet: Path | None = None
    stoplist: Path | None = None
    out: Path | None = None
    sa: SAConfig = field(default_factory=SAConfig)
    floor: float = DEFAULT_FLOOR
    format: str = "text"

    def validate(self, required=()) -> None:
        for name in required:
            if getattr(self, name) is None:
                raise ConfigError(f"--{name} is required")
        for name in ("onto1", "onto2", "wordnet", "stoplist"):
            path = getattr(self, name)
            if path is not None and not os.access(path, os.R_OK):
                raise ConfigError(f"{name}: cannot read {path}")
        if not 0.0 <= self.floor <= 1.0:
            raise ConfigError("--floor must lie in [0, 1]")
        if self.format not in ("text", "csv"):
            raise ConfigError("--format must be text or csv")

    def matcher(self) -> MatchConfig:
        wn = WordNetTaxonomy.load(self.wordnet) if self.wordnet else None
        stops = StopList.load(self.stoplist) if self.stoplist else None
        return MatchConfig(self.sa, self.floor, wn, stops)


def resolve_config(args: argparse.Namespace, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    file_values = {}
    if getattr(args, "config", None):
        try:
            file_values = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config file {args.config}: {exc}") from None
        if not isinstance(file_values, dict):
            raise ConfigError(f"config file {args.config}: expected a JSON object")
        unknown = set(file_values) - set(OPTIONS)
        if unknown:
            raise ConfigError(f"config file {args.config}: unknown keys {sorted(unknown)}")

    values = {}
    for name, (typ, default) in OPTIONS.items():
        value = getattr(args, name.replace("-", "_"), None)
        if value is None:
            env = environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
            value = env if env is not None else file_values.get(name, default)
        if value is not None:
            try:
                value = typ(value)
            except (TypeError, ValueError):
                raise ConfigError(f"{name}: cannot convert {value!r} to {typ.__name__}") from None
        values[name] = value

    try:
        sa = SAConfig(
            initial_temperature=values["temperature"],
            cooling_rate=values["cooling"],
            iterations_per_temperature=values["iters-per-temp"],
            min_temperature=values["min-temp"],
            seed=values["seed"],
            restarts=values["restarts"],
            extraction_threshold=values["threshold"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    def path(name):
        return Path(values[name]) if values[name] is not None else None

    return RunConfig(
        onto1=path("onto1"),
        onto2=path("onto2"),
        wordnet=path("wordnet"),
        stoplist=path("stoplist"),
        out=path("out"),
        sa=sa,
        floor=values["floor"],
        format=values["format"],
    )


def cmd_match(config: RunConfig) -> int:
    config.validate(required=("onto1", "onto2", "out"))
    o1 = load_ontology(config.onto1)
    o2 = load_ontology(config.onto2)
    result = match(o1, o2, config.matcher())
    for key, value in result.diagnostics.items():
        logger.info("%s: %s", key, value)
    save_alignment(result.alignment, config.out)
    return 0


def cmd_eval(system_path: Path, reference_path: Path) -> int:
    alignments = []
    for path in (system_path, reference_path):
        try:
            alignments.append(load_alignment(path))
        except (MatcherError, OSError) as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            return 1
    s = evaluate(*alignments)
    print(f"{s.precision:.3f} {s.recall:.3f} {s.f_measure:.3f}")
    return 0


def cmd_track(track_dir: Path, config: RunConfig) -> int:
    config.validate()
    if not track_dir.is_dir():
        raise ConfigError(f"track directory {track_dir} does not exist")
    alignments = {}

    def keep(task, alignment):
        alignments[task] = alignment

    report = evaluate_track(track_dir, config.matcher(), keep)
    logger.info("tasks run: %d, skipped: %d", len(report.per_task), len(report.skipped))
    if not report.per_task:
        print(f"error: no task could be loaded from {track_dir}", file=sys.stderr)
        return 1
    published = PUBLISHED_CONFERENCE if any(r.task in PUBLISHED_CONFERENCE for r in report.per_task) else None
    text = report.to_text(published)
    csv_text = report.to_csv()
    sys.stdout.write(csv_text if config.format == "csv" else text)
    if config.out is not None:
        config.out.mkdir(parents=True, exist_ok=True)
        (config.out / "report.txt").write_text(text, encoding="utf-8")
        (config.out / "report.csv").write_text(csv_text, encoding="utf-8")
        for task, alignment in alignments.items():
            save_alignment(alignment, config.out / f"{task}.rdf")
    return 0


def _add_matcher_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with option defaults")
    p.add_argument("--wordnet", help="WordNet dict directory (data.noun/index.noun) or TSV taxonomy")
    p.add_argument("--stoplist", help="stop-word file, one word per line")
    p.add_argument("--seed", type=int)
    p.add_argument("--threshold", type=float, help="extraction threshold (default 0.5)")
    p.add_argument("--temperature", type=float, help="initial temperature (default 1.0)")
    p.add_argument("--cooling", type=float, help="cooling rate (default 0.95)")
    p.add_argument("--iters-per-temp", type=int, help="moves per temperature (default 50 * max entities)")
    p.add_argument("--min-temp", type=float, help="final temperature (default 1e-4)")
    p.add_argument("--restarts", type=int, help="independent chains (default 3)")
    p.add_argument("--floor", type=float, help="similarity matrix floor (default 0.05)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="annealmatch", description=__doc__.split("\n")[0])
    parser.add_argument("--log-level", default="INFO", help="diagnostics verbosity on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("match", help="align two ontologies")
    p.add_argument("--onto1")
    p.add_argument("--onto2")
    p.add_argument("--out", help="alignment file to write")
    _add_matcher_flags(p)

    p = sub.add_parser("eval", help="score an alignment against a reference")
    p.add_argument("system", type=Path)
    p.add_argument("reference", type=Path)

    p = sub.add_parser("track", help="run and score every task of a track directory")
    p.add_argument("track_dir", type=Path)
    p.add_argument("--out", help="directory for report.txt, report.csv and alignments")
    p.add_argument("--format", choices=("text", "csv"))
    _add_matcher_flags(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.command == "eval":
        return cmd_eval(args.system, args.reference)
    try:
        config = resolve_config(args)
        if args.command == "match":
            return cmd_match(config)
        return cmd_track(args.track_dir, config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MatcherError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
