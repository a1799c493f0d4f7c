"""Precision / recall / F-measure against reference alignments, per task and
averaged over a track."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from .alignment import Alignment, load_alignment
from .errors import MatcherError, MissingReference, TaskLoadFailure
from .ontology import load_ontology

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("task", "precision", "recall", "f_measure", "correct", "produced", "reference_size")

# published (precision, recall, f-measure) of the annealing matcher on the
# OAEI 2019 conference track, for side-by-side comparison
PUBLISHED_CONFERENCE = {
    "cmt-conference": (0.61, 0.93, 0.74),
    "cmt-confOf": (0.80, 0.50, 0.62),
    "cmt-edas": (0.63, 0.77, 0.69),
    "cmt-ekaw": (0.54, 0.64, 0.58),
    "cmt-iasted": (0.67, 1.00, 0.80),
    "cmt-sigkdd": (0.85, 0.92, 0.88),
    "conference-confOf": (0.79, 0.73, 0.76),
    "conference-edas": (0.67, 0.82, 0.74),
    "conference-ekaw": (0.66, 0.76, 0.70),
    "conference-iasted": (0.88, 0.50, 0.64),
    "conference-sigkdd": (0.75, 0.80, 0.77),
    "confOf-edas": (0.82, 0.74, 0.78),
    "confOf-ekaw": (0.81, 0.85, 0.83),
    "confOf-iasted": (0.71, 0.56, 0.63),
    "confOf-sigkdd": (0.83, 0.71, 0.77),
    "edas-ekaw": (0.71, 0.74, 0.72),
    "edas-iasted": (0.69, 0.47, 0.56),
    "edas-sigkdd": (0.80, 0.53, 0.64),
    "ekaw-iasted": (0.70, 0.70, 0.70),
    "ekaw-sigkdd": (0.89, 0.73, 0.80),
    "iasted-sigkdd": (0.70, 0.93, 0.80),
}
PUBLISHED_CONFERENCE_AVERAGE = (0.74, 0.73, 0.72)
PUBLISHED_ANATOMY = (0.888, 0.853, 0.87)


class Scores(NamedTuple):
    precision: float
    recall: float
    f_measure: float
    correct: int
    produced: int
    reference_size: int


def evaluate(system: Alignment, reference: Alignment) -> Scores:
    """Score ``system`` against ``reference`` on equivalence correspondences.

    Empty system gives P = 1, empty reference gives R = 1, and F = 0 when
    P + R = 0.
    """
    found = system.pairs("=")
    expected = reference.pairs("=")
    correct = len(found & expected)
    produced = len(system)
    ref_size = len(reference)
    precision = correct / produced if produced else 1.0
    recall = correct / ref_size if ref_size else 1.0
    if produced and ref_size:
        # same value as 2PR / (P + R), with a single rounding
        f = 2 * correct / (produced + ref_size)
    else:
        denom = precision + recall
        f = 2 * precision * recall / denom if denom > 0 else 0.0
    return Scores(precision, recall, f, correct, produced, ref_size)


@dataclass
class TaskResult:
    task: str
    precision: float
    recall: float
    f_measure: float
    correct: int
    produced: int
    reference_size: int
    diagnostics: dict = field(default_factory=dict, repr=False, compare=False)


@dataclass
class EvaluationReport:
    per_task: list[TaskResult] = field(default_factory=list)
    skipped: list[tuple[str, str]] = field(default_factory=list)

    @property
    def averages(self) -> tuple[float, float, float]:
        """Macro averages (P, R, F): plain means over task rows."""
        if not self.per_task:
            return (0.0, 0.0, 0.0)
        n = len(self.per_task)
        return (
            sum(r.precision for r in self.per_task) / n,
            sum(r.recall for r in self.per_task) / n,
            sum(r.f_measure for r in self.per_task) / n,
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.per_task:
            writer.writerow(
                [r.task, f"{r.precision:.6f}", f"{r.recall:.6f}", f"{r.f_measure:.6f}",
                 r.correct, r.produced, r.reference_size]
            )
        p, rc, f = self.averages
        writer.writerow(["average", f"{p:.6f}", f"{rc:.6f}", f"{f:.6f}",
                         sum(r.correct for r in self.per_task),
                         sum(r.produced for r in self.per_task),
                         sum(r.reference_size for r in self.per_task)])
        return buf.getvalue()

    def to_text(self, published: dict | None = None) -> str:
        """Aligned plain-text table; with ``published`` adds P/R/F columns
        of a published run for tasks it knows."""
        width = max([len("average")] + [len(r.task) for r in self.per_task])
        head = f"{'task':<{width}}  {'P':>6} {'R':>6} {'F':>6}  {'correct':>7} {'found':>6} {'ref':>5}"
        if published:
            head += f"   {'pub P':>6} {'pub R':>6} {'pub F':>6}"
        lines = [head, "-" * len(head)]
        for r in self.per_task:
            line = (
                f"{r.task:<{width}}  {r.precision:6.3f} {r.recall:6.3f} {r.f_measure:6.3f}"
                f"  {r.correct:7d} {r.produced:6d} {r.reference_size:5d}"
            )
            if published and r.task in published:
                pp, pr, pf = published[r.task]
                line += f"   {pp:6.3f} {pr:6.3f} {pf:6.3f}"
            lines.append(line)
        lines.append("-" * len(head))
        p, rc, f = self.averages
        line = f"{'average':<{width}}  {p:6.3f} {rc:6.3f} {f:6.3f}"
        if published is PUBLISHED_CONFERENCE:
            pp, pr, pf = PUBLISHED_CONFERENCE_AVERAGE
            line += " " * 22 + f"   {pp:6.3f} {pr:6.3f} {pf:6.3f}"
        lines.append(line)
        for task, reason in self.skipped:
            lines.append(f"skipped {task}: {reason}")
        return "\n".join(lines) + "\n"


def _find(task_dir: Path, stem: str) -> Path | None:
    for suffix in (".rdf", ".owl", ".json", ".xml"):
        path = task_dir / f"{stem}{suffix}"
        if path.exists():
            return path
    return None


def load_task(task_dir: Path):
    """(onto1, onto2, reference) of one task directory."""
    ref_path = task_dir / "reference.rdf"
    if not ref_path.exists():
        raise MissingReference(f"{task_dir.name}: no reference.rdf")
    p1, p2 = _find(task_dir, "onto1"), _find(task_dir, "onto2")
    if p1 is None or p2 is None:
        raise TaskLoadFailure(f"{task_dir.name}: onto1/onto2 file missing")
    try:
        o1 = load_ontology(p1, task_dir.name.split("-")[0])
        o2 = load_ontology(p2, task_dir.name.split("-")[-1])
        reference = load_alignment(ref_path)
    except (MatcherError, OSError, UnicodeDecodeError) as exc:
        raise TaskLoadFailure(f"{task_dir.name}: {exc}") from exc
    return o1, o2, reference


def evaluate_track(task_dir: str | Path, matcher_config=None, on_alignment=None) -> EvaluationReport:
    """Run the matcher on every task folder of a track and score it.

    Layout: ``<track>/<task>/onto1.(rdf|owl|json)``, ``onto2.*`` and
    ``reference.rdf``. Tasks that fail to load are recorded in
    ``report.skipped`` and do not stop the run. ``on_alignment(task,
    alignment)`` is called for each produced alignment.
    """
    from .pipeline import match

    track = Path(task_dir)
    report = EvaluationReport()
    for sub in sorted(p for p in track.iterdir() if p.is_dir()):
        try:
            o1, o2, reference = load_task(sub)
        except (MissingReference, TaskLoadFailure) as exc:
            logger.warning("skipping task %s: %s", sub.name, exc)
            report.skipped.append((sub.name, str(exc)))
            continue
        result = match(o1, o2, matcher_config)
        if on_alignment is not None:
            on_alignment(sub.name, result.alignment)
        s = evaluate(result.alignment, reference)
        report.per_task.append(TaskResult(sub.name, *s, diagnostics=result.diagnostics))
        logger.info("%s: P=%.3f R=%.3f F=%.3f", sub.name, s.precision, s.recall, s.f_measure)
    return report
