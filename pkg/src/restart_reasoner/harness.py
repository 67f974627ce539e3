"""Paired with/without-restart trials, outcome labels and evaluation reports.

Each trial plays one level twice from the same seed stream. The test
group restarts whenever the restart heuristic says so; the control group
only restarts when the game forces it (all birds used, pigs left). Both
groups fire their last bird with the best available shot, so whether the
level gets solved from a last-bird state depends only on that state.
"""

from __future__ import annotations

import csv
import io
import json
import random
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

from .config import GlobalConfig
from .heuristics import should_restart, solvable_one_shot
from .level import Level, LevelState
from .oracle import AgentPolicy, NoShotError, apply_shot, next_shot, oracle_solvable, oracle_witness
from .trajectory import Shot, scan_shots

LABELS = ("TP", "TN", "FP", "FN")
PREDICTORS = ("heuristic", "oracle")
SOLVABLE, UNSOLVABLE = "solvable", "unsolvable"


class ClassificationError(ValueError):
    """A trial without a last-bird prediction cannot be labelled."""


@dataclass(frozen=True)
class GroupRun:
    """One group's play of a level, possibly over several attempts."""

    shots: tuple[tuple, ...]
    attempts: tuple[int, ...]
    solved: bool
    score: float
    time: float
    restarts: int
    signalled: int
    prediction: str | None
    first_solved: bool | None
    last_bird_decisions: tuple[tuple[bool, bool], ...]
    first_signal_shot: int | None = None


@dataclass(frozen=True)
class TrialRecord:
    level_id: str
    seed: int
    shots_taken: int
    prediction: str | None
    solved: bool
    final_score: float
    time_with: float
    time_without: float
    restarts: int
    signalled_restart: bool
    score_without: float = 0.0
    solved_with: bool = False
    last_bird_decisions: tuple[tuple[bool, bool], ...] = ()
    shots_with: tuple[tuple, ...] = field(default=(), repr=False)
    shots_without: tuple[tuple, ...] = field(default=(), repr=False)
    first_signal_shot: int | None = None

    def to_json(self) -> str:
        doc = asdict(self)
        doc["last_bird_decisions"] = [list(d) for d in self.last_bird_decisions]
        doc["shots_with"] = [list(s) for s in self.shots_with]
        doc["shots_without"] = [list(s) for s in self.shots_without]
        return json.dumps(doc, sort_keys=True)


def _shot_key(shot: Shot) -> tuple:
    return (shot.target_block, shot.target_point, shot.arc)


def make_predictor(kind: str, config: GlobalConfig) -> Callable[[LevelState], bool] | None:
    """None means the built-in heuristic verdict; ``oracle`` is the perfect predictor."""
    if kind not in PREDICTORS:
        raise ValueError(f"unknown predictor {kind!r}; expected one of {PREDICTORS}")
    if kind == "heuristic":
        return None
    return lambda state: oracle_solvable(state, config.oracle, config.trajectory)


def _predict(state: LevelState, config: GlobalConfig, predictor) -> bool:
    if predictor is not None:
        return predictor(state)
    return solvable_one_shot(state, config.propagation, config.trajectory).solvable


def _finisher(state: LevelState, policy: AgentPolicy, config: GlobalConfig, rng) -> Shot:
    witness = oracle_witness(state, config.oracle, config.trajectory)
    if witness is not None:
        return witness
    return next_shot(policy, state, config.trajectory, config.oracle, rng)


def play(level: Level, policy: AgentPolicy, use_restarts: bool, config: GlobalConfig,
         seed: int, predictor=None) -> GroupRun:
    """Play ``level`` until it is solved or the restart cap runs out.

    Attempt ``a`` draws its random choices from a stream keyed on the
    policy seed, ``seed`` and ``a``; both groups therefore make the same
    shots until the test group first restarts.
    """
    cap = config.harness.restart_cap
    oracle = config.oracle
    shots: list[tuple] = []
    attempts: list[int] = []
    decisions: list[tuple[bool, bool]] = []
    time = 0.0
    restarts = signalled = 0
    prediction: str | None = None
    predicted_in: int | None = None
    first_solved: bool | None = None
    first_signal: int | None = None
    solved = False
    score = 0.0

    for attempt in range(cap + 1):
        if attempt:
            time += oracle.t_restart
            restarts += 1
        rng = random.Random(f"{policy.seed}:{seed}:{attempt}")
        state = LevelState.initial(level)
        outcome = None
        while True:
            if not state.pigs:
                solved = True
                break
            if state.birds_left == 0:
                break
            last = state.birds_left == 1
            if last and prediction is None:
                prediction = SOLVABLE if _predict(state, config, predictor) else UNSOLVABLE
                predicted_in = attempt
            if use_restarts:
                # every shot is a decision point, including the first of an attempt
                decision = should_restart(state, outcome, config.restart, config.propagation,
                                          config.trajectory, predictor)
                if last:
                    decisions.append((decision.terms["unsolvable"] == 1.0, decision.decision))
                if decision.decision:
                    signalled += 1
                    if first_signal is None:
                        first_signal = len(shots)
                    break
            judged = last and attempt == predicted_in and first_solved is None
            try:
                if last:
                    shot = _finisher(state, policy, config, rng)
                else:
                    shot = next_shot(policy, state, config.trajectory, oracle, rng)
            except NoShotError:
                if judged:
                    first_solved = False
                break
            shots.append(_shot_key(shot))
            attempts.append(attempt)
            state, outcome = apply_shot(state, shot, oracle, config.trajectory, config.restart.delta_move)
            time += oracle.t_shot
            if judged:
                first_solved = not state.pigs
        score = state.accumulated_score
        if solved:
            break
    return GroupRun(
        shots=tuple(shots), attempts=tuple(attempts), solved=solved, score=score, time=time,
        restarts=restarts, signalled=signalled, prediction=prediction, first_solved=first_solved,
        last_bird_decisions=tuple(decisions), first_signal_shot=first_signal,
    )


def run_trial(level: Level, policy: AgentPolicy, config: GlobalConfig, seed: int,
              predictor=None, level_id: str = "") -> TrialRecord:
    """Play the paired test and control groups for one seed.

    The prediction and the solved flag come from the control group's first
    attempt that reaches the last bird, the state the prediction is about.
    Raises :class:`NoShotError` when nothing in the level is reachable.
    """
    if not scan_shots(level.layout, config.trajectory):
        raise NoShotError("no block is reachable from the sling")
    with_r = play(level, policy, True, config, seed, predictor)
    without = play(level, policy, False, config, seed, predictor)
    return TrialRecord(
        level_id=level_id,
        seed=seed,
        shots_taken=len(without.shots),
        prediction=without.prediction,
        solved=bool(without.first_solved),
        final_score=with_r.score,
        time_with=with_r.time,
        time_without=without.time,
        restarts=with_r.restarts,
        signalled_restart=with_r.signalled > 0,
        score_without=without.score,
        solved_with=with_r.solved,
        last_bird_decisions=with_r.last_bird_decisions,
        shots_with=with_r.shots,
        shots_without=without.shots,
        first_signal_shot=with_r.first_signal_shot,
    )


def classify(record: TrialRecord) -> str:
    if record.prediction is None:
        raise ClassificationError(f"trial {record.level_id}:{record.seed} has no last-bird prediction")
    unsolvable = record.prediction == UNSOLVABLE
    if unsolvable:
        return "FP" if record.solved else "TP"
    return "TN" if record.solved else "FN"


def time_ratio(time_without: Sequence[float], time_with: Sequence[float],
               signalled: bool = True) -> float | None:
    """Mean time without restarts over mean time with them; None stands for N/A."""
    if not signalled or not time_without or not time_with:
        return None
    denom = statistics.fmean(time_with)
    if denom == 0:
        return None
    return statistics.fmean(time_without) / denom


@dataclass(frozen=True)
class LevelRow:
    level: str
    TP: float
    TN: float
    FP: float
    FN: float
    TR: float | None
    n: int

    @property
    def rates(self) -> tuple[float, float, float, float]:
        return (self.TP, self.TN, self.FP, self.FN)


def level_row(level_id: str, records: Sequence[TrialRecord]) -> LevelRow | None:
    """Rates over the classifiable trials of one level; None when there are none."""
    labels = [classify(r) for r in records if r.prediction is not None]
    if not labels:
        return None
    n = len(labels)
    counts = {lab: labels.count(lab) for lab in LABELS}
    tr = time_ratio([r.time_without for r in records], [r.time_with for r in records],
                    any(r.signalled_restart for r in records))
    return LevelRow(level_id, *(counts[lab] / n for lab in LABELS), tr, n)


def aggregate(rows: Sequence[LevelRow]) -> LevelRow:
    """Mean of every rate column; TR is averaged over the levels that have one."""
    if not rows:
        raise ValueError("nothing to aggregate")
    means = [statistics.fmean(r.rates[i] for r in rows) for i in range(4)]
    trs = [r.TR for r in rows if r.TR is not None]
    tr = statistics.fmean(trs) if trs else None
    return LevelRow("Average", *means, tr, sum(r.n for r in rows))


@dataclass(frozen=True)
class ScoreRow:
    level: str
    score_with: float
    score_with_std: float
    score_without: float
    score_without_std: float
    time_with: float
    time_without: float


@dataclass
class EvaluationReport:
    rows: list[LevelRow]
    average: LevelRow | None
    trials: int
    scores: list[ScoreRow] = field(default_factory=list)
    degenerate: list[str] = field(default_factory=list)
    unclassified: list[str] = field(default_factory=list)
    records: list[TrialRecord] = field(default_factory=list, repr=False)


def _level_task(args) -> list[TrialRecord] | None:
    level_id, level, policy, config, trials, predictor_kind = args
    predictor = make_predictor(predictor_kind, config)
    try:
        return [run_trial(level, policy, config, t, predictor, level_id) for t in range(trials)]
    except NoShotError:
        return None


def evaluate(levels: Iterable[tuple[str, Level]], policy: AgentPolicy, config: GlobalConfig,
             trials: int | None = None, predictor: str = "heuristic", jobs: int = 1) -> EvaluationReport:
    """Run ``trials`` paired trials per level and build the report.

    Results do not depend on ``jobs``: levels are farmed out whole and
    collected in input order.
    """
    trials = trials if trials is not None else config.harness.trials
    if trials < 1:
        raise ValueError("trials must be at least 1")
    make_predictor(predictor, config)
    levels = list(levels)
    tasks = [(lid, lv, policy, config, trials, predictor) for lid, lv in levels]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_level_task, tasks))
    else:
        results = [_level_task(t) for t in tasks]

    report = EvaluationReport(rows=[], average=None, trials=trials)
    for (lid, _), recs in zip(levels, results):
        if recs is None:
            report.degenerate.append(lid)
            continue
        report.records.extend(recs)
        row = level_row(lid, recs)
        if row is None:
            report.unclassified.append(lid)
        else:
            report.rows.append(row)
        report.scores.append(ScoreRow(
            lid,
            statistics.fmean(r.final_score for r in recs), statistics.pstdev(r.final_score for r in recs),
            statistics.fmean(r.score_without for r in recs), statistics.pstdev(r.score_without for r in recs),
            statistics.fmean(r.time_with for r in recs), statistics.fmean(r.time_without for r in recs),
        ))
    if report.rows:
        report.average = aggregate(report.rows)
    return report


# -- rendering ---------------------------------------------------------------

def fmt(value: float | None) -> str:
    """Four decimals at most, trailing zeros dropped; None is N/A."""
    if value is None:
        return "N/A"
    text = f"{value:.4f}".rstrip("0").rstrip(".")
    return "0" if text in ("", "-0") else text


CSV_COLUMNS = ("level", "TP", "TN", "FP", "FN", "TR", "n")


def _row_cells(row: LevelRow) -> list[str]:
    return [row.level, *(fmt(v) for v in row.rates), fmt(row.TR), str(row.n)]


def rows_to_csv(rows: Sequence[LevelRow], average: LevelRow | None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow(_row_cells(row))
    if average is not None:
        w.writerow(_row_cells(average))
    return buf.getvalue()


def report_csv(report: EvaluationReport) -> str:
    return rows_to_csv(report.rows, report.average)


def scores_csv(report: EvaluationReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("level", "score_with", "score_with_std", "score_without", "score_without_std",
                "time_with", "time_without"))
    for s in report.scores:
        w.writerow((s.level, fmt(s.score_with), fmt(s.score_with_std), fmt(s.score_without),
                    fmt(s.score_without_std), fmt(s.time_with), fmt(s.time_without)))
    return buf.getvalue()


def read_rows_csv(text: str) -> tuple[list[LevelRow], LevelRow | None]:
    """Parse a report CSV back into level rows and the average row."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"expected columns {','.join(CSV_COLUMNS)}")
    rows, average = [], None
    for rec in reader:
        tr = None if rec["TR"] == "N/A" else float(rec["TR"])
        row = LevelRow(rec["level"], *(float(rec[k]) for k in LABELS), tr, int(rec["n"]))
        if row.level == "Average":
            average = row
        else:
            rows.append(row)
    return rows, average


def rows_to_markdown(rows: Sequence[LevelRow], average: LevelRow | None, title: str = "") -> str:
    """Aligned table, one row per level, the largest outcome per row in bold."""
    header = ["Level", *LABELS, "TR", "n"]
    body = []
    for row in [*rows, *([average] if average is not None else [])]:
        cells = _row_cells(row)
        best = max(row.rates)
        for i, v in enumerate(row.rates):
            if v == best and best > 0:
                cells[1 + i] = f"**{cells[1 + i]}**"
        if row is average:
            cells[0] = "**Average**"
        body.append(cells)
    widths = [max(len(header[i]), *(len(r[i]) for r in body)) if body else len(header[i])
              for i in range(len(header))]

    def line(cells, numeric):
        out = []
        for i, c in enumerate(cells):
            out.append(c.rjust(widths[i]) if numeric and i else c.ljust(widths[i]))
        return "| " + " | ".join(out) + " |"

    sep = "|" + "|".join("-" * (w + 1) + (":" if i else "-") for i, w in enumerate(widths)) + "|"
    parts = []
    if title:
        parts += [title, ""]
    parts.append(line(header, False))
    parts.append(sep)
    parts.extend(line(r, True) for r in body)
    total = average.n if average is not None else sum(r.n for r in rows)
    parts += ["", f"Rates over classified trials; n = {total} in total. TR is N/A where no restart was signalled."]
    return "\n".join(parts) + "\n"


def report_markdown(report: EvaluationReport, title: str = "") -> str:
    text = rows_to_markdown(report.rows, report.average, title)
    notes = []
    if report.degenerate:
        notes.append("Degenerate levels (nothing reachable), excluded: " + ", ".join(report.degenerate))
    if report.unclassified:
        notes.append("Levels never reaching a last-bird decision, excluded: " + ", ".join(report.unclassified))
    if notes:
        text += "\n" + "\n".join(notes) + "\n"
    return text


def trials_jsonl(report: EvaluationReport) -> str:
    return "".join(r.to_json() + "\n" for r in report.records)
