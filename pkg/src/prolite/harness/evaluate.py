"""Evaluation loop: run the multiple-try pipeline over a problem set,
score answers against the gold labels, and aggregate per category."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ..orchestrator import RetryPolicy, multiple_try, run_candidate
from ..providers import transcript_filename
from .problems import FIXTURES

REL_TOLERANCE = 1e-6

# Default few-shot exemplar: a worked constraint puzzle with its program.
DEFAULT_SHOTS = ((FIXTURES[0].statement, FIXTURES[0].reference_program),)


def is_correct(answer, gold):
    """Exact match for integer golds, relative tolerance otherwise."""
    if answer is None:
        return False
    if isinstance(gold, int):
        return answer == gold
    return abs(answer - gold) <= REL_TOLERANCE * max(1.0, abs(gold))


def check_reference(problem, budget=None):
    """Run the problem's reference program; True when it reproduces the
    gold answer, None when the problem has no reference program."""
    if problem.reference_program is None:
        return None
    result = run_candidate(problem.reference_program, problem.entry, budget)
    return result.status == "ok" and is_correct(result.answer, problem.gold)


@dataclass
class RunResult:
    problem_id: str
    repeat: int
    answer: object
    correct: bool
    attempts_used: int
    statuses: tuple


@dataclass
class EvalReport:
    problems: list = field(default_factory=list)
    categories: dict = field(default_factory=dict)
    runs: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def as_dict(self):
        out = {"problems": self.problems, "categories": self.categories}
        if self.meta:
            out["meta"] = self.meta
        return out


def _run_one(problem, provider, policy, shots, repeat, transcript_dir):
    stream = None
    if transcript_dir is not None:
        path = Path(transcript_dir) / transcript_filename(problem.id, repeat)
        stream = open(path, "w", encoding="utf-8")
    try:
        outcome = multiple_try(problem, provider, policy, shots=shots,
                               repeat=repeat, transcript=stream)
    finally:
        if stream is not None:
            stream.close()
    return RunResult(
        problem_id=problem.id,
        repeat=repeat,
        answer=outcome.final_answer,
        correct=is_correct(outcome.final_answer, problem.gold),
        attempts_used=outcome.attempts_used,
        statuses=tuple(a.exec_status for a in outcome.attempts),
    )


def evaluate(problems, provider, policy=RetryPolicy(), repeats=1,
             shots=DEFAULT_SHOTS, transcript_dir=None, workers=1,
             check_references=False):
    """Score every problem over the given number of repeats.

    Returns an EvalReport with one row per problem, per-category
    aggregates, and the raw runs.  Output is deterministic for
    deterministic providers regardless of the worker count.
    """
    if transcript_dir is not None:
        Path(transcript_dir).mkdir(parents=True, exist_ok=True)
    jobs = [(problem, repeat) for problem in problems
            for repeat in range(repeats)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                lambda job: _run_one(job[0], provider, policy, shots,
                                     job[1], transcript_dir), jobs))
    else:
        results = [_run_one(problem, provider, policy, shots, repeat,
                            transcript_dir)
                   for problem, repeat in jobs]
    by_problem = {}
    for result in results:
        by_problem.setdefault(result.problem_id, []).append(result)

    report = EvalReport(runs=results)
    report.meta = {
        "repeats": repeats,
        "max_attempts": policy.max_attempts,
        "temperature_range": [policy.temp_start, policy.temp_end],
        "problem_count": len(problems),
    }
    for problem in problems:
        runs = sorted(by_problem.get(problem.id, []),
                      key=lambda r: r.repeat)
        correct = sum(1 for r in runs if r.correct)
        total = len(runs)
        row = {
            "id": problem.id,
            "category": problem.category,
            "gold": problem.gold,
            "entanglement": problem.entanglement,
            "correct_runs": correct,
            "total_runs": total,
            "accuracy": correct / total if total else 0.0,
            "mean_attempts": (sum(r.attempts_used for r in runs) / total
                              if total else 0.0),
        }
        if check_references:
            row["reference_ok"] = check_reference(problem)
        report.problems.append(row)
    for row in report.problems:
        bucket = report.categories.setdefault(row["category"], {
            "problems": 0, "correct_runs": 0, "total_runs": 0,
            "attempts": 0.0})
        bucket["problems"] += 1
        bucket["correct_runs"] += row["correct_runs"]
        bucket["total_runs"] += row["total_runs"]
        bucket["attempts"] += row["mean_attempts"] * row["total_runs"]
    for bucket in report.categories.values():
        attempts = bucket.pop("attempts")
        total = bucket["total_runs"]
        bucket["accuracy"] = (bucket["correct_runs"] / total
                              if total else 0.0)
        bucket["mean_attempts"] = attempts / total if total else 0.0
    return report
