"""Per-iteration metric records and their CSV format."""

from __future__ import annotations

import csv
from typing import Iterable, NamedTuple

HEADER = ("experiment", "sampler", "inner_steps", "trial", "iteration", "metric", "value")

#: ``trial`` value used for rows holding the average over trials.
MEAN_TRIAL = -1


class RunRecord(NamedTuple):
    experiment: str
    sampler: str
    inner_steps: int
    trial: int
    iteration: int
    metric: str
    value: float


def sort_key(r: RunRecord):
    return (r.sampler, r.inner_steps, r.trial, r.iteration, r.metric)


def write_csv(records: Iterable[RunRecord], path) -> None:
    """Write records sorted by (sampler, inner_steps, trial, iteration).

    Values use ``repr``, the shortest decimal string that round-trips.
    """
    rows = sorted(records, key=sort_key)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for r in rows:
            w.writerow([r.experiment, r.sampler, r.inner_steps, r.trial, r.iteration, r.metric,
                        repr(float(r.value))])


def read_csv(path) -> list[RunRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != HEADER:
            raise ValueError(f"unexpected header {header}")
        return [RunRecord(e, s, int(k), int(t), int(i), m, float(v)) for e, s, k, t, i, m, v in reader]


def select(records: Iterable[RunRecord], **match) -> list[RunRecord]:
    return [r for r in records if all(getattr(r, k) == v for k, v in match.items())]
