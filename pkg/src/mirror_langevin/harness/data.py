"""Synthetic logistic-regression data and its CSV exchange format."""

from __future__ import annotations

import csv

import numpy as np
from scipy.special import expit

from ..exceptions import ParseError
from ..oracle import sample_uniform_l1_ball
from ..potentials import LogisticDataset


def generate_logistic_data(d: int, n: int, theta_star, rng) -> LogisticDataset:
    """Covariates uniform on the l1 ball, labels ``Bernoulli(sigmoid(<theta*, X>))``."""
    if d < 1 or n < 1:
        raise ValueError("d and n must be positive")
    theta = np.broadcast_to(np.asarray(theta_star, dtype=float), (d,))
    X = sample_uniform_l1_ball(d, rng, size=n)
    p = expit(X @ theta)
    y = (rng.uniform(size=n) < p).astype(float)
    return LogisticDataset(X, y)


def write_dataset(ds: LogisticDataset, path) -> None:
    """CSV with header ``y,x1,...,xd``; floats are written round-trip exact."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["y"] + [f"x{i + 1}" for i in range(ds.dimension)])
        for yi, xi in zip(ds.labels, ds.features):
            w.writerow([int(yi)] + [repr(float(v)) for v in xi])


def read_dataset(path) -> LogisticDataset:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or rows[0][0] != "y":
        raise ParseError("dataset header must start with 'y'", 1)
    d = len(rows[0]) - 1
    if rows[0][1:] != [f"x{i + 1}" for i in range(d)]:
        raise ParseError("dataset header must be y,x1,...,xd", 1)
    ys, xs = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != d + 1:
            raise ParseError(f"expected {d + 1} fields, got {len(row)}", lineno)
        try:
            ys.append(float(row[0]))
            xs.append([float(v) for v in row[1:]])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    if not ys:
        raise ParseError("dataset has no rows", 2)
    return LogisticDataset(np.array(xs), np.array(ys))
