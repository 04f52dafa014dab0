"""Regenerate the stored test fixtures.

Standalone on purpose: the classical EG trajectory is computed with plain
``math`` so it stays independent of the package under test.

    python tests/data/make_fixtures.py
"""

import csv
import datetime as dt
import math
import random
from pathlib import Path

HERE = Path(__file__).parent


def random_walk(rng, periods, assets, start=100.0, vol=0.02, drift=0.0003):
    prices = [[start * (1 + 0.1 * j) for j in range(assets)]]
    for _ in range(periods):
        prev = prices[-1]
        prices.append([p * math.exp(rng.gauss(drift, vol)) for p in prev])
    return prices


def write_prices(path, labels, assets, prices):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["date", *assets])
        for label, row in zip(labels, prices):
            out.writerow([label, *(repr(v) for v in row)])


def classical_eg(prices, eta):
    """Helmbold et al. EG: w <- w * exp(eta * x / (w . x)), renormalized."""
    n = len(prices[0])
    w = [1.0 / n] * n
    traj = []
    for t in range(1, len(prices)):
        x = [prices[t][i] / prices[t - 1][i] for i in range(n)]
        traj.append(list(w))
        wx = sum(wi * xi for wi, xi in zip(w, x))
        w = [wi * math.exp(eta * xi / wx) for wi, xi in zip(w, x)]
        s = sum(w)
        w = [wi / s for wi in w]
    return traj


def main():
    rng = random.Random(20240101)
    start = dt.date(2023, 1, 2)

    prices = random_walk(rng, 252, 3)
    labels = [(start + dt.timedelta(days=i)).isoformat() for i in range(len(prices))]
    write_prices(HERE / "synthetic_3x252.csv", labels, ["AAA", "BBB", "CCC"], prices)

    prices = random_walk(rng, 60, 4, vol=0.04)
    labels = [str(i) for i in range(len(prices))]
    write_prices(HERE / "eg_fixture_prices.csv", labels, ["W", "X", "Y", "Z"], prices)
    with open(HERE / "eg_fixture_weights.csv", "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["period", "W", "X", "Y", "Z"])
        for label, w in zip(labels[1:], classical_eg(prices, eta=0.05)):
            out.writerow([label, *(repr(v) for v in w)])


if __name__ == "__main__":
    main()
