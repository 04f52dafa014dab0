"""Grid and random hyperparameter search scored by walk-forward validation.

Each fold runs the (online) strategy over its train window followed by its
test window; the train window only warms up the weights, and the fold score
is the wealth multiple earned over the test window alone.
"""

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .deform import DeformParams
from .errors import DomainError, GEGError
from .mirror import LearningRate
from .olps import PriceSeries, SparsifyRule, StrategyConfig, backtest

__all__ = [
    "Interval",
    "HyperSpace",
    "SplitScheme",
    "Evaluation",
    "SearchResult",
    "OBJECTIVES",
    "default_space",
    "walk_forward_splits",
    "evaluate_config",
    "grid_search",
    "random_search",
]


@dataclass(frozen=True)
class Interval:
    """Continuous sampling range for random search (log-uniform if ``log``)."""

    low: float
    high: float
    log: bool = False

    def __post_init__(self):
        if not self.low <= self.high:
            raise DomainError(f"interval low > high: {self.low} > {self.high}")
        if self.log and self.low <= 0:
            raise DomainError("log-uniform interval needs a positive lower bound")

    def sample(self, rng):
        if self.log:
            return float(math.exp(rng.uniform(math.log(self.low), math.log(self.high))))
        return float(rng.uniform(self.low, self.high))


_DEFAULT_AB = (-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75)


@dataclass(frozen=True)
class HyperSpace:
    """Search axes. Each axis is a tuple of values or (random search only) an Interval.

    Axis order is also the lexicographic tie-break order of the ranking.
    """

    a: object = _DEFAULT_AB
    b: object = _DEFAULT_AB
    q: object = (0.0, 0.5, 1.0)
    eta: object = (0.01, 0.0316227766016838, 0.1, 0.316227766016838, 1.0)
    gamma: object = (0.0, 0.5, 1.0)
    schedule: tuple = ("power",)
    centering: tuple = ("weighted",)
    projection: tuple = ("l1",)
    preprocessing: tuple = ("raw",)
    window: tuple = (5,)
    sparsify: SparsifyRule = field(default_factory=SparsifyRule)
    negative_cap: float = 1.0

    AXES = ("a", "b", "q", "eta", "gamma", "schedule", "centering", "projection",
            "preprocessing", "window")

    def __post_init__(self):
        for name in self.AXES:
            axis = getattr(self, name)
            if isinstance(axis, Interval):
                continue
            axis = tuple(axis)
            if not axis:
                raise DomainError(f"axis {name!r} is empty")
            object.__setattr__(self, name, axis)

    def grid_size(self):
        return math.prod(len(self._values(n)) for n in self.AXES)

    def _values(self, name):
        axis = getattr(self, name)
        if isinstance(axis, Interval):
            raise DomainError(f"axis {name!r} is an interval; grid search needs value lists")
        return axis

    def build(self, point):
        """StrategyConfig for a dict of axis values; DomainError if invalid."""
        return StrategyConfig(
            deform=DeformParams(point["a"], point["b"]),
            q=float(point["q"]),
            lr=LearningRate(float(point["eta"]), float(point["gamma"]), point["schedule"],
                            self.negative_cap),
            centering=point["centering"],
            projection=point["projection"],
            preprocessing=point["preprocessing"],
            window=int(point["window"]),
            sparsify=self.sparsify,
        )


def default_space(**overrides):
    """Default search space; the value ranges are a convention, not tuned."""
    return HyperSpace(**overrides)


@dataclass(frozen=True)
class SplitScheme:
    """Walk-forward folds over period indices.

    Rolling folds slide a fixed-length train window forward by ``test``
    periods; anchored folds keep the train window starting at 0.  ``folds``
    caps the number of folds (earliest first); None uses every fold that fits.
    """

    train: int
    test: int
    folds: int = None
    anchored: bool = False

    def __post_init__(self):
        if self.train < 1 or self.test < 1:
            raise DomainError("train and test lengths must be >= 1")
        if self.folds is not None and self.folds < 1:
            raise DomainError("folds must be >= 1")


def walk_forward_splits(n_periods, scheme):
    """List of (train range, test range) pairs, chronologically ordered."""
    available = (n_periods - scheme.train) // scheme.test if n_periods >= scheme.train else 0
    if available < 1:
        raise DomainError(
            f"{n_periods} periods cannot hold a train window of {scheme.train} "
            f"and a test window of {scheme.test}"
        )
    count = available if scheme.folds is None else scheme.folds
    if count > available:
        raise DomainError(f"requested {count} folds but only {available} fit in {n_periods} periods")
    splits = []
    for i in range(count):
        test_start = scheme.train + i * scheme.test
        train_start = 0 if scheme.anchored else i * scheme.test
        splits.append((range(train_start, test_start), range(test_start, test_start + scheme.test)))
    return splits


def _mean_wealth(fold_wealth):
    return float(np.mean(fold_wealth))


def _mean_log_wealth(fold_wealth):
    return float(np.mean(np.log(fold_wealth)))


def _worst_wealth(fold_wealth):
    return float(np.min(fold_wealth))


OBJECTIVES = {
    "mean_wealth": _mean_wealth,
    "mean_log_wealth": _mean_log_wealth,
    "worst_wealth": _worst_wealth,
}


@dataclass(frozen=True)
class Evaluation:
    index: int
    point: dict
    config: StrategyConfig
    score: float
    fold_wealth: tuple
    error: str = None

    def sort_key(self):
        score = self.score if math.isfinite(self.score) else -math.inf
        return (-score,) + tuple(_key_part(self.point[n]) for n in HyperSpace.AXES)


def _key_part(value):
    return (0, float(value)) if isinstance(value, (int, float)) else (1, str(value))


@dataclass
class SearchResult:
    """Ranked evaluations (best first) plus bookkeeping."""

    ranking: list
    evaluated: int
    invalid: int
    splits: list
    objective: str
    method: str

    @property
    def best(self):
        return self.ranking[0]


def evaluate_config(cfg, prices, splits, objective="mean_wealth"):
    """Objective value and per-fold test wealth multiples for one config."""
    prices = prices if isinstance(prices, PriceSeries) else PriceSeries(prices)
    fold_wealth = []
    for train, test in splits:
        window = prices.window(train.start, test.stop + 1)
        result = backtest(window, cfg)
        offset = test.start - train.start
        fold_wealth.append(float(np.prod(result.returns[offset:])))
    return OBJECTIVES[objective](fold_wealth), tuple(fold_wealth)


def _evaluate(job):
    index, point, cfg, prices, splits, objective = job
    try:
        score, fold_wealth = evaluate_config(cfg, prices, splits, objective)
        return Evaluation(index, point, cfg, score, fold_wealth)
    except GEGError as exc:
        return Evaluation(index, point, cfg, -math.inf, (), str(exc))


def _run(jobs, n_jobs):
    if n_jobs == 1:
        evaluations = [_evaluate(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            evaluations = list(pool.map(_evaluate, jobs, chunksize=8))
    # merge by index first so worker scheduling cannot affect the ranking
    evaluations.sort(key=lambda e: e.index)
    return sorted(evaluations, key=Evaluation.sort_key)


def _prepare(prices, scheme, objective):
    if objective not in OBJECTIVES:
        raise DomainError(f"unknown objective {objective!r}; choose from {sorted(OBJECTIVES)}")
    series = prices if isinstance(prices, PriceSeries) else PriceSeries(prices)
    return series, walk_forward_splits(series.shape[0] - 1, scheme)


def grid_search(space, prices, scheme, objective="mean_wealth", n_jobs=1):
    """Evaluate every valid combination of the axis values."""
    series, splits = _prepare(prices, scheme, objective)
    jobs, invalid = [], 0
    for values in itertools.product(*(space._values(n) for n in HyperSpace.AXES)):
        point = dict(zip(HyperSpace.AXES, values))
        try:
            cfg = space.build(point)
        except DomainError:
            invalid += 1
            continue
        jobs.append((len(jobs), point, cfg, series, splits, objective))
    if not jobs:
        raise DomainError(f"no valid combination in the search space ({invalid} invalid)")
    ranking = _run(jobs, n_jobs)
    return SearchResult(ranking, len(jobs), invalid, splits, objective, "grid")


def random_search(space, prices, scheme, objective="mean_wealth", samples=50, seed=0,
                  n_jobs=1, max_rejections=10_000):
    """Evaluate ``samples`` random valid configurations drawn with a seeded generator.

    Invalid draws (mostly (a, b) pairs with a*b > 0) are rejected and counted.
    """
    if samples < 1:
        raise DomainError("samples must be >= 1")
    series, splits = _prepare(prices, scheme, objective)
    rng = np.random.default_rng(seed)
    jobs, invalid = [], 0
    while len(jobs) < samples:
        point = {}
        for name in HyperSpace.AXES:
            axis = getattr(space, name)
            if isinstance(axis, Interval):
                point[name] = axis.sample(rng)
            else:
                point[name] = axis[int(rng.integers(len(axis)))]
        try:
            cfg = space.build(point)
        except DomainError:
            invalid += 1
            if invalid > max_rejections:
                raise DomainError(f"gave up after {invalid} invalid draws; check the space")
            continue
        jobs.append((len(jobs), point, cfg, series, splits, objective))
    ranking = _run(jobs, n_jobs)
    return SearchResult(ranking, len(jobs), invalid, splits, objective, "random")
