import math

import numpy as np
import pytest

from geg.errors import DomainError
from geg.olps import PriceSeries, run_baselines
from geg.search import (
    HyperSpace,
    Interval,
    SplitScheme,
    evaluate_config,
    grid_search,
    random_search,
    walk_forward_splits,
)


def point_space(**kw):
    base = dict(a=(0.0,), b=(0.0,), q=(1.0,), eta=(0.05,), gamma=(0.0,))
    base.update(kw)
    return HyperSpace(**base)


@pytest.fixture(scope="module")
def dominant_market():
    # asset 0 gains 3% per period with noise; the others drift flat
    rng = np.random.default_rng(21)
    rel = np.column_stack([1.03 + 0.01 * rng.standard_normal(120),
                           1.0 + 0.02 * rng.standard_normal((120, 2))])
    return PriceSeries(np.vstack([np.ones(3), np.cumprod(rel, axis=0)]))


def test_split_example():
    splits = walk_forward_splits(100, SplitScheme(60, 20))
    assert splits == [(range(0, 60), range(60, 80)), (range(20, 80), range(80, 100))]


def test_split_edge_cases():
    assert len(walk_forward_splits(80, SplitScheme(60, 20))) == 1
    with pytest.raises(DomainError):
        walk_forward_splits(79, SplitScheme(60, 20))
    with pytest.raises(DomainError):
        walk_forward_splits(100, SplitScheme(60, 20, folds=3))
    anchored = walk_forward_splits(100, SplitScheme(40, 20, anchored=True))
    assert [tr for tr, _ in anchored] == [range(0, 40), range(0, 60), range(0, 80)]
    assert len(walk_forward_splits(100, SplitScheme(40, 20, folds=2))) == 2


@pytest.mark.parametrize("T, train, test, anchored", [(100, 60, 20, False), (250, 30, 7, True), (31, 10, 3, False)])
def test_splits_are_chronological(T, train, test, anchored):
    splits = walk_forward_splits(T, SplitScheme(train, test, anchored=anchored))
    for tr, te in splits:
        assert tr.stop <= te.start
        assert te.stop <= T
    starts = [te.start for _, te in splits]
    assert starts == sorted(starts)


def test_single_point_grid(dominant_market):
    scheme = SplitScheme(60, 30)
    res = grid_search(point_space(), dominant_market, scheme)
    assert res.evaluated == 1 and res.invalid == 0
    score, folds = evaluate_config(res.best.config, dominant_market, res.splits)
    assert res.best.score == score and res.best.fold_wealth == folds


def test_invalid_combinations_counted(dominant_market):
    space = point_space(a=(0.0, 0.5), b=(0.0, 0.5))
    res = grid_search(space, dominant_market, SplitScheme(60, 30))
    # (0.5, 0.5) is skipped; (0, 0), (0, 0.5), (0.5, 0) remain
    assert res.invalid == 1
    assert res.evaluated == 3
    assert res.evaluated + res.invalid == space.grid_size()


def test_all_invalid_raises(dominant_market):
    with pytest.raises(DomainError):
        grid_search(point_space(a=(0.5,), b=(0.5,)), dominant_market, SplitScheme(60, 30))


def test_eg_beats_static_on_dominant_market(dominant_market):
    res = grid_search(point_space(eta=(0.0, 0.5)), dominant_market, SplitScheme(60, 30))
    assert res.best.point["eta"] == 0.5
    assert res.ranking[0].score > res.ranking[1].score


def test_tie_break_is_lexicographic():
    prices = np.ones((40, 2))  # every config earns exactly 1
    res = grid_search(point_space(eta=(0.5, 0.1), q=(1.0, 0.0)), prices, SplitScheme(20, 10))
    assert [(e.point["q"], e.point["eta"]) for e in res.ranking] == [(0.0, 0.1), (0.0, 0.5), (1.0, 0.1), (1.0, 0.5)]


def test_failed_evaluation_ranks_last():
    prices = np.array([[1.0, 1.0]] * 3 + [[3.0, 0.1]] + [[1.0, 1.0]] * 4)
    space = point_space(a=(-0.5,), eta=(0.05, 10.0))
    res = grid_search(space, prices, SplitScheme(4, 3))
    assert res.ranking[-1].score == -math.inf
    assert res.ranking[-1].error


def test_random_search_determinism(dominant_market):
    space = HyperSpace(a=Interval(-0.9, 0.9), b=Interval(-0.9, 0.9), eta=Interval(0.01, 1.0, log=True))
    r1 = random_search(space, dominant_market, SplitScheme(60, 30), samples=15, seed=4)
    r2 = random_search(space, dominant_market, SplitScheme(60, 30), samples=15, seed=4)
    assert [(e.point, e.score) for e in r1.ranking] == [(e.point, e.score) for e in r2.ranking]
    assert r1.invalid > 0  # about half the (a, b) draws have a * b > 0
    for e in r1.ranking:
        assert e.point["a"] * e.point["b"] <= 0
    r3 = random_search(space, dominant_market, SplitScheme(60, 30), samples=1, seed=5)
    assert r3.evaluated == 1


def test_random_search_beats_crp_on_dominant_market(dominant_market):
    scheme = SplitScheme(60, 30)
    res = random_search(HyperSpace(), dominant_market, scheme, samples=200, seed=0)
    crp = run_baselines(dominant_market)["uniform_crp"]
    crp_score = np.mean([np.prod(crp.returns[te.start:te.stop]) for _, te in res.splits])
    assert res.best.score >= crp_score


def test_parallel_matches_serial(dominant_market):
    space = point_space(eta=(0.01, 0.1, 1.0), a=(0.0, 0.25), b=(-0.25, 0.0))
    serial = grid_search(space, dominant_market, SplitScheme(60, 30))
    parallel = grid_search(space, dominant_market, SplitScheme(60, 30), n_jobs=2)
    assert [(e.index, e.score) for e in serial.ranking] == [(e.index, e.score) for e in parallel.ranking]


def test_objectives(dominant_market):
    space = point_space()
    scheme = SplitScheme(30, 30)
    folds = grid_search(space, dominant_market, scheme).best.fold_wealth
    assert grid_search(space, dominant_market, scheme, "worst_wealth").best.score == min(folds)
    assert grid_search(space, dominant_market, scheme, "mean_log_wealth").best.score == pytest.approx(
        np.mean(np.log(folds)))
    with pytest.raises(DomainError):
        grid_search(space, dominant_market, scheme, "sharpe")
