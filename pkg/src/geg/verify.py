"""Fast invariant checks runnable without a test framework (``geg verify``)."""

from dataclasses import dataclass

import numpy as np

from .deform import (
    DeformParams,
    bregman_divergence,
    closed_form_exp,
    deformed_exp,
    deformed_exp_series,
    deformed_log,
    numeric_exp,
)
from .mirror import LearningRate, ProjectionKind, geg_step_normalized
from .olps import StrategyConfig, backtest, olps_gradient, tsallis_log_loss

__all__ = ["Check", "CheckResult", "CHECKS", "run_checks", "random_params"]


def random_params(rng, limit=0.95):
    """A random valid (a, b) pair: opposite signs, or one of them zero."""
    a = rng.uniform(-limit, limit)
    b = -np.sign(a) * rng.uniform(0.0, limit)
    return DeformParams(a, b)


NAMED = (
    DeformParams.natural(),
    DeformParams.tsallis(0.5),
    DeformParams.tsallis(1.5),
    DeformParams.kaniadakis(0.5),
    DeformParams.amari(0.5),
    DeformParams.abe(1.5),
    DeformParams.gamma(0.25),
)


def _round_trip(rng):
    worst = 0.0
    for _ in range(100):
        p = random_params(rng)
        x = 10.0 ** rng.uniform(-3, 3, size=5)
        worst = max(worst, float(np.max(np.abs(deformed_exp(p, deformed_log(p, x)) / x - 1))))
    return worst


def _reverse_round_trip(rng):
    worst = 0.0
    for _ in range(100):
        p = random_params(rng)
        y = deformed_log(p, 10.0 ** rng.uniform(-2, 2, size=5))
        worst = max(worst, float(np.max(np.abs(deformed_log(p, deformed_exp(p, y)) - y))))
    return worst


def _closed_forms(rng):
    y = np.linspace(-2, 2, 401)
    worst = 0.0
    for p in (DeformParams.tsallis(0.5), DeformParams.kaniadakis(0.5),
              DeformParams.amari(0.25), DeformParams.gamma(0.25)):
        worst = max(worst, float(np.max(np.abs(numeric_exp(p, y) - closed_form_exp(p, y)))))
    return worst


def _symmetry(rng):
    worst = 0.0
    for _ in range(50):
        p = random_params(rng)
        x = 10.0 ** rng.uniform(-3, 3, size=5)
        swapped = DeformParams(p.b, p.a)
        worst = max(worst, float(np.max(np.abs(deformed_log(p, x) - deformed_log(swapped, x)))))
    return worst


def _self_duality(rng):
    worst = 0.0
    for _ in range(50):
        p = random_params(rng)
        x = 10.0 ** rng.uniform(-1, 1, size=5)
        dual = DeformParams(-p.b, -p.a)
        worst = max(worst, float(np.max(np.abs(deformed_log(p, 1 / x) + deformed_log(dual, x)))))
    return worst


def _series(rng):
    fitted = 0.0
    for _ in range(50):
        p = random_params(rng)
        y = rng.uniform(-0.25, 0.25, size=5)
        y = y[np.abs(y) > 1e-3]
        err = np.abs(deformed_exp(p, y) - deformed_exp_series(p, y))
        fitted = max(fitted, float(np.max(err / y ** 4)))
    return fitted


def _eg_equivalence(rng):
    worst = 0.0
    p = DeformParams.natural()
    for _ in range(50):
        w = rng.dirichlet(np.ones(4))
        g = rng.normal(size=4)
        eta = rng.uniform(0.01, 1)
        ours = geg_step_normalized(p, w, g, LearningRate(eta))
        eg = w * np.exp(-eta * g)
        worst = max(worst, float(np.max(np.abs(ours - eg / eg.sum()))))
    return worst


def _simplex(rng):
    worst = 0.0
    for _ in range(50):
        p = random_params(rng, 0.9)
        w = rng.dirichlet(np.ones(5))
        g = rng.normal(size=5)
        g = g - w @ g
        for proj in ProjectionKind:
            out = geg_step_normalized(p, w, g, LearningRate(0.1), proj)
            worst = max(worst, abs(out.sum() - 1.0), float(max(0.0, -out.min())))
    return worst


def _gradient(rng):
    worst = 0.0
    h = 1e-6
    for _ in range(50):
        n = 4
        w = rng.dirichlet(np.ones(n))
        xhat = rng.uniform(0.7, 1.3, size=n)
        q = float(rng.choice([0.0, 0.5, 1.0, 1.5]))
        g = olps_gradient(q, w, xhat)
        fd = np.empty(n)
        for i in range(n):
            e = np.zeros(n)
            e[i] = h
            up, dn = w + e, w - e
            fd[i] = (tsallis_log_loss(q, up / up.sum(), xhat)
                     - tsallis_log_loss(q, dn / dn.sum(), xhat)) / (2 * h)
        worst = max(worst, float(np.linalg.norm(g - fd) / max(np.linalg.norm(g), 1e-12)))
    return worst


def _bregman_kl(rng):
    worst = 0.0
    p = DeformParams.natural()
    for _ in range(50):
        w, v = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(4))
        worst = max(worst, abs(bregman_divergence(p, w, v) - float(np.sum(w * np.log(w / v)))))
    return worst


def _wealth(rng):
    prices = np.cumprod(rng.uniform(0.9, 1.1, size=(60, 3)), axis=0)
    cfg = StrategyConfig(deform=DeformParams.kaniadakis(0.5), lr=LearningRate(0.2))
    res = backtest(prices, cfg)
    x = prices[1:] / prices[:-1]
    oracle = np.prod(np.sum(res.weights * x, axis=1))
    return abs(res.final_wealth / oracle - 1.0)


@dataclass(frozen=True)
class Check:
    name: str
    func: object
    tol: float


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tol: float
    passed: bool
    error: str = None


CHECKS = [
    Check("round trip exp(log x) = x (relative)", _round_trip, 1e-8),
    Check("reverse round trip log(exp y) = y", _reverse_round_trip, 1e-8),
    Check("numeric inverse matches closed forms", _closed_forms, 1e-10),
    Check("symmetry log_ab = log_ba", _symmetry, 0.0),
    Check("self-duality log_ab(1/x) = -log_(-b,-a)(x)", _self_duality, 1e-12),
    Check("series fit constant C in |exp - series| <= C y^4", _series, 10.0),
    Check("a=b=0 normalized step equals classical EG", _eg_equivalence, 1e-12),
    Check("simplex preservation of normalized steps", _simplex, 1e-12),
    Check("OLPS gradient vs finite differences (relative)", _gradient, 1e-5),
    Check("a=b=0 Bregman divergence equals KL", _bregman_kl, 1e-10),
    Check("backtest wealth equals product of w.x (relative)", _wealth, 1e-12),
]


def run_checks(checks=None, seed=0):
    """Run every check with a fixed seed; never raises."""
    results = []
    for check in CHECKS if checks is None else checks:
        rng = np.random.default_rng(seed)
        try:
            residual = float(check.func(rng))
        except Exception as exc:  # a crashing check is a failed check
            results.append(CheckResult(check.name, float("nan"), check.tol, False, repr(exc)))
            continue
        results.append(CheckResult(check.name, residual, check.tol, residual <= check.tol))
    return results
