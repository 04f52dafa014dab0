"""Online portfolio selection with generalized EG updates.

Timing convention: the portfolio ``w_t`` is held over period ``t`` and earns
``w_t @ x_t`` on the raw price relatives.  At the end of the period the
update to ``w_{t+1}`` uses the (possibly preprocessed) relative ``xhat_t``,
built only from prices up to ``t``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .deform import DeformParams
from .errors import DataError, DegenerateStepError, DomainError, GEGError, StepError
from .mirror import (
    CenteringVariant,
    LearningRate,
    ProjectionKind,
    center_gradient,
    geg_step_normalized,
    project_l1_normalize,
)

__all__ = [
    "PriceSeries",
    "RelativeSeries",
    "SparsifyRule",
    "StrategyConfig",
    "BacktestResult",
    "price_relatives",
    "preprocess",
    "tsallis_log_loss",
    "olps_gradient",
    "geg_olps_step",
    "sparsify",
    "backtest",
    "run_baselines",
    "tsallis_power_config",
    "classical_eg_config",
]

PREPROCESSING_MODES = ("raw", "mean", "median")
SPARSIFY_KINDS = ("none", "threshold", "topk", "wta")


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """T x N matrix of strictly positive close prices, rows in time order."""

    prices: np.ndarray
    labels: tuple = None
    assets: tuple = None
    manifest: object = None

    def __post_init__(self):
        p = np.array(self.prices, dtype=float)
        if p.ndim != 2:
            raise DataError(f"prices must be a 2-D array, got shape {p.shape}")
        T, N = p.shape
        if T < 2 or N < 2:
            raise DataError(f"need at least 2 periods and 2 assets, got {T}x{N}")
        bad = np.argwhere(~np.isfinite(p) | (p <= 0))
        if bad.size:
            r, c = bad[0]
            raise DataError(f"price at row {r}, column {c} is not strictly positive and finite")
        p.setflags(write=False)
        object.__setattr__(self, "prices", p)
        labels = tuple(range(T)) if self.labels is None else tuple(self.labels)
        assets = tuple(f"asset{i}" for i in range(N)) if self.assets is None else tuple(self.assets)
        if len(labels) != T or len(assets) != N:
            raise DataError("label/asset counts do not match the price matrix")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "assets", assets)

    @property
    def shape(self):
        return self.prices.shape

    def window(self, start, stop):
        """Rows ``start..stop-1`` as a new series."""
        return PriceSeries(self.prices[start:stop], self.labels[start:stop], self.assets)


@dataclass(frozen=True, eq=False)
class RelativeSeries:
    values: np.ndarray
    mode: str = "raw"
    window: int = 0


@dataclass(frozen=True)
class SparsifyRule:
    kind: str = "none"
    param: float = None

    def __post_init__(self):
        if self.kind not in SPARSIFY_KINDS:
            raise DomainError(f"sparsify rule must be one of {SPARSIFY_KINDS}, got {self.kind!r}")
        if self.kind == "threshold" and (self.param is None or not 0 <= self.param < 1):
            raise DomainError("threshold rule needs 0 <= tau < 1")
        if self.kind == "topk" and (self.param is None or int(self.param) != self.param or self.param < 1):
            raise DomainError("topk rule needs an integer k >= 1")


@dataclass(frozen=True)
class StrategyConfig:
    """Full hyperparameter set of a GEG portfolio strategy."""

    deform: DeformParams = field(default_factory=DeformParams)
    q: float = 1.0
    lr: LearningRate = field(default_factory=lambda: LearningRate(0.05))
    centering: CenteringVariant = CenteringVariant.WEIGHTED_MEAN
    projection: ProjectionKind = ProjectionKind.L1_NORMALIZE
    preprocessing: str = "raw"
    window: int = 5
    sparsify: SparsifyRule = field(default_factory=SparsifyRule)

    def __post_init__(self):
        try:
            object.__setattr__(self, "centering", CenteringVariant(self.centering))
            object.__setattr__(self, "projection", ProjectionKind(self.projection))
        except ValueError as exc:
            raise DomainError(str(exc)) from None
        if not math.isfinite(self.q):
            raise DomainError("loss deformation q must be finite")
        if self.preprocessing not in PREPROCESSING_MODES:
            raise DomainError(f"preprocessing must be one of {PREPROCESSING_MODES}")
        if int(self.window) != self.window or self.window < 1:
            raise DomainError(f"window must be an integer >= 1, got {self.window}")

    def as_dict(self):
        return {
            "a": self.deform.a,
            "b": self.deform.b,
            "q": self.q,
            "eta": self.lr.eta,
            "gamma": self.lr.gamma,
            "schedule": self.lr.schedule,
            "negative_cap": self.lr.negative_cap,
            "centering": self.centering.value,
            "projection": self.projection.value,
            "preprocessing": self.preprocessing,
            "window": int(self.window),
            "sparsify": self.sparsify.kind,
            "sparsify_param": self.sparsify.param,
        }


def classical_eg_config(eta=0.05):
    """Degenerate config equal to the classical (Helmbold et al.) EG strategy."""
    return StrategyConfig(deform=DeformParams.natural(), q=1.0, lr=LearningRate(eta))


def tsallis_power_config(beta, gamma, q, eta, **kwargs):
    """Config reproducing the four-hyperparameter Tsallis update

        w_new ~ w * exp_T_{1-beta}(eta * w**gamma * (xhat - mean(xhat)) / (w @ xhat)**q)

    With (a, b) = (beta, 0) the GEG step equals ``w * exp_T(-rate * g / w**beta)``,
    so the per-coordinate rate exponent has to be ``gamma + beta``.
    """
    return StrategyConfig(
        deform=DeformParams(beta, 0.0),
        q=q,
        lr=LearningRate(eta, gamma + beta, "power"),
        centering=CenteringVariant.UNIFORM_MEAN,
        **kwargs,
    )


@dataclass(eq=False)
class BacktestResult:
    """Trajectory of a backtest; row t of ``weights`` was held over period t."""

    weights: np.ndarray
    returns: np.ndarray
    wealth: np.ndarray
    initial_wealth: float = 1.0
    config: StrategyConfig = None
    labels: tuple = ()
    assets: tuple = ()
    name: str = "geg"

    @property
    def final_wealth(self):
        return float(self.wealth[-1]) if len(self.wealth) else float(self.initial_wealth)

    def metrics(self):
        # drawdown and log-return statistics are reporting conveniences
        path = np.concatenate([[self.initial_wealth], self.wealth])
        peak = np.maximum.accumulate(path)
        logret = np.log(self.returns)
        return {
            "periods": int(len(self.returns)),
            "initial_wealth": float(self.initial_wealth),
            "final_wealth": self.final_wealth,
            "max_drawdown": float(np.max(1.0 - path / peak)),
            "mean_log_return": float(logret.mean()) if logret.size else 0.0,
            "std_log_return": float(logret.std()) if logret.size else 0.0,
        }


def _price_matrix(prices):
    if isinstance(prices, PriceSeries):
        return prices.prices
    return PriceSeries(prices).prices


def price_relatives(prices):
    """x_t = p_t / p_{t-1} for t = 1..T-1."""
    p = _price_matrix(prices)
    return RelativeSeries(p[1:] / p[:-1], "raw", 0)


def preprocess(prices, mode="raw", window=1):
    """Update signal for each period t = 1..T-1.

    ``mean``/``median`` return the statistic of ``p_{t-n}..p_t`` divided by
    ``p_t``; the window is truncated at the start of the series.
    """
    if mode == "raw":
        return price_relatives(prices)
    if mode not in PREPROCESSING_MODES:
        raise DomainError(f"unknown preprocessing mode {mode!r}")
    if int(window) != window or window < 0:
        raise DomainError(f"window must be a nonnegative integer, got {window}")
    window = int(window)
    p = _price_matrix(prices)
    stat = np.mean if mode == "mean" else np.median
    out = np.empty((p.shape[0] - 1, p.shape[1]))
    for t in range(1, p.shape[0]):
        out[t - 1] = stat(p[max(0, t - window): t + 1], axis=0) / p[t]
    return RelativeSeries(out, mode, window)


def _portfolio_return(w, xhat):
    s = float(np.dot(w, xhat))
    if not s > 0:
        raise DomainError(f"w @ xhat must be positive, got {s}")
    return s


def tsallis_log_loss(q, w, xhat):
    """-log_q(w @ xhat); -ln at q = 1 and 1 - w @ xhat at q = 0."""
    s = _portfolio_return(w, xhat)
    if abs(q - 1.0) < 1e-9:
        return -math.log(s)
    if abs(q - 1.0) < 1e-3:
        return -math.expm1((1.0 - q) * math.log(s)) / (1.0 - q)
    return -(s ** (1.0 - q) - 1.0) / (1.0 - q)


def olps_gradient(q, w, xhat, variant=CenteringVariant.WEIGHTED_MEAN):
    """Centered gradient of the Tsallis-log loss.

    WEIGHTED_MEAN gives ``-(xhat - (w @ xhat)) / (w @ xhat)**q``, the exact
    gradient of the loss at ``w / |w|_1`` for w on the simplex.
    """
    w = np.asarray(w, dtype=float)
    xhat = np.asarray(xhat, dtype=float)
    s = _portfolio_return(w, xhat)
    return center_gradient(-xhat / s ** q, w, variant)


def geg_olps_step(cfg, w, xhat):
    grad = olps_gradient(cfg.q, w, xhat, cfg.centering)
    return geg_step_normalized(cfg.deform, w, grad, cfg.lr, cfg.projection)


def sparsify(w, rule):
    """Zero out small weights and renormalize onto the simplex."""
    w = np.asarray(w, dtype=float)
    if rule is None or rule.kind == "none":
        return w.copy()
    if rule.kind == "wta":
        out = np.zeros_like(w)
        out[int(np.argmax(w))] = 1.0
        return out
    if rule.kind == "threshold":
        kept = np.where(w < rule.param, 0.0, w)
        if not np.any(kept > 0):
            raise DegenerateStepError(f"threshold {rule.param} zeroed every weight")
        return project_l1_normalize(kept)
    k = int(rule.param)
    order = np.argsort(-w, kind="stable")
    kept = np.zeros_like(w)
    kept[order[:k]] = w[order[:k]]
    return project_l1_normalize(kept)


def _running_wealth(returns, initial_wealth):
    wealth = np.empty(len(returns))
    cw = float(initial_wealth)
    for t, r in enumerate(returns):
        cw = cw * r
        wealth[t] = cw
    return wealth


def backtest(prices, cfg=None, initial_wealth=1.0):
    """Run a GEG strategy over ``prices`` starting from the uniform portfolio.

    Wealth is always accounted on raw relatives; preprocessing only changes
    the update signal.  The learning state stays dense, and the sparsification
    rule is applied to the portfolio actually held in each period.
    """
    cfg = StrategyConfig() if cfg is None else cfg
    if not initial_wealth > 0:
        raise DomainError("initial wealth must be positive")
    series = prices if isinstance(prices, PriceSeries) else PriceSeries(prices)
    x = price_relatives(series).values
    xhat = preprocess(series, cfg.preprocessing, cfg.window).values
    periods, n = x.shape

    weights = np.empty((periods, n))
    returns = np.empty(periods)
    state = np.full(n, 1.0 / n)
    for t in range(periods):
        try:
            held = sparsify(state, cfg.sparsify)
            weights[t] = held
            returns[t] = held @ x[t]
            if t + 1 < periods:
                state = geg_olps_step(cfg, state, xhat[t])
        except GEGError as exc:
            raise StepError(t + 1, exc) from exc

    return BacktestResult(
        weights=weights,
        returns=returns,
        wealth=_running_wealth(returns, initial_wealth),
        initial_wealth=float(initial_wealth),
        config=cfg,
        labels=series.labels[1:],
        assets=series.assets,
    )


def _result(name, weights, x, series, initial_wealth, cfg=None):
    returns = np.einsum("ij,ij->i", weights, x)
    return BacktestResult(
        weights=weights,
        returns=returns,
        wealth=_running_wealth(returns, initial_wealth),
        initial_wealth=float(initial_wealth),
        config=cfg,
        labels=series.labels[1:],
        assets=series.assets,
        name=name,
    )


def run_baselines(prices, eta=0.05, initial_wealth=1.0):
    """Uniform buy-and-hold, uniform CRP and classical EG on the same data."""
    series = prices if isinstance(prices, PriceSeries) else PriceSeries(prices)
    p = series.prices
    x = p[1:] / p[:-1]
    periods, n = x.shape

    # buy-and-hold: holdings drift with prices
    grown = p[:-1] / p[0]
    bah = grown / grown.sum(axis=1, keepdims=True)

    crp = np.full((periods, n), 1.0 / n)

    # Helmbold et al.: w <- w * exp(eta * x / (w @ x)), normalized
    eg = np.empty((periods, n))
    w = np.full(n, 1.0 / n)
    for t in range(periods):
        eg[t] = w
        w = w * np.exp(eta * x[t] / (w @ x[t]))
        w = w / w.sum()

    return {
        "uniform_bah": _result("uniform_bah", bah, x, series, initial_wealth),
        "uniform_crp": _result("uniform_crp", crp, x, series, initial_wealth),
        "classical_eg": _result("classical_eg", eg, x, series, initial_wealth, classical_eg_config(eta)),
    }
