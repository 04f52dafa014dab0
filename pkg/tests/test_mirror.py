import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from geg.deform import DeformParams, deformed_exp, deformed_log
from geg.errors import DegenerateStepError, DomainError
from geg.mirror import (
    EPS_FLOOR,
    CenteringVariant,
    LearningRate,
    ProjectionKind,
    center_gradient,
    geg_step_normalized,
    gegu_step,
    md_step_generic,
    project,
    project_l1_normalize,
    project_simplex_euclidean,
)
from geg.verify import NAMED, random_params


def test_centering_examples():
    g, w = np.array([1.0, 3.0]), np.array([0.25, 0.75])
    np.testing.assert_allclose(center_gradient(g, w, "weighted"), [-1.5, 0.5])
    np.testing.assert_allclose(center_gradient(g, w, CenteringVariant.UNIFORM_MEAN), [-1.0, 1.0])
    out = center_gradient(g, w, "none")
    np.testing.assert_array_equal(out, g)
    assert out is not g


def test_centering_dimension_mismatch():
    with pytest.raises(DomainError):
        center_gradient([1.0, 2.0, 3.0], [0.5, 0.5], "weighted")


def test_learning_rate():
    w = np.array([0.25, 1.0])
    np.testing.assert_allclose(LearningRate(0.1).rates(w), [0.1, 0.1])
    np.testing.assert_allclose(LearningRate(0.1, 0.5, "power").rates(w), [0.05, 0.1])
    assert LearningRate(-0.5).eta == -0.5
    with pytest.raises(DomainError):
        LearningRate(-2.0)
    with pytest.raises(DomainError):
        LearningRate(0.1, schedule="cosine")


def test_md_step_identity_link_is_gradient_step():
    w, g = np.array([1.0, 2.0]), np.array([0.5, -1.0])
    out = md_step_generic(lambda v: v, lambda v: v, w, g, 0.1)
    np.testing.assert_allclose(out, [0.95, 2.1])


def test_md_step_ln_link_is_multiplicative():
    w, g = np.array([0.2, 0.8]), np.array([1.0, -2.0])
    out = md_step_generic(np.log, np.exp, w, g, 0.3)
    np.testing.assert_allclose(out, w * np.exp(-0.3 * g), rtol=1e-15)


def test_gegu_equals_generic_bitwise():
    rng = np.random.default_rng(3)
    for _ in range(50):
        p = random_params(rng)
        w = rng.uniform(0.01, 2, size=4)
        g = rng.normal(size=4)
        lr = LearningRate(0.05)
        ref = md_step_generic(lambda v: deformed_log(p, v), lambda v: deformed_exp(p, v), w, g, 0.05)
        np.testing.assert_array_equal(gegu_step(p, w, g, lr), np.maximum(ref, EPS_FLOOR))


def test_eg_example():
    out = geg_step_normalized(DeformParams.natural(), [0.5, 0.5], np.array([1.0, -1.0]), LearningRate(1.0))
    expected = np.array([math.exp(-1), math.exp(1)]) / (math.exp(-1) + math.exp(1))
    np.testing.assert_allclose(out, expected, atol=1e-15)
    np.testing.assert_allclose(out, [0.11920, 0.88080], atol=1e-5)


def test_zero_rate_is_fixed_point():
    rng = np.random.default_rng(0)
    for p in NAMED:
        w = rng.dirichlet(np.ones(4))
        out = geg_step_normalized(p, w, rng.normal(size=4), LearningRate(0.0))
        np.testing.assert_allclose(out, w, rtol=1e-12)


def test_projection_examples():
    np.testing.assert_allclose(project_simplex_euclidean([1.2, 0.3, -0.1]), [0.95, 0.05, 0.0], atol=1e-15)
    np.testing.assert_allclose(project_l1_normalize([1.0, 3.0]), [0.25, 0.75])
    np.testing.assert_allclose(project([0.2, 0.3, 0.5], "euclidean"), [0.2, 0.3, 0.5], atol=1e-15)
    with pytest.raises(DegenerateStepError):
        project_l1_normalize([0.0, 0.0])
    with pytest.raises(DomainError):
        project_l1_normalize([-1.0, 2.0])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=2, max_size=5))
def test_projection_matches_optimizer(v):
    v = np.array(v)
    n = v.size
    res = minimize(lambda z: 0.5 * np.sum((z - v) ** 2), np.full(n, 1 / n), jac=lambda z: z - v,
                   bounds=[(0, 1)] * n, constraints=[{"type": "eq", "fun": lambda z: z.sum() - 1}],
                   method="SLSQP", options={"ftol": 1e-14, "maxiter": 500})
    ours = project_simplex_euclidean(v)
    assert ours.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(ours >= 0)
    np.testing.assert_allclose(ours, res.x, atol=1e-6)


@settings(max_examples=60)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(list(ProjectionKind)))
def test_normalized_step_stays_on_simplex(seed, proj):
    rng = np.random.default_rng(seed)
    p = random_params(rng, 0.9)
    w = rng.dirichlet(np.ones(5))
    g = center_gradient(rng.normal(size=5), w, "weighted")
    out = geg_step_normalized(p, w, g, LearningRate(0.1), proj)
    assert np.all(out >= 0)
    assert out.sum() == pytest.approx(1.0, abs=1e-12)


def test_degenerate_step_raises():
    # Tsallis exp clips below -1/a; a huge step empties every coordinate
    p = DeformParams.tsallis(0.5)
    with pytest.raises(DegenerateStepError):
        geg_step_normalized(p, [0.5, 0.5], np.array([10.0, 10.0]), LearningRate(1.0))


def test_overflow_raises():
    p = DeformParams.tsallis(1.5)  # exp has a pole at y = 2
    with pytest.raises(DegenerateStepError):
        geg_step_normalized(p, [0.5, 0.5], np.array([-10.0, 0.0]), LearningRate(1.0))


def test_descent_on_linear_loss():
    # a single small step along a fixed linear loss must not increase it
    rng = np.random.default_rng(7)
    for p in NAMED:
        for _ in range(20):
            w = rng.dirichlet(np.ones(4))
            c = rng.normal(size=4)
            g = center_gradient(c, w, "weighted")
            out = geg_step_normalized(p, w, g, LearningRate(0.01))
            assert out @ c <= w @ c + 1e-15
