"""
Generalized exponentiated-gradient steps
========================================

Mirror-descent steps whose link function is the deformed logarithm.  With
a = b = 0 the step is the familiar multiplicative EG update.
"""

import numpy as np

from geg import DeformParams, LearningRate, center_gradient, geg_step_normalized, gegu_step

w = np.array([0.5, 0.3, 0.2])
g = np.array([1.0, -0.5, 0.2])
eta = 0.5

# Classical EG as a special case
eg = w * np.exp(-eta * g)
eg /= eg.sum()
ours = geg_step_normalized(DeformParams.natural(), w, g, LearningRate(eta))
print("EG       ", np.round(eg, 6))
print("GEG(0,0) ", np.round(ours, 6))

# %%
# Different links move the same weights by different amounts.  Small
# weights are the most sensitive to the choice.
for name, p in [("natural", DeformParams.natural()),
                ("tsallis q=0.5", DeformParams.tsallis(0.5)),
                ("tsallis q=1.5", DeformParams.tsallis(1.5)),
                ("kaniadakis 0.5", DeformParams.kaniadakis(0.5))]:
    print(f"{name:15s}", np.round(geg_step_normalized(p, w, g, LearningRate(eta)), 6))

# %%
# Without normalization the step lives on the positive orthant.
print("unnormalized:", np.round(gegu_step(DeformParams(0.3, -0.2), w, g, LearningRate(eta)), 6))

# %%
# A quadratic toy problem: minimize |w - target|^2 / 2 over the simplex.
target = np.array([0.2, 0.3, 0.5])
p = DeformParams.gamma(0.25)
w = np.array([0.8, 0.1, 0.1])
for it in range(41):
    if it in (0, 5, 10, 20, 40):
        print(f"iter {it:3d}  loss {0.5 * np.sum((w - target) ** 2):.6f}  w {np.round(w, 4)}")
    grad = center_gradient(w - target, w, "weighted")
    w = geg_step_normalized(p, w, grad, LearningRate(0.5))
