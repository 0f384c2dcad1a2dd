# %% [markdown]
# # The Hilbert space, truncated at degree N

# %%
import numpy as np

from polykern import hilbert as hb
from polykern.kernels import KernelParams, random_points
from polykern.mobius import LiftedMobiusTuple

p = KernelParams.create((1, 1), (1.5, 2.5), [1, 0.8, 1.2, 0.9, 1.1])
model = hb.TruncatedSpaceModel(p, 6)
print("dimension:", model.dim)

# %% [markdown]
# Gamma is injective on the truncation.

# %%
sv = np.linalg.svd(model.gamma_matrix(), compute_uv=False)
print(f"smallest singular value: {sv[-1]:.3f}")

# %% [markdown]
# Multiplication by z_1 and z_2 in the orthonormal monomial basis; they
# commute away from the top degree.

# %%
M0, M1 = model.multiplication_matrix(0), model.multiplication_matrix(1)
interior = np.array([sum(m) <= model.N - 2 for _, m in model.basis])
print("commutator on the interior:", np.abs((M0 @ M1 - M1 @ M0)[:, interior]).max())
print("norms:", np.linalg.norm(M0, 2), np.linalg.norm(M1, 2))

# %% [markdown]
# The intertwining identity, with the left side differentiated numerically.

# %%
rng = np.random.default_rng(3)
g = LiftedMobiusTuple.random(rng, 2, angle=6)
f = {(2, 1): 0.5, (0, 1): 1j}
for beta in p.family:
    print(beta, f"{hb.verify_intertwining(beta, p, g, f, random_points(rng, 3, 2)):.1e}")
