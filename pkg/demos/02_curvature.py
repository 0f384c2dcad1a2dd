# %% [markdown]
# # Curvature at the origin and what it tells apart

# %%
import numpy as np

from polykern import analysis as an
from polykern.kernels import KernelParams, tensor_kernel

c1 = KernelParams.create((2,), 2.0)
K = an.curvature_closed(c1, 0, 0)
print("diagonal:", np.diag(K.matrix).real)  # 4/3, 44/21, 60/7
print("trace:", K.trace)

# %% [markdown]
# The trace depends on lambda only; the weights drop out.

# %%
for mu in ([1, 1, 1], [1, 0.3, 4.0]):
    print(mu, an.recover_lambda(c1.replace(mu=mu)))

# %% [markdown]
# Same numbers from Cauchy-extracted Taylor coefficients of the kernel.

# %%
print(np.diag(an.curvature_oracle(c1, 0, 0)).real)

# %% [markdown]
# In two variables the mixed component does not vanish, unlike for any
# tensor product of one-variable kernels.

# %%
c2 = KernelParams.create((0, 1), (2.0, 3.0))
print(an.curvature_closed(c2, 0, 1).matrix.real.round(4))
print("tensor product:", np.abs(an.curvature_oracle(tensor_kernel([2.0, 3.0]), 0, 1)).max())
print(an.inequivalence_witness(c2.alpha))

# %%
print(an.classify_pair(c1, c1.replace(lam=2.5)))
print(an.classify_pair(c1, c1.replace(mu=[1, 1, 2])))
print(an.irreducibility_certificate(c2).to_json())
