# %% [markdown]
# # Theta functions on a hyperelliptic Jacobian
#
# Periods of y^2 = prod (x - e_i) for eight real branch points, then the
# Kummer map by second order theta functions.

# %%
import numpy as np

from bnlab import theta as th

branch = [-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0]
data = th.hyperelliptic_periods(branch)
np.set_printoptions(precision=4, suppress=True)
print("tau =\n", data.tau)
print("Chebyshev nodes used:", data.nodes)

# %% [markdown]
# Even characteristics give nonzero theta constants; odd ones vanish.

# %%
for idx in (0, 5, 36, 63):
    ch = th.ThetaChar.from_index(3, idx)
    print(ch, "parity", ch.parity, "|theta| =", abs(th.theta(data.rm, np.zeros(3), ch)))

# %% [markdown]
# Trisecants: for four points on the curve, three Kummer images are
# collinear. The third singular value measures the failure.

# %%
rng = np.random.default_rng(0)
pts = th.random_points(data, 4, rng)
print("points:", pts)
for index in (0, 9, 42):
    print(index, th.fay_residual(data, pts, index)["sv"])

# %%
quads = [th.random_points(data, 4, rng) for _ in range(10)]
print("perturbed tau, median s3/s1:", th.negative_control(data, quads)["median"])

# %% [markdown]
# Heisenberg invariant quartics in eight variables and the one singular
# along the Kummer threefold.

# %%
print("orbit counts:", [len(th.heisenberg_orbits(g)) for g in (1, 2, 3)])
coble = th.coble_solve(data.rm, rng)
print("nullspace:", coble["nullspace_dim"], " residuals:", coble["max_value_residual"], coble["max_gradient_residual"])

# %% [markdown]
# Conditions for a section of |2 Theta| to vanish to order four at the origin.

# %%
print("g=3:", th.gamma00_rank(data.rm)["rank"])
g4 = th.hyperelliptic_periods([-5.0, -4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0, 5.0])
print("g=4, 30 digits:", th.gamma00_rank(g4.rm, precision=30)["rank"])
