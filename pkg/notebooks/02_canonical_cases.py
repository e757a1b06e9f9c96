# %% [markdown]
# # Canonical curves of genus 4, 5 and 6
#
# Each model is a nodal plane curve over GF(1009). The canonical map is
# computed from adjoints, and quadrics and cubics through the image are found
# by exact interpolation.

# %%
import numpy as np

from bnlab import caselab
from bnlab.models import load_standard

rng = np.random.default_rng(4)

# %% [markdown]
# ## Genus 4
# One quadric Q and five cubics. Four of the cubics are multiples of Q,
# so the cubic system maps P^3 to a cubic threefold with a node.

# %%
C4 = load_standard("quintic_g4")
M4 = caselab.canonical_model(C4)
data = caselab.genus4_system(M4)
print("quadrics:", data.dim_quadrics, " cubics:", data.dim_cubics, " x_i Q:", data.dim_linear_times_Q)

T = caselab.cubic_threefold(data, rng)
print("threefold equations of degree 3:", T["nullspace_dim"], " of degree 2:", T["quadric_nullspace_dim"])

node = caselab.node_check(T["T"], data, M4, rng)
print({k: node[k] for k in ("images_agree", "gradient_zero", "hessian_nonzero", "cone_proportional_to_Q")})

# %%
print(caselab.alpha_checks(data, M4, rng))

# %% [markdown]
# ## Genus 5
# A net of quadrics. The locus of singular members is a plane quintic.

# %%
C5 = load_standard("sextic_g5")
quads, net = caselab.genus5_net(caselab.canonical_model(C5))
disc = caselab.discriminant_quintic(net, rng)
print("degree", disc["degree"], " ranks at sampled zeros:", sorted(set(disc["ranks"])))

# %% [markdown]
# ## Genus 6
# A sextic with four nodes carries five tetragonal pencils: the conic
# through the nodes and the four pencils of lines through a node.

# %%
cfg = caselab.tetragonal_config(load_standard("sextic_g6"))
print("h0:", cfg.h0, " relations:", cfg.relation, " omega0:", cfg.omega0_dims)

# %%
print("trigonal:", {k: v for k, v in caselab.trigonal_omega(load_standard("trigonal_g6")).items() if k != "D"})
pq = caselab.plane_quintic_omega(load_standard("quintic_g6"))
print("plane quintic:", {k: pq[k] for k in ("omega0_dim", "generator_prop_eval_p", "eval_q_index")})
