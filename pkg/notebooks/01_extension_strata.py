# %% [markdown]
# # Extension classes on a plane quartic
#
# An extension class is a linear functional on L(2K - 2D). Pairing it with
# products of sections of L(K - D) gives a symmetric form whose rank
# determines h0 of the middle bundle.

# %%
import numpy as np

from bnlab import strata
from bnlab.curves import Place
from bnlab.models import load_standard

C = load_standard("quartic_g3")
print(C, "with", len(C.rational_points), "rational points")

# %% [markdown]
# Sections of K are cut by lines, so h0(K) = g = 3 and h0(2K) = 3g - 3.

# %%
K = C.canonical_divisor()
print("deg K =", K.degree, " h0(K) =", C.h0(K), " h0(2K) =", C.h0(K * 2))

# %% [markdown]
# Take D = 0. Then L(K - D) is the full canonical series and every
# functional on L(2K) defines a form on a 3-dimensional space.

# %%
from bnlab.curves import Divisor

rng = np.random.default_rng(0)
D = Divisor()
X = strata.extension_space(C, D)
e = strata.random_functional(C, X.dim, rng)
rep = strata.h0_ext(C, D, e)
print(rep.as_dict())

# %% [markdown]
# A point evaluation is the most degenerate nonzero class: its form is
# s(P) t(P), which has rank one.

# %%
P = Place(C.rational_points[10])
ev = strata.eval_class(C, D, P)
print("rank of eval form:", strata.stratum_index(C, D, ev))
print("h0(E) for eval class:", strata.h0_ext(C, D, ev).h0_E)

# %% [markdown]
# A scan over random and structured classes. The maximum of h0(E) sits
# exactly on g + 1 - Cliff(C) = 3 for a smooth quartic.

# %%
scan = strata.clifford_scan(C, 1, 100, np.random.default_rng(1))
print({k: scan[k] for k in ("samples", "max_h0_E", "bound", "exceeded")})

# %% [markdown]
# The twist inequality h0(E(-D')) >= h0(E) - deg D' for base point free D'.

# %%
from bnlab.models import bpf_pool

muk = strata.mukai_scan(C, 40, np.random.default_rng(2), bpf_pool(C))
print(muk["samples"], "instances,", len(muk["failures"]), "failures")
