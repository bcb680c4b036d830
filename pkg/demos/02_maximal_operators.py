# %% [markdown]
# # Maximal operators on a grid
#
# ``M`` takes the largest cube average of ``|f|`` over odd-sided cubes
# containing each node.  Summed-area tables give every cube average in
# O(1) and a sliding maximum finds the best cube position.

# %%
import numpy as np

from vexpdo.exponent import loglog_sine_exponent
from vexpdo.grid import SampledFunction, bump, make_grid
from vexpdo.maximal import (hl_maximal, probe_maximal_boundedness, q_maximal,
                            sharp_maximal)
from vexpdo.oracles import exhaustive_maximal

grid = make_grid(1, 10.0, 128)
chi = SampledFunction(grid, ((grid.axis >= 0) & (grid.axis < 1)).astype(float))

# %% the maximal function of an indicator decays like 1/x
m = hl_maximal(chi).values.real
for x in (2.0, 4.0, 8.0):
    k = grid.nearest_index(x)[0]
    print(f"M chi({grid.axis[k]:.3f}) = {m[k]:.4f},  1/x = {1 / grid.axis[k]:.4f}")

# %% cross-check with brute force on a smaller grid
small = make_grid(1, 10.0, 64)
rng = np.random.default_rng(0)
g = SampledFunction(small, rng.standard_normal(64))
print("max deviation from exhaustive search:", np.abs(hl_maximal(g).values.real - exhaustive_maximal(g)).max())

# %% q-maximal and sharp maximal functions
f = bump(grid, 0.0, 2.0)
for q in (1.0, 2.0, 4.0):
    print(f"sup M_{q:g} f = {q_maximal(f, q).values.real.max():.4f}")
s = sharp_maximal(f).values.real
print("M# f <= 2 M f everywhere:", bool(np.all(s <= 2 * hl_maximal(f).values.real)))

# %% boundedness probe in L^{p(.)}
p = loglog_sine_exponent(grid, 0.1, 0.05)
family = [bump(grid, c, w) for w in (1.0, 2.0, 3.0) for c in (-4.0, 0.0, 4.0)]
stats = probe_maximal_boundedness(p, family)
print(f"||Mf|| / ||f||: max {stats.max:.3f}, median {stats.median:.3f}")
