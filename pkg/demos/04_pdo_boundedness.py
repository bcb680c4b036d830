# %% [markdown]
# # Pseudodifferential operators on L^{p(.)}
#
# ``Op(a)u(x) = (2 pi)^-1 sum a(x, xi) u_hat(xi) e^{i x xi} dxi`` on the
# DFT frequency lattice.  For symbols of order 0 the norm ratios stay
# bounded across positions and scales.

# %%
import numpy as np

from vexpdo.exponent import loglog_sine_exponent
from vexpdo.grid import bump, make_grid, transform_function
from vexpdo.maximal import q_maximal, sharp_maximal
from vexpdo.modular import luxemburg_norm
from vexpdo.oracles import discrete_lp_norm
from vexpdo.pdo import PdoPlan, apply, apply_multiplier, composition_residual
from vexpdo.symbols import builtin_symbol, multiplication_symbol

grid = make_grid(1, 10.0, 128)
plan = PdoPlan(grid)
p = loglog_sine_exponent(grid, 0.1, 0.05)
family = [bump(grid, c, w) for w in (1.0, 2.0, 3.0) for c in (-4.0, -1.5, 1.5, 4.0)]

# %% dense quadrature agrees with FFT multipliers
a = builtin_symbol("bracket_normalized")
print("dense vs FFT:", np.abs(apply(a, family[0], plan).values - apply_multiplier(a, family[0]).values).max())

# %% norm ratios
for name in ("one", "bracket_normalized", "so_log_sine"):
    a = builtin_symbol(name)
    r = [luxemburg_norm(apply(a, u, plan), p).value / luxemburg_norm(u, p).value for u in family]
    print(f"{name:20s} ratios in [{min(r):.3f}, {max(r):.3f}]")

# %% pointwise sharp-maximal control
a = builtin_symbol("so_log_sine")
for u in family[::4]:
    ratio = sharp_maximal(apply(a, u, plan)).values.real / q_maximal(u, 2.0).values.real
    print(f"max M#(Op(a)u) / M_2 u = {ratio.max():.3f}")

# %% composition remainders: Op(m) Op(v) - Op(m v) decays on oscillating inputs
v = multiplication_symbol(lambda x: np.exp(-x**2 / 8), name="v")
m = builtin_symbol("bracket_normalized")
for k in (2, 4, 8, 16):
    u = transform_function(bump(grid, 0.0, 3.0), "modulate", k * grid.dxi)
    r = composition_residual(m, v, u, plan)
    print(f"omega = {k:2d} pi/L: residual ratio {discrete_lp_norm(r.values, 2, grid.h) / discrete_lp_norm(u.values, 2, grid.h):.3e}")
