# %% [markdown]
# # Luxemburg norms in variable Lebesgue spaces
#
# The norm of ``f`` in ``L^{p(.)}`` is the smallest ``lam`` with
# ``I(f/lam) = sum |f/lam|^p(x) h <= 1``.  We compute it by bisection on
# the log-modular and compare with the ordinary ``L^p`` norm when
# ``p`` is constant.

# %%
import numpy as np

from vexpdo.exponent import constant_exponent, loglog_sine_exponent
from vexpdo.grid import bump, make_grid
from vexpdo.modular import luxemburg_norm, modular
from vexpdo.oracles import discrete_lp_norm

grid = make_grid(1, 10.0, 128)
f = bump(grid, 0.0, 3.0) * 2.0

# %% constant exponents reproduce the closed form
for q in (1.5, 2.0, 3.0):
    res = luxemburg_norm(f, constant_exponent(grid, q))
    print(f"q={q}: {res.value:.12f} vs {discrete_lp_norm(f.values, q, grid.h):.12f} "
          f"({res.iterations} bisection steps)")

# %% a genuinely variable exponent
p = loglog_sine_exponent(grid, 0.1, 0.05)
print("p ranges over", p.p_minus, p.p_plus)
n = luxemburg_norm(f, p).value
print("norm:", n)
print("I(f/norm) =", modular(f, p, n), " I(f/(0.99 norm)) =", modular(f, p, 0.99 * n))

# %% the norm sits between the L^{p_-} and L^{p_+} norms up to scaling
for q in (p.p_minus, p.p_plus):
    print(f"L^{q:.4f} norm: {luxemburg_norm(f, constant_exponent(grid, q)).value:.6f}")
