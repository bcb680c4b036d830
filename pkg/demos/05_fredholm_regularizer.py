# %% [markdown]
# # A regularizer for an elliptic symbol
#
# If ``|a| >= eps`` outside a ball of radius ``R`` in ``(x, xi)``, then
# ``b_R = (1 - phi_R) / a`` inverts ``a`` up to a compactly supported
# cutoff.  Residuals ``I - Op(a)Op(b_R)`` and ``I - Op(b_R)Op(a)`` should
# send weakly null sequences to norm-null ones.

# %%
from vexpdo.exponent import loglog_sine_exponent
from vexpdo.fredholm import ProbeFamilySpec, run_fredholm_pipeline
from vexpdo.grid import make_grid
from vexpdo.symbols import builtin_symbol

grid = make_grid(1, 10.0, 128)
p = loglog_sine_exponent(grid, 0.1, 0.05)
spec = ProbeFamilySpec(width=1.5, n_translates=5, n_modulations=4)

# %%
rep = run_fredholm_pipeline(builtin_symbol("so_elliptic"), p, spec, mstar=(2.0, 0.5), with_conjugate=True)
print("verdict:", rep.verdict, " R =", rep.R, " identity residual =", rep.identity_residual)
for row in rep.right_table:
    print(f"  {row['family']:9s} {row['description']:16s} {row['ratio']:.4f}")
print(rep.family_checks)

# %% a symbol vanishing on whole lines in x is not elliptic
bad = run_fredholm_pipeline(builtin_symbol("nonelliptic_demo"), p, spec)
print("sin(x1):", bad.verdict, bad.notes)
