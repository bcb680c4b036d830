# %% [markdown]
# # Symbol classes
#
# Seminorm constants ``sup |d_xi^a d_x^b a| / <xi>^(m - |a|)`` are
# estimated on a lattice and re-estimated with the frequency window
# doubled; a constant that keeps growing signals the wrong order.
# Slowly oscillating symbols have x-derivatives that die out at infinity.

# %%
from vexpdo.symbols import (SymbolLattice, builtin_symbol, estimate_hormander_seminorms,
                            so_decay_profile)

lattice = SymbolLattice(1, 10.0, 20.0, 33, 65)

# %% <xi> is of order 1 and not of order 0
a = builtin_symbol("bracket_power", m=1.0)
for m in (1.0, 0.0):
    rep = estimate_hormander_seminorms(a, m, order_cap=2, lattice=lattice)
    print(f"order {m}: consistent = {rep.consistent}")
    for e in rep.entries[:3]:
        print(f"   alpha={e.alpha} beta={e.beta}: {e.constant:.4f} -> {e.constant_doubled:.4f} ({e.verdict})")

# %% sin(log<x>) oscillates forever but ever more slowly
prof = so_decay_profile(builtin_symbol("so_log_sine"), 0.0, order_cap=2)
print("SO:", prof.so_consistent, " SO_0:", prof.so0_consistent)
for (al, be), r in prof.tail_ratios.items():
    print(f"   alpha={al} beta={be}: outer/inner sup = {r:.3f}")
