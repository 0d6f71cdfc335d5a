# %% [markdown]
# # Penny states under classical and quantum moves
#
# The penny is a qubit.  Heads is |0>, tails is |1>, and every move is a
# (possibly random) unitary applied by conjugation.  This walk-through
# builds the states of a few profiles by hand.

# %%
import math

import numpy as np

from qpennyflip.game import GameProfile, play, play_trace
from qpennyflip.qmat import evolve_mixed, maximally_mixed
from qpennyflip.strategy import ClassicalMixed, F, N, PureQuantum

np.set_printoptions(precision=4, suppress=True)

# %% [markdown]
# ## Classical play ends in a tie
# If either of Q's moves is the half-half flip, the penny lands in
# diag(1/2, 1/2) and stays there.

# %%
for p in (0.0, 0.3, 1.0):
    out = play(GameProfile(ClassicalMixed(0.5), ClassicalMixed(0.5), ClassicalMixed(p)))
    print(f"Q second move p={p}: payoff_q = {out.payoff_q:+.3f}")

# %%
stuck = maximally_mixed()
print(evolve_mixed(stuck, [(0.8, F), (0.2, N)]))

# %% [markdown]
# ## The quantum player always wins against a classical opponent
# U(pi/4, *) puts the penny in an equal superposition.  Flip and no-flip
# both leave that state alone, and U(pi/4, pi) undoes it.

# %%
profile = GameProfile(PureQuantum.of(math.pi / 4, 0.4), ClassicalMixed(0.7), PureQuantum.of(math.pi / 4, math.pi))
for i, rho in enumerate(play_trace(profile)):
    print(f"rho{i} =\n{rho.m.real}")
print("payoff_q =", play(profile).payoff_q)

# %% [markdown]
# ## A grid over Picard's flip probability
# Payoff stays at exactly 1 whatever Picard does.

# %%
grid = np.linspace(0, 1, 11)
print([round(play(GameProfile(profile.q_move1, ClassicalMixed(p), profile.q_move2)).payoff_q, 12) for p in grid])
