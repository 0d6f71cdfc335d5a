# %% [markdown]
# # Closed-form states and equilibrium certificates
#
# The verify module carries hand-derived penny states for each analysed
# strategy family and a grid search over unilateral deviations.

# %%
import numpy as np

from qpennyflip import verify as vf

# %%
rng = np.random.default_rng(0)
for name in vf.FAMILIES:
    prof = vf.sample_family(name, rng)
    print(f"{name:12s} oracle gap {vf.check_oracle_agreement(prof):.1e}")

# %% [markdown]
# Cat1 and Cat2 hold against every grid deviation.  Cat3 and Cat4 do not:
# Q has a move worth a full point against them.

# %%
for name, cert in vf.ne_report().items():
    w = cert.witness
    print(f"{name:9s} {cert.verdict:15s}", "" if w is None else f"{w['player']} deviates to {w['moves']}")

# %% [markdown]
# The counter-strategies form a loop.

# %%
for link in vf.cyclic_dominance_table():
    print(link.winner, "wins:", np.round(link.payoff_q, 3), link.picard_name)
