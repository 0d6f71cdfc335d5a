# %% [markdown]
# # Coevolving Q against a classical Picard
#
# Population K holds Q's two unitaries and population P holds Picard's
# flip probability.  Everyone starts in the classical tie; quantum
# mutants in K then take over.

# %%
import numpy as np

from qpennyflip.evolve import GaConfig, evaluate_fitness, run_evolution, substream
from qpennyflip.experiments import seed_sim1

# %%
cfg = GaConfig(max_gen=60, rng_seed=11)
pop_p, pop_k = seed_sim1(substream(cfg.rng_seed, 99))
table = evaluate_fitness(pop_p, pop_k)
print("generation 0 mean K fitness:", table.fitness_k.mean().round(4))

# %%
result = run_evolution(pop_p, pop_k, cfg)
for r in result.records[::10]:
    print(f"gen {r.generation:3d}  K {r.mean_fit_k:+.3f} +- {r.sem_fit_k:.3f}")

# %% [markdown]
# Gene means of the final K population: theta of both unitaries near
# pi/4 and phi of the second near pi.

# %%
names = result.final_k.schema.gene_names
print(dict(zip(names, np.round(result.final_k.genes.mean(axis=0), 3))))
