# %% [markdown]
# # Batches, artifacts and strategy categories
#
# A scenario bundles the encodings, seeding rule and GA settings.
# Batches run independent seeded runs and write a per-generation CSV, a
# JSON summary and the final populations.

# %%
import tempfile
from pathlib import Path

from qpennyflip import experiments as ex

# %%
spec = ex.scenario("sim3").with_overrides(n_runs=4, max_gen=300, rng_seed=1)
batch = ex.run_batch(spec)
mean_k, sem_k = batch.cross_run("mean_fit_k")
for g in range(0, batch.n_generations, 50):
    print(f"gen {g:4d}  K {mean_k[g]:+.3f} +- {sem_k[g]:.3f}")

# %%
out = Path(tempfile.mkdtemp())
for path in ex.write_artifacts(batch, out):
    print(path.name, path.stat().st_size, "bytes")
print(ex.csv_text(batch).splitlines()[0])

# %% [markdown]
# Classification matches each final (Q, Picard) pair against the four
# evolved-strategy templates.  Only runs whose fitness has settled near
# zero are counted.

# %%
for i, run in enumerate(batch.runs):
    print(i, ex.is_converged(run), ex.classify_run(run).value)
print(ex.histogram_from_artifacts(out))
