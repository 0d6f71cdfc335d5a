"""The three invasion scenarios, batch runner, aggregation and classification.

Scenario  P (Picard)                         K (Q)
--------  ---------------------------------  --------------------------------------
sim1      pro = 0.5                          [U(pi/4, *), U(*, *)] or swapped
sim2      U(pi/4, *)                         [0.5, *] or [*, 0.5]
sim3      [pro=0.5, U(pi/2, pi), U(0, 0)]    as sim1

Two-variant seedings alternate by member index (even index: first variant).
"*" is drawn uniformly over the parameter's range.
"""
from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .evolve import (SEED_STREAM, EvolutionResult, GaConfig, Population, RunRecord,
                     run_evolution, sem, substream)
from .game import GameProfile, play
from .strategy import (PHI_MAX, ClassicalMixed, SCHEMA_CLASSICAL_1, SCHEMA_CLASSICAL_2, SCHEMA_MIXED2_1,
                       SCHEMA_PURE_1, SCHEMA_PURE_2, THETA_MAX, Chromosome, MixedTwoUnitary,
                       PureQuantum, Schema, decode, make_unitary, named_operator)

QUARTER = math.pi / 4


def _seed_k_quantum(rng: np.random.Generator, n: int) -> Population:
    genes = np.empty((n, 4))
    for i in range(n):
        half = (QUARTER, rng.uniform(0, PHI_MAX))
        free = (rng.uniform(0, THETA_MAX), rng.uniform(0, PHI_MAX))
        genes[i] = (*half, *free) if i % 2 == 0 else (*free, *half)
    return Population(genes, SCHEMA_PURE_2, "K")


def seed_sim1(rng: np.random.Generator, pop_size: int = 50) -> tuple[Population, Population]:
    pop_p = Population(np.full((pop_size, 1), 0.5), SCHEMA_CLASSICAL_1, "P")
    return pop_p, _seed_k_quantum(rng, pop_size)


def seed_sim2(rng: np.random.Generator, pop_size: int = 50) -> tuple[Population, Population]:
    p = np.column_stack([np.full(pop_size, QUARTER), rng.uniform(0, PHI_MAX, pop_size)])
    k = np.empty((pop_size, 2))
    for i in range(pop_size):
        free = rng.uniform(0, 1)
        k[i] = (0.5, free) if i % 2 == 0 else (free, 0.5)
    return Population(p, SCHEMA_PURE_1, "P"), Population(k, SCHEMA_CLASSICAL_2, "K")


def seed_sim3(rng: np.random.Generator, pop_size: int = 50) -> tuple[Population, Population]:
    row = [0.5, THETA_MAX, PHI_MAX, 0.0, 0.0]
    pop_p = Population(np.tile(row, (pop_size, 1)), SCHEMA_MIXED2_1, "P")
    return pop_p, _seed_k_quantum(rng, pop_size)


@dataclass(frozen=True)
class ScenarioSpec:
    id: str
    schema_p: Schema
    schema_k: Schema
    seeder: Callable[[np.random.Generator, int], tuple[Population, Population]]
    ga: GaConfig
    n_runs: int = 100

    def with_overrides(self, n_runs: int | None = None, **ga) -> "ScenarioSpec":
        ga = {k: v for k, v in ga.items() if v is not None}
        return replace(self, ga=replace(self.ga, **ga), n_runs=self.n_runs if n_runs is None else n_runs)


SCENARIOS = {
    "sim1": ScenarioSpec("sim1", SCHEMA_CLASSICAL_1, SCHEMA_PURE_2, seed_sim1, GaConfig(max_gen=500)),
    "sim2": ScenarioSpec("sim2", SCHEMA_PURE_1, SCHEMA_CLASSICAL_2, seed_sim2, GaConfig(max_gen=500)),
    "sim3": ScenarioSpec("sim3", SCHEMA_MIXED2_1, SCHEMA_PURE_2, seed_sim3, GaConfig(max_gen=10_000)),
}


def scenario(name: str) -> ScenarioSpec:
    try:
        return SCENARIOS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; expected one of {sorted(SCENARIOS)}") from None


def run_seed(batch_seed: int, run_index: int) -> int:
    return int(np.random.SeedSequence([int(batch_seed), int(run_index)]).generate_state(1)[0])


def run_single(spec: ScenarioSpec, run_index: int) -> EvolutionResult:
    seed = run_seed(spec.ga.rng_seed, run_index)
    cfg = replace(spec.ga, rng_seed=seed)
    pop_p, pop_k = spec.seeder(substream(seed, SEED_STREAM), cfg.pop_size)
    return run_evolution(pop_p, pop_k, cfg)


def _run_job(args):
    spec, i = args
    return run_single(spec, i)


def aggregate(values) -> tuple[float, float]:
    """Mean and SEM (sample std with n - 1, over sqrt(n))."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise ValueError("cannot aggregate an empty series")
    return float(x.mean()), float(sem(x))


@dataclass
class BatchResult:
    spec: ScenarioSpec
    runs: list[EvolutionResult]

    @property
    def n_generations(self) -> int:
        return len(self.runs[0].records)

    def series(self, attr: str) -> np.ndarray:
        """``(n_runs, n_generations)`` array of a scalar RunRecord field."""
        return np.array([[getattr(r, attr) for r in run.records] for run in self.runs])

    def gene_series(self, label: str) -> np.ndarray:
        """``(n_runs, n_generations, n_genes)`` per-run population gene means."""
        attr = "gene_mean_p" if label == "P" else "gene_mean_k"
        return np.array([[getattr(r, attr) for r in run.records] for run in self.runs])

    def cross_run(self, attr: str) -> tuple[np.ndarray, np.ndarray]:
        s = self.series(attr)
        return s.mean(axis=0), sem(s, axis=0)

    def final_fitness(self) -> list[dict]:
        return [{"run": i, "mean_fit_p": run.records[-1].mean_fit_p,
                 "mean_fit_k": run.records[-1].mean_fit_k}
                for i, run in enumerate(self.runs)]


def run_batch(spec: ScenarioSpec, workers: int = 1) -> BatchResult:
    jobs = [(spec, i) for i in range(spec.n_runs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            runs = list(ex.map(_run_job, jobs))
    else:
        runs = [_run_job(j) for j in jobs]
    return BatchResult(spec, runs)


# ---------------------------------------------------------------------------
# Classification of converged sim3 pairs

class Category(str, Enum):
    CAT1 = "Cat1"
    CAT2 = "Cat2"
    CAT3 = "Cat3"
    CAT4 = "Cat4"
    WINNING = "Winning"
    UNCLASSIFIED = "Unclassified"


# (Q move-1 constraints, Q move-2 constraints, Picard's operator pair);
# None leaves an angle free.
_TEMPLATES = {
    Category.CAT1: ((QUARTER, None), (None, math.pi / 2), ("sigma1", "sigma3")),
    Category.CAT2: ((QUARTER, None), (None, math.pi / 2), ("sigma2", "identity")),
    Category.CAT3: ((0.0, None), (QUARTER, math.pi), ("sigma3", "sigma2")),
    Category.CAT4: ((THETA_MAX, None), (QUARTER, 0.0), ("identity", "sigma1")),
}

# Q's winning pair against any classical Picard.
_WINNING = ((QUARTER, None), (QUARTER, math.pi))


def _angles_match(params, target, tol: float) -> bool:
    return all(t is None or abs(v - t) <= tol for v, t in zip((params.theta, params.phi), target))


def _op_match(params, name: str, tol: float) -> bool:
    diff = np.asarray(make_unitary(params)) - np.asarray(named_operator(name))
    return float(np.max(np.abs(diff))) <= tol


def classify_final(k_member: Chromosome, p_member: Chromosome,
                   tol: float = 0.15, op_tol: float = 0.1) -> Category:
    """Match a (Q, Picard) pair against the four evolved-strategy templates."""
    q = decode(k_member)
    (pic,) = decode(p_member)
    if len(q) != 2 or not all(isinstance(m, PureQuantum) for m in q):
        return Category.UNCLASSIFIED
    if isinstance(pic, ClassicalMixed):
        win = _angles_match(q[0].params, _WINNING[0], tol) and _angles_match(q[1].params, _WINNING[1], tol)
        return Category.WINNING if win else Category.UNCLASSIFIED
    if not isinstance(pic, MixedTwoUnitary):
        return Category.UNCLASSIFIED
    for cat, (t1, t2, (a, b)) in _TEMPLATES.items():
        if not (_angles_match(q[0].params, t1, tol) and _angles_match(q[1].params, t2, tol)):
            continue
        straight = _op_match(pic.first, a, op_tol) and _op_match(pic.second, b, op_tol)
        swapped = _op_match(pic.first, b, op_tol) and _op_match(pic.second, a, op_tol)
        if straight or swapped:
            return cat
    return Category.UNCLASSIFIED


def is_converged(run: EvolutionResult, threshold: float = 0.05, tail: float = 0.05) -> bool:
    """Both mean fitnesses below ``threshold`` in magnitude over the last ``tail`` of generations."""
    n = len(run.records)
    window = run.records[n - max(1, int(math.ceil(tail * n))):]
    return all(abs(r.mean_fit_p) < threshold and abs(r.mean_fit_k) < threshold for r in window)


def classify_populations(pop_k: Population, pop_p: Population,
                         tol: float = 0.15, op_tol: float = 0.1) -> Category:
    """Majority label over index-paired members; no majority means Unclassified."""
    labels = Counter(classify_final(k, p, tol, op_tol) for k, p in zip(pop_k.members, pop_p.members))
    label, count = labels.most_common(1)[0]
    return label if count * 2 > pop_k.size else Category.UNCLASSIFIED


def classify_run(run: EvolutionResult, tol: float = 0.15, op_tol: float = 0.1) -> Category:
    return classify_populations(run.final_k, run.final_p, tol, op_tol)


def category_histogram(batch: BatchResult, converged_only: bool = True) -> dict[str, int]:
    hist = {c.value: 0 for c in Category}
    for run in batch.runs:
        if converged_only and not is_converged(run):
            continue
        hist[classify_run(run).value] += 1
    return hist


def pair_payoffs(k_member: Chromosome, p_member: Chromosome) -> tuple[float, float]:
    out = play(GameProfile.from_players(decode(k_member), decode(p_member)[0]))
    return out.payoff_q, out.payoff_picard


# ---------------------------------------------------------------------------
# Artifacts

BASE_COLUMNS = ("scenario", "run", "generation", "meanFitP", "semFitP", "meanFitK", "semFitK")


def csv_columns(spec: ScenarioSpec) -> list[str]:
    cols = list(BASE_COLUMNS)
    for label, schema in (("P", spec.schema_p), ("K", spec.schema_k)):
        for name in schema.gene_names:
            cols += [f"{label}_{name}_mean", f"{label}_{name}_sem"]
    return cols


def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(batch: BatchResult, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(csv_columns(batch.spec))
    for i, run in enumerate(batch.runs):
        for r in run.records:
            row = [batch.spec.id, i, r.generation, _fmt(r.mean_fit_p), _fmt(r.sem_fit_p),
                   _fmt(r.mean_fit_k), _fmt(r.sem_fit_k)]
            for means, sems in ((r.gene_mean_p, r.gene_sem_p), (r.gene_mean_k, r.gene_sem_k)):
                for m, s in zip(means, sems):
                    row += [_fmt(m), _fmt(s)]
            w.writerow(row)


def csv_text(batch: BatchResult) -> str:
    buf = io.StringIO()
    write_csv(batch, buf)
    return buf.getvalue()


def config_dict(spec: ScenarioSpec) -> dict:
    return {"scenario": spec.id, "n_runs": spec.n_runs, **asdict(spec.ga),
            "schema_p": list(spec.schema_p.kinds), "schema_k": list(spec.schema_k.kinds)}


def summary_dict(batch: BatchResult) -> dict:
    out = {"config": config_dict(batch.spec), "final_fitness": batch.final_fitness()}
    if batch.spec.schema_p == SCHEMA_MIXED2_1 and batch.spec.schema_k == SCHEMA_PURE_2:
        out["converged_runs"] = [i for i, r in enumerate(batch.runs) if is_converged(r)]
        out["category_histogram"] = category_histogram(batch)
    return out


def population_dict(pop: Population) -> dict:
    return {"label": pop.label, "schema": list(pop.schema.kinds), "genes": pop.genes.tolist()}


def population_from_dict(d: dict) -> Population:
    return Population(np.array(d["genes"], dtype=float), Schema(tuple(d["schema"])), d["label"])


def final_populations_dict(batch: BatchResult) -> dict:
    return {"scenario": batch.spec.id,
            "runs": [{"run": i, "P": population_dict(r.final_p), "K": population_dict(r.final_k),
                      "converged": is_converged(r)}
                     for i, r in enumerate(batch.runs)]}


def write_artifacts(batch: BatchResult, out_dir: Path, formats: Sequence[str] = ("csv", "json"),
                    extra_manifest: dict | None = None) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        p = out_dir / "generations.csv"
        with open(p, "w", newline="") as fh:
            write_csv(batch, fh)
        written.append(p)
    if "json" in formats:
        p = out_dir / "summary.json"
        p.write_text(json.dumps(summary_dict(batch), indent=2, sort_keys=True) + "\n")
        written.append(p)
    p = out_dir / "final_populations.json"
    p.write_text(json.dumps(final_populations_dict(batch), sort_keys=True) + "\n")
    written.append(p)
    p = out_dir / "manifest.json"
    manifest = {"config": config_dict(batch.spec), **(extra_manifest or {})}
    p.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    written.append(p)
    return written


def histogram_from_artifacts(batch_dir: Path, converged_only: bool | None = None) -> dict:
    """Category histogram rebuilt from a batch directory's final populations.

    ``converged_only`` defaults to True for sim3 only; the other scenarios
    settle away from zero fitness by design.
    """
    path = Path(batch_dir) / "final_populations.json"
    if not path.is_file():
        raise FileNotFoundError(f"no final_populations.json in {batch_dir}")
    try:
        data = json.loads(path.read_text())
        runs = data["runs"]
        scen = data["scenario"]
        pops = [(population_from_dict(r["K"]), population_from_dict(r["P"]), bool(r["converged"]))
                for r in runs]
    except (ValueError, KeyError, TypeError) as exc:
        raise ValueError(f"corrupt final_populations.json: {exc}") from exc
    if not pops:
        raise ValueError("batch has no runs")
    if converged_only is None:
        converged_only = scen == "sim3"
    hist = {c.value: 0 for c in Category}
    counted = 0
    for pop_k, pop_p, conv in pops:
        if converged_only and not conv:
            continue
        hist[classify_populations(pop_k, pop_p).value] += 1
        counted += 1
    return {"scenario": scen, "n_runs": len(pops), "converged_only": converged_only,
            "n_counted": counted, "histogram": hist}
