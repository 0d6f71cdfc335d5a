"""Two-population coevolutionary GA.

Population P holds Picard's strategies and population K holds Q's.  Each
generation every p plays every k; fitness is the mean payoff over the
contests.  Reproduction is binary tournament selection of two parents,
average crossover into one child, then per-gene Gaussian mutation clamped to
the gene bounds.  Offspring replace the parents wholesale.

Random streams: every (run seed, generation, population) triple gets its own
``numpy.random.Generator`` built from ``SeedSequence([seed, generation,
population_id])``, so a trajectory depends on nothing but the seed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .game import payoff_matrix
from .strategy import Chromosome, Schema

LABEL_IDS = {"P": 0, "K": 1}
SEED_STREAM = 2**31 - 1

# Fitness gaps below this are rounding noise from payoff-irrelevant genes.
TIE_TOL = 1e-12


def substream(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))


@dataclass
class Population:
    genes: np.ndarray
    schema: Schema
    label: str

    def __post_init__(self):
        self.genes = np.array(self.genes, dtype=float, ndmin=2)
        if self.label not in LABEL_IDS:
            raise ValueError(f"label must be P or K, got {self.label!r}")
        if self.genes.shape[1] != self.schema.n_genes:
            raise ValueError("gene width does not match schema")
        if len(self.genes) < 1:
            raise ValueError("empty population")

    @classmethod
    def from_members(cls, members, label: str) -> "Population":
        members = list(members)
        schema = members[0].schema
        if any(m.schema != schema for m in members):
            raise ValueError("members do not share a schema")
        return cls(np.array([m.genes for m in members]), schema, label)

    @property
    def size(self) -> int:
        return len(self.genes)

    @property
    def members(self) -> list[Chromosome]:
        return [Chromosome(tuple(row), self.schema) for row in self.genes]


@dataclass(frozen=True)
class GaConfig:
    pop_size: int = 50
    max_gen: int = 500
    mutation_rate: float = 0.2
    mutation_std: float = 0.2
    rng_seed: int = 0

    def __post_init__(self):
        if self.pop_size < 2:
            raise ValueError("pop_size must be >= 2")
        if self.max_gen < 0:
            raise ValueError("max_gen must be >= 0")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must be in [0, 1]")
        if not self.mutation_std > 0:
            raise ValueError("mutation_std must be > 0")


@dataclass
class FitnessTable:
    """``payoff_picard[i, j]`` is Picard's payoff for P member i against K member j."""

    payoff_picard: np.ndarray
    fitness_p: np.ndarray = field(init=False)
    fitness_k: np.ndarray = field(init=False)

    def __post_init__(self):
        self.fitness_p = self.payoff_picard.mean(axis=1)
        self.fitness_k = (-self.payoff_picard).mean(axis=0)

    @property
    def payoff_q(self) -> np.ndarray:
        return -self.payoff_picard


def evaluate_fitness(pop_p: Population, pop_k: Population) -> FitnessTable:
    q = payoff_matrix(pop_k.schema, pop_k.genes, pop_p.schema, pop_p.genes)
    return FitnessTable(-q)


def tournament_indices(fitness, n: int, rng: np.random.Generator) -> np.ndarray:
    """Winners of ``n`` binary tournaments (pairs drawn with replacement)."""
    fitness = np.asarray(fitness, dtype=float)
    size = len(fitness)
    i = rng.integers(0, size, n)
    j = rng.integers(0, size, n)
    coin = rng.random(n) < 0.5
    diff = fitness[i] - fitness[j]
    return np.where(diff > TIE_TOL, i, np.where(diff < -TIE_TOL, j, np.where(coin, i, j)))


def tournament_select(pop: Population, fitness, rng: np.random.Generator) -> Chromosome:
    idx = tournament_indices(fitness, 1, rng)[0]
    return pop.members[idx]


def average_crossover(a: Chromosome, b: Chromosome) -> Chromosome:
    if a.schema != b.schema:
        raise ValueError("cannot cross chromosomes with different schemas")
    return Chromosome(tuple((a.as_array() + b.as_array()) / 2.0), a.schema)


def mutate_genes(genes: np.ndarray, schema: Schema, rate: float, std: float,
                 rng: np.random.Generator) -> np.ndarray:
    genes = np.atleast_2d(genes)
    mask = rng.random(genes.shape) < rate
    noise = rng.normal(0.0, std, genes.shape)
    return np.clip(genes + mask * noise, schema.lower, schema.upper)


def gaussian_mutate(c: Chromosome, cfg: GaConfig, rng: np.random.Generator) -> Chromosome:
    out = mutate_genes(c.as_array()[None], c.schema, cfg.mutation_rate, cfg.mutation_std, rng)
    return Chromosome(tuple(out[0]), c.schema)


def reproduce(pop: Population, fitness, cfg: GaConfig, rng: np.random.Generator) -> Population:
    """One generational step for a single population."""
    n = cfg.pop_size
    a = tournament_indices(fitness, n, rng)
    b = tournament_indices(fitness, n, rng)
    children = (pop.genes[a] + pop.genes[b]) / 2.0
    children = mutate_genes(children, pop.schema, cfg.mutation_rate, cfg.mutation_std, rng)
    return Population(children, pop.schema, pop.label)


def next_generation(pop_p: Population, pop_k: Population, table: FitnessTable,
                    cfg: GaConfig, rng) -> tuple[Population, Population]:
    """Replace both populations.

    ``rng`` is either a single Generator shared by both populations (P drawn
    first) or a mapping ``{"P": gen, "K": gen}``.
    """
    if isinstance(rng, np.random.Generator):
        rng = {"P": rng, "K": rng}
    new_p = reproduce(pop_p, table.fitness_p, cfg, rng["P"])
    new_k = reproduce(pop_k, table.fitness_k, cfg, rng["K"])
    return new_p, new_k


def sem(x, axis=None) -> np.ndarray:
    """Sample standard deviation (n - 1) over sqrt(n); zero for a single value."""
    x = np.asarray(x, dtype=float)
    n = x.shape[axis] if axis is not None else x.size
    if n < 2:
        return np.zeros(np.delete(x.shape, axis)) if axis is not None else np.float64(0.0)
    return x.std(axis=axis, ddof=1) / np.sqrt(n)


@dataclass(frozen=True)
class RunRecord:
    generation: int
    mean_fit_p: float
    sem_fit_p: float
    mean_fit_k: float
    sem_fit_k: float
    gene_mean_p: tuple[float, ...]
    gene_sem_p: tuple[float, ...]
    gene_mean_k: tuple[float, ...]
    gene_sem_k: tuple[float, ...]


def summarize(generation: int, pop_p: Population, pop_k: Population, table: FitnessTable) -> RunRecord:
    return RunRecord(
        generation,
        float(table.fitness_p.mean()), float(sem(table.fitness_p)),
        float(table.fitness_k.mean()), float(sem(table.fitness_k)),
        tuple(pop_p.genes.mean(axis=0)), tuple(sem(pop_p.genes, axis=0)),
        tuple(pop_k.genes.mean(axis=0)), tuple(sem(pop_k.genes, axis=0)),
    )


@dataclass
class EvolutionResult:
    records: list[RunRecord]
    final_p: Population
    final_k: Population


def run_evolution(seed_p: Population, seed_k: Population, cfg: GaConfig) -> EvolutionResult:
    """Evaluate-select-reproduce for ``cfg.max_gen`` generations.

    Generation 0 is the seed populations; ``max_gen + 1`` records come back.
    """
    if seed_p.label != "P" or seed_k.label != "K":
        raise ValueError("expected P (Picard) and K (Q) populations")
    if seed_p.size != cfg.pop_size or seed_k.size != cfg.pop_size:
        raise ValueError("seed population size differs from cfg.pop_size")
    pop_p, pop_k = seed_p, seed_k
    table = evaluate_fitness(pop_p, pop_k)
    records = [summarize(0, pop_p, pop_k, table)]
    for gen in range(1, cfg.max_gen + 1):
        streams = {lab: substream(cfg.rng_seed, gen, i) for lab, i in LABEL_IDS.items()}
        pop_p, pop_k = next_generation(pop_p, pop_k, table, cfg, streams)
        table = evaluate_fitness(pop_p, pop_k)
        records.append(summarize(gen, pop_p, pop_k, table))
    return EvolutionResult(records, pop_p, pop_k)
