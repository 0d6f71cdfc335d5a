"""Strategy parametrisation, player moves and gene encodings.

A pure quantum strategy is the two-angle unitary

    U(theta, phi) = [[cos t, -e^{i phi} sin t],
                     [sin t,  e^{i phi} cos t]]

with ``theta`` in [0, pi/2] and ``phi`` in [0, pi].  The classical flip is
U(pi/2, pi) and the classical no-flip is U(0, 0).

Genes are stored in natural units (probabilities and radians); bounds live
on the :class:`Schema`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .qmat import FLIP, IDENTITY, Unitary2

THETA_MAX = math.pi / 2
PHI_MAX = math.pi
_SLACK = 1e-12


def _check_range(name: str, value: float, lo: float, hi: float) -> None:
    if not (lo - _SLACK <= value <= hi + _SLACK) or math.isnan(value):
        raise ValueError(f"{name}={value!r} outside [{lo}, {hi}]")


@dataclass(frozen=True)
class StrategyParams:
    theta: float
    phi: float

    def __post_init__(self):
        _check_range("theta", self.theta, 0.0, THETA_MAX)
        _check_range("phi", self.phi, 0.0, PHI_MAX)


@dataclass(frozen=True)
class ClassicalMixed:
    """Flip with probability ``p_flip``, otherwise leave the penny alone."""

    p_flip: float

    def __post_init__(self):
        _check_range("p_flip", self.p_flip, 0.0, 1.0)


@dataclass(frozen=True)
class PureQuantum:
    params: StrategyParams

    @classmethod
    def of(cls, theta: float, phi: float) -> "PureQuantum":
        return cls(StrategyParams(theta, phi))


@dataclass(frozen=True)
class MixedTwoUnitary:
    """Apply ``first`` with probability ``p_first``, ``second`` otherwise."""

    p_first: float
    first: StrategyParams
    second: StrategyParams

    def __post_init__(self):
        _check_range("p_first", self.p_first, 0.0, 1.0)

    @classmethod
    def of(cls, p_first: float, first: Sequence[float], second: Sequence[float]) -> "MixedTwoUnitary":
        return cls(p_first, StrategyParams(*first), StrategyParams(*second))


MoveSpec = Union[ClassicalMixed, PureQuantum, MixedTwoUnitary]


def unitary_matrix(theta, phi) -> np.ndarray:
    """Vectorised U(theta, phi); returns shape ``theta.shape + (2, 2)``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    e = np.exp(1j * phi)
    out = np.empty(np.broadcast(theta, phi).shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = -e * s
    out[..., 1, 0] = s
    out[..., 1, 1] = e * c
    return out


def make_unitary(params) -> Unitary2:
    if not isinstance(params, StrategyParams):
        params = StrategyParams(*params)
    return Unitary2(unitary_matrix(params.theta, params.phi))


F = Unitary2(FLIP)
N = Unitary2(IDENTITY)

# sigma2 is kept in its real form; conjugation by it matches the usual
# [[0, -i], [i, 0]] on every density matrix.
_NAMED = {
    "sigma1": (THETA_MAX, PHI_MAX),
    "sigma2": (THETA_MAX, 0.0),
    "sigma3": (0.0, PHI_MAX),
    "identity": (0.0, 0.0),
    "hadamard": (math.pi / 4, PHI_MAX),
}


def named_params(name: str) -> StrategyParams:
    try:
        return StrategyParams(*_NAMED[name])
    except KeyError:
        raise ValueError(f"unknown operator {name!r}; expected one of {sorted(_NAMED)}") from None


def named_operator(name: str) -> Unitary2:
    exact = {
        "sigma1": [[0, 1], [1, 0]],
        "sigma2": [[0, -1], [1, 0]],
        "sigma3": [[1, 0], [0, -1]],
        "identity": [[1, 0], [0, 1]],
        "hadamard": np.array([[1, 1], [1, -1]]) / math.sqrt(2),
    }
    named_params(name)
    return Unitary2(exact[name])


def move_to_branches(move: MoveSpec) -> list[tuple[float, Unitary2]]:
    """Probability-weighted unitaries that together make up ``move``."""
    if isinstance(move, ClassicalMixed):
        return [(move.p_flip, F), (1.0 - move.p_flip, N)]
    if isinstance(move, PureQuantum):
        return [(1.0, make_unitary(move.params))]
    if isinstance(move, MixedTwoUnitary):
        return [(move.p_first, make_unitary(move.first)),
                (1.0 - move.p_first, make_unitary(move.second))]
    raise TypeError(f"not a move: {move!r}")


# ---------------------------------------------------------------------------
# Encodings

CLASSICAL = "classical"
PURE = "pure"
MIXED2 = "mixed2"

_KIND_GENES = {
    CLASSICAL: (("pro", 1.0),),
    PURE: (("theta", THETA_MAX), ("phi", PHI_MAX)),
    MIXED2: (("pro", 1.0), ("theta1", THETA_MAX), ("phi1", PHI_MAX),
             ("theta2", THETA_MAX), ("phi2", PHI_MAX)),
}
_KIND_BRANCHES = {CLASSICAL: 2, PURE: 1, MIXED2: 2}


@dataclass(frozen=True)
class Schema:
    """Ordered move kinds for one player; fixes the gene layout and bounds."""

    kinds: tuple[str, ...]

    def __post_init__(self):
        bad = [k for k in self.kinds if k not in _KIND_GENES]
        if bad or not self.kinds:
            raise ValueError(f"bad schema kinds {self.kinds!r}")

    @property
    def n_genes(self) -> int:
        return sum(len(_KIND_GENES[k]) for k in self.kinds)

    @property
    def n_moves(self) -> int:
        return len(self.kinds)

    @property
    def gene_names(self) -> tuple[str, ...]:
        return tuple(f"m{i + 1}_{name}"
                     for i, k in enumerate(self.kinds) for name, _ in _KIND_GENES[k])

    @property
    def lower(self) -> np.ndarray:
        return np.zeros(self.n_genes)

    @property
    def upper(self) -> np.ndarray:
        return np.array([hi for k in self.kinds for _, hi in _KIND_GENES[k]])

    def slices(self) -> list[slice]:
        out, start = [], 0
        for k in self.kinds:
            n = len(_KIND_GENES[k])
            out.append(slice(start, start + n))
            start += n
        return out

    def gene_index(self, move: int, name: str) -> int:
        names = [n for n, _ in _KIND_GENES[self.kinds[move]]]
        return self.slices()[move].start + names.index(name)

    def branch_arrays(self, genes) -> list[tuple[np.ndarray, np.ndarray]]:
        """Vectorised :func:`move_to_branches` for a batch of gene rows.

        Returns one ``(weights, unitaries)`` pair per move with shapes
        ``(n, B)`` and ``(n, B, 2, 2)``.
        """
        g = np.atleast_2d(np.asarray(genes, dtype=float))
        n = g.shape[0]
        out = []
        for kind, sl in zip(self.kinds, self.slices()):
            block = g[:, sl]
            if kind == CLASSICAL:
                w = np.stack([block[:, 0], 1.0 - block[:, 0]], axis=1)
                u = np.broadcast_to(np.stack([FLIP, IDENTITY]), (n, 2, 2, 2))
            elif kind == PURE:
                w = np.ones((n, 1))
                u = unitary_matrix(block[:, 0], block[:, 1])[:, None]
            else:
                w = np.stack([block[:, 0], 1.0 - block[:, 0]], axis=1)
                u = np.stack([unitary_matrix(block[:, 1], block[:, 2]),
                              unitary_matrix(block[:, 3], block[:, 4])], axis=1)
            out.append((w, u))
        return out


SCHEMA_CLASSICAL_1 = Schema((CLASSICAL,))
SCHEMA_CLASSICAL_2 = Schema((CLASSICAL, CLASSICAL))
SCHEMA_PURE_1 = Schema((PURE,))
SCHEMA_PURE_2 = Schema((PURE, PURE))
SCHEMA_MIXED2_1 = Schema((MIXED2,))


def _kind_of(move: MoveSpec) -> str:
    if isinstance(move, ClassicalMixed):
        return CLASSICAL
    if isinstance(move, PureQuantum):
        return PURE
    if isinstance(move, MixedTwoUnitary):
        return MIXED2
    raise TypeError(f"not a move: {move!r}")


def schema_for(moves: Sequence[MoveSpec]) -> Schema:
    return Schema(tuple(_kind_of(m) for m in moves))


@dataclass(frozen=True)
class Chromosome:
    genes: tuple[float, ...]
    schema: Schema

    def __post_init__(self):
        genes = tuple(float(x) for x in self.genes)
        object.__setattr__(self, "genes", genes)
        if len(genes) != self.schema.n_genes:
            raise ValueError(f"{len(genes)} genes for a schema needing {self.schema.n_genes}")
        g = np.array(genes)
        if np.any(np.isnan(g)) or np.any(g < self.schema.lower - _SLACK) or np.any(g > self.schema.upper + _SLACK):
            raise ValueError(f"genes {genes} outside schema bounds")

    def as_array(self) -> np.ndarray:
        return np.array(self.genes)


def encode(moves: Sequence[MoveSpec], schema: Schema | None = None) -> Chromosome:
    schema = schema or schema_for(moves)
    if schema_for(moves) != schema:
        raise ValueError("moves do not match schema")
    genes: list[float] = []
    for m in moves:
        if isinstance(m, ClassicalMixed):
            genes.append(m.p_flip)
        elif isinstance(m, PureQuantum):
            genes += [m.params.theta, m.params.phi]
        else:
            genes += [m.p_first, m.first.theta, m.first.phi, m.second.theta, m.second.phi]
    return Chromosome(tuple(genes), schema)


def decode(chrom: Chromosome) -> list[MoveSpec]:
    moves: list[MoveSpec] = []
    g = chrom.genes
    for kind, sl in zip(chrom.schema.kinds, chrom.schema.slices()):
        b = g[sl]
        if kind == CLASSICAL:
            moves.append(ClassicalMixed(b[0]))
        elif kind == PURE:
            moves.append(PureQuantum(StrategyParams(b[0], b[1])))
        else:
            moves.append(MixedTwoUnitary(b[0], StrategyParams(b[1], b[2]), StrategyParams(b[3], b[4])))
    return moves
