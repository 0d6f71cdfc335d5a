"""The three-move penny flip: Q moves, Picard moves, Q moves, then measure.

Q wins on heads (``|0>``), Picard on tails.  Payoffs are exact expectations
from the final density matrix, never sampled.

Besides the reference :func:`play`, this module has batched evaluators used
by the GA and the grid certifier.  They work on Bloch vectors instead: every
move is a mixture of unitaries, so each acts as a 3x3 linear map, and the
payoff ``p0 - p1`` is the final z component.  The tests hold the two routes
to agreement.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qmat import DensityMatrix, bloch_rotation, evolve_mixed, measure_probs, zero_state
from .strategy import MoveSpec, Schema, move_to_branches

@dataclass(frozen=True)
class GameProfile:
    q_move1: MoveSpec
    picard_move: MoveSpec
    q_move2: MoveSpec

    @classmethod
    def from_players(cls, q_moves, picard_move) -> "GameProfile":
        q1, q2 = q_moves
        return cls(q1, picard_move, q2)


@dataclass(frozen=True)
class GameOutcome:
    rho_final: DensityMatrix
    payoff_q: float
    payoff_picard: float


def initial_state() -> DensityMatrix:
    """Heads up, ``|0><0|``."""
    return zero_state()


def apply_move(rho, move: MoveSpec) -> DensityMatrix:
    return evolve_mixed(rho, move_to_branches(move))


def play_trace(profile: GameProfile) -> tuple[DensityMatrix, DensityMatrix, DensityMatrix, DensityMatrix]:
    rho0 = initial_state()
    rho1 = apply_move(rho0, profile.q_move1)
    rho2 = apply_move(rho1, profile.picard_move)
    rho3 = apply_move(rho2, profile.q_move2)
    return rho0, rho1, rho2, rho3


def play(profile: GameProfile) -> GameOutcome:
    rho3 = play_trace(profile)[-1]
    p0, p1 = measure_probs(rho3)
    return GameOutcome(rho3, p0 - p1, p1 - p0)


# ---------------------------------------------------------------------------
# Batched evaluation

def _check_schemas(q_schema: Schema, picard_schema: Schema) -> None:
    if q_schema.n_moves != 2 or picard_schema.n_moves != 1:
        raise ValueError("Q needs a two-move schema and Picard a one-move schema")


def _q_parts(q_schema: Schema, q_genes) -> tuple[np.ndarray, np.ndarray]:
    """Bloch vector after Q's first move, and Q's second move as an observable.

    ``payoff_q = n . r2`` where ``r2`` is the Bloch vector Picard leaves and
    ``n`` is the z row of Q's second-move rotation, averaged over branches.
    """
    (w1, u1), (w2, u2) = q_schema.branch_arrays(q_genes)
    r1 = np.einsum("nb,nbi->ni", w1, bloch_rotation(u1)[..., :, 2])
    obs = np.einsum("nb,nbj->nj", w2, bloch_rotation(u2)[..., 2, :])
    return r1, obs


def picard_channel(picard_schema: Schema, picard_genes) -> np.ndarray:
    """Picard's move as a 3x3 map on Bloch vectors, one per row."""
    ((w, v),) = picard_schema.branch_arrays(picard_genes)
    return np.einsum("nb,nbij->nij", w, bloch_rotation(v))


def payoff_matrix(q_schema: Schema, q_genes, picard_schema: Schema, picard_genes) -> np.ndarray:
    """Q's payoff for every (Picard member, Q member) pair, shape ``(n_p, n_q)``."""
    _check_schemas(q_schema, picard_schema)
    r1, obs = _q_parts(q_schema, q_genes)
    chan = picard_channel(picard_schema, picard_genes)
    r2 = chan @ r1.T  # (p, 3, k)
    return np.einsum("pik,ki->pk", r2, obs)


def paired_payoffs(q_schema: Schema, q_genes, picard_schema: Schema, picard_genes) -> np.ndarray:
    """Q's payoff for row-aligned profiles; gene arrays broadcast on rows."""
    _check_schemas(q_schema, picard_schema)
    q_genes = np.atleast_2d(q_genes)
    picard_genes = np.atleast_2d(picard_genes)
    n = max(len(q_genes), len(picard_genes))
    q_genes = np.broadcast_to(q_genes, (n, q_genes.shape[1]))
    picard_genes = np.broadcast_to(picard_genes, (n, picard_genes.shape[1]))
    r1, obs = _q_parts(q_schema, q_genes)
    chan = picard_channel(picard_schema, picard_genes)
    return np.einsum("ni,nij,nj->n", obs, chan, r1)
