"""Closed-form state oracles and grid-search equilibrium certificates.

The oracles hard-code the hand-derived states for each analysed strategy
family and never touch :mod:`qpennyflip.game`, so comparing the two is a
real cross-check.  The certifier enumerates unilateral deviations on a
regular grid over each player's gene space.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import strategy as st
from .game import GameProfile, play, play_trace
from .qmat import FLIP, IDENTITY, DensityMatrix, bloch_rotation
from .strategy import (ClassicalMixed, MixedTwoUnitary, MoveSpec, PureQuantum, Schema,
                       StrategyParams, encode, named_params, schema_for)

QUARTER = math.pi / 4
HALF_PI = math.pi / 2
_MATCH = 1e-12


@dataclass(frozen=True)
class StateTrace:
    rho0: DensityMatrix
    rho1: DensityMatrix
    rho2: DensityMatrix
    rho3: DensityMatrix

    def states(self) -> tuple[DensityMatrix, ...]:
        return self.rho0, self.rho1, self.rho2, self.rho3


# ---------------------------------------------------------------------------
# Oracles

def _diag(p0: float) -> np.ndarray:
    return np.array([[p0, 0], [0, 1 - p0]], dtype=complex)


def _half(off) -> np.ndarray:
    """(1/2) [[1, off], [conj(off), 1]]."""
    return 0.5 * np.array([[1, off], [np.conj(off), 1]], dtype=complex)


PLUS = _half(1.0)
HEADS = _diag(1.0)
TAILS = _diag(0.0)


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= _MATCH


def _is_pure(move, theta=None, phi=None) -> bool:
    return (isinstance(move, PureQuantum)
            and (theta is None or _close(move.params.theta, theta))
            and (phi is None or _close(move.params.phi, phi)))


def _same_params(p: StrategyParams, name: str) -> bool:
    ref = named_params(name)
    return _close(p.theta, ref.theta) and _close(p.phi, ref.phi)


def _is_mix(move, first: str, second: str) -> bool:
    return (isinstance(move, MixedTwoUnitary)
            and _same_params(move.first, first) and _same_params(move.second, second))


def _oracle_classical(p: GameProfile):
    a, q, b = p.q_move1.p_flip, p.picard_move.p_flip, p.q_move2.p_flip
    h1 = 1 - a
    h2 = q * (1 - h1) + (1 - q) * h1
    h3 = b * (1 - h2) + (1 - b) * h2
    return _diag(h1), _diag(h2), _diag(h3)


def _oracle_winning(p: GameProfile):
    # U(pi/4, *) sends heads to |+>, which any flip mixture leaves alone;
    # the Hadamard-like U(pi/4, pi) returns |+> to heads.
    return PLUS, PLUS, HEADS


def _oracle_half_picard(p: GameProfile):
    a = p.q_move1.p_flip
    rho1 = _diag(1 - a)
    rho2 = _half(1 - 2 * a)
    return rho1, rho2, rho2


def _oracle_cat1(p: GameProfile):
    x = 2 * p.picard_move.p_first - 1
    return PLUS, _half(x), _half(-1j * x)


def _oracle_cat2(p: GameProfile):
    x = 1 - 2 * p.picard_move.p_first
    return PLUS, _half(x), _half(-1j * x)


def _oracle_cat3(p: GameProfile):
    pro = p.picard_move.p_first
    return HEADS, _diag(pro), _half(2 * pro - 1)


def _oracle_cat4(p: GameProfile):
    pro = p.picard_move.p_first
    return TAILS, _diag(1 - pro), _half(1 - 2 * pro)


@dataclass(frozen=True)
class Family:
    name: str
    matches: Callable[[GameProfile], bool]
    states: Callable[[GameProfile], tuple]
    sample: Callable[[np.random.Generator], GameProfile]


def _u(rng, lo, hi):
    return float(rng.uniform(lo, hi))


FAMILIES: dict[str, Family] = {f.name: f for f in (
    Family(
        "classical",
        lambda p: all(isinstance(m, ClassicalMixed) for m in (p.q_move1, p.picard_move, p.q_move2)),
        _oracle_classical,
        lambda r: GameProfile(ClassicalMixed(_u(r, 0, 1)), ClassicalMixed(_u(r, 0, 1)), ClassicalMixed(_u(r, 0, 1))),
    ),
    Family(
        "winning",
        lambda p: (_is_pure(p.q_move1, QUARTER) and isinstance(p.picard_move, ClassicalMixed)
                   and _is_pure(p.q_move2, QUARTER, math.pi)),
        _oracle_winning,
        lambda r: GameProfile(PureQuantum.of(QUARTER, _u(r, 0, math.pi)), ClassicalMixed(_u(r, 0, 1)),
                              PureQuantum.of(QUARTER, math.pi)),
    ),
    Family(
        "half_picard",
        lambda p: (isinstance(p.q_move1, ClassicalMixed) and _is_pure(p.picard_move, QUARTER)
                   and isinstance(p.q_move2, ClassicalMixed)),
        _oracle_half_picard,
        lambda r: GameProfile(ClassicalMixed(_u(r, 0, 1)), PureQuantum.of(QUARTER, _u(r, 0, math.pi)),
                              ClassicalMixed(_u(r, 0, 1))),
    ),
    Family(
        "cat1",
        lambda p: (_is_pure(p.q_move1, QUARTER) and _is_mix(p.picard_move, "sigma1", "sigma3")
                   and _is_pure(p.q_move2, None, HALF_PI)),
        _oracle_cat1,
        lambda r: GameProfile(PureQuantum.of(QUARTER, _u(r, 0, math.pi)),
                              MixedTwoUnitary(_u(r, 0, 1), named_params("sigma1"), named_params("sigma3")),
                              PureQuantum.of(_u(r, 0, HALF_PI), HALF_PI)),
    ),
    Family(
        "cat2",
        lambda p: (_is_pure(p.q_move1, QUARTER) and _is_mix(p.picard_move, "sigma2", "identity")
                   and _is_pure(p.q_move2, None, HALF_PI)),
        _oracle_cat2,
        lambda r: GameProfile(PureQuantum.of(QUARTER, _u(r, 0, math.pi)),
                              MixedTwoUnitary(_u(r, 0, 1), named_params("sigma2"), named_params("identity")),
                              PureQuantum.of(_u(r, 0, HALF_PI), HALF_PI)),
    ),
    Family(
        "cat3",
        lambda p: (_is_pure(p.q_move1, 0.0) and _is_mix(p.picard_move, "sigma3", "sigma2")
                   and _is_pure(p.q_move2, QUARTER, math.pi)),
        _oracle_cat3,
        lambda r: GameProfile(PureQuantum.of(0.0, _u(r, 0, math.pi)),
                              MixedTwoUnitary(_u(r, 0, 1), named_params("sigma3"), named_params("sigma2")),
                              PureQuantum.of(QUARTER, math.pi)),
    ),
    Family(
        "cat4",
        lambda p: (_is_pure(p.q_move1, HALF_PI) and _is_mix(p.picard_move, "identity", "sigma1")
                   and _is_pure(p.q_move2, QUARTER, 0.0)),
        _oracle_cat4,
        lambda r: GameProfile(PureQuantum.of(HALF_PI, _u(r, 0, math.pi)),
                              MixedTwoUnitary(_u(r, 0, 1), named_params("identity"), named_params("sigma1")),
                              PureQuantum.of(QUARTER, 0.0)),
    ),
)}


def family_of(profile: GameProfile) -> str:
    for fam in FAMILIES.values():
        if fam.matches(profile):
            return fam.name
    raise ValueError(f"profile is outside the analysed families: {profile!r}")


def sample_family(name: str, rng: np.random.Generator) -> GameProfile:
    return FAMILIES[name].sample(rng)


def oracle_trace(profile: GameProfile, family: str | None = None) -> StateTrace:
    """States rho0..rho3 from the hand-derived formulas for the profile's family."""
    fam = FAMILIES[family] if family else FAMILIES[family_of(profile)]
    if not fam.matches(profile):
        raise ValueError(f"profile does not belong to family {fam.name!r}")
    rho1, rho2, rho3 = fam.states(profile)
    return StateTrace(DensityMatrix(HEADS), DensityMatrix(rho1), DensityMatrix(rho2), DensityMatrix(rho3))


def check_oracle_agreement(profile: GameProfile, oracle: Callable[[GameProfile], StateTrace] = oracle_trace) -> float:
    """Largest elementwise gap between the oracle and :func:`play_trace` over rho1..rho3."""
    expected = oracle(profile).states()[1:]
    actual = play_trace(profile)[1:]
    return max(float(np.max(np.abs(e.m - a.m))) for e, a in zip(expected, actual))


def oracle_report(draws: int = 100, seed: int = 0) -> dict[str, float]:
    """Worst oracle gap per family over ``draws`` random members."""
    rng = np.random.default_rng(seed)
    return {name: max(check_oracle_agreement(sample_family(name, rng)) for _ in range(draws))
            for name in FAMILIES}


# ---------------------------------------------------------------------------
# Grid certification

def gene_grid(schema: Schema, points: int) -> list[np.ndarray]:
    """Per-gene grid axes spanning each gene's full range."""
    return [np.linspace(lo, hi, points) for lo, hi in zip(schema.lower, schema.upper)]


def _move_feature_grid(kind: str, points: int, feature: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """``feature`` (linear in the rotation) averaged over a move's branches, on its grid.

    Returns shape ``(points,) * n_move_genes + feature_shape``.
    """
    prob = np.linspace(0.0, 1.0, points)
    if kind == st.CLASSICAL:
        f_flip = feature(bloch_rotation(FLIP))
        f_stay = feature(bloch_rotation(IDENTITY))
        p = prob.reshape((points,) + (1,) * np.ndim(f_flip))
        return p * f_flip + (1 - p) * f_stay
    theta = np.linspace(0.0, st.THETA_MAX, points)
    phi = np.linspace(0.0, st.PHI_MAX, points)
    rot = bloch_rotation(st.unitary_matrix(theta[:, None], phi[None, :]))
    f_pure = feature(rot)  # (points, points, ...)
    if kind == st.PURE:
        return f_pure
    tail = f_pure.shape[2:]
    extra = (1,) * len(tail)
    p = prob.reshape((points, 1, 1, 1, 1) + extra)
    first = f_pure.reshape((1, points, points, 1, 1) + tail)
    second = f_pure.reshape((1, 1, 1, points, points) + tail)
    return p * first + (1 - p) * second


def _channel(move: MoveSpec) -> np.ndarray:
    return sum(w * bloch_rotation(np.asarray(u)) for w, u in st.move_to_branches(move))


def grid_payoffs_q_deviation(q_schema: Schema, picard_move: MoveSpec, points: int) -> np.ndarray:
    """Q's payoff for every grid point of Q's gene space, Picard fixed."""
    if q_schema.n_moves != 2:
        raise ValueError("Q plays two moves")
    chan = _channel(picard_move)
    r1 = _move_feature_grid(q_schema.kinds[0], points, lambda r: r[..., :, 2])
    obs = _move_feature_grid(q_schema.kinds[1], points, lambda r: r[..., 2, :])
    r2 = r1 @ chan.T
    return np.tensordot(r2, obs, axes=([-1], [-1]))


def grid_payoffs_picard_deviation(q_moves: Sequence[MoveSpec], picard_schema: Schema, points: int) -> np.ndarray:
    """Q's payoff for every grid point of Picard's gene space, Q fixed."""
    if picard_schema.n_moves != 1:
        raise ValueError("Picard plays one move")
    q1, q2 = q_moves
    r1 = _channel(q1)[:, 2]
    obs = _channel(q2)[2, :]
    return _move_feature_grid(picard_schema.kinds[0], points, lambda r: (r @ r1) @ obs)


@dataclass
class PlayerScan:
    max_gain: float
    strict: bool
    witness: dict | None


@dataclass
class NeCertificate:
    q_strategy: list[MoveSpec]
    picard_strategy: MoveSpec
    points: int
    eps: float
    payoff_q: float
    q_scan: PlayerScan
    picard_scan: PlayerScan
    verdict: str
    equivalent_axes: dict = field(default_factory=dict)

    @property
    def witness(self) -> dict | None:
        if self.verdict != "refuted":
            return None
        return self.q_scan.witness if self.q_scan.max_gain > self.eps else self.picard_scan.witness

    def to_dict(self) -> dict:
        return {
            "profile": {"q": [describe_move(m) for m in self.q_strategy],
                        "picard": describe_move(self.picard_strategy)},
            "grid": {"points_per_gene": self.points, "eps": self.eps,
                     "equivalent_axes": {k: list(v) for k, v in self.equivalent_axes.items()}},
            "payoff_q": self.payoff_q,
            "max_gain": {"Q": self.q_scan.max_gain, "Picard": self.picard_scan.max_gain},
            "strict": {"Q": self.q_scan.strict, "Picard": self.picard_scan.strict},
            "verdict": self.verdict,
            "witness": self.witness,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def describe_move(move: MoveSpec) -> dict:
    if isinstance(move, ClassicalMixed):
        return {"kind": "classical", "p_flip": move.p_flip}
    if isinstance(move, PureQuantum):
        return {"kind": "pure", "theta": move.params.theta, "phi": move.params.phi}
    return {"kind": "mixed2", "p_first": move.p_first,
            "first": {"theta": move.first.theta, "phi": move.first.phi},
            "second": {"theta": move.second.theta, "phi": move.second.phi}}


def _scan(gains: np.ndarray, schema: Schema, own_genes: np.ndarray, points: int,
          eps: float, margin: float, equivalent: Sequence[int], player: str) -> PlayerScan:
    # first grid point (C order) within rounding of the best gain
    top = gains.max()
    flat = int(np.argmax(gains >= top - _MATCH))
    idx = np.unravel_index(flat, gains.shape)
    axes = gene_grid(schema, points)
    genes = [float(axes[a][i]) for a, i in enumerate(idx)]
    witness = {"player": player, "grid_index": [int(i) for i in idx], "genes": genes,
               "gain": float(gains[idx])}
    # grid points that coincide with the profile on every non-equivalent axis
    same = np.ones(gains.shape, dtype=bool)
    for a, ax in enumerate(axes):
        if a in equivalent:
            continue
        shape = [1] * gains.ndim
        shape[a] = points
        same &= (np.abs(ax - own_genes[a]) <= _MATCH).reshape(shape)
    others = gains[~same]
    strict = bool(others.size == 0 or np.all(others < -margin))
    return PlayerScan(float(gains[idx]), strict, witness)


def certify_ne(q_strategy: Sequence[MoveSpec], picard_strategy: MoveSpec, points: int = 21,
               eps: float = 1e-9, margin: float | None = None,
               q_space: Schema | None = None, picard_space: Schema | None = None,
               equivalent_axes: dict[str, Sequence[int]] | None = None) -> NeCertificate:
    """Grid-search certificate for the NE-pair / strict NE-pair conditions.

    Q's two moves are varied jointly over ``q_space`` (default: the schema of
    ``q_strategy``); Picard's move over ``picard_space``.  Each gene axis is
    ``points`` evenly spaced values over its full range.  ``equivalent_axes``
    maps ``"Q"``/``"Picard"`` to gene indices along which the caller declares
    payoffs flat; strictness is only tested across the other axes.
    """
    q_strategy = list(q_strategy)
    q_space = q_space or schema_for(q_strategy)
    picard_space = picard_space or schema_for([picard_strategy])
    equivalent_axes = dict(equivalent_axes or {})
    margin = eps if margin is None else margin

    base = play(GameProfile.from_players(q_strategy, picard_strategy)).payoff_q
    q_gains = grid_payoffs_q_deviation(q_space, picard_strategy, points) - base
    p_gains = -grid_payoffs_picard_deviation(q_strategy, picard_space, points) + base

    def own(moves, space):
        try:
            return encode(moves, space).as_array()
        except ValueError:
            return np.full(space.n_genes, np.nan)

    q_scan = _scan(q_gains, q_space, own(q_strategy, q_space), points, eps, margin,
                   equivalent_axes.get("Q", ()), "Q")
    p_scan = _scan(p_gains, picard_space, own([picard_strategy], picard_space), points, eps, margin,
                   equivalent_axes.get("Picard", ()), "Picard")
    for scan, space in ((q_scan, q_space), (p_scan, picard_space)):
        scan.witness["moves"] = [describe_move(m) for m in
                                 st.decode(st.Chromosome(tuple(scan.witness["genes"]), space))]
    if q_scan.max_gain > eps or p_scan.max_gain > eps:
        verdict = "refuted"
    elif q_scan.strict and p_scan.strict:
        verdict = "strict-NE-pair"
    else:
        verdict = "NE-pair"
    return NeCertificate(q_strategy, picard_strategy, points, eps, base, q_scan, p_scan, verdict,
                         equivalent_axes)


def best_response_payoff_q(q_strategy: Sequence[MoveSpec], picard_space: Schema, points: int = 21) -> float:
    """Q's payoff when Picard plays his best response on the grid."""
    return float(np.min(grid_payoffs_picard_deviation(q_strategy, picard_space, points)))


# Representative profiles of the classical ES set and the four evolved
# categories.  Cat1/Cat2 need Picard's mix at 1/2 and Q's second move at
# theta = pi/4 to hold against every deviation, not only the evolved ones.
def _mix(p, a, b):
    return MixedTwoUnitary(p, named_params(a), named_params(b))


REFERENCE_PROFILES = {
    "classical": ([ClassicalMixed(0.5), ClassicalMixed(0.3)], ClassicalMixed(0.5)),
    "cat1": ([PureQuantum.of(QUARTER, 1.1), PureQuantum.of(QUARTER, HALF_PI)], _mix(0.5, "sigma1", "sigma3")),
    "cat2": ([PureQuantum.of(QUARTER, 2.0), PureQuantum.of(QUARTER, HALF_PI)], _mix(0.5, "sigma2", "identity")),
    "cat3": ([PureQuantum.of(0.0, 0.3), PureQuantum.of(QUARTER, math.pi)], _mix(0.5, "sigma3", "sigma2")),
    "cat4": ([PureQuantum.of(HALF_PI, 0.7), PureQuantum.of(QUARTER, 0.0)], _mix(0.5, "identity", "sigma1")),
}
EXPECTED_VERDICT = {"classical": "NE-pair", "cat1": "NE-pair", "cat2": "NE-pair",
                    "cat3": "refuted", "cat4": "refuted"}


def ne_report(points: int = 21, eps: float = 1e-9) -> dict[str, NeCertificate]:
    return {name: certify_ne(q, p, points=points, eps=eps) for name, (q, p) in REFERENCE_PROFILES.items()}


# ---------------------------------------------------------------------------
# Cyclic dominance among the category-3/4 counter-strategies

@dataclass(frozen=True)
class CycleLink:
    winner: str
    q_strategy: tuple[MoveSpec, MoveSpec]
    picard_name: tuple[str, str]
    payoff_q: tuple[float, ...]  # at each Picard mixing probability

    @property
    def holds(self) -> bool:
        sign = 1 if self.winner == "Q" else -1
        return all(sign * v > 0 for v in self.payoff_q)


CYCLE_PROBS = (0.0, 0.5, 1.0)


def cyclic_dominance_table(probs: Sequence[float] = CYCLE_PROBS, phi1: float = 0.0) -> list[CycleLink]:
    """The four-link loop: each strategy is beaten by the next one."""
    q_a = (PureQuantum.of(QUARTER, phi1), PureQuantum.of(QUARTER, 0.0))
    q_b = (PureQuantum.of(QUARTER, phi1), PureQuantum.of(QUARTER, math.pi))
    steps = [("Q", q_a, ("sigma3", "sigma2")),
             ("Picard", q_a, ("identity", "sigma1")),
             ("Q", q_b, ("identity", "sigma1")),
             ("Picard", q_b, ("sigma3", "sigma2"))]
    links = []
    for winner, q, pic in steps:
        vals = tuple(play(GameProfile(q[0], _mix(p, *pic), q[1])).payoff_q for p in probs)
        links.append(CycleLink(winner, q, pic, vals))
    return links
