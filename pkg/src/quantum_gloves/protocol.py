"""Monte-Carlo simulation of the chirality exchange between Alice and Bob."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angular import EulerAngles, haar_random_angles, parity_diagonal, rotation_matrix
from .catalog import CatalogEntry
from .errors import DomainError
from .irreps import PROJECTOR_PAIR, STATE_PAIR
from .twirl import (
    batch_rotation_matrices,
    communication_cost,
    lmax_footprint,
    rotated_helstrom,
    twirl_dense,
)

GLOVE_BASIS = "glove"
HELSTROM = "helstrom"

_SNAP = 1e-12
_CHUNK = 1024


@dataclass(frozen=True)
class ChannelConfig:
    random_rotation: bool = False
    fixed_rotation: EulerAngles | None = None
    bob_opposite_chirality: bool = False
    measurement: str = GLOVE_BASIS

    def __post_init__(self) -> None:
        if self.random_rotation and self.fixed_rotation is not None:
            raise DomainError("random_rotation and fixed_rotation are mutually exclusive")
        if self.measurement not in (GLOVE_BASIS, HELSTROM):
            raise DomainError(f"unknown measurement {self.measurement!r}")

    def label(self) -> str:
        if self.random_rotation:
            chan = "random"
        elif self.fixed_rotation is not None:
            chan = "fixed({:.6g};{:.6g};{:.6g})".format(*self.fixed_rotation.as_tuple())
        else:
            chan = "none"
        chir = "opposite" if self.bob_opposite_chirality else "same"
        return f"rotation={chan};chirality={chir};measurement={self.measurement}"

    def to_json(self) -> dict:
        return {
            "random_rotation": self.random_rotation,
            "fixed_rotation": None if self.fixed_rotation is None else list(self.fixed_rotation.as_tuple()),
            "bob_opposite_chirality": self.bob_opposite_chirality,
            "measurement": self.measurement,
        }


@dataclass(frozen=True)
class SimReport:
    entry: str
    config: ChannelConfig
    trials: int
    successes: int
    inferred_opposite: int
    rest_outcomes: int
    seed: int
    max_probability_defect: float

    @property
    def frequency(self) -> float:
        return self.successes / self.trials

    @property
    def stderr(self) -> float:
        f = self.frequency
        return math.sqrt(f * (1 - f) / self.trials)

    def to_json(self) -> dict:
        return {
            "entry": self.entry,
            "config": self.config.to_json(),
            "trials": self.trials,
            "successes": self.successes,
            "frequency": self.frequency,
            "stderr": self.stderr,
            "inferred_opposite": self.inferred_opposite,
            "rest_outcomes": self.rest_outcomes,
            "seed": self.seed,
            "max_probability_defect": self.max_probability_defect,
        }

    CSV_HEADER = ("entry", "config", "trials", "successes", "frequency", "stderr", "seed")

    def csv_row(self) -> tuple:
        return (self.entry, self.config.label(), self.trials, self.successes,
                self.frequency, self.stderr, self.seed)


def _bob_effects(entry: CatalogEntry, config: ChannelConfig, rho_plus: np.ndarray) -> tuple[np.ndarray, ...]:
    """(E_same, E_opposite) effect operators; the remainder is 'rest' (glove) or a coin flip (Helstrom)."""
    space = entry.space
    if config.measurement == GLOVE_BASIS:
        p_plus, p_minus = entry.pair.projectors()
        return p_plus.to_dense(), p_minus.to_dense()
    P = parity_diagonal(space)
    rho_minus = P[:, None] * rho_plus * P[None, :]
    if config.random_rotation:
        diff = twirl_dense(space, rho_plus) - twirl_dense(space, rho_minus)
    elif config.fixed_rotation is not None:
        U = rotation_matrix(space, config.fixed_rotation)
        diff = U @ (rho_plus - rho_minus) @ U.conj().T
    else:
        diff = rho_plus - rho_minus
    w, V = np.linalg.eigh((diff + diff.conj().T) / 2)
    q_pos = V[:, w > _SNAP] @ V[:, w > _SNAP].conj().T
    q_neg = V[:, w < -_SNAP] @ V[:, w < -_SNAP].conj().T
    q_zero = np.eye(space.dim) - q_pos - q_neg
    # ties are broken by a fair coin, folded into the effects
    return q_pos + q_zero / 2, q_neg + q_zero / 2


def _snap(p: np.ndarray) -> np.ndarray:
    p = np.where(np.abs(p) < _SNAP, 0.0, p)
    return np.where(np.abs(p - 1) < _SNAP, 1.0, p)


def simulate_exchange(entry: CatalogEntry, config: ChannelConfig, trials: int, seed: int,
                      partitions: int = 1) -> SimReport:
    """Alice prepares '+', the channel rotates it, Bob measures and infers relative chirality.

    All random draws come from one generator seeded with ``seed`` and are made
    before any partitioning, so counts do not depend on ``partitions``.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    if partitions < 1:
        raise DomainError("partitions must be >= 1")
    if entry.pair.kind not in (STATE_PAIR, PROJECTOR_PAIR):
        raise DomainError(f"unsupported pair kind {entry.pair.kind!r}")
    space = entry.space
    psi = entry.representative().normalized().to_dense()
    P = parity_diagonal(space)
    rho_plus = np.outer(psi, psi.conj())
    e_same, e_opp = _bob_effects(entry, config, rho_plus)
    sent = P * psi if config.bob_opposite_chirality else psi

    rng = np.random.default_rng(seed)
    angles = haar_random_angles(rng, trials) if config.random_rotation else None
    draws = rng.random(trials)
    if config.fixed_rotation is not None:
        sent = rotation_matrix(space, config.fixed_rotation) @ sent

    successes = inferred_opp = rest = 0
    worst = 0.0
    bounds = np.linspace(0, trials, partitions + 1).astype(int)
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        for start in range(lo, hi, _CHUNK):
            stop = min(start + _CHUNK, hi)
            if angles is not None:
                states = np.einsum("nij,j->ni", batch_rotation_matrices(space, angles[start:stop]), sent)
            else:
                states = np.broadcast_to(sent, (stop - start, space.dim))
            p_same = np.einsum("ni,ij,nj->n", states.conj(), e_same, states).real
            p_opp = np.einsum("ni,ij,nj->n", states.conj(), e_opp, states).real
            p_rest = 1.0 - p_same - p_opp
            if config.measurement == GLOVE_BASIS:
                total = p_same + p_opp + p_rest
            else:
                total = p_same + p_opp
                p_rest = np.zeros_like(p_same)
            worst = max(worst, float(np.abs(total - 1).max()))
            p_same, p_opp = _snap(p_same), _snap(p_opp)
            u = draws[start:stop]
            says_same = u < p_same
            says_opp = ~says_same & (u < p_same + p_opp)
            inferred_opp += int(says_opp.sum())
            rest += int((~says_same & ~says_opp).sum())
            correct = says_opp if config.bob_opposite_chirality else says_same
            successes += int(correct.sum())
    return SimReport(entry.id, config, trials, successes, inferred_opp, rest, seed, worst)


def fixed_frame_information_check(entry: CatalogEntry, angles: EulerAngles) -> float:
    """Helstrom success for telling Alice's '+' state from its rotated copy (1/2: no orientation leak)."""
    pair = entry.pair
    if pair.kind == PROJECTOR_PAIR and not pair.two_L:
        raise DomainError("projector pairs need L > 0 for an orientation check")
    if pair.kind not in (STATE_PAIR, PROJECTOR_PAIR):
        raise DomainError(f"unsupported pair kind {pair.kind!r}")
    return rotated_helstrom(entry.representative(), angles)


@dataclass(frozen=True)
class ResourceReport:
    entry: str
    particle_count: int
    factor_kinds: tuple[str, ...]
    qubits: float
    lmax: tuple[int, ...]
    perfect: bool

    def to_json(self) -> dict:
        return {
            "entry": self.entry,
            "particles": self.particle_count,
            "factor_kinds": list(self.factor_kinds),
            "qubits": self.qubits,
            "lmax": list(self.lmax),
            "perfect": self.perfect,
        }


def resource_report(entry: CatalogEntry) -> ResourceReport:
    rep = entry.representative()
    return ResourceReport(
        entry=entry.id,
        particle_count=entry.particles,
        factor_kinds=tuple(f.kind for f in entry.space.factors),
        qubits=communication_cost(entry.pair, rep),
        lmax=tuple(lmax_footprint(rep)),
        perfect=entry.perfect,
    )
