"""Decomposition into (L, parity) irreducible blocks, glove pairs, chirality operators."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .angular import angular_momentum_generators, apply_parity, cg_doubled
from .errors import CapacityError, DomainError
from .spaces import SpaceSpec
from .states import LinearOperator, StateVector

DEFAULT_CAP = 4096

STATE_PAIR = "state_pair"
PROJECTOR_PAIR = "projector_pair"


@dataclass(frozen=True)
class IrrepBlock:
    """One copy of a (2L+1)-dimensional irrep with definite parity; basis ordered M = L..-L."""

    two_L: int
    parity: int
    copy_index: int
    basis: tuple[StateVector, ...] = field(repr=False)

    @property
    def L(self) -> Fraction:
        return Fraction(self.two_L, 2)

    @property
    def dim(self) -> int:
        return self.two_L + 1

    @property
    def space(self) -> SpaceSpec:
        return self.basis[0].space

    def highest_weight(self) -> StateVector:
        return self.basis[0]

    def key(self) -> tuple[int, int, int]:
        return (self.two_L, self.parity, self.copy_index)


def _check_cap(space: SpaceSpec, cap: int) -> None:
    if space.dim > cap:
        raise CapacityError(f"space {space.describe()} has dimension {space.dim} > cap {cap}")


def _couple(tj1: int, V1: np.ndarray, tj2: int, V2: np.ndarray, tJ: int) -> np.ndarray:
    """Coupled multiplet vectors from two multiplets given as (2j+1, d) arrays."""
    m1s = range(tj1, -tj1 - 1, -2)
    m2s = range(tj2, -tj2 - 1, -2)
    out = np.empty((tJ + 1, V1.shape[1] * V2.shape[1]), dtype=complex)
    for r, tM in enumerate(range(tJ, -tJ - 1, -2)):
        C = np.array([[cg_doubled(tj1, a, tj2, b, tJ, tM) for b in m2s] for a in m1s])
        out[r] = (V1.T @ C @ V2).ravel()
    return out


def _gram_schmidt(vectors: list[np.ndarray]) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for v in vectors:
        w = v.copy()
        for u in out:
            w -= np.vdot(u, w) * u
        out.append(w / np.linalg.norm(w))
    return out


@lru_cache(maxsize=64)
def _decompose_dense(space: SpaceSpec) -> tuple[tuple[int, int, np.ndarray], ...]:
    """Blocks as (two_L, parity, vectors[2L+1, dim]) in construction order."""
    first = space.factors[0]
    eye = np.eye(first.dim, dtype=complex)
    blocks: list[tuple[int, int, np.ndarray]] = []
    pos = 0
    for tj, p in first.multiplets():
        blocks.append((tj, p, eye[pos:pos + tj + 1]))
        pos += tj + 1
    for f in space.factors[1:]:
        feye = np.eye(f.dim, dtype=complex)
        fmult = []
        pos = 0
        for tj, p in f.multiplets():
            fmult.append((tj, p, feye[pos:pos + tj + 1]))
            pos += tj + 1
        new = []
        for tj1, p1, V1 in blocks:
            for tj2, p2, V2 in fmult:
                for tJ in range(abs(tj1 - tj2), tj1 + tj2 + 1, 2):
                    new.append((tJ, p1 * p2, _couple(tj1, V1, tj2, V2, tJ)))
        blocks = new
    # copies inside one (L, parity) sector: Gram-Schmidt per M, construction order
    sectors: dict[tuple[int, int], list[int]] = {}
    for i, (tJ, p, _) in enumerate(blocks):
        sectors.setdefault((tJ, p), []).append(i)
    fixed = list(blocks)
    for (tJ, p), idxs in sectors.items():
        if len(idxs) < 2:
            continue
        rows = np.stack([blocks[i][2] for i in idxs])  # (copies, 2L+1, dim)
        for r in range(tJ + 1):
            ortho = _gram_schmidt([rows[c, r] for c in range(len(idxs))])
            for c in range(len(idxs)):
                rows[c, r] = ortho[c]
        for c, i in enumerate(idxs):
            fixed[i] = (tJ, p, rows[c])
    ordered = sorted(range(len(fixed)), key=lambda i: (-fixed[i][0], -fixed[i][1], i))
    return tuple(fixed[i] for i in ordered)


def decompose(space: SpaceSpec, cap: int = DEFAULT_CAP) -> list[IrrepBlock]:
    """Complete orthonormal decomposition by left-to-right Clebsch-Gordan coupling.

    Ordering: descending L, parity +1 first, copies in construction order.
    """
    _check_cap(space, cap)
    return list(_blocks(space))


@lru_cache(maxsize=64)
def _blocks(space: SpaceSpec) -> tuple[IrrepBlock, ...]:
    out = []
    counter: Counter = Counter()
    for tJ, p, V in _decompose_dense(space):
        copy = counter[(tJ, p)]
        counter[(tJ, p)] += 1
        basis = tuple(StateVector.from_dense(space, v) for v in V)
        out.append(IrrepBlock(tJ, p, copy, basis))
    return tuple(out)


def block_unitary(space: SpaceSpec, cap: int = DEFAULT_CAP) -> tuple[np.ndarray, list[tuple[int, int, int]]]:
    """Dense unitary whose columns are the block basis vectors, plus (two_L, parity, copy) per block.

    Column order: block by block as returned by ``decompose``, M = L..-L inside a block.
    """
    _check_cap(space, cap)
    dense = _decompose_dense(space)
    U = np.concatenate([V for _, _, V in dense], axis=0).T
    keys = []
    counter: Counter = Counter()
    for tJ, p, _ in dense:
        keys.append((tJ, p, counter[(tJ, p)]))
        counter[(tJ, p)] += 1
    return U, keys


def multiplicity_table(space: SpaceSpec) -> dict[tuple[int, int], int]:
    """Exact integer multiplicities {(two_L, parity): count} by iterated coupling."""
    table: Counter = Counter(space.factors[0].multiplets())
    for f in space.factors[1:]:
        new: Counter = Counter()
        for (tj1, p1), n in table.items():
            for tj2, p2 in f.multiplets():
                for tJ in range(abs(tj1 - tj2), tj1 + tj2 + 1, 2):
                    new[(tJ, p1 * p2)] += n
        table = new
    return dict(sorted(table.items(), key=lambda kv: (-kv[0][0], -kv[0][1])))


@dataclass(frozen=True)
class ExistenceReport:
    space: SpaceSpec
    multiplicities: dict[int, tuple[int, int]]  # two_L -> (n parity +1, n parity -1)
    perfect_invariant_state_glove: bool
    perfect_subspace_glove: bool

    def glove_Ls(self) -> list[Fraction]:
        return [Fraction(tL, 2) for tL, (a, b) in self.multiplicities.items() if a and b]

    def to_json(self) -> dict:
        blocks = []
        for tL, (n_plus, n_minus) in self.multiplicities.items():
            blocks += [{"L_times_2": tL, "parity": 1, "copy": k} for k in range(n_plus)]
            blocks += [{"L_times_2": tL, "parity": -1, "copy": k} for k in range(n_minus)]
        return {
            "space": self.space.to_json(),
            "blocks": blocks,
            "flags": {
                "perfect_invariant_state_glove": self.perfect_invariant_state_glove,
                "perfect_subspace_glove": self.perfect_subspace_glove,
            },
        }


def glove_existence(space: SpaceSpec, cap: int = DEFAULT_CAP) -> ExistenceReport:
    _check_cap(space, cap)
    table = multiplicity_table(space)
    mult: dict[int, tuple[int, int]] = {}
    for (tL, p), n in table.items():
        a, b = mult.get(tL, (0, 0))
        mult[tL] = (a + n, b) if p == 1 else (a, b + n)
    mult = dict(sorted(mult.items(), reverse=True))
    zero = mult.get(0, (0, 0))
    return ExistenceReport(
        space=space,
        multiplicities=mult,
        perfect_invariant_state_glove=bool(zero[0] and zero[1]),
        perfect_subspace_glove=any(a and b for a, b in mult.values()),
    )


def blocks_to_json(blocks: list[IrrepBlock], space: SpaceSpec) -> dict:
    rep = glove_existence(space)
    doc = rep.to_json()
    doc["blocks"] = [{"L_times_2": b.two_L, "parity": b.parity, "copy": b.copy_index} for b in blocks]
    return doc


@dataclass(frozen=True)
class GlovePair:
    """Two orthogonal states, or two projectors, exchanged by parity.

    ``plus_basis``/``minus_basis`` hold the orthonormal states spanning each
    side (one state for a StatePair, 2L+1 states ordered M = L..-L otherwise).
    """

    kind: str
    plus: StateVector | LinearOperator
    minus: StateVector | LinearOperator
    two_L: int | None  # None for approximate pairs without definite L
    source: str
    plus_basis: tuple[StateVector, ...] = field(repr=False, default=())
    minus_basis: tuple[StateVector, ...] = field(repr=False, default=())

    @property
    def L(self) -> Fraction | None:
        return None if self.two_L is None else Fraction(self.two_L, 2)

    @property
    def space(self) -> SpaceSpec:
        return self.plus_basis[0].space

    def projectors(self) -> tuple[LinearOperator, LinearOperator]:
        if self.kind == PROJECTOR_PAIR:
            return self.plus, self.minus
        return LinearOperator.projector(self.plus_basis), LinearOperator.projector(self.minus_basis)


def construct_glove_pair(block_plus: IrrepBlock, block_minus: IrrepBlock, source: str = "") -> GlovePair:
    """Equal-weight combinations (|L M>_+ +- |L M>_-)/sqrt(2) of two opposite-parity copies."""
    if block_plus.parity != 1 or block_minus.parity != -1:
        raise DomainError(
            f"need parities (+1, -1), got ({block_plus.parity:+d}, {block_minus.parity:+d})"
        )
    if block_plus.two_L != block_minus.two_L:
        raise DomainError(f"L mismatch: {block_plus.L} vs {block_minus.L}")
    if block_plus.space != block_minus.space:
        raise DomainError("blocks live on different spaces")
    r = 1 / math.sqrt(2)
    plus = [(a + b) * r for a, b in zip(block_plus.basis, block_minus.basis)]
    minus = [(a - b) * r for a, b in zip(block_plus.basis, block_minus.basis)]
    if block_plus.two_L == 0:
        lead = plus[0].leading_label()
        amp = plus[0][lead]
        phase = abs(amp) / amp
        g_plus, g_minus = plus[0] * phase, minus[0] * phase
        return GlovePair(STATE_PAIR, g_plus, g_minus, 0, source, (g_plus,), (g_minus,))
    return GlovePair(
        PROJECTOR_PAIR,
        LinearOperator.projector(plus),
        LinearOperator.projector(minus),
        block_plus.two_L,
        source,
        tuple(plus),
        tuple(minus),
    )


def chirality_operator(pair: GlovePair, gamma_plus: float = 1.0) -> LinearOperator:
    """gamma_plus * (Pi_plus - Pi_minus); zero outside the glove subspace."""
    if gamma_plus == 0 or not math.isfinite(gamma_plus):
        raise DomainError("gamma_plus must be a finite nonzero real")
    p_plus, p_minus = pair.projectors()
    return (p_plus - p_minus) * float(gamma_plus)


def block_from_highest_weight(top: StateVector, two_L: int, parity: int, copy_index: int = 0) -> IrrepBlock:
    """Complete a multiplet by repeated lowering of its normalized highest-weight state."""
    if apply_parity(top).distance(top * parity) > 1e-9:
        raise DomainError("highest-weight state lacks the stated parity")
    Jm = angular_momentum_generators(top.space)["Jminus"]
    basis = [top.normalized()]
    for _ in range(two_L):
        basis.append((Jm @ basis[-1]).normalized())
    return IrrepBlock(two_L, parity, copy_index, tuple(basis))
