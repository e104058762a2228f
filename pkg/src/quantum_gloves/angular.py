"""Parity, rotations, Wigner matrices, Clebsch-Gordan coefficients, generators,
and exchange (anti)symmetrizers.

Conventions: Condon-Shortley phases; active z-y-z Euler rotations
``D(a, b, g) = exp(-i a Jz) exp(-i b Jy) exp(-i g Jz)``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from numbers import Real

import numpy as np

from .errors import DomainError
from .spaces import FactorSpec, Label, SpaceSpec
from .states import LinearOperator, StateVector

SYMMETRIC = "symmetric"
ANTISYMMETRIC = "antisymmetric"

_FACTORIAL_CACHE_MAX = 200


def twice(x: Real | Fraction) -> int:
    """Return 2x as an int, rejecting values that are not half-integers."""
    if isinstance(x, float):
        t2 = 2 * x
        if not math.isfinite(t2) or abs(t2 - round(t2)) > 1e-9:
            raise DomainError(f"{x!r} is not a half-integer")
        return int(round(t2))
    t = Fraction(x) * 2
    if t.denominator != 1:
        raise DomainError(f"{x!r} is not a half-integer")
    return int(t)


@lru_cache(maxsize=_FACTORIAL_CACHE_MAX)
def _fact(n: int) -> int:
    if n < 0:
        raise DomainError(f"negative factorial argument {n}")
    return math.factorial(n)


@dataclass(frozen=True)
class EulerAngles:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self) -> None:
        for v in (self.alpha, self.beta, self.gamma):
            if not math.isfinite(v):
                raise DomainError("Euler angles must be finite")

    @classmethod
    def identity(cls) -> "EulerAngles":
        return cls(0.0, 0.0, 0.0)

    def canonical(self) -> "EulerAngles":
        """Reporting form: alpha, gamma in [0, 4pi), beta in [0, pi]."""
        a, b, g = self.alpha, math.remainder(self.beta, 2 * math.pi), self.gamma
        if b < 0:
            # (a, -b, g) is the same rotation as (a + pi, b, g + pi) up to spinor sign
            a, b, g = a + math.pi, -b, g + math.pi
        return EulerAngles(a % (4 * math.pi), b, g % (4 * math.pi))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)


def haar_random_rotation(rng: np.random.Generator) -> EulerAngles:
    """Haar-distributed rotation: alpha, gamma uniform, cos(beta) uniform."""
    a, u, g = rng.random(3)
    return EulerAngles(2 * math.pi * a, math.acos(1 - 2 * u), 2 * math.pi * g)


def haar_random_angles(rng: np.random.Generator, n: int) -> np.ndarray:
    """Array of shape (n, 3) with Haar-distributed (alpha, beta, gamma)."""
    u = rng.random((n, 3))
    return np.column_stack([2 * np.pi * u[:, 0], np.arccos(1 - 2 * u[:, 1]), 2 * np.pi * u[:, 2]])


# --- Wigner matrices -------------------------------------------------------

def _check_jm(tj: int, *tms: int) -> None:
    if tj < 0:
        raise DomainError(f"negative j (2j={tj})")
    for tm in tms:
        if abs(tm) > tj or (tj - tm) % 2:
            raise DomainError(f"m={tm}/2 incompatible with j={tj}/2")


def _small_d(tj: int, tmp: int, tm: int, beta):
    # Wigner's sum over k; beta may be a float or an array of angles
    jpm, jmm = (tj + tm) // 2, (tj - tm) // 2
    jpmp, jmmp = (tj + tmp) // 2, (tj - tmp) // 2
    dm = (tmp - tm) // 2
    pref = math.sqrt(_fact(jpm) * _fact(jmm) * _fact(jpmp) * _fact(jmmp))
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    total = 0.0
    for k in range(max(0, -dm), min(jpm, jmmp) + 1):
        denom = _fact(jpm - k) * _fact(k) * _fact(jmmp - k) * _fact(k + dm)
        sign = -1.0 if (k + dm) % 2 else 1.0
        total += sign / denom * c ** (tj - 2 * k - dm) * s ** (2 * k + dm)
    return pref * total


def wigner_small_d(j, m_row, m_col, beta: float) -> float:
    """d^j_{m_row, m_col}(beta) = <j m_row| exp(-i beta Jy) |j m_col>."""
    tj, tmp, tm = twice(j), twice(m_row), twice(m_col)
    _check_jm(tj, tmp, tm)
    return float(_small_d(tj, tmp, tm, float(beta)))


def wigner_small_d_matrix(j, beta: float) -> np.ndarray:
    """Full d^j(beta), rows and columns ordered m = j .. -j."""
    tj = twice(j)
    _check_jm(tj)
    ms = range(tj, -tj - 1, -2)
    return np.array([[_small_d(tj, a, b, float(beta)) for b in ms] for a in ms], dtype=float)


def batch_small_d_matrices(tj: int, betas: np.ndarray) -> np.ndarray:
    """d^j for each angle in ``betas``; shape (n, 2j+1, 2j+1)."""
    ms = range(tj, -tj - 1, -2)
    betas = np.asarray(betas, dtype=float)
    out = np.empty((len(betas), tj + 1, tj + 1))
    for r, a in enumerate(ms):
        for q, b in enumerate(ms):
            out[:, r, q] = _small_d(tj, a, b, betas)
    return out


def wigner_D_matrix(j, angles: EulerAngles) -> np.ndarray:
    tj = twice(j)
    ms = np.arange(tj, -tj - 1, -2) / 2
    d = wigner_small_d_matrix(Fraction(tj, 2), angles.beta)
    return np.exp(-1j * angles.alpha * ms)[:, None] * d * np.exp(-1j * angles.gamma * ms)[None, :]


def factor_rotation_matrix(factor: FactorSpec, angles: EulerAngles) -> np.ndarray:
    """Rotation of one factor in its label order (block diagonal over l)."""
    out = np.zeros((factor.dim, factor.dim), dtype=complex)
    pos = 0
    for tj, _ in factor.multiplets():
        n = tj + 1
        out[pos:pos + n, pos:pos + n] = wigner_D_matrix(Fraction(tj, 2), angles)
        pos += n
    return out


def rotate_dense(space: SpaceSpec, vec: np.ndarray, angles: EulerAngles) -> np.ndarray:
    """Apply U_R to a dense vector (or to the rows of a matrix, shape (dim, k))."""
    tail = vec.shape[1:]
    t = np.asarray(vec, dtype=complex).reshape(space.dims + tail)
    for axis, f in enumerate(space.factors):
        mat = factor_rotation_matrix(f, angles)
        t = np.moveaxis(np.tensordot(mat, t, axes=([1], [axis])), 0, axis)
    return t.reshape((space.dim,) + tail)


def rotation_matrix(space: SpaceSpec, angles: EulerAngles) -> np.ndarray:
    mat = np.ones((1, 1), dtype=complex)
    for f in space.factors:
        mat = np.kron(mat, factor_rotation_matrix(f, angles))
    return mat


def rotation_operator(space: SpaceSpec, angles: EulerAngles) -> LinearOperator:
    return LinearOperator.from_dense(space, rotation_matrix(space, angles))


def apply_rotation(psi: StateVector, angles: EulerAngles) -> StateVector:
    """Active rotation applied factor by factor on the sparse amplitudes."""
    space = psi.space
    current: dict[Label, complex] = dict(psi.amplitudes)
    for i, f in enumerate(space.factors):
        cols = {}
        for tj, _ in f.multiplets():
            D = wigner_D_matrix(Fraction(tj, 2), angles)
            ms = list(range(tj, -tj - 1, -2))
            for c, tm in enumerate(ms):
                cols[(tj, tm)] = [((tj, ms[r]), D[r, c]) for r in range(len(ms))]
        nxt: dict[Label, complex] = defaultdict(complex)
        for lab, amp in current.items():
            for entry, coeff in cols[lab[i]]:
                nxt[lab[:i] + (entry,) + lab[i + 1:]] += coeff * amp
        current = nxt
    return StateVector(space, current, validate=False)


# --- parity ----------------------------------------------------------------

def apply_parity(psi: StateVector) -> StateVector:
    """(-1)^(sum of orbital l) on every label; spins are untouched."""
    space = psi.space
    return StateVector(
        space, {lab: space.parity_of(lab) * a for lab, a in psi.amplitudes.items()}, validate=False
    )


def parity_operator(space: SpaceSpec) -> LinearOperator:
    return LinearOperator(space, {(lab, lab): space.parity_of(lab) for lab in space.labels}, validate=False)


def parity_diagonal(space: SpaceSpec) -> np.ndarray:
    return np.array([space.parity_of(lab) for lab in space.labels], dtype=float)


# --- generators ------------------------------------------------------------

def _ladder(tj: int, tm: int, up: bool) -> float:
    # sqrt((j -+ m)(j +- m + 1)) in doubled units
    if up:
        return math.sqrt((tj - tm) * (tj + tm + 2)) / 2
    return math.sqrt((tj + tm) * (tj - tm + 2)) / 2


def angular_momentum_generators(space: SpaceSpec) -> dict[str, LinearOperator]:
    """Total Jz, J+, J-, J^2 (orbital and spin contributions summed)."""
    jz: dict = {}
    jp: dict = defaultdict(complex)
    jm: dict = defaultdict(complex)
    for lab in space.labels:
        jz[(lab, lab)] = sum(tm for _, tm in lab) / 2
        for i, (tj, tm) in enumerate(lab):
            if tm < tj:
                jp[(lab[:i] + ((tj, tm + 2),) + lab[i + 1:], lab)] += _ladder(tj, tm, True)
            if tm > -tj:
                jm[(lab[:i] + ((tj, tm - 2),) + lab[i + 1:], lab)] += _ladder(tj, tm, False)
    Jz = LinearOperator(space, jz, validate=False)
    Jp = LinearOperator(space, jp, validate=False)
    Jm = LinearOperator(space, jm, validate=False)
    J2 = Jm @ Jp + Jz @ Jz + Jz
    return {"Jz": Jz, "Jplus": Jp, "Jminus": Jm, "Jsquared": J2}


# --- Clebsch-Gordan ----------------------------------------------------------

@lru_cache(maxsize=None)
def _cg_doubled(tj1: int, tm1: int, tj2: int, tm2: int, tJ: int, tM: int) -> float:
    if tm1 + tm2 != tM:
        return 0.0
    if not abs(tj1 - tj2) <= tJ <= tj1 + tj2 or (tj1 + tj2 + tJ) % 2:
        return 0.0
    def h(t: int) -> int:  # arguments below are always even
        return t // 2

    a = h(tj1 + tj2 - tJ)
    b = h(tj1 - tm1)
    c = h(tj2 + tm2)
    d = h(tJ - tj2 + tm1)
    e = h(tJ - tj1 - tm2)
    pref = Fraction(
        (tJ + 1) * _fact(h(tJ + tj1 - tj2)) * _fact(h(tJ - tj1 + tj2)) * _fact(a),
        _fact(h(tj1 + tj2 + tJ) + 1),
    ) * (
        _fact(h(tJ + tM)) * _fact(h(tJ - tM)) * _fact(b) * _fact(h(tj1 + tm1))
        * _fact(h(tj2 - tm2)) * _fact(c)
    )
    total = Fraction(0)
    for k in range(max(0, -d, -e), min(a, b, c) + 1):
        den = _fact(k) * _fact(a - k) * _fact(b - k) * _fact(c - k) * _fact(d + k) * _fact(e + k)
        total += Fraction(-1 if k % 2 else 1, den)
    if total == 0:
        return 0.0
    mag = math.sqrt(pref * total * total)
    return mag if total > 0 else -mag


def clebsch_gordan(j1, m1, j2, m2, J, M) -> float:
    """<j1 m1; j2 m2 | J M> (Racah formula, Condon-Shortley phases)."""
    tj1, tm1, tj2, tm2, tJ, tM = (twice(x) for x in (j1, m1, j2, m2, J, M))
    _check_jm(tj1, tm1)
    _check_jm(tj2, tm2)
    _check_jm(tJ, tM)
    return _cg_doubled(tj1, tm1, tj2, tm2, tJ, tM)


def cg_doubled(tj1: int, tm1: int, tj2: int, tm2: int, tJ: int, tM: int) -> float:
    """Same as clebsch_gordan but in doubled integer units, no validation."""
    return _cg_doubled(tj1, tm1, tj2, tm2, tJ, tM)


# --- exchange symmetry ------------------------------------------------------

def _perm_sign(perm: tuple[int, ...]) -> int:
    sign, seen = 1, set()
    for start in range(len(perm)):
        if start in seen:
            continue
        length, k = 0, start
        while k not in seen:
            seen.add(k)
            k = perm[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def permutation_project(psi: StateVector, group, sign: str) -> StateVector:
    """(1/n!) sum over permutations of the group's factors, sign-weighted if antisymmetric."""
    space = psi.space
    group = tuple(group)
    if sign not in (SYMMETRIC, ANTISYMMETRIC):
        raise DomainError(f"unknown symmetry {sign!r}")
    if len(group) < 1 or len(set(group)) != len(group):
        raise DomainError(f"bad exchange group {group}")
    for i in group:
        if not 0 <= i < space.n_factors:
            raise DomainError(f"factor index {i} out of range")
    if len({space.factors[i] for i in group}) != 1:
        raise DomainError(f"exchange group {group} mixes factor kinds or cutoffs")
    perms = list(permutations(range(len(group))))
    weight = 1.0 / len(perms)
    acc: dict[Label, complex] = defaultdict(complex)
    for perm in perms:
        s = _perm_sign(perm) if sign == ANTISYMMETRIC else 1
        for lab, amp in psi.amplitudes.items():
            new = list(lab)
            for src, dst in enumerate(perm):
                new[group[dst]] = lab[group[src]]
            acc[tuple(new)] += s * weight * amp
    return StateVector(space, acc, validate=False)
