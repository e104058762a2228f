"""Named glove constructions and their invariant checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations

import numpy as np

from .angular import (
    ANTISYMMETRIC,
    SYMMETRIC,
    EulerAngles,
    _perm_sign,
    angular_momentum_generators,
    apply_parity,
    apply_rotation,
    haar_random_rotation,
    parity_diagonal,
    permutation_project,
    rotation_matrix,
)
from .errors import DomainError
from .irreps import (
    STATE_PAIR,
    GlovePair,
    IrrepBlock,
    block_from_highest_weight,
    construct_glove_pair,
)
from .spaces import FactorSpec, Label, SpaceSpec
from .states import StateVector, inner_product

FERMI = "fermi"
BOSE = "bose"

UP = (1, 1)
DOWN = (1, -1)
SQ2 = math.sqrt(2)
SQ3 = math.sqrt(3)


def Y(l: int, m: int) -> tuple[int, int]:
    """Label entry for the spherical harmonic Y_lm."""
    return (2 * l, 2 * m)


def _orbitals(n: int, l_max: int = 1, identical: bool = False) -> SpaceSpec:
    groups = (tuple(range(n)),) if identical and n > 1 else ()
    return SpaceSpec(tuple(FactorSpec.orbital(l_max) for _ in range(n)), groups)


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    space: SpaceSpec
    pair: GlovePair
    perfect: bool
    notes: str
    particles: int
    components: dict[str, StateVector] = field(default_factory=dict, repr=False)
    radial: dict[str, str] = field(default_factory=dict)
    defect: float | None = None

    def representative(self) -> StateVector:
        """The state Alice prepares for '+': the glove itself, or the top-M glove state."""
        return self.pair.plus_basis[0]

    def header(self) -> dict:
        return {"id": self.id, "perfect": self.perfect, "notes": self.notes}

    def to_json(self) -> dict:
        return {
            "entry": self.header(),
            "plus": [s.to_json() for s in self.pair.plus_basis],
            "minus": [s.to_json() for s in self.pair.minus_basis],
        }


# --- states -------------------------------------------------------------------

def s_cubed_state() -> StateVector:
    """All three relative positions in s-waves."""
    return StateVector.basis(_orbitals(3), (Y(0, 0),) * 3)


def aharonov_state() -> StateVector:
    """Totally antisymmetric combination of Y_11, Y_10, Y_1-1 on three orbital factors."""
    space = _orbitals(3)
    ms = (1, 0, -1)
    terms = [
        (_perm_sign(p) / math.sqrt(6), tuple(Y(1, ms[i]) for i in p))
        for p in permutations(range(3))
    ]
    return StateVector.from_terms(space, terms)


def alpha_multiplet() -> tuple[StateVector, ...]:
    """L=1, parity -1 multiplet of two orbitals: one s-wave, one p-wave, symmetrized."""
    space = _orbitals(2)
    return tuple(
        StateVector.from_terms(space, [(1 / SQ2, (Y(0, 0), Y(1, m))), (1 / SQ2, (Y(1, m), Y(0, 0)))])
        for m in (1, 0, -1)
    )


def beta_multiplet() -> tuple[StateVector, ...]:
    """L=1, parity +1 multiplet of two p-waves, antisymmetric."""
    space = _orbitals(2)
    pairs = [((1, 0), (1, 1)), ((1, -1), (1, 1)), ((1, -1), (1, 0))]
    return tuple(
        StateVector.from_terms(space, [(1 / SQ2, (Y(*a), Y(*b))), (-1 / SQ2, (Y(*b), Y(*a)))])
        for a, b in pairs
    )


def _two_spin_space() -> SpaceSpec:
    return SpaceSpec((FactorSpec.spin_half(), FactorSpec.spin_half(), FactorSpec.orbital(1)))


def two_spin_alpha() -> StateVector:
    """Spin singlet times Y_00."""
    sp = _two_spin_space()
    return StateVector.from_terms(sp, [(1 / SQ2, (UP, DOWN, Y(0, 0))), (-1 / SQ2, (DOWN, UP, Y(0, 0)))])


def two_spin_beta() -> StateVector:
    """Spin triplet coupled with an l=1 orbital to total J = 0."""
    sp = _two_spin_space()
    r = 1 / SQ3
    return StateVector.from_terms(sp, [
        (r, (UP, UP, Y(1, -1))),
        (-r / SQ2, (UP, DOWN, Y(1, 0))),
        (-r / SQ2, (DOWN, UP, Y(1, 0))),
        (r, (DOWN, DOWN, Y(1, 1))),
    ])


def _doublet_space() -> SpaceSpec:
    return SpaceSpec((FactorSpec.spin_half(), FactorSpec.orbital(1)))


def doublet_alpha() -> tuple[StateVector, ...]:
    sp = _doublet_space()
    return (StateVector.basis(sp, (UP, Y(0, 0))), StateVector.basis(sp, (DOWN, Y(0, 0))))


def doublet_beta_printed() -> tuple[StateVector, ...]:
    """The two J=1/2, parity -1 states exactly as usually written (not ladder-phased)."""
    sp = _doublet_space()
    top = StateVector.from_terms(sp, [(1 / SQ3, (UP, Y(1, 0))), (-SQ2 / SQ3, (DOWN, Y(1, 1)))])
    low = StateVector.from_terms(sp, [(1 / SQ3, (DOWN, Y(1, 0))), (-SQ2 / SQ3, (UP, Y(1, -1)))])
    return top, low


def approx_gloves() -> tuple[StateVector, StateVector]:
    """(Y_00 +- Y_10)/sqrt(2) on one orbital factor."""
    sp = _orbitals(1)
    r = 1 / SQ2
    return (
        StateVector.from_terms(sp, [(r, (Y(0, 0),)), (r, (Y(1, 0),))]),
        StateVector.from_terms(sp, [(r, (Y(0, 0),)), (-r, (Y(1, 0),))]),
    )


# --- entries ------------------------------------------------------------------

@lru_cache(maxsize=None)
def four_particle_gloves() -> CatalogEntry:
    s3, a = s_cubed_state(), aharonov_state()
    pair = construct_glove_pair(
        IrrepBlock(0, 1, 0, (s3,)), IrrepBlock(0, -1, 0, (a,)), source="S^3 and Aharonov state"
    )
    return CatalogEntry(
        id="four_particle",
        space=s3.space,
        pair=pair,
        perfect=True,
        notes="4 particles: reference particle (implicit) + 3 distinguishable; G+- = (S^3 +- A)/sqrt2",
        particles=4,
        components={"S3": s3, "A": a},
    )


@lru_cache(maxsize=None)
def identical_particle_gloves(statistics: str) -> CatalogEntry:
    """Angular part of gloves made of three identical particles plus the reference particle.

    Radial factors are carried only as tags: the exchange symmetry of the angular
    component times its radial tag gives the global (anti)symmetry.
    """
    if statistics not in (FERMI, BOSE):
        raise DomainError(f"statistics must be {FERMI!r} or {BOSE!r}")
    s3 = StateVector(_orbitals(3, identical=True), s_cubed_state().amplitudes)
    a = StateVector(s3.space, aharonov_state().amplitudes)
    pair = construct_glove_pair(
        IrrepBlock(0, 1, 0, (s3,)), IrrepBlock(0, -1, 0, (a,)), source=f"identical {statistics}s"
    )
    if statistics == FERMI:
        radial = {"S3": "f_anti", "A": "f_symm"}
    else:
        radial = {"S3": "f_symm", "A": "f_anti"}
    return CatalogEntry(
        id=f"identical_{statistics}",
        space=s3.space,
        pair=pair,
        perfect=True,
        notes=(
            f"4 particles: reference + 3 identical {statistics}s; angular part only, "
            f"radial tags S3*{radial['S3']}, A*{radial['A']}"
        ),
        particles=4,
        components={"S3": s3, "A": a},
        radial=radial,
    )


@lru_cache(maxsize=None)
def three_particle_projector_gloves() -> CatalogEntry:
    alpha, beta = alpha_multiplet(), beta_multiplet()
    pair = construct_glove_pair(
        IrrepBlock(2, 1, 0, beta), IrrepBlock(2, -1, 0, alpha), source="alpha/beta L=1 multiplets"
    )
    # plus states are (alpha_1M + beta_1M)/sqrt2; minus states carry the sign
    # that makes P map each plus state onto its minus partner
    return CatalogEntry(
        id="three_particle",
        space=alpha[0].space,
        pair=pair,
        perfect=True,
        notes="3 particles: reference (implicit) + 2; Pi_G+- project on span{(alpha_1M +- beta_1M)/sqrt2}",
        particles=3,
        components={f"alpha_1{m}": s for m, s in zip((1, 0, -1), alpha)}
        | {f"beta_1{m}": s for m, s in zip((1, 0, -1), beta)},
    )


@lru_cache(maxsize=None)
def two_spin_gloves() -> CatalogEntry:
    alpha, beta = two_spin_alpha(), two_spin_beta()
    pair = construct_glove_pair(
        IrrepBlock(0, 1, 0, (alpha,)), IrrepBlock(0, -1, 0, (beta,)), source="singlet*Y00 and triplet*Y1"
    )
    return CatalogEntry(
        id="two_spin",
        space=alpha.space,
        pair=pair,
        perfect=True,
        notes="2 particles with spin 1/2: one relative position, two spins; J=0 states of opposite parity",
        particles=2,
        components={"alpha": alpha, "beta": beta},
    )


@lru_cache(maxsize=None)
def spin_orbital_doublet_gloves() -> CatalogEntry:
    a_plus, a_minus = doublet_alpha()
    b_top, _ = doublet_beta_printed()
    alpha = IrrepBlock(1, 1, 0, (a_plus, a_minus))
    beta = block_from_highest_weight(b_top, 1, -1)
    pair = construct_glove_pair(alpha, beta, source="J=1/2 doublets")
    return CatalogEntry(
        id="spin_orbital_doublet",
        space=a_plus.space,
        pair=pair,
        perfect=True,
        notes=(
            "2 particles, one spin 1/2: J=1/2 doublets of opposite parity; "
            "beta(-1/2) obtained by lowering beta(+1/2), which flips the sign of the "
            "usually written (Y10 down - sqrt2 Y1-1 up)/sqrt3"
        ),
        particles=2,
        components={"alpha_+1/2": a_plus, "alpha_-1/2": a_minus,
                    "beta_+1/2": beta.basis[0], "beta_-1/2": beta.basis[1]},
    )


@lru_cache(maxsize=None)
def two_particle_approx_gloves() -> CatalogEntry:
    g_plus, g_minus = approx_gloves()
    pair = GlovePair(STATE_PAIR, g_plus, g_minus, None, "(Y00 +- Y10)/sqrt2", (g_plus,), (g_minus,))
    flip = EulerAngles(0.0, math.pi, 0.0)
    defect = abs(inner_product(g_minus, apply_rotation(g_plus, flip)))
    return CatalogEntry(
        id="two_particle_approx",
        space=g_plus.space,
        pair=pair,
        perfect=False,
        notes=(
            "2 particles: reference + 1; orthogonal in a fixed frame, but a rotation by pi "
            f"about y maps g+ onto g- (|<g-|U g+>| = {defect:.12g}); the printed Y_01 is read as Y_10"
        ),
        particles=2,
        components={"g+": g_plus, "g-": g_minus},
        defect=defect,
    )


ENTRY_BUILDERS = {
    "four_particle": four_particle_gloves,
    "identical_fermi": lambda: identical_particle_gloves(FERMI),
    "identical_bose": lambda: identical_particle_gloves(BOSE),
    "three_particle": three_particle_projector_gloves,
    "two_spin": two_spin_gloves,
    "spin_orbital_doublet": spin_orbital_doublet_gloves,
    "two_particle_approx": two_particle_approx_gloves,
}


def get_entry(entry_id: str) -> CatalogEntry:
    try:
        return ENTRY_BUILDERS[entry_id]()
    except KeyError:
        raise DomainError(f"unknown catalog entry {entry_id!r}; known: {', '.join(ENTRY_BUILDERS)}") from None


def all_entries() -> list[CatalogEntry]:
    return [build() for build in ENTRY_BUILDERS.values()]


# --- verification -------------------------------------------------------------

PASS, FAIL, INFO = "PASS", "FAIL", "INFO"


@dataclass(frozen=True)
class Check:
    entry: str
    name: str
    value: float
    tolerance: float | None
    status: str

    @property
    def passed(self) -> bool:
        return self.status != FAIL


def _check(entry: str, name: str, value: float, tol: float, override: float | None) -> Check:
    tol = tol if override is None else override
    return Check(entry, name, float(value), tol, PASS if value <= tol else FAIL)


def _eigen_defect(psi: StateVector, op, eigenvalue: float) -> float:
    return (op @ psi - psi * eigenvalue).norm()


def verify_entry(entry: CatalogEntry, *, tolerance: float | None = None,
                 rotations: int = 100, seed: int = 0) -> list[Check]:
    """Run the glove invariant suite on one entry."""
    rng = np.random.default_rng(seed)
    angles = [haar_random_rotation(rng) for _ in range(rotations)]
    pair, space, eid = entry.pair, entry.space, entry.id
    checks: list[Check] = []
    P = parity_diagonal(space)
    gens = angular_momentum_generators(space)
    if pair.kind == STATE_PAIR:
        gp, gm = pair.plus, pair.minus
        checks.append(_check(eid, "norm", max(abs(gp.norm() - 1), abs(gm.norm() - 1)), 1e-12, tolerance))
        checks.append(_check(eid, "orthogonality", abs(inner_product(gm, gp)), 1e-12, tolerance))
        checks.append(_check(eid, "parity_swap", max(apply_parity(gp).distance(gm),
                                                     apply_parity(gm).distance(gp)), 1e-12, tolerance))
        if entry.perfect:
            vp, vm = gp.to_dense(), gm.to_dense()
            dev = 0.0
            for a in angles:
                U = rotation_matrix(space, a)
                dev = max(dev, np.linalg.norm(U @ vp - vp), np.linalg.norm(U @ vm - vm))
            checks.append(_check(eid, "rotation_invariance", dev, 1e-9, tolerance))
            checks.append(_check(eid, "J2_zero", max(_eigen_defect(gp, gens["Jsquared"], 0.0),
                                                     _eigen_defect(gm, gens["Jsquared"], 0.0)), 1e-9, tolerance))
        else:
            worst = 0.0
            for a in angles + [EulerAngles(0.0, math.pi, 0.0)]:
                worst = max(worst, abs(inner_product(gm, apply_rotation(gp, a))))
            checks.append(Check(eid, "rotated_overlap_defect", worst, None, INFO))
    else:
        Pp, Pm = pair.plus.to_dense(), pair.minus.to_dense()
        checks.append(_check(eid, "idempotent", max(np.abs(Pp @ Pp - Pp).max(), np.abs(Pm @ Pm - Pm).max()),
                             1e-10, tolerance))
        checks.append(_check(eid, "hermitian", max(np.abs(Pp - Pp.conj().T).max(),
                                                   np.abs(Pm - Pm.conj().T).max()), 1e-10, tolerance))
        checks.append(_check(eid, "orthogonal_projectors", np.abs(Pp @ Pm).max(), 1e-10, tolerance))
        overlaps = max(abs(inner_product(a, b)) for a in pair.plus_basis for b in pair.minus_basis)
        checks.append(_check(eid, "basis_orthogonality", overlaps, 1e-12, tolerance))
        swap = np.linalg.norm(P[:, None] * Pp * P[None, :] - Pm)
        checks.append(_check(eid, "parity_swap", swap, 1e-10, tolerance))
        dev = 0.0
        for a in angles:
            U = rotation_matrix(space, a)
            dev = max(dev, np.linalg.norm(Pp @ U - U @ Pp), np.linalg.norm(Pm @ U - U @ Pm))
        checks.append(_check(eid, "rotation_commutation", dev, 1e-9, tolerance))
        L = float(pair.L)
        jdev = max(_eigen_defect(s, gens["Jsquared"], L * (L + 1)) for s in pair.plus_basis + pair.minus_basis)
        checks.append(_check(eid, "J2_eigen", jdev, 1e-9, tolerance))
    if entry.radial:
        s3, a = entry.components["S3"], entry.components["A"]
        group = space.exchange_groups[0]
        fix_a = permutation_project(a, group, ANTISYMMETRIC).distance(a)
        fix_s = permutation_project(s3, group, SYMMETRIC).distance(s3)
        checks.append(_check(eid, "antisymmetrizer_fixes_A", fix_a, 1e-12, tolerance))
        checks.append(_check(eid, "symmetrizer_fixes_S3", fix_s, 1e-12, tolerance))
    return checks


def verify_all(*, tolerance: float | None = None, rotations: int = 100, seed: int = 0) -> list[Check]:
    out: list[Check] = []
    for e in all_entries():
        out += verify_entry(e, tolerance=tolerance, rotations=rotations, seed=seed)
    return out


def lexicographic_leading_positive(psi: StateVector) -> bool:
    lead: Label | None = psi.leading_label()
    if lead is None:
        return False
    amp = psi[lead]
    return abs(amp.imag) <= 1e-15 and amp.real > 0
