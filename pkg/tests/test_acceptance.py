"""Acceptance criteria 1-10, each reported as one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (lines are gathered in the
terminal summary) or directly as ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from scipy.linalg import expm

sys.path.insert(0, str(Path(__file__).parent))

from conftest import random_density, random_state, record_acceptance, small_spaces  # noqa: E402

from quantum_gloves.angular import (  # noqa: E402
    EulerAngles,
    angular_momentum_generators,
    apply_parity,
    apply_rotation,
    clebsch_gordan,
    haar_random_rotation,
    parity_diagonal,
    rotation_matrix,
    wigner_small_d_matrix,
)
from quantum_gloves.catalog import (  # noqa: E402
    aharonov_state,
    all_entries,
    approx_gloves,
    get_entry,
    s_cubed_state,
    two_spin_alpha,
    two_spin_beta,
)
from quantum_gloves.irreps import STATE_PAIR, decompose, glove_existence, multiplicity_table  # noqa: E402
from quantum_gloves.protocol import HELSTROM, ChannelConfig, simulate_exchange  # noqa: E402
from quantum_gloves.spaces import parse_space  # noqa: E402
from quantum_gloves.states import DensityMatrix, StateVector, inner_product  # noqa: E402
from quantum_gloves.twirl import (  # noqa: E402
    communication_cost,
    haar_twirl_exact,
    haar_twirl_monte_carlo,
    lmax_footprint,
    optimize_approx_gloves,
    twirl_discrepancy_report,
    transmitted_states,
    twirl_pair,
)


def perfect_glove_suite():
    rng = np.random.default_rng(2024)
    worst = {"orth": 0.0, "swap_state": 0.0, "swap_proj": 0.0, "rot": 0.0}
    entries = [e for e in all_entries() if e.perfect]
    for e in entries:
        pair = e.pair
        rotations = [haar_random_rotation(rng) for _ in range(100)]
        if pair.kind == STATE_PAIR:
            worst["orth"] = max(worst["orth"], abs(inner_product(pair.minus, pair.plus)))
            worst["swap_state"] = max(worst["swap_state"], apply_parity(pair.plus).distance(pair.minus))
            for R in rotations:
                for g in (pair.plus, pair.minus):
                    worst["rot"] = max(worst["rot"], apply_rotation(g, R).distance(g))
        else:
            pp, pm = (p.to_dense() for p in pair.projectors())
            P = np.diag(parity_diagonal(e.space))
            worst["orth"] = max(worst["orth"], np.abs(pp @ pm).max())
            worst["swap_proj"] = max(worst["swap_proj"], np.abs(P @ pp @ P - pm).max())
            for R in rotations:
                U = rotation_matrix(e.space, R)
                for p in (pp, pm):
                    worst["rot"] = max(worst["rot"], np.abs(U @ p @ U.conj().T - p).max())
    ok = (worst["orth"] <= 1e-12 and worst["swap_state"] <= 1e-12
          and worst["swap_proj"] <= 1e-10 and worst["rot"] <= 1e-9)
    detail = f"{len(entries)} perfect entries; " + ", ".join(f"{k}={v:.2e}" for k, v in worst.items())
    return ok, detail


def zero_angular_momentum():
    vals = {}
    for name, psi in (("S3", s_cubed_state()), ("A", aharonov_state()),
                      ("alpha", two_spin_alpha()), ("beta", two_spin_beta())):
        J2 = angular_momentum_generators(psi.space)["Jsquared"]
        vals[name] = J2.apply(psi).norm()
    return all(v <= 1e-9 for v in vals.values()), ", ".join(f"|J2 {k}|={v:.2e}" for k, v in vals.items())


def irrep_tables():
    odd_scalars = [b for b in decompose(parse_space("orb1,orb1,orb1")) if b.two_L == 0 and b.parity == -1]
    overlap = abs(inner_product(odd_scalars[0].basis[0], aharonov_state())) if odd_scalars else 0.0
    pair_table = multiplicity_table(parse_space("orb1,orb1"))
    single = glove_existence(parse_space("orb10"))
    ok = (len(odd_scalars) == 1 and overlap >= 1 - 1e-9
          and pair_table.get((2, 1)) == 1 and pair_table.get((2, -1)) == 2
          and not single.perfect_subspace_glove)
    detail = (f"(L=0,-1) blocks in orb1^3: {len(odd_scalars)}, |<block|A>|={overlap:.12f}; "
              f"orb1^2 L=1: +1 x{pair_table.get((2, 1))}, -1 x{pair_table.get((2, -1))}; "
              f"orb10 both-parity L: {single.glove_Ls()}")
    return ok, detail


def resource_numbers():
    four = communication_cost(get_entry("four_particle").pair)
    three_entry = get_entry("three_particle")
    three = communication_cost(three_entry.pair, three_entry.representative())
    foot = lmax_footprint(get_entry("four_particle").pair.plus)
    ok = abs(four - 1) <= 1e-9 and abs(three - (1 + math.log2(3))) <= 1e-9 and foot == [1, 1, 1]
    return ok, f"4-particle {four:.12f} qubits, 3-particle {three:.12f} qubits, lmax {foot}"


def twirl_oracle_agreement():
    N, seed = 10_000, 17
    tol = 5 / math.sqrt(N)
    rng = np.random.default_rng(99)
    space = parse_space("spin,orb1")
    states = [DensityMatrix.from_dense(space, random_density(space, rng)) for _ in range(5)]
    states += [DensityMatrix.pure(g) for g in approx_gloves()]
    worst = 0.0
    for rho in states:
        mc = haar_twirl_monte_carlo(rho, N, seed).to_dense()
        worst = max(worst, np.abs(mc - haar_twirl_exact(rho).to_dense()).max())
    return worst <= tol, f"max |MC - exact| = {worst:.4e} over {len(states)} states (tolerance {tol:.3g})"


def printed_matrix_adjudication():
    rep = twirl_discrepancy_report(samples=10_000, seed=0)
    ok = (rep["exact_trace_distance"] <= 1e-9 and abs(rep["printed_trace_distance"] - 0.5) <= 1e-12
          and rep["discrepancy"] is True)
    detail = (f"exact TD={rep['exact_trace_distance']:.2e}, printed TD={rep['printed_trace_distance']:.12g}, "
              f"flagged={rep['discrepancy']}")
    return ok, detail


def protocol_simulation():
    trials, seed = 10_000, 7
    freqs = []
    for e in all_entries():
        if not e.perfect:
            continue
        for cfg in (ChannelConfig(random_rotation=True),
                    ChannelConfig(random_rotation=True, bob_opposite_chirality=True)):
            freqs.append(simulate_exchange(e, cfg, trials, seed).frequency)
    approx = get_entry("two_particle_approx")
    rho_p, rho_m = transmitted_states(approx.pair, approx.representative())
    target = twirl_pair(rho_p, rho_m).helstrom
    rep = simulate_exchange(approx, ChannelConfig(random_rotation=True, measurement=HELSTROM), trials, seed)
    sigma = math.sqrt(target * (1 - target) / trials)
    ok = all(f == 1.0 for f in freqs) and abs(rep.frequency - target) <= 4 * sigma
    detail = (f"perfect frequencies min={min(freqs)} over {len(freqs)} runs; approx {rep.frequency:.4f} "
              f"vs Helstrom {target:.4f} (4 sigma = {4 * sigma:.4f})")
    return ok, detail


def search():
    three = optimize_approx_gloves(parse_space("orb1*3"), seed=0)
    singles = {l: optimize_approx_gloves(parse_space(f"orb{l}"), restarts=2, seed=0) for l in (1, 2, 5)}
    ok = (three.score >= 1 - 1e-6 and three.score <= three.bound
          and all(r.score <= 0.5 + 1e-6 and r.bound == 0.5 for r in singles.values()))
    detail = f"orb1*3 score {three.score:.12f}; " + ", ".join(
        f"orb{l} {r.score:.12f}" for l, r in singles.items())
    return ok, detail


def _spin_generators(tj):
    j = tj / 2
    ms = [j - k for k in range(tj + 1)]
    jp = np.zeros((tj + 1, tj + 1))
    for c in range(1, tj + 1):
        jp[c - 1, c] = math.sqrt(j * (j + 1) - ms[c] * (ms[c] + 1))
    return (jp - jp.T) / 2j


def kernel_oracles():
    d_err = 0.0
    for tj in range(11):
        jy = _spin_generators(tj)
        for beta in np.linspace(0, math.pi, 9):
            d_err = max(d_err, np.abs(wigner_small_d_matrix(Fraction(tj, 2), beta) - expm(-1j * beta * jy)).max())
    cg_err = 0.0
    for tj1 in range(7):
        for tj2 in range(7):
            j1, j2 = Fraction(tj1, 2), Fraction(tj2, 2)
            Js = [abs(j1 - j2) + k for k in range(int(j1 + j2 - abs(j1 - j2)) + 1)]
            rows = [(J, J - k) for J in Js for k in range(int(2 * J) + 1)]
            cols = [(j1 - a, j2 - b) for a in range(tj1 + 1) for b in range(tj2 + 1)]
            C = np.array([[clebsch_gordan(j1, m1, j2, m2, J, M) for m1, m2 in cols] for J, M in rows])
            cg_err = max(cg_err, np.abs(C @ C.T - np.eye(len(rows))).max())
    sd_err = 0.0
    spaces = small_spaces()
    for space in spaces:
        rng = np.random.default_rng(space.dim)
        v = random_state(space, rng)
        psi = StateVector.from_dense(space, v)
        R = EulerAngles(*rng.uniform(0, math.pi, 3))
        sd_err = max(sd_err, np.abs(apply_rotation(psi, R).to_dense() - rotation_matrix(space, R) @ v).max())
        sd_err = max(sd_err, np.abs(apply_parity(psi).to_dense() - parity_diagonal(space) * v).max())
        J2 = angular_momentum_generators(space)["Jsquared"]
        sd_err = max(sd_err, np.abs(J2.apply(psi).to_dense() - J2.to_dense() @ v).max())
    ok = d_err <= 1e-10 and cg_err <= 1e-12 and sd_err <= 1e-12
    return ok, (f"Wigner-d max dev {d_err:.2e}; CG orthogonality {cg_err:.2e}; "
                f"sparse-vs-dense {sd_err:.2e} on {len(spaces)} spaces")


def determinism():
    base = [sys.executable, "-m", "quantum_gloves"]
    commands = [
        ["simulate", "--entry", "two_particle_approx", "--random-rotation", "--trials", "2000", "--seed", "7"],
        ["simulate", "--entry", "two_particle_approx", "--random-rotation", "--trials", "2000", "--seed", "7",
         "--format", "csv"],
        ["twirl", "--entry", "three_particle", "--samples", "2000", "--seed", "5"],
        ["search", "--space", "orb1,orb1", "--seed", "3", "--restarts", "2"],
    ]
    identical = 0
    for cmd in commands:
        a = subprocess.run(base + cmd, capture_output=True, check=True).stdout
        b = subprocess.run(base + cmd, capture_output=True, check=True).stdout
        identical += a == b and len(a) > 0
    return identical == len(commands), f"{identical}/{len(commands)} invocations byte-identical"


CRITERIA = {
    1: ("perfect-glove suite", perfect_glove_suite),
    2: ("zero total angular momentum", zero_angular_momentum),
    3: ("irrep tables", irrep_tables),
    4: ("resource numbers", resource_numbers),
    5: ("exact vs Monte-Carlo twirl", twirl_oracle_agreement),
    6: ("twirled approximate-glove matrices: exact vs printed", printed_matrix_adjudication),
    7: ("protocol simulation", protocol_simulation),
    8: ("glove search", search),
    9: ("kernel oracles", kernel_oracles),
    10: ("determinism", determinism),
}


def evaluate(number: int) -> tuple[bool, str]:
    title, fn = CRITERIA[number]
    ok, detail = fn()
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title}: {detail}"
    return ok, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    ok, line = evaluate(number)
    print(line)
    record_acceptance(line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
