import math

import pytest

from quantum_gloves.angular import EulerAngles
from quantum_gloves.catalog import all_entries, get_entry
from quantum_gloves.errors import DomainError
from quantum_gloves.protocol import (
    GLOVE_BASIS,
    HELSTROM,
    ChannelConfig,
    SimReport,
    fixed_frame_information_check,
    resource_report,
    simulate_exchange,
)
from quantum_gloves.twirl import transmitted_states, twirl_pair

PERFECT = [e for e in all_entries() if e.perfect]
CONFIGS = [
    ChannelConfig(),
    ChannelConfig(random_rotation=True),
    ChannelConfig(random_rotation=True, bob_opposite_chirality=True),
    ChannelConfig(fixed_rotation=EulerAngles(0.3, 2.0, 1.1), bob_opposite_chirality=True),
    ChannelConfig(random_rotation=True, measurement=HELSTROM),
]


@pytest.mark.parametrize("entry", PERFECT, ids=lambda e: e.id)
@pytest.mark.parametrize("config", CONFIGS, ids=lambda c: c.label())
def test_perfect_gloves_always_succeed(entry, config):
    rep = simulate_exchange(entry, config, trials=2000, seed=3)
    assert rep.successes == rep.trials
    assert rep.rest_outcomes == 0
    assert rep.max_probability_defect <= 1e-9


def _helstrom_value(entry):
    rho_p, rho_m = transmitted_states(entry.pair, entry.representative())
    return twirl_pair(rho_p, rho_m).helstrom


def test_approximate_gloves_helstrom_within_4_sigma():
    e = get_entry("two_particle_approx")
    target = _helstrom_value(e)
    rep = simulate_exchange(e, ChannelConfig(random_rotation=True, measurement=HELSTROM), 10_000, seed=7)
    assert abs(rep.frequency - target) <= 4 * math.sqrt(target * (1 - target) / rep.trials)


def test_glove_measurement_does_not_beat_helstrom():
    e = get_entry("two_particle_approx")
    target = _helstrom_value(e)
    rep = simulate_exchange(e, ChannelConfig(random_rotation=True, measurement=GLOVE_BASIS), 10_000, seed=7)
    assert rep.frequency <= target + 4 * math.sqrt(target * (1 - target) / rep.trials)
    assert rep.rest_outcomes > 0
    assert rep.successes + rep.rest_outcomes + rep.inferred_opposite == rep.trials


def test_approximate_gloves_in_a_shared_frame():
    e = get_entry("two_particle_approx")
    assert simulate_exchange(e, ChannelConfig(), 500, seed=0).frequency == 1.0
    flip = ChannelConfig(fixed_rotation=EulerAngles(0, math.pi, 0))
    assert simulate_exchange(e, flip, 500, seed=0).frequency == 0.0


@pytest.mark.parametrize("partitions", [2, 3, 7])
def test_partition_independence(partitions):
    e = get_entry("two_particle_approx")
    cfg = ChannelConfig(random_rotation=True, measurement=GLOVE_BASIS)
    whole = simulate_exchange(e, cfg, 3001, seed=5)
    split = simulate_exchange(e, cfg, 3001, seed=5, partitions=partitions)
    assert whole == split


def test_seeded_reproducibility():
    e = get_entry("two_particle_approx")
    cfg = ChannelConfig(random_rotation=True)
    assert simulate_exchange(e, cfg, 1500, seed=9) == simulate_exchange(e, cfg, 1500, seed=9)


def test_report_fields():
    rep = simulate_exchange(get_entry("four_particle"), ChannelConfig(random_rotation=True), 100, seed=1)
    doc = rep.to_json()
    assert doc["frequency"] == 1.0 and doc["stderr"] == 0.0 and doc["trials"] == 100
    row = rep.csv_row()
    assert len(row) == len(SimReport.CSV_HEADER)


def test_config_validation():
    with pytest.raises(DomainError):
        ChannelConfig(random_rotation=True, fixed_rotation=EulerAngles(0, 1, 0))
    with pytest.raises(DomainError):
        ChannelConfig(measurement="guess")
    with pytest.raises(DomainError):
        simulate_exchange(get_entry("four_particle"), ChannelConfig(), 0, seed=0)


def test_fixed_frame_information():
    assert fixed_frame_information_check(get_entry("four_particle"), EulerAngles(0.4, 1.2, 0.1)) == pytest.approx(0.5)
    leak = fixed_frame_information_check(get_entry("three_particle"), EulerAngles(0, math.pi / 2, 0))
    assert leak > 0.5


def test_resource_reports():
    four = resource_report(get_entry("four_particle"))
    assert (four.particle_count, four.lmax, four.perfect) == (4, (1, 1, 1), True)
    assert four.qubits == pytest.approx(1.0, abs=1e-9)
    three = resource_report(get_entry("three_particle"))
    assert (three.particle_count, three.lmax) == (3, (1, 1))
    assert three.qubits == pytest.approx(1 + math.log2(3), abs=1e-9)
    two = resource_report(get_entry("two_particle_approx"))
    assert (two.particle_count, two.lmax, two.perfect) == (2, (1,), False)
