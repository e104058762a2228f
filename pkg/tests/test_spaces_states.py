import json

import numpy as np
import pytest

from quantum_gloves.errors import DimensionError, DomainError
from quantum_gloves.spaces import FactorSpec, SpaceSpec, parse_space
from quantum_gloves.states import (
    DensityMatrix,
    LinearOperator,
    StateVector,
    commutator,
    inner_product,
)

from conftest import random_density, random_state


def test_factor_dimensions():
    assert FactorSpec.spin_half().dim == 2
    for l in range(6):
        assert FactorSpec.orbital(l).dim == (l + 1) ** 2
    with pytest.raises(DomainError):
        FactorSpec.orbital(-1)


def test_label_order_is_index_order():
    space = parse_space("spin,orb2")
    labels = list(space.labels)
    assert labels == sorted(labels, key=lambda lab: [(tj, -tm) for tj, tm in lab])
    assert [space.index[lab] for lab in labels] == list(range(space.dim))
    assert labels[0] == ((1, 1), (0, 0))


@pytest.mark.parametrize("text,dim,groups", [
    ("orb1", 4, ()),
    ("orb1,orb1", 16, ()),
    ("spin,orb1", 8, ()),
    ("orb1*3", 64, ((0, 1, 2),)),
    ("spin,spin,orb1", 16, ()),
])
def test_parse_space(text, dim, groups):
    space = parse_space(text)
    assert space.dim == dim
    assert space.exchange_groups == groups
    assert SpaceSpec.from_json(json.loads(json.dumps(space.to_json()))) == space
    assert parse_space(space.describe()) == space


@pytest.mark.parametrize("bad", ["", "orb", "orbx", "spin*2", "orb1*0", "orb1,,orb1", "qubit"])
def test_parse_space_rejects(bad):
    with pytest.raises(DomainError):
        parse_space(bad)


def test_exchange_group_needs_matching_factors():
    with pytest.raises(DomainError):
        SpaceSpec((FactorSpec.orbital(1), FactorSpec.orbital(2)), ((0, 1),))


def test_invalid_labels_rejected():
    space = parse_space("orb1")
    with pytest.raises(DomainError):
        StateVector.basis(space, ((2, 4),))
    with pytest.raises(DomainError):
        StateVector.basis(space, ((4, 0),))
    with pytest.raises(DomainError):
        StateVector.basis(space, ((0, 0), (0, 0)))


def test_pruning_and_arithmetic():
    space = parse_space("orb1")
    a = StateVector.basis(space, ((0, 0),))
    b = StateVector.basis(space, ((2, 0),))
    s = (a + b) / np.sqrt(2)
    assert s.norm() == pytest.approx(1.0, abs=1e-15)
    assert len(s - s) == 0
    assert len(a + b * 1e-16) == 1
    assert inner_product(a, s) == pytest.approx(1 / np.sqrt(2))
    assert inner_product(s * 1j, a) == pytest.approx(-1j / np.sqrt(2))


def test_dense_roundtrip(rng):
    space = parse_space("spin,orb1")
    v = random_state(space, rng)
    psi = StateVector.from_dense(space, v)
    assert np.allclose(psi.to_dense(), v, atol=1e-15)
    with pytest.raises(DimensionError):
        StateVector.from_dense(space, v[:-1])


def test_state_json_roundtrip(rng):
    space = parse_space("spin,orb2")
    psi = StateVector.from_dense(space, random_state(space, rng))
    doc = json.loads(json.dumps(psi.to_json()))
    back = StateVector.from_json(doc)
    assert back.distance(psi) < 1e-15
    doc["terms"][0]["extra"] = 1
    with pytest.raises(DomainError):
        StateVector.from_json(doc)


def test_operator_algebra_matches_dense(rng):
    space = parse_space("orb1,spin")
    A = rng.normal(size=(space.dim,) * 2) + 1j * rng.normal(size=(space.dim,) * 2)
    B = rng.normal(size=(space.dim,) * 2)
    v = random_state(space, rng)
    a, b = LinearOperator.from_dense(space, A), LinearOperator.from_dense(space, B)
    psi = StateVector.from_dense(space, v)
    assert np.allclose((a @ b).to_dense(), A @ B, atol=1e-12)
    assert np.allclose((a + b * 2).to_dense(), A + 2 * B, atol=1e-12)
    assert np.allclose(a.adjoint().to_dense(), A.conj().T)
    assert np.allclose((a @ psi).to_dense(), A @ v, atol=1e-12)
    assert a.trace() == pytest.approx(np.trace(A))
    assert np.allclose(commutator(a, b).to_dense(), A @ B - B @ A, atol=1e-12)
    assert a.frobenius_norm() == pytest.approx(np.linalg.norm(A))
    back = LinearOperator.from_json(json.loads(json.dumps(a.to_json())))
    assert (back - a).max_norm() < 1e-15


def test_projector_and_outer():
    space = parse_space("orb1")
    a = StateVector.basis(space, ((0, 0),))
    b = StateVector.basis(space, ((2, 2),))
    p = LinearOperator.projector([a, b])
    assert (p @ p - p).max_norm() == 0
    assert p.trace() == pytest.approx(2)
    assert (LinearOperator.outer(a, b) @ b).distance(a) == 0


def test_density_matrix_validation(rng):
    space = parse_space("orb1")
    rho = random_density(space, rng)
    dm = DensityMatrix.from_dense(space, rho)
    assert dm.trace() == pytest.approx(1)
    with pytest.raises(DomainError):
        DensityMatrix.from_dense(space, 2 * rho)
    with pytest.raises(DomainError):
        DensityMatrix.from_dense(space, np.diag([1.5, -0.5, 0, 0]))
    bad = rho.copy()
    bad[0, 1] += 0.1
    with pytest.raises(DomainError):
        DensityMatrix.from_dense(space, bad)
    back = DensityMatrix.from_json(json.loads(json.dumps(dm.to_json())))
    assert (back - dm).max_norm() < 1e-15


def test_mixed_spaces_rejected():
    a = StateVector.basis(parse_space("orb1"), ((0, 0),))
    b = StateVector.basis(parse_space("orb2"), ((0, 0),))
    with pytest.raises(DimensionError):
        inner_product(a, b)
