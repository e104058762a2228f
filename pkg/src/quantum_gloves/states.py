"""Sparse state vectors, operators and density matrices over a SpaceSpec."""

from __future__ import annotations

from collections import defaultdict
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .errors import DimensionError, DomainError
from .spaces import ORBITAL, Label, SpaceSpec, _check_keys

PRUNE_TOL = 1e-14
COMPARE_TOL = 1e-12
OPERATOR_TOL = 1e-10


def _pruned(items: Iterable[tuple[object, complex]]) -> dict:
    return {k: complex(v) for k, v in items if abs(v) > PRUNE_TOL}


def _same_space(a: "StateVector | LinearOperator", b: "StateVector | LinearOperator") -> None:
    if a.space != b.space:
        raise DimensionError(f"space mismatch: {a.space.describe()} vs {b.space.describe()}")


class StateVector:
    """Immutable sparse ket: basis label -> complex amplitude."""

    __slots__ = ("space", "_amps")

    def __init__(self, space: SpaceSpec, amplitudes: Mapping[Label, complex], *, validate: bool = True):
        if validate:
            for lab in amplitudes:
                space.validate_label(lab)
        self.space = space
        self._amps = MappingProxyType(_pruned(amplitudes.items()))

    @property
    def amplitudes(self) -> Mapping[Label, complex]:
        return self._amps

    @classmethod
    def basis(cls, space: SpaceSpec, label: Label) -> "StateVector":
        return cls(space, {tuple(label): 1.0})

    @classmethod
    def from_terms(cls, space: SpaceSpec, terms: Iterable[tuple[complex, Label]]) -> "StateVector":
        acc: dict[Label, complex] = defaultdict(complex)
        for coeff, label in terms:
            acc[tuple(label)] += coeff
        return cls(space, acc)

    @classmethod
    def from_dense(cls, space: SpaceSpec, vec: np.ndarray) -> "StateVector":
        vec = np.asarray(vec)
        if vec.shape != (space.dim,):
            raise DimensionError(f"dense vector shape {vec.shape} does not match dim {space.dim}")
        nz = np.flatnonzero(np.abs(vec) > PRUNE_TOL)
        labels = space.labels
        return cls(space, {labels[i]: complex(vec[i]) for i in nz}, validate=False)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.space.dim, dtype=complex)
        index = self.space.index
        for lab, amp in self._amps.items():
            out[index[lab]] = amp
        return out

    def __len__(self) -> int:
        return len(self._amps)

    def __iter__(self):
        return iter(self._amps.items())

    def __getitem__(self, label: Label) -> complex:
        return self._amps.get(tuple(label), 0j)

    def __add__(self, other: "StateVector") -> "StateVector":
        _same_space(self, other)
        acc = dict(self._amps)
        for lab, amp in other._amps.items():
            acc[lab] = acc.get(lab, 0j) + amp
        return StateVector(self.space, acc, validate=False)

    def __sub__(self, other: "StateVector") -> "StateVector":
        return self + (-other)

    def __neg__(self) -> "StateVector":
        return self * -1

    def __mul__(self, scalar: complex) -> "StateVector":
        return StateVector(self.space, {k: v * scalar for k, v in self._amps.items()}, validate=False)

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "StateVector":
        return self * (1.0 / scalar)

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(a) ** 2 for a in self._amps.values())))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n <= PRUNE_TOL:
            raise DomainError("cannot normalize the zero vector")
        return self / n

    def leading_label(self) -> Label | None:
        if not self._amps:
            return None
        index = self.space.index
        return min(self._amps, key=index.__getitem__)

    def phase_fixed(self) -> "StateVector":
        """Multiply by the phase that makes the first amplitude (label order) real positive."""
        lead = self.leading_label()
        if lead is None:
            return self
        amp = self._amps[lead]
        return self * (abs(amp) / amp)

    def distance(self, other: "StateVector") -> float:
        return (self - other).norm()

    def __repr__(self) -> str:
        return f"StateVector({self.space.describe()}, {len(self)} terms)"

    def to_json(self) -> dict:
        index = self.space.index
        terms = []
        for lab in sorted(self._amps, key=index.__getitem__):
            amp = self._amps[lab]
            terms.append({"label": label_to_json(self.space, lab), "re": amp.real, "im": amp.imag})
        return {"space": self.space.to_json(), "terms": terms}

    @classmethod
    def from_json(cls, doc: dict) -> "StateVector":
        _check_keys(doc, {"space", "terms"}, set(), "state vector")
        space = SpaceSpec.from_json(doc["space"])
        acc: dict[Label, complex] = defaultdict(complex)
        for term in doc["terms"]:
            _check_keys(term, {"label", "re", "im"}, set(), "term")
            acc[label_from_json(space, term["label"])] += complex(term["re"], term["im"])
        return cls(space, acc)


def label_to_json(space: SpaceSpec, label: Label) -> list[dict]:
    out = []
    for f, (tj, tm) in zip(space.factors, label):
        out.append({"l": tj // 2, "m": tm // 2} if f.kind == ORBITAL else {"ms": tm})
    return out


def label_from_json(space: SpaceSpec, entries: list[dict]) -> Label:
    if len(entries) != space.n_factors:
        raise DomainError(f"label {entries!r} does not match {space.n_factors} factors")
    label = []
    for f, e in zip(space.factors, entries):
        if f.kind == ORBITAL:
            _check_keys(e, {"l", "m"}, set(), "orbital label")
            label.append((2 * int(e["l"]), 2 * int(e["m"])))
        else:
            _check_keys(e, {"ms"}, set(), "spin label")
            label.append((1, int(e["ms"])))
    lab = tuple(label)
    space.validate_label(lab)
    return lab


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    _same_space(a, b)
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    total = 0j
    for lab in small.amplitudes:
        if lab in large.amplitudes:
            total += a.amplitudes[lab].conjugate() * b.amplitudes[lab]
    return total


class LinearOperator:
    """Immutable sparse operator: (row label, col label) -> complex."""

    __slots__ = ("space", "_entries")

    def __init__(self, space: SpaceSpec, entries: Mapping[tuple[Label, Label], complex], *, validate: bool = True):
        if validate:
            for row, col in entries:
                space.validate_label(row)
                space.validate_label(col)
        self.space = space
        self._entries = MappingProxyType(_pruned(entries.items()))

    @property
    def entries(self) -> Mapping[tuple[Label, Label], complex]:
        return self._entries

    @classmethod
    def from_dense(cls, space: SpaceSpec, mat: np.ndarray) -> "LinearOperator":
        mat = np.asarray(mat)
        if mat.shape != (space.dim, space.dim):
            raise DimensionError(f"matrix shape {mat.shape} does not match dim {space.dim}")
        rows, cols = np.nonzero(np.abs(mat) > PRUNE_TOL)
        labels = space.labels
        return cls(space, {(labels[r], labels[c]): complex(mat[r, c]) for r, c in zip(rows, cols)}, validate=False)

    @classmethod
    def identity(cls, space: SpaceSpec) -> "LinearOperator":
        return cls(space, {(lab, lab): 1.0 for lab in space.labels}, validate=False)

    @classmethod
    def outer(cls, ket: StateVector, bra: StateVector) -> "LinearOperator":
        """|ket><bra|."""
        _same_space(ket, bra)
        entries = {
            (r, c): a * b.conjugate()
            for r, a in ket.amplitudes.items()
            for c, b in bra.amplitudes.items()
        }
        return cls(ket.space, entries, validate=False)

    @classmethod
    def projector(cls, states: Iterable[StateVector]) -> "LinearOperator":
        """Sum of |s><s| over the given orthonormal states."""
        states = list(states)
        if not states:
            raise DomainError("projector needs at least one state")
        total = cls.outer(states[0], states[0])
        for s in states[1:]:
            total = total + cls.outer(s, s)
        return total

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.space.dim, self.space.dim), dtype=complex)
        index = self.space.index
        for (r, c), v in self._entries.items():
            out[index[r], index[c]] = v
        return out

    def adjoint(self) -> "LinearOperator":
        return LinearOperator(self.space, {(c, r): v.conjugate() for (r, c), v in self._entries.items()}, validate=False)

    def trace(self) -> complex:
        return sum((v for (r, c), v in self._entries.items() if r == c), 0j)

    def apply(self, psi: StateVector) -> StateVector:
        _same_space(self, psi)
        acc: dict[Label, complex] = defaultdict(complex)
        amps = psi.amplitudes
        for (r, c), v in self._entries.items():
            a = amps.get(c)
            if a is not None:
                acc[r] += v * a
        return StateVector(self.space, acc, validate=False)

    def compose(self, other: "LinearOperator") -> "LinearOperator":
        _same_space(self, other)
        by_row: dict[Label, list[tuple[Label, complex]]] = defaultdict(list)
        for (r, c), v in other._entries.items():
            by_row[r].append((c, v))
        acc: dict[tuple[Label, Label], complex] = defaultdict(complex)
        for (r, k), a in self._entries.items():
            for c, b in by_row.get(k, ()):
                acc[(r, c)] += a * b
        return LinearOperator(self.space, acc, validate=False)

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            return self.apply(other)
        if isinstance(other, LinearOperator):
            return self.compose(other)
        return NotImplemented

    def __add__(self, other: "LinearOperator") -> "LinearOperator":
        _same_space(self, other)
        acc = dict(self._entries)
        for k, v in other._entries.items():
            acc[k] = acc.get(k, 0j) + v
        return LinearOperator(self.space, acc, validate=False)

    def __neg__(self) -> "LinearOperator":
        return self * -1

    def __sub__(self, other: "LinearOperator") -> "LinearOperator":
        return self + (-other)

    def __mul__(self, scalar: complex) -> "LinearOperator":
        return LinearOperator(self.space, {k: v * scalar for k, v in self._entries.items()}, validate=False)

    __rmul__ = __mul__

    def frobenius_norm(self) -> float:
        return float(np.sqrt(sum(abs(v) ** 2 for v in self._entries.values())))

    def max_norm(self) -> float:
        return max((abs(v) for v in self._entries.values()), default=0.0)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.space.describe()}, {len(self._entries)} entries)"

    def triplets(self) -> list[dict]:
        index = self.space.index
        keys = sorted(self._entries, key=lambda rc: (index[rc[0]], index[rc[1]]))
        return [
            {
                "row_label": label_to_json(self.space, r),
                "col_label": label_to_json(self.space, c),
                "re": self._entries[(r, c)].real,
                "im": self._entries[(r, c)].imag,
            }
            for r, c in keys
        ]

    def to_json(self) -> dict:
        return {"space": self.space.to_json(), "entries": self.triplets()}

    @classmethod
    def from_json(cls, doc: dict) -> "LinearOperator":
        _check_keys(doc, {"space", "entries"}, set(), "operator")
        space = SpaceSpec.from_json(doc["space"])
        acc: dict[tuple[Label, Label], complex] = defaultdict(complex)
        for t in doc["entries"]:
            _check_keys(t, {"row_label", "col_label", "re", "im"}, set(), "matrix entry")
            key = (label_from_json(space, t["row_label"]), label_from_json(space, t["col_label"]))
            acc[key] += complex(t["re"], t["im"])
        return cls(space, acc)


def commutator(a: LinearOperator, b: LinearOperator) -> LinearOperator:
    return a @ b - b @ a


class DensityMatrix(LinearOperator):
    """Hermitian, positive, unit-trace operator.  Validated on construction."""

    __slots__ = ("_trace",)

    def __init__(self, space: SpaceSpec, entries: Mapping[tuple[Label, Label], complex], *,
                 validate: bool = True, tol: float = OPERATOR_TOL):
        super().__init__(space, entries, validate=validate)
        self._trace = super().trace()
        if validate:
            self._check(tol)

    def _check(self, tol: float) -> None:
        if abs(self._trace - 1) > tol:
            raise DomainError(f"density matrix trace {self._trace.real:.3g} != 1")
        for (r, c), v in self._entries.items():
            if abs(v - self._entries.get((c, r), 0j).conjugate()) > tol:
                raise DomainError("density matrix is not Hermitian")
        mat = self.to_dense()
        lo = float(np.linalg.eigvalsh((mat + mat.conj().T) / 2).min())
        if lo < -tol:
            raise DomainError(f"density matrix has negative eigenvalue {lo:.3g}")

    def trace(self) -> complex:
        return self._trace

    @classmethod
    def from_dense(cls, space: SpaceSpec, mat: np.ndarray, *, validate: bool = True) -> "DensityMatrix":
        op = LinearOperator.from_dense(space, mat)
        return cls(space, op.entries, validate=validate)

    @classmethod
    def from_operator(cls, op: LinearOperator, *, validate: bool = True) -> "DensityMatrix":
        return cls(op.space, op.entries, validate=validate)

    @classmethod
    def pure(cls, psi: StateVector) -> "DensityMatrix":
        psi = psi.normalized()
        return cls(psi.space, LinearOperator.outer(psi, psi).entries, validate=False)

    @classmethod
    def from_json(cls, doc: dict) -> "DensityMatrix":
        return cls.from_operator(LinearOperator.from_json(doc))
