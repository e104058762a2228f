"""Tensor-product spaces built from orbital (Y_lm) and spin-1/2 factors.

Every angular quantum number is stored doubled, so a basis label is a tuple
with one ``(two_j, two_m)`` pair per factor.  Orbital factors use
``two_j = 2l``; spin-1/2 factors use ``two_j = 1`` and ``two_m = +-1``.

Labels are ordered factor by factor (first factor most significant).  Inside
a factor the order is ``l`` ascending, then ``m`` descending, which is also
the row order of every Wigner matrix used here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from math import prod
from typing import Iterable, Sequence

from .errors import DomainError

ORBITAL = "orbital"
SPIN_HALF = "spin_half"

Label = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class FactorSpec:
    kind: str
    l_max: int = 0

    def __post_init__(self) -> None:
        if self.kind not in (ORBITAL, SPIN_HALF):
            raise DomainError(f"unknown factor kind {self.kind!r}")
        if self.kind == ORBITAL and (not isinstance(self.l_max, int) or self.l_max < 0):
            raise DomainError(f"l_max must be a nonnegative integer, got {self.l_max!r}")
        if self.kind == SPIN_HALF and self.l_max != 0:
            raise DomainError("spin-1/2 factors carry no l_max")

    @classmethod
    def orbital(cls, l_max: int) -> "FactorSpec":
        return cls(ORBITAL, l_max)

    @classmethod
    def spin_half(cls) -> "FactorSpec":
        return cls(SPIN_HALF)

    @property
    def is_orbital(self) -> bool:
        return self.kind == ORBITAL

    @property
    def dim(self) -> int:
        return (self.l_max + 1) ** 2 if self.is_orbital else 2

    def multiplets(self) -> list[tuple[int, int]]:
        """(two_j, parity) of each irreducible multiplet in this factor, in label order."""
        if self.is_orbital:
            return [(2 * l, (-1) ** l) for l in range(self.l_max + 1)]
        return [(1, 1)]

    def labels(self) -> list[tuple[int, int]]:
        return [(tj, tm) for tj, _ in self.multiplets() for tm in range(tj, -tj - 1, -2)]

    def parity_of(self, entry: tuple[int, int]) -> int:
        if not self.is_orbital:
            return 1
        return -1 if (entry[0] // 2) % 2 else 1

    def validate_entry(self, entry: tuple[int, int]) -> None:
        tj, tm = entry
        if self.is_orbital:
            ok = tj % 2 == 0 and 0 <= tj <= 2 * self.l_max and tm % 2 == 0 and abs(tm) <= tj
        else:
            ok = tj == 1 and tm in (1, -1)
        if not ok:
            raise DomainError(f"label entry {entry!r} invalid for {self.token()}")

    def token(self) -> str:
        return f"orb{self.l_max}" if self.is_orbital else "spin"


@dataclass(frozen=True)
class SpaceSpec:
    factors: tuple[FactorSpec, ...]
    exchange_groups: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.factors))
        groups = tuple(tuple(int(i) for i in g) for g in self.exchange_groups)
        object.__setattr__(self, "exchange_groups", groups)
        if not self.factors:
            raise DomainError("a space needs at least one factor")
        seen: set[int] = set()
        for group in groups:
            if len(group) < 2:
                raise DomainError(f"exchange group {group} needs two or more factors")
            for i in group:
                if not 0 <= i < len(self.factors) or i in seen:
                    raise DomainError(f"bad or repeated factor index {i} in exchange groups")
                seen.add(i)
            kinds = {self.factors[i] for i in group}
            if len(kinds) != 1 or not next(iter(kinds)).is_orbital:
                raise DomainError(
                    f"exchange group {group} must hold orbital factors with equal l_max"
                )

    @classmethod
    def of(cls, *factors: FactorSpec, exchange_groups: Iterable[Sequence[int]] = ()) -> "SpaceSpec":
        return cls(tuple(factors), tuple(tuple(g) for g in exchange_groups))

    @cached_property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    @property
    def dim(self) -> int:
        return prod(self.dims)

    @property
    def n_factors(self) -> int:
        return len(self.factors)

    @cached_property
    def labels(self) -> tuple[Label, ...]:
        return tuple(product(*(f.labels() for f in self.factors)))

    @cached_property
    def index(self) -> dict[Label, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def validate_label(self, label: Label) -> None:
        if len(label) != len(self.factors):
            raise DomainError(f"label {label!r} has {len(label)} entries, space has {len(self.factors)}")
        for f, entry in zip(self.factors, label):
            f.validate_entry(entry)

    def parity_of(self, label: Label) -> int:
        sign = 1
        for f, entry in zip(self.factors, label):
            sign *= f.parity_of(entry)
        return sign

    def describe(self) -> str:
        """Inverse of ``parse_space`` (contiguous exchange groups print as ``tokN``)."""
        starts = {g[0]: g for g in self.exchange_groups if list(g) == list(range(g[0], g[0] + len(g)))}
        if len(starts) != len(self.exchange_groups):
            return ",".join(f.token() for f in self.factors) + f" groups={list(self.exchange_groups)}"
        parts, i = [], 0
        while i < self.n_factors:
            g = starts.get(i)
            if g:
                parts.append(f"{self.factors[i].token()}*{len(g)}")
                i += len(g)
            else:
                parts.append(self.factors[i].token())
                i += 1
        return ",".join(parts)

    def orbital_indices(self) -> list[int]:
        return [i for i, f in enumerate(self.factors) if f.is_orbital]

    def to_json(self) -> dict:
        factors = [
            {"kind": ORBITAL, "l_max": f.l_max} if f.is_orbital else {"kind": SPIN_HALF}
            for f in self.factors
        ]
        return {"factors": factors, "exchange_groups": [list(g) for g in self.exchange_groups]}

    @classmethod
    def from_json(cls, doc: dict) -> "SpaceSpec":
        _check_keys(doc, {"factors"}, {"exchange_groups"}, "space")
        factors = []
        for fd in doc["factors"]:
            if fd.get("kind") == ORBITAL:
                _check_keys(fd, {"kind", "l_max"}, set(), "orbital factor")
                factors.append(FactorSpec.orbital(fd["l_max"]))
            elif fd.get("kind") == SPIN_HALF:
                _check_keys(fd, {"kind"}, set(), "spin factor")
                factors.append(FactorSpec.spin_half())
            else:
                raise DomainError(f"unknown factor {fd!r}")
        return cls(tuple(factors), tuple(tuple(g) for g in doc.get("exchange_groups", [])))


def parse_space(text: str) -> SpaceSpec:
    """Parse the one-line space language: ``orb1,orb1``, ``spin,orb1``, ``orb1*3``.

    ``tokN`` repeats a factor N times and declares the copies an exchange group
    (orbital factors only).
    """
    factors: list[FactorSpec] = []
    groups: list[tuple[int, ...]] = []
    for raw in text.split(","):
        tok = raw.strip()
        if not tok:
            raise DomainError(f"empty factor token in {text!r}")
        count = 1
        if "*" in tok:
            tok, _, n = tok.partition("*")
            if not n.isdigit() or int(n) < 1:
                raise DomainError(f"bad repeat count in {raw!r}")
            count = int(n)
        if tok == "spin":
            factor = FactorSpec.spin_half()
        elif tok.startswith("orb") and tok[3:].isdigit():
            factor = FactorSpec.orbital(int(tok[3:]))
        else:
            raise DomainError(f"unknown factor token {raw!r}")
        start = len(factors)
        factors.extend([factor] * count)
        if count > 1:
            groups.append(tuple(range(start, start + count)))
    return SpaceSpec(tuple(factors), tuple(groups))


def _check_keys(doc: dict, required: set[str], optional: set[str], what: str) -> None:
    if not isinstance(doc, dict):
        raise DomainError(f"{what} must be an object")
    keys = set(doc)
    missing = required - keys
    unknown = keys - required - optional
    if missing:
        raise DomainError(f"{what} missing fields {sorted(missing)}")
    if unknown:
        raise DomainError(f"{what} has unknown fields {sorted(unknown)}")
