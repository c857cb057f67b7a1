"""Finite groups Z/pZ and F_q^n with dense subsets and probability weights."""
from functools import cached_property

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from sympy import isprime

from src.config import PROBABILITY_TOL
from src.errors import InputError

MAX_ORDER = 1 << 22


class FiniteGroup(BaseModel):
    """
    The additive group of F_q^n; n == 1 is the cyclic group Z/pZ.

    Elements are indexed 0..|G|-1 by the row-major flattening of their
    coordinate vector, so for Z/pZ the index is the residue itself.
    """

    model_config = ConfigDict(frozen=True)

    q: int = Field(ge=2)
    n: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _prime_and_small(self) -> "FiniteGroup":
        if not isprime(self.q):
            raise ValueError(f"{self.q} is not prime")
        if self.q**self.n > MAX_ORDER:
            raise ValueError(f"group order {self.q}^{self.n} exceeds {MAX_ORDER}")
        return self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return (self.q, self.n) == (other.q, other.n)

    def __hash__(self) -> int:
        return hash((self.q, self.n))

    @classmethod
    def cyclic(cls, p: int) -> "FiniteGroup":
        try:
            return cls(q=p, n=1)
        except ValueError as e:
            raise InputError(f"invalid cyclic group Z/{p}Z: {e}") from e

    @classmethod
    def vector(cls, q: int, n: int) -> "FiniteGroup":
        try:
            return cls(q=q, n=n)
        except ValueError as e:
            raise InputError(f"invalid vector space F_{q}^{n}: {e}") from e

    @classmethod
    def parse(cls, label: str) -> "FiniteGroup":
        """Parse "zp:101" or "fq:3^4"."""
        kind, _, rest = label.partition(":")
        try:
            if kind == "zp":
                return cls.cyclic(int(rest))
            if kind == "fq":
                q, _, n = rest.partition("^")
                return cls.vector(int(q), int(n or 1))
        except ValueError as e:
            raise InputError(f"cannot parse group label {label!r}") from e
        raise InputError(f"unknown group label {label!r}; expected zp:<p> or fq:<q>^<n>")

    @property
    def order(self) -> int:
        return self.q**self.n

    @property
    def is_cyclic(self) -> bool:
        return self.n == 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.q,) * self.n

    @property
    def label(self) -> str:
        return f"zp:{self.q}" if self.is_cyclic else f"fq:{self.q}^{self.n}"

    @cached_property
    def coords(self) -> np.ndarray:
        """Coordinate vectors of every element, shape (|G|, n)."""
        return np.stack(np.unravel_index(np.arange(self.order), self.shape), axis=1)

    def index_of(self, coords: np.ndarray) -> np.ndarray:
        """Element indices of coordinate rows, reduced mod q."""
        coords = np.asarray(coords) % self.q
        return np.ravel_multi_index(tuple(coords.T), self.shape)

    def element(self, index: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.coords[index])

    def translate_index(self, t: int) -> np.ndarray:
        """Permutation x -> x + t as an index array."""
        if self.is_cyclic:
            return (np.arange(self.order) + t) % self.q
        return self.index_of(self.coords + self.coords[t])

    def neg_index(self) -> np.ndarray:
        """Permutation x -> -x."""
        if self.is_cyclic:
            return (-np.arange(self.order)) % self.q
        return self.index_of(-self.coords)

    def scale_index(self, c: int) -> np.ndarray:
        """Map x -> c x for a scalar c in F_q."""
        if self.is_cyclic:
            return (np.arange(self.order) * (c % self.q)) % self.q
        return self.index_of(self.coords * (c % self.q))

    def add(self, x: int, y: int) -> int:
        if self.is_cyclic:
            return (x + y) % self.q
        return int(self.index_of(self.coords[x] + self.coords[y]))

    def neg(self, x: int) -> int:
        if self.is_cyclic:
            return (-x) % self.q
        return int(self.index_of(-self.coords[x]))

    def scale(self, c: int, x: int) -> int:
        if self.is_cyclic:
            return (c * x) % self.q
        return int(self.index_of(self.coords[x] * c))

    def unit(self, c: int) -> int:
        """Reduce c mod q, raising InputError when it is not invertible."""
        c = c % self.q
        if c == 0:
            raise InputError(f"scalar is not invertible in F_{self.q}")
        return c

    def inverse(self, c: int) -> int:
        return pow(self.unit(c), -1, self.q)

    def character_values(self, u: int) -> np.ndarray:
        """Values of the character x -> exp(2 pi i <u, x> / q) on every element."""
        phase = (self.coords @ self.coords[u]) % self.q
        return np.exp(2j * np.pi * phase / self.q)

    def frequency_phases(self, u: int) -> np.ndarray:
        """Integer phases <u, x> mod q, the exact form of the character u."""
        return (self.coords @ self.coords[u]) % self.q


class GroupSubset(BaseModel):
    """A subset of a finite group as a dense boolean indicator."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    group: FiniteGroup
    mask: np.ndarray

    @field_validator("mask")
    @classmethod
    def _boolean(cls, mask: np.ndarray) -> np.ndarray:
        mask = np.asarray(mask, dtype=bool)
        mask.setflags(write=False)
        return mask

    @model_validator(mode="after")
    def _length_matches(self) -> "GroupSubset":
        if self.mask.shape != (self.group.order,):
            raise ValueError(
                f"indicator length {self.mask.shape} does not match |G| = {self.group.order}"
            )
        return self

    @classmethod
    def from_members(cls, group: FiniteGroup, members) -> "GroupSubset":
        mask = np.zeros(group.order, dtype=bool)
        members = np.asarray(list(members), dtype=np.int64)
        if members.size:
            if group.is_cyclic:
                members = members % group.q
            elif members.min() < 0 or members.max() >= group.order:
                raise InputError("element index out of range")
            mask[members] = True
        return cls(group=group, mask=mask)

    @classmethod
    def empty(cls, group: FiniteGroup) -> "GroupSubset":
        return cls(group=group, mask=np.zeros(group.order, dtype=bool))

    @classmethod
    def full(cls, group: FiniteGroup) -> "GroupSubset":
        return cls(group=group, mask=np.ones(group.order, dtype=bool))

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    @property
    def density(self) -> float:
        return self.size / self.group.order

    @property
    def indicator(self) -> np.ndarray:
        return self.mask.astype(np.float64)

    def members(self) -> list[int]:
        return [int(x) for x in np.flatnonzero(self.mask)]

    def __contains__(self, x: int) -> bool:
        return bool(self.mask[x])

    def is_empty(self) -> bool:
        return not self.mask.any()

    def issubset(self, other: "GroupSubset") -> bool:
        return not np.any(self.mask & ~other.mask)

    def __and__(self, other: "GroupSubset") -> "GroupSubset":
        return GroupSubset(group=self.group, mask=self.mask & other.mask)

    def __or__(self, other: "GroupSubset") -> "GroupSubset":
        return GroupSubset(group=self.group, mask=self.mask | other.mask)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupSubset):
            return NotImplemented
        return self.group == other.group and bool(np.array_equal(self.mask, other.mask))

    def negate(self) -> "GroupSubset":
        mask = np.zeros_like(self.mask)
        mask[self.group.neg_index()] = self.mask
        return GroupSubset(group=self.group, mask=mask)

    def translate(self, t: int) -> "GroupSubset":
        """The translate A + t."""
        mask = np.zeros_like(self.mask)
        mask[self.group.translate_index(t)] = self.mask
        return GroupSubset(group=self.group, mask=mask)

    def density_in(self, base: "GroupSubset") -> float:
        """Relative density mu_base(A) = |A & base| / |base|."""
        if base.is_empty():
            raise InputError("relative density over an empty base")
        return (self & base).size / base.size

    def to_json(self) -> dict:
        return {"group": self.group.label, "members": self.members()}

    @classmethod
    def from_json(cls, payload: dict) -> "GroupSubset":
        group = FiniteGroup.parse(payload["group"])
        return cls.from_members(group, payload["members"])


def dilate(A: GroupSubset, c: int) -> GroupSubset:
    """The dilate c.A = {c x : x in A} for an invertible scalar c."""
    group = A.group
    c = group.unit(c)
    mask = np.zeros_like(A.mask)
    mask[group.scale_index(c)] = A.mask
    return GroupSubset(group=group, mask=mask)


class DensityWeight(BaseModel):
    """A probability measure on a finite group stored as a weight table."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    group: FiniteGroup
    weights: np.ndarray

    @field_validator("weights")
    @classmethod
    def _real_array(cls, weights: np.ndarray) -> np.ndarray:
        weights = np.asarray(weights, dtype=np.float64)
        weights.setflags(write=False)
        return weights

    @model_validator(mode="after")
    def _probability(self) -> "DensityWeight":
        if self.weights.shape != (self.group.order,):
            raise ValueError("weight table length does not match |G|")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")
        if abs(self.weights.sum() - 1.0) > PROBABILITY_TOL * max(1, self.group.order):
            raise ValueError(f"weights sum to {self.weights.sum()}, not 1")
        return self

    @classmethod
    def uniform_on(cls, A: GroupSubset) -> "DensityWeight":
        """The normalised counting measure mu_A."""
        if A.is_empty():
            raise InputError("uniform measure on an empty set")
        return cls(group=A.group, weights=A.indicator / A.size)

    @classmethod
    def point_mass(cls, group: FiniteGroup, x: int) -> "DensityWeight":
        weights = np.zeros(group.order)
        weights[x] = 1.0
        return cls(group=group, weights=weights)

    @classmethod
    def haar(cls, group: FiniteGroup) -> "DensityWeight":
        return cls.uniform_on(GroupSubset.full(group))

    def support(self) -> GroupSubset:
        return GroupSubset(group=self.group, mask=self.weights > 0)

    def mass(self, A: GroupSubset) -> float:
        return float(self.weights[A.mask].sum())

    def reflect(self) -> "DensityWeight":
        """mu~(E) = mu(-E); for real measures the conjugate is trivial."""
        weights = np.zeros_like(self.weights)
        weights[self.group.neg_index()] = self.weights
        return DensityWeight(group=self.group, weights=weights)
