"""Single linear equations: Rado's criterion and the reduction to a(x - y) = bz."""
from itertools import combinations

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.errors import ContractError, InputError

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


def checked(value: int) -> int:
    """Return value unchanged if it fits a signed 64-bit word, else raise."""
    if not INT64_MIN <= value <= INT64_MAX:
        raise InputError(f"integer overflow: {value} does not fit in 64 bits")
    return value


def checked_dot(coefficients: tuple[int, ...], values: tuple[int, ...] | list[int]) -> int:
    """Sum of a_i x_i with every partial product and sum width-checked."""
    total = 0
    for a_i, x_i in zip(coefficients, values):
        total = checked(total + checked(a_i * x_i))
    return total


class CoefficientVector(BaseModel):
    """The equation a_1 x_1 + ... + a_d x_d = 0."""

    model_config = ConfigDict(frozen=True)

    entries: tuple[int, ...]

    @field_validator("entries")
    @classmethod
    def _non_empty_and_bounded(cls, entries: tuple[int, ...]) -> tuple[int, ...]:
        if len(entries) == 0:
            raise ValueError("coefficient vector must have at least one entry")
        for entry in entries:
            checked(entry)
        return entries

    @property
    def d(self) -> int:
        return len(self.entries)

    @classmethod
    def parse(cls, text: str) -> "CoefficientVector":
        """Parse a comma-separated integer string such as "1,1,-1"."""
        parts = [part.strip() for part in text.split(",") if part.strip()]
        if not parts:
            raise InputError("empty coefficient vector")
        try:
            values = tuple(int(part) for part in parts)
        except ValueError as e:
            raise InputError(f"coefficients must be integers: {text!r}") from e
        return cls.of(values)

    @classmethod
    def of(cls, values) -> "CoefficientVector":
        """Build from any integer sequence, mapping validation failures to InputError."""
        values = tuple(int(v) for v in values)
        if not values:
            raise InputError("empty coefficient vector")
        for v in values:
            checked(v)
        return cls(entries=values)

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.entries)


class RegularityWitness(BaseModel):
    """Rado witness: 1-based index set I, pivot j in I and residual b."""

    model_config = ConfigDict(frozen=True)

    index_set: tuple[int, ...]
    pivot: int
    residual: int

    @model_validator(mode="after")
    def _pivot_in_index_set(self) -> "RegularityWitness":
        if self.pivot not in self.index_set:
            raise ValueError("pivot must belong to the index set")
        return self

    def validate_against(self, a: CoefficientVector) -> None:
        """Raise ContractError unless the witness invariants hold for a."""
        entries = a.entries
        if any(i < 1 or i > a.d for i in self.index_set):
            raise ContractError("witness indices out of range", witness=self.model_dump())
        if checked(sum(entries[i - 1] for i in self.index_set)) != 0:
            raise ContractError("witness index set does not sum to zero")
        if entries[self.pivot - 1] == 0:
            raise ContractError("witness pivot has a zero coefficient")
        outside = [entries[i] for i in range(a.d) if i + 1 not in self.index_set]
        if self.residual != -checked(sum(outside)):
            raise ContractError("witness residual is not -sum of the remaining coefficients")


class IntervalColouring(BaseModel):
    """A partition of [N] (signed=False) or {-N..N} (signed=True) into colour classes."""

    n: int = Field(ge=0)
    signed: bool = False
    classes: list[list[int]]

    @model_validator(mode="after")
    def _classes_cover_domain(self) -> "IntervalColouring":
        seen: set[int] = set()
        for members in self.classes:
            for x in members:
                if x in seen:
                    raise ValueError(f"element {x} appears in two classes")
                seen.add(x)
        if seen != set(self.domain()):
            raise ValueError("colour classes must cover the domain exactly")
        return self

    @property
    def r(self) -> int:
        return len(self.classes)

    def domain(self) -> range:
        return range(-self.n, self.n + 1) if self.signed else range(1, self.n + 1)

    def colour_of(self) -> dict[int, int]:
        """Map element -> colour id."""
        return {x: c for c, members in enumerate(self.classes) for x in members}

    @classmethod
    def from_labels(cls, labels: list[int], signed: bool = False) -> "IntervalColouring":
        """Build from a list of colour ids indexed by position in the domain."""
        n = (len(labels) - 1) // 2 if signed else len(labels)
        start = -n if signed else 1
        r = max(labels) + 1 if labels else 0
        classes: list[list[int]] = [[] for _ in range(r)]
        for offset, colour in enumerate(labels):
            classes[colour].append(start + offset)
        return cls(n=n, signed=signed, classes=[c for c in classes if c])


def is_invariant(a: CoefficientVector) -> bool:
    """True iff the coefficients sum to zero (constant vectors are solutions)."""
    return checked(sum(a.entries)) == 0


def is_partition_regular(a: CoefficientVector) -> RegularityWitness | None:
    """
    Decide partition regularity of a single equation by Rado's criterion.

    Among zero-sum index sets containing a nonzero coefficient, returns the
    lexicographically least set of minimum size, its least nonzero index as
    pivot, and b = -sum of the coefficients outside the set.

    Args:
        a: Coefficient vector

    Returns:
        The witness, or None when the equation is not partition regular
    """
    if a.d == 0:
        raise InputError("empty coefficient vector")
    entries = a.entries
    indices = range(1, a.d + 1)
    for size in range(1, a.d + 1):
        for subset in combinations(indices, size):
            if checked(sum(entries[i - 1] for i in subset)) != 0:
                continue
            nonzero = [i for i in subset if entries[i - 1] != 0]
            if not nonzero:
                continue
            residual = -checked(sum(entries[i - 1] for i in indices if i not in subset))
            witness = RegularityWitness(index_set=subset, pivot=nonzero[0], residual=residual)
            logger.debug(f"Equation {a} is partition regular: I={subset}, j={nonzero[0]}, b={residual}")
            return witness
    logger.debug(f"Equation {a} is not partition regular")
    return None


def reduce_to_triple(a: CoefficientVector) -> tuple[int, int, RegularityWitness]:
    """
    Reduce a to the triple form a_j x - a_j y = b z.

    Returns:
        (a_j, b, witness); b == 0 exactly when a is invariant

    Raises:
        InputError: if a is not partition regular
    """
    witness = is_partition_regular(a)
    if witness is None:
        raise InputError(f"equation {a} is not partition regular")
    return a.entries[witness.pivot - 1], witness.residual, witness


def lift_colouring(c: IntervalColouring) -> IntervalColouring:
    """Lift an r-colouring of [N] to the (2r+1)-colouring {A, -A : A in C} + {{0}} of {-N..N}."""
    if c.signed:
        raise InputError("lift_colouring expects a colouring of [N]")
    classes: list[list[int]] = []
    for members in c.classes:
        if not members:
            continue
        classes.append(sorted(members))
        classes.append(sorted(-x for x in members))
    classes.append([0])
    return IntervalColouring(n=c.n, signed=True, classes=classes)


def restrict_to_positive(c: IntervalColouring) -> IntervalColouring:
    """Restrict a signed colouring to [N], dropping classes left empty."""
    classes = [[x for x in members if x > 0] for members in c.classes]
    return IntervalColouring(n=c.n, signed=False, classes=[m for m in classes if m])


def assemble_solution(
    y: int,
    z: int,
    w: int,
    witness: RegularityWitness,
    a: CoefficientVector,
) -> tuple[int, ...]:
    """
    Assemble a solution of a.x = 0 from a triple with a_j y - a_j z = b w.

    Sets x_j = y, x_k = z for k in I \\ {j} and x_k = w for k outside I.

    Raises:
        ContractError: if the triple does not satisfy the precondition or the
            assembled vector fails the equation
    """
    witness.validate_against(a)
    a_j = a.entries[witness.pivot - 1]
    lhs = checked(checked(a_j * y) - checked(a_j * z))
    rhs = checked(witness.residual * w)
    if lhs != rhs:
        raise ContractError(
            f"triple ({y}, {z}, {w}) violates a_j y - a_j z = b w ({lhs} != {rhs})",
            triple=(y, z, w),
        )
    x = []
    for k in range(1, a.d + 1):
        if k == witness.pivot:
            x.append(y)
        elif k in witness.index_set:
            x.append(z)
        else:
            x.append(w)
    if checked_dot(a.entries, x) != 0:
        raise ContractError(f"assembled vector {x} does not solve {a}")
    return tuple(x)


def lift_solution(
    y: int,
    z: int,
    w: int,
    negated: bool,
    witness: RegularityWitness,
    a: CoefficientVector,
) -> tuple[int, ...]:
    """Assemble a solution from a triple found in a class of the lifted colouring.

    Triples found in a negated class -A are flipped back to A first.
    """
    if negated:
        y, z, w = -y, -z, -w
    return assemble_solution(y, z, w, witness, a)
