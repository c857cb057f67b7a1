"""Bohr sets in Z/pZ: construction, growth, regular pairs and character rigidity."""
import math

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from src.applemmas.constants import ConstantBook, DEFAULT_BOOK
from src.applemmas.verdicts import LemmaVerdict
from src.config import COMPLEX_TOL, MEMBERSHIP_TOL, MIN_WIDTH
from src.errors import BudgetExceeded, ContractError, InputError
from src.harmonics.fourier import iterated_sumset, relative_coefficient, sumset, difference_set
from src.harmonics.groups import FiniteGroup, GroupSubset, dilate
from src.validation.validator import HypothesisValidator


class BohrSet(BaseModel):
    """B(Gamma, delta) = {x : |gamma(x) - 1| <= delta for every gamma in Gamma}."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    group: FiniteGroup
    frequencies: tuple[int, ...]
    width: float
    members: GroupSubset

    @property
    def d(self) -> int:
        return len(self.frequencies)

    @property
    def size(self) -> int:
        return self.members.size

    @property
    def measure(self) -> float:
        return self.members.density

    def to_json(self) -> dict:
        return {
            "group": self.group.label,
            "frequencies": list(self.frequencies),
            "width": self.width,
            "size": self.size,
            "members": self.members.members(),
        }


def character_distance(p: int, t: int, x: np.ndarray) -> np.ndarray:
    """|exp(2 pi i t x / p) - 1| = 2 sin(pi ||t x / p||), computed from the exact residue."""
    residue = (t * x) % p
    nearest = np.minimum(residue, p - residue)
    return 2.0 * np.sin(np.pi * nearest / p)


def build_bohr(group: FiniteGroup, frequencies, width: float) -> BohrSet:
    """
    Build B(Gamma, delta) by evaluating |gamma(x) - 1| at every element.

    Raises:
        InputError: if the group is not cyclic or the width is outside (0, 2]
    """
    if not group.is_cyclic:
        raise InputError("Bohr sets are built in Z/pZ only")
    if not 0 < width <= 2:
        raise InputError(f"Bohr width must lie in (0, 2], got {width}")
    p = group.q
    frequencies = tuple(sorted({int(t) % p for t in frequencies}))
    xs = np.arange(p)
    mask = np.ones(p, dtype=bool)
    for t in frequencies:
        mask &= character_distance(p, t, xs) <= width + MEMBERSHIP_TOL
    members = GroupSubset(group=group, mask=mask)
    if not mask[0] or members != members.negate():
        raise ContractError("Bohr set must contain 0 and be symmetric")
    return BohrSet(group=group, frequencies=frequencies, width=float(width), members=members)


def clamp_width(width: float) -> float:
    """Clip a computed width into [MIN_WIDTH, 2]; tiny widths underflow to 0 otherwise."""
    return min(max(float(width), MIN_WIDTH), 2.0)


def with_width(B: BohrSet, width: float) -> BohrSet:
    return build_bohr(B.group, B.frequencies, width)


def dilate_bohr(B: BohrSet, c: int) -> BohrSet:
    """c.B(Gamma, delta) = B(c^{-1} Gamma, delta), verified against the dilated members."""
    group = B.group
    c_inv = group.inverse(c)
    dilated = build_bohr(group, [(t * c_inv) % group.q for t in B.frequencies], B.width)
    if dilated.members != dilate(B.members, c):
        raise ContractError(f"dilation of a Bohr set by {c} does not match B(c^-1 Gamma, delta)")
    return dilated


def bohr_size_lower_bound(d: int, width: float, growth: float = DEFAULT_BOOK.growth) -> float:
    """growth^{-d ceil(log2(2/delta))}, from iterating the doubling bound down from B(Gamma, 2) = G."""
    if not 0 < width <= 2:
        raise InputError(f"Bohr width must lie in (0, 2], got {width}")
    return growth ** (-d * math.ceil(math.log2(2.0 / width)))


def growth_ratio(group: FiniteGroup, frequencies, width: float, book: ConstantBook = DEFAULT_BOOK) -> float:
    """
    mu(B(Gamma, 2 delta)) / mu(B(Gamma, delta)), asserted to be at most growth^d.

    Raises:
        InputError: if width > 1
        ContractError: if the doubling bound fails
    """
    if not 0 < width <= 1:
        raise InputError(f"growth ratio needs width in (0, 1], got {width}")
    small = build_bohr(group, frequencies, width)
    large = build_bohr(group, frequencies, 2 * width)
    ratio = large.size / small.size
    if ratio > book.growth**small.d:
        raise ContractError(
            f"|B(2 delta)|/|B(delta)| = {ratio} exceeds {book.growth}^{small.d}",
            frequencies=list(small.frequencies),
            width=width,
        )
    return ratio


def growth_check(group: FiniteGroup, frequencies, width: float, book: ConstantBook = DEFAULT_BOOK) -> LemmaVerdict:
    """Doubling bound and size lower bound packaged as a verdict."""
    small = build_bohr(group, frequencies, width)
    ratio = growth_ratio(group, frequencies, width, book)
    lower = bohr_size_lower_bound(small.d, width, book.growth)
    validator = HypothesisValidator("growth")
    validator.require("width", width, "<=", 1.0)
    validator.require("size lower bound", small.measure, ">=", lower)
    checks = validator.raise_if_failed()
    return LemmaVerdict.conclude(
        "growth", checks, lhs=ratio, rhs=book.growth**small.d, relation="<=", book=book,
        d=small.d, size=small.size, size_lower_bound=lower,
    )


class RegularPair(BaseModel):
    """A width delta* in [delta/2, delta] and companion delta' with small sumset growth."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    delta_star: float
    delta_prime: float
    l: int = Field(ge=1)
    eta: float
    measured_ratio: float
    star: BohrSet = Field(exclude=True)
    prime: BohrSet = Field(exclude=True)

    def to_json(self) -> dict:
        return {
            **self.model_dump(),
            "frequencies": list(self.star.frequencies),
            "star_size": self.star.size,
            "prime_size": self.prime.size,
        }


def prime_width(width: float, l: int, eta: float, d: int, grid: int) -> float:
    """delta' = delta eta / (2 l d grid k0) with k0 = ceil(log 100 / log(1 + eta))."""
    k0 = math.ceil(math.log(100.0) / math.log1p(eta))
    return width * eta / (2 * l * max(d, 1) * grid * k0)


def find_regular_pair(
    group: FiniteGroup,
    frequencies,
    width: float,
    l: int,
    eta: float,
    grid: int,
) -> RegularPair:
    """
    Search for delta* with mu(B(Gamma, delta*) + l B(Gamma, delta')) <= (1 + eta) mu(B(Gamma, delta*)).

    Candidates are delta* = delta/2 + i (delta/2)/grid for i < grid, with
    delta' = delta eta / (2 l d grid k0) and k0 = ceil(log 100 / log(1 + eta)).
    Each candidate is verified by direct sumset computation.

    Raises:
        InputError: if eta is outside (0, 1] or l < 1
        BudgetExceeded: if no candidate verifies
    """
    if not 0 < eta <= 1:
        raise InputError(f"eta must lie in (0, 1], got {eta}")
    if l < 1:
        raise InputError(f"l must be positive, got {l}")
    if grid < 1:
        raise BudgetExceeded(f"regular-pair grid of {grid} points admits no candidate")

    d = len(set(int(t) % group.q for t in frequencies))
    delta_prime = prime_width(width, l, eta, d, grid)
    prime = build_bohr(group, frequencies, delta_prime)
    spread = iterated_sumset(prime.members, l)

    for i in range(grid):
        delta_star = width / 2 + i * (width / 2) / grid
        star = build_bohr(group, frequencies, delta_star)
        if not spread.issubset(star.members):
            logger.debug(f"delta*={delta_star:.6g}: lB' not inside B*")
            continue
        ratio = sumset(star.members, spread).size / star.size
        logger.debug(f"delta*={delta_star:.6g}: ratio {ratio:.6f}")
        if ratio <= 1 + eta:
            return RegularPair(
                delta_star=delta_star,
                delta_prime=delta_prime,
                l=l,
                eta=eta,
                measured_ratio=ratio,
                star=star,
                prime=prime,
            )

    raise BudgetExceeded(
        f"no regular width found on a grid of {grid} points (l={l}, eta={eta}, d={d})",
        width=width,
        grid=grid,
    )


def regular_pair_check(
    group: FiniteGroup,
    frequencies,
    width: float,
    l: int,
    eta: float,
    grid: int,
    book: ConstantBook = DEFAULT_BOOK,
) -> LemmaVerdict:
    """find_regular_pair packaged as a verdict; the stored ratio is re-measured."""
    pair = find_regular_pair(group, frequencies, width, l, eta, grid)
    remeasured = sumset(pair.star.members, iterated_sumset(pair.prime.members, l)).size / pair.star.size
    validator = HypothesisValidator("regular")
    validator.require("eta", eta, "<=", 1.0)
    validator.require("delta* lower end", pair.delta_star, ">=", width / 2)
    validator.require("delta* upper end", pair.delta_star, "<=", width)
    checks = validator.raise_if_failed()
    if abs(remeasured - pair.measured_ratio) > COMPLEX_TOL:
        raise ContractError("regular pair ratio does not re-measure")
    return LemmaVerdict.conclude(
        "regular", checks, lhs=remeasured, rhs=1 + eta, relation="<=", book=book,
        delta_star=pair.delta_star, delta_prime=pair.delta_prime,
    )


def character_rigidity(
    B0: GroupSubset,
    B1: GroupSubset,
    gamma: int,
    eta: float,
    kappa: float,
) -> float:
    """
    max over x in B1 - B1 of |1 - gamma(x)|, asserted to be at most 2 eta / kappa.

    Hypotheses mu(B1 + B0) <= (1 + eta) mu(B0) and |mu_{B0}^(gamma)| >= kappa are
    measured first; their failure raises HypothesisFail, while a violated
    conclusion raises ContractError.
    """
    value, _ = _rigidity(B0, B1, gamma, eta, kappa)
    return value


def _rigidity(B0: GroupSubset, B1: GroupSubset, gamma: int, eta: float, kappa: float):
    validator = HypothesisValidator("rigidity")
    validator.require("B1 + B0 growth", sumset(B1, B0).size / B0.size, "<=", 1 + eta)
    validator.require("|mu_B0^(gamma)|", abs(relative_coefficient(B0, B0, gamma)), ">=", kappa)
    checks = validator.raise_if_failed()

    differences = difference_set(B1, B1)
    values = B0.group.character_values(gamma)[differences.mask]
    value = float(np.max(np.abs(1 - values), initial=0.0))
    if value > 2 * eta / kappa + COMPLEX_TOL:
        raise ContractError(
            f"|1 - gamma(x)| = {value} exceeds 2 eta / kappa = {2 * eta / kappa}",
            gamma=gamma,
        )
    return value, checks


def rigidity_check(
    B0: GroupSubset,
    B1: GroupSubset,
    gamma: int,
    eta: float,
    kappa: float,
    book: ConstantBook = DEFAULT_BOOK,
) -> LemmaVerdict:
    value, checks = _rigidity(B0, B1, gamma, eta, kappa)
    return LemmaVerdict.conclude(
        "rigidity", checks, lhs=value, rhs=2 * eta / kappa, relation="<=", book=book, gamma=gamma,
    )
