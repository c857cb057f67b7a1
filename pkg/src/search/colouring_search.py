"""Exact Rado numbers by backtracking over canonical colourings of [n]."""
from concurrent.futures import ThreadPoolExecutor
from itertools import product

from loguru import logger
from pydantic import BaseModel, Field

from src.equation.rado_criterion import (
    CoefficientVector,
    IntervalColouring,
    checked,
    checked_dot,
    is_partition_regular,
)
from src.errors import InputError

type Labels = list[int]


class RadoResult(BaseModel):
    """Outcome of a Rado-number search.

    ``value`` is None when the search is inconclusive up to ``n_max``; the
    certificate then colours [n_max] without monochromatic solutions.
    """

    equation: tuple[int, ...]
    r: int = Field(ge=1)
    n_max: int = Field(ge=0)
    value: int | None = None
    certificate: IntervalColouring | None = None
    nodes_explored: int = 0
    distinct: bool = False

    @property
    def inconclusive(self) -> bool:
        return self.value is None


def _solve_last(
    a: tuple[int, ...],
    fixed: dict[int, int],
    members: set[int],
    distinct: bool,
) -> tuple[int, ...] | None:
    """
    Complete a partial assignment to a solution with every coordinate in members.

    Positions not in ``fixed`` range over members except the last free nonzero
    coefficient position, which is solved for.
    """
    free = [i for i in range(len(a)) if i not in fixed]
    solve_at = next((i for i in reversed(free) if a[i] != 0), None)
    enumerate_at = [i for i in free if i != solve_at]
    pool = sorted(members)

    for values in product(pool, repeat=len(enumerate_at)):
        x = dict(fixed)
        x.update(zip(enumerate_at, values))
        partial = checked_dot(
            tuple(a[i] for i in x), tuple(x[i] for i in x)
        )
        if solve_at is None:
            if partial != 0:
                continue
        else:
            if partial % a[solve_at] != 0:
                continue
            value = -partial // a[solve_at]
            if value not in members:
                continue
            x[solve_at] = value
        vector = tuple(x[i] for i in range(len(a)))
        if distinct and len(set(vector)) != len(vector):
            continue
        return vector
    return None


def find_mono_solution(
    c: IntervalColouring,
    a: CoefficientVector,
    distinct: bool = False,
) -> tuple[int, tuple[int, ...]] | None:
    """
    Find a monochromatic solution of a.x = 0 in a colouring.

    Classes are scanned in order and coordinates enumerated in increasing
    order, so the returned (colour id, x) is deterministic. Repeats among
    coordinates are allowed unless ``distinct`` is set.
    """
    for colour, members in enumerate(c.classes):
        if not members:
            continue
        solution = _solve_last(a.entries, {}, set(members), distinct)
        if solution is not None:
            return colour, solution
    return None


def _closes_solution(
    a: tuple[int, ...],
    members: set[int],
    new: int,
    distinct: bool,
) -> bool:
    """True iff members + {new} holds a solution using ``new`` at some coordinate."""
    extended = members | {new}
    for i in range(len(a)):
        if _solve_last(a, {i: new}, extended, distinct) is not None:
            return True
    return False


class _Search:
    """Depth-first search over canonical r-colourings of [1..n]."""

    def __init__(self, a: tuple[int, ...], r: int, limit: int, distinct: bool):
        self.a = a
        self.r = r
        self.limit = limit
        self.distinct = distinct
        self.nodes = 0
        self.best: Labels = []

    def extensions(self, labels: Labels, classes: list[set[int]]) -> list[int]:
        """Colours that element len(labels)+1 may take without closing a solution."""
        n = len(labels) + 1
        highest = max(labels) if labels else -1
        allowed = range(min(highest + 2, self.r)) if labels else range(1)
        return [
            colour
            for colour in allowed
            if not _closes_solution(self.a, classes[colour], n, self.distinct)
        ]

    def run(self, labels: Labels) -> Labels:
        """Explore the subtree below ``labels``; return the longest avoiding colouring seen."""
        classes: list[set[int]] = [set() for _ in range(self.r)]
        for element, colour in enumerate(labels, start=1):
            classes[colour].add(element)
        self.best = list(labels)
        self._descend(list(labels), classes)
        return self.best

    def _descend(self, labels: Labels, classes: list[set[int]]) -> bool:
        self.nodes += 1
        if len(labels) > len(self.best):
            self.best = list(labels)
        if len(labels) >= self.limit:
            return True
        n = len(labels) + 1
        for colour in self.extensions(labels, classes):
            labels.append(colour)
            classes[colour].add(n)
            done = self._descend(labels, classes)
            classes[colour].discard(n)
            labels.pop()
            if done:
                return True
        return False


def _prefixes(a: tuple[int, ...], r: int, depth: int, distinct: bool) -> tuple[list[Labels], int]:
    """Avoiding canonical colourings of [depth] in DFS order, plus interior nodes visited."""
    search = _Search(a, r, depth, distinct)
    frontier: list[Labels] = []
    interior = 0

    def walk(labels: Labels, classes: list[set[int]]) -> None:
        nonlocal interior
        if len(labels) == depth:
            frontier.append(list(labels))
            return
        interior += 1
        n = len(labels) + 1
        for colour in search.extensions(labels, classes):
            labels.append(colour)
            classes[colour].add(n)
            walk(labels, classes)
            classes[colour].discard(n)
            labels.pop()

    walk([], [set() for _ in range(r)])
    return frontier, interior


def _longest_avoiding(
    a: tuple[int, ...],
    r: int,
    limit: int,
    distinct: bool,
    threads: int,
) -> tuple[Labels, int]:
    """
    Longest avoiding canonical colouring, capped at ``limit`` elements.

    With threads > 1 the tree is split at a fixed depth; subtrees run
    independently and the result is the longest colouring from the earliest
    prefix, which is exactly what the sequential DFS returns.
    """
    split_depth = min(limit, max(1, r + 2))
    if threads <= 1 or limit <= split_depth:
        search = _Search(a, r, limit, distinct)
        best = search.run([])
        return best, search.nodes

    prefixes, interior = _prefixes(a, r, split_depth, distinct)
    if not prefixes:
        # No avoiding colouring reaches split depth: the sequential search is cheap.
        search = _Search(a, r, limit, distinct)
        best = search.run([])
        return best, search.nodes

    def explore(prefix: Labels) -> tuple[Labels, int]:
        search = _Search(a, r, limit, distinct)
        best = search.run(prefix)
        return best, search.nodes

    logger.debug(f"Exploring {len(prefixes)} prefixes of depth {split_depth} on {threads} threads")
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(explore, prefixes))

    best: Labels = []
    nodes = interior
    for labels, subtree_nodes in results:
        nodes += subtree_nodes
        if len(labels) > len(best):
            best = labels
    return best, nodes


def rado_number(
    a: CoefficientVector,
    r: int,
    n_max: int,
    distinct: bool = False,
    threads: int = 1,
) -> RadoResult:
    """
    Compute the r-colour Rado number of a by exhaustive search.

    Args:
        a: Partition-regular coefficient vector
        r: Number of colours
        n_max: Search budget; values above it are reported as inconclusive
        distinct: Require pairwise distinct coordinates in solutions
        threads: Worker threads for subtree exploration

    Returns:
        RadoResult with the value and an avoiding certificate of [value - 1],
        or an inconclusive result with a certificate of [n_max]
    """
    if r < 1:
        raise InputError(f"number of colours must be positive, got {r}")
    if n_max < 0:
        raise InputError(f"n_max must be nonnegative, got {n_max}")
    if not distinct and is_partition_regular(a) is None:
        raise InputError(f"equation {a} is not partition regular; the search would not terminate")
    checked(n_max)

    logger.info(f"Searching Rado number of {a} with r={r}, n_max={n_max}")
    best, nodes = _longest_avoiding(a.entries, r, n_max, distinct, threads)
    certificate = IntervalColouring.from_labels(best)

    if len(best) >= n_max:
        logger.info(f"Inconclusive: an avoiding colouring of [{n_max}] exists ({nodes} nodes)")
        return RadoResult(
            equation=a.entries, r=r, n_max=n_max, value=None,
            certificate=certificate, nodes_explored=nodes, distinct=distinct,
        )

    value = len(best) + 1
    logger.info(f"Rado number of {a} with {r} colours is {value} ({nodes} nodes)")
    return RadoResult(
        equation=a.entries, r=r, n_max=n_max, value=value,
        certificate=certificate, nodes_explored=nodes, distinct=distinct,
    )


def witness_colouring(
    a: CoefficientVector,
    r: int,
    n: int,
    distinct: bool = False,
) -> IntervalColouring | None:
    """An r-colouring of [n] with no monochromatic solution, or None if none exists."""
    if r < 1:
        raise InputError(f"number of colours must be positive, got {r}")
    search = _Search(a.entries, r, n, distinct)
    best = search.run([])
    if len(best) < n:
        logger.debug(f"No avoiding {r}-colouring of [{n}] ({search.nodes} nodes)")
        return None
    return IntervalColouring.from_labels(best)


def brute_force_rado(a: CoefficientVector, r: int, n: int, distinct: bool = False) -> bool:
    """True iff every r-colouring of [n] has a monochromatic solution (flat enumeration)."""
    for labels in product(range(r), repeat=n):
        classes: list[list[int]] = [[] for _ in range(r)]
        for element, colour in enumerate(labels, start=1):
            classes[colour].append(element)
        colouring = IntervalColouring(n=n, classes=[c for c in classes if c])
        if find_mono_solution(colouring, a, distinct) is None:
            return False
    return True


def count_solutions_interval(members: set[int] | list[int], a: int, b: int) -> int:
    """Number of (x, y, z) in A^3 with a x - a y = b z, z solved from (x, y)."""
    if a == 0 or b == 0:
        raise InputError("count_solutions_interval needs nonzero a and b")
    pool = set(members)
    count = 0
    for x in pool:
        for y in pool:
            numerator = checked(a * (x - y))
            if numerator % b == 0 and numerator // b in pool:
                count += 1
    return count
