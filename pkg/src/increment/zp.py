"""Bohr-set density-increment tracer for colourings of {-N..N} embedded in Z/pZ."""
import json
import math
from pathlib import Path

import numpy as np
from langgraph.graph import END, StateGraph
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field
from sympy import nextprime

from src.applemmas.constants import ConstantBook, DEFAULT_BOOK
from src.applemmas.pipeline import iteration_parameters, iteration_step
from src.bohr.bohr_sets import BohrSet, build_bohr, clamp_width, dilate_bohr, find_regular_pair, prime_width
from src.bohr.game import game_density, hereditary_density_check
from src.config import CD1_EXPONENT, COMPLEX_TOL, DEFAULT_SEED, MIN_WIDTH, REGULAR_GRID
from src.equation.rado_criterion import IntervalColouring, lift_colouring
from src.errors import ConstantsMismatch, ContractError, InputError, RadoError, VerificationFailed
from src.harmonics.fourier import count_triples, fourfold_measure, integer_convolve
from src.harmonics.groups import FiniteGroup, GroupSubset, dilate
from src.increment.records import TraceOutcome, TraceRecord, TraceStep
from src.increment.toy import gain_bound
from src.search.colouring_search import count_solutions_interval
from src.state import ZpTraceState, create_zp_state
from src.validation.validator import HypothesisValidator, TraceValidator


class ZpConfig(BaseModel):
    """Tracer settings; flags override a config file, which overrides these defaults."""

    model_config = ConfigDict(extra="forbid")

    n: int = Field(default=50, ge=1)
    a: int = 1
    b: int = 1
    seed: int = DEFAULT_SEED
    grid: int = Field(default=REGULAR_GRID, ge=0, description="regular-pair candidates per chain link")
    cd1_exponent: float = Field(default=CD1_EXPONENT, gt=0, description="C in (delta / 2 r d |a||b|)^(C d)")
    book: ConstantBook = Field(default_factory=lambda: DEFAULT_BOOK)

    @classmethod
    def load(cls, path: str | Path | None, **overrides) -> "ZpConfig":
        """Read a JSON config (or start from defaults) and apply non-None overrides."""
        payload = json.loads(Path(path).read_text()) if path else {}
        payload.update({key: value for key, value in overrides.items() if value is not None})
        return cls.model_validate(payload)


def embed_interval(n: int, a: int, b: int) -> tuple[int, BohrSet]:
    """
    Least prime p > (2|a| + |b|) N and B({1}, 2 sin(pi N / p)) = {-N..N} mod p.

    Raises:
        InputError: if N < 1 or a, b is zero
        ContractError: if the built Bohr set is not exactly the interval
    """
    if n < 1:
        raise InputError(f"N must be positive, got {n}")
    if a == 0 or b == 0:
        raise InputError("a and b must be nonzero")
    p = int(nextprime((2 * abs(a) + abs(b)) * n))
    group = FiniteGroup.cyclic(p)
    bohr = build_bohr(group, [1], 2 * math.sin(math.pi * n / p))
    if bohr.members != GroupSubset.from_members(group, range(-n, n + 1)):
        raise ContractError(f"B({{1}}, 2 sin(pi N/p)) is not {{-N..N}} mod {p}", size=bohr.size)
    return p, bohr


def sign_colouring(n: int) -> IntervalColouring:
    """{1..N}, {-N..-1}, {0}."""
    return IntervalColouring(
        n=n, signed=True, classes=[list(range(1, n + 1)), list(range(-n, 0)), [0]],
    )


def random_interval_colouring(n: int, colours: int, seed: int = DEFAULT_SEED) -> IntervalColouring:
    rng = np.random.default_rng(seed)
    return IntervalColouring.from_labels(rng.integers(0, colours, size=2 * n + 1).tolist(), signed=True)


def cd1_threshold(width: float, d: int, r: int, a: int, b: int, exponent: float = CD1_EXPONENT) -> float:
    """(delta / 2 r d |a||b|)^(C d) as a share of |G|^2."""
    d = max(d, 1)
    return (width / (2 * r * d * abs(a) * abs(b))) ** (exponent * d)


class RegularChain(BaseModel):
    """B0 ... B5 from five regular-pair calls, with B1 .. B5 on the frequencies b^{-1} Gamma_i."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    sets: list[BohrSet] = Field(exclude=True)
    frequencies: list[int]
    etas: list[float]

    @property
    def members(self) -> list[GroupSubset]:
        return [B.members for B in self.sets]

    def summary(self) -> dict:
        return {
            "frequencies": self.frequencies,
            "widths": [B.width for B in self.sets],
            "sizes": [B.size for B in self.sets],
            "etas": self.etas,
        }


def build_chain(
    bohr: BohrSet,
    a: int,
    b: int,
    r: int,
    k: int,
    l: int,
    m: int,
    grid: int,
    book: ConstantBook = DEFAULT_BOOK,
) -> RegularChain:
    """
    Build the regular chain below B(Gamma_i, delta_i).

    B0 is regular for 4|a||b| copies of B1'; B1'' = b.B1' carries the
    frequencies b^{-1} Gamma_i used by the rest of the chain, and B1, ..., B4
    are regular for 2(l + 1), 2l, m and 1 copies of the next link in turn.

    Raises:
        BudgetExceeded: if a regular-pair search runs out of grid points
        ConstantsMismatch: if a link's width underflows or the chain fails one of its inclusions
    """
    group = bohr.group
    etas = [
        min(book.c_me / (2 * r), book.c16 / (4 * r**2)),
        1 / (4 * r),
        1.0,
        1.0,
        book.c96 * (2 * r) ** (-4 * k),
    ]
    if etas[-1] <= 0:
        raise ConstantsMismatch(f"the last chain growth allowance underflows for r={r}, k={k}", k=k)

    first = _chain_link(group, bohr.frequencies, bohr.width, 4 * abs(a) * abs(b), etas[0], grid, 0)
    lifted = dilate_bohr(first.prime, b)
    frequencies = list(lifted.frequencies)
    sets = [first.star]
    width = lifted.width
    for link, (copies, eta) in enumerate(zip((2 * (l + 1), 2 * l, m, 1), etas[1:]), start=1):
        pair = _chain_link(group, frequencies, width, copies, eta, grid, link)
        sets.append(pair.star)
        width = pair.prime.width
        last = pair.prime
    sets.append(last)

    validator = HypothesisValidator("chain")
    validator.require_true("B0 inside B(Gamma_i, delta_i)", sets[0].members.issubset(bohr.members))
    validator.require_true("B1 inside b.B1'", sets[1].members.issubset(lifted.members))
    for i in range(1, 5):
        validator.require_true(f"B{i + 1} inside B{i}", sets[i + 1].members.issubset(sets[i].members))
    is_valid, errors = validator.validate()
    if not is_valid:
        raise ConstantsMismatch(f"regular chain breaks its inclusions: {'; '.join(errors)}")
    logger.debug(f"chain widths {[f'{B.width:.3g}' for B in sets]}, sizes {[B.size for B in sets]}")
    return RegularChain(sets=sets, frequencies=frequencies, etas=etas)


def _chain_link(group: FiniteGroup, frequencies, width: float, copies: int, eta: float, grid: int, link: int):
    if grid >= 1:
        d = len(set(int(t) % group.q for t in frequencies))
        narrow = prime_width(width, copies, eta, d, grid)
        if narrow < MIN_WIDTH:
            raise ConstantsMismatch(
                f"chain link {link} needs width {narrow:.3g}, below {MIN_WIDTH:g}",
                link=link, width=width, eta=eta, copies=copies,
            )
    return find_regular_pair(group, frequencies, width, copies, eta, grid)


# === NODE FUNCTIONS ===

def measure_node(state: ZpTraceState) -> ZpTraceState:
    """S_{i,j} = min over nu on B(Gamma_i, delta_i) of ||1_{a.A_j} * nu||_inf, via game_density."""
    support = state['bohr'].members
    state['s_row'] = [game_density(dilate(A_j, state['a']), support).value for A_j in state['classes']]
    if not state['counts']:
        state['counts'] = [count_triples(A_j, state['a'], state['b']) for A_j in state['classes']]
    logger.info(
        f"zp step {state['step']}: d = {len(state['frequencies'])}, delta = {state['width']:.4g}, "
        f"|B| = {state['bohr'].size}, S = {[round(s, 4) for s in state['s_row']]}"
    )
    return state


def count_check_node(state: ZpTraceState) -> ZpTraceState:
    """Case (cd1) when some class has at least (delta_i / 2 r d_i |a||b|)^(C d_i) p^2 solutions."""
    group, config = state['group'], state['config']
    r = len(state['classes'])
    threshold = cd1_threshold(
        state['width'], len(state['frequencies']), r, state['a'], state['b'], config.cd1_exponent,
    ) * group.order**2
    best = max(range(r), key=lambda j: (state['counts'][j], -j))
    state['pending'] = {"count_threshold": threshold, "count": state['counts'][best]}

    if state['counts'][best] >= threshold:
        state['case'] = "cd1"
        state['chosen_class'] = best
        state['processing_log'].append(f"step {state['step']}: cd1 with class {best}")
        return state

    limit = r * (gain_bound(r, config.book) + 1) + 1
    if state['step'] >= limit:
        _flag(state, f"step budget of {limit} exhausted")
        return state
    state['case'] = None
    return state


def chain_node(state: ZpTraceState) -> ZpTraceState:
    """Build B0..B5 and pick the class with the largest four-fold mass of b.A_j."""
    config = state['config']
    r = len(state['classes'])
    try:
        params = iteration_parameters(1 / (2 * r), 1 / r, config.book)
        chain = build_chain(
            state['bohr'], state['a'], state['b'], r, params.k, params.l, params.m, config.grid, config.book,
        )
        members = chain.members
        mu = fourfold_measure(members[1], members[2])
    except RadoError as e:
        _flag(state, f"chain construction: {e}", e)
        return state

    shares = [mu.mass(dilate(A_j, state['b'])) for A_j in state['classes']]
    j = max(range(r), key=lambda j: (shares[j], -j))
    state['chain'] = chain.sets
    state['chosen_class'] = j
    state['pending'].update(params.model_dump())
    state['pending'].update(chain=chain.summary(), shares=shares, chain_frequencies=chain.frequencies)
    state['processing_log'].append(f"step {state['step']}: chain built, class {j} has share {shares[j]:.4f}")
    return state


def increment_node(state: ZpTraceState) -> ZpTraceState:
    """Branch to cd0 when S_{i,j} < 1/2r, else run the iteration step: cd1 or cd2."""
    group, config = state['group'], state['config']
    r = len(state['classes'])
    j = state['chosen_class']
    A_j = state['classes'][j]
    B0, B1, B2, B3, B4, B5 = state['chain']
    pending = state['pending']
    s = state['s_row'][j]
    a, b = state['a'], state['b']
    aA = dilate(A_j, a)

    try:
        if s < 1 / (2 * r):
            ratio = (a * group.inverse(b)) % group.q
            new_bohr = dilate_bohr(B2, ratio)
            hereditary = hereditary_density_check(
                aA, dilate(B1.members, ratio), new_bohr.members, 1 / (4 * r), config.book,
            )
            after = game_density(aA, new_bohr.members).value
            if after < 1 / (2 * r) - COMPLEX_TOL:
                raise ConstantsMismatch(f"S after the cd0 step is {after:.4g}, below 1/2r", density=after)
            _advance(state, "cd0", new_bohr, before=s, after=after, notes={"hereditary": hereditary.passed})
            return state

        counts = integer_convolve(aA.mask, B0.members.mask, group)
        x = int(np.argmax(counts))
        A = aA.negate().translate(x)
        D = dilate(A_j, b)
        outcome = iteration_step(
            A, D, [B.members for B in state['chain']], pending['k'], pending['l'], pending['m'],
            delta=min(1.0, pending['shares'][j]), book=config.book, seed=config.seed + state['step'],
        )
    except RadoError as e:
        _flag(state, f"step {state['step']}: {e}", e)
        return state

    if outcome.kind == "many_solutions":
        state['case'] = "cd1"
        pending['count'] = state['counts'][j]
        pending['lemma_bound'] = (
            B0.measure * B1.measure**2 * B2.measure**2 / (8 * r**3) * group.order**2
        )
        pending['translate'] = x
        state['processing_log'].append(f"step {state['step']}: many solutions for class {j}")
        return state

    k, m = pending['k'], pending['m']
    frequencies = sorted(set(pending['chain_frequencies']) | set(outcome.bohr.frequencies))
    width = min(B5.width, clamp_width(config.book.c128 * (2 * r) ** (-4 * k) / m))
    new_bohr = build_bohr(group, frequencies, clamp_width(width))
    after = game_density(aA, new_bohr.members).value
    if after < (1 + config.book.c32) * s - COMPLEX_TOL:
        _flag(state, f"step {state['step']}: S rose only to {after:.4g} from {s:.4g}")
        return state
    pending['translate'] = x
    _advance(state, "cd2", new_bohr, before=s, after=after, notes={
        "increment_density": outcome.density.value if outcome.density else None,
        "rank_budget": m,
    })
    state['gain_counts'][j] += 1
    return state


def finalize_node(state: ZpTraceState) -> ZpTraceState:
    """Record the terminal step; the count is checked against the integer enumeration."""
    pending = state['pending']
    if state['case'] == "cd1":
        j = state['chosen_class']
        count = state['counts'][j]
        oracle = count_solutions_interval(state['integer_classes'][j], state['a'], state['b'])
        notes = {key: pending[key] for key in ("lemma_bound", "chain", "k", "l", "m") if key in pending}
        state['steps'].append(_step(state, "cd1", count=count, count_threshold=pending['count_threshold'],
                                    translate=pending.get('translate'), notes=notes))
        state['outcome'] = TraceOutcome(
            status="terminated", final_class=j, count=count, oracle_count=oracle, verified=count == oracle,
        )
        logger.info(f"zp trace ended in cd1 at step {state['step']} with {count} solutions")
    else:
        state['steps'].append(_step(state, "flagged"))
        logger.warning(f"zp trace flagged: {state['outcome'].reason}")
    return state


def _step(state: ZpTraceState, case: str, **fields) -> TraceStep:
    return TraceStep(
        step=state['step'], case=case, chosen_class=state['chosen_class'], s_row=state['s_row'],
        structure_size=state['bohr'].size, frequencies=list(state['frequencies']), width=state['width'],
        **fields,
    )


def _advance(state: ZpTraceState, case: str, new_bohr: BohrSet, before: float, after: float, notes: dict):
    pending = state['pending']
    nested = new_bohr.members.issubset(state['bohr'].members)
    state['steps'].append(_step(
        state, case, count=pending['count'], count_threshold=pending['count_threshold'],
        translate=pending.get('translate'), density_before=before, density_after=after, nested=nested,
        notes={"chain": pending.get('chain'), "k": pending.get('k'), "l": pending.get('l'),
               "m": pending.get('m'), **notes},
    ))
    state['processing_log'].append(
        f"step {state['step']}: {case} for class {state['chosen_class']}, S {before:.4f} -> {after:.4f}, "
        f"d {len(state['frequencies'])} -> {new_bohr.d}"
    )
    state['bohr'] = new_bohr
    state['frequencies'] = list(new_bohr.frequencies)
    state['width'] = new_bohr.width
    state['chain'] = []
    state['step'] += 1
    state['case'] = case


def _flag(state: ZpTraceState, reason: str, error: RadoError | None = None) -> None:
    logger.warning(f"zp trace flagged at step {state['step']}: {reason}")
    state['case'] = "flagged"
    state['outcome'] = TraceOutcome(
        status="flagged",
        reason=reason,
        state_dump={
            "step": state['step'],
            "frequencies": state['frequencies'],
            "width": state['width'],
            "bohr_size": state['bohr'].size,
            "s_row": state['s_row'],
            "chosen_class": state['chosen_class'],
            "gain_counts": state['gain_counts'],
            "error": type(error).__name__ if error else None,
            "details": {key: str(value) for key, value in (error.details if error else {}).items()},
            "processing_log": state['processing_log'],
        },
    )


def route_after_count(state: ZpTraceState) -> str:
    return "chain" if state['case'] is None else "finalize"


def route_after_chain(state: ZpTraceState) -> str:
    return "finalize" if state['case'] == "flagged" else "increment"


def route_after_increment(state: ZpTraceState) -> str:
    return "measure" if state['case'] in ("cd0", "cd2") else "finalize"


# === GRAPH CONSTRUCTION ===

def create_zp_graph() -> StateGraph:
    """
    Create the Bohr-set iteration workflow.

    Flow:
    1. Measure the S-row on B(Gamma_i, delta_i)
    2. Check the cd1 count threshold
    3. Build the regular chain and choose a class
    4. Take the cd0 or iteration-step branch and loop back to 1
    5. Finalize with the oracle-checked count or a flag

    Returns:
        Compiled StateGraph ready for execution
    """
    workflow = StateGraph(ZpTraceState)

    workflow.add_node("measure", measure_node)
    workflow.add_node("count_check", count_check_node)
    workflow.add_node("chain", chain_node)
    workflow.add_node("increment", increment_node)
    workflow.add_node("finalize", finalize_node)

    workflow.set_entry_point("measure")
    workflow.add_edge("measure", "count_check")
    workflow.add_conditional_edges("count_check", route_after_count, {"chain": "chain", "finalize": "finalize"})
    workflow.add_conditional_edges("chain", route_after_chain, {"increment": "increment", "finalize": "finalize"})
    workflow.add_conditional_edges(
        "increment", route_after_increment, {"measure": "measure", "finalize": "finalize"}
    )
    workflow.add_edge("finalize", END)

    return workflow.compile()


def zp_iterate(
    colouring: IntervalColouring,
    a: int,
    b: int,
    config: ZpConfig | None = None,
) -> TraceRecord:
    """
    Run the Bohr-set iteration on a colouring of {-N..N} (a colouring of [N] is lifted first).

    Raises:
        InputError: for a zero coefficient or an empty colouring
        VerificationFailed: if the finished trace breaks one of its invariants
    """
    config = config or ZpConfig()
    if not colouring.signed:
        colouring = lift_colouring(colouring)
    if colouring.r == 0:
        raise InputError("a colouring needs at least one class")
    p, bohr = embed_interval(colouring.n, a, b)
    group = bohr.group
    integer_classes = [sorted(members) for members in colouring.classes]
    classes = [GroupSubset.from_members(group, members) for members in integer_classes]

    r = len(classes)
    bound = gain_bound(r, config.book)
    initial_state = create_zp_state(
        group=group, classes=classes, integer_classes=integer_classes, n=colouring.n,
        a=a, b=b, bohr=bohr, config=config,
    )
    graph = create_zp_graph()
    final_state = graph.invoke(initial_state, {"recursion_limit": 5 * (r * (bound + 1) + 2) + 10})

    record = TraceRecord(
        kind="zp",
        parameters={
            "N": colouring.n, "p": p, "r": r, "a": a, "b": b,
            **config.model_dump(exclude={"book", "a", "b", "n"}), "book": config.book.digest(),
        },
        steps=final_state['steps'],
        outcome=final_state['outcome'],
        gain_counts=final_state['gain_counts'],
        gain_bound=bound,
    )
    is_valid, errors = TraceValidator().validate(record)
    if not is_valid:
        raise VerificationFailed(f"zp trace breaks its invariants: {'; '.join(errors)}", errors=errors)
    return record
