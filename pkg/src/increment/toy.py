"""Subspace density-increment tracer for colourings of F_q^n."""
import json
import math
from pathlib import Path

import numpy as np
from langgraph.graph import END, StateGraph
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from src.applemmas.constants import ConstantBook, DEFAULT_BOOK
from src.config import COMPLEX_TOL, DEFAULT_SEED, TOY_BREADTH, TOY_CODIM_BUDGET
from src.errors import ContractError, InputError, VerificationFailed
from src.harmonics.fourier import count_triples, dft, enumerate_triples, integer_convolve
from src.harmonics.groups import FiniteGroup, GroupSubset, dilate
from src.increment.records import TraceOutcome, TraceRecord, TraceStep
from src.state import ToyTraceState, create_toy_state
from src.validation.validator import TraceValidator


class ToyConfig(BaseModel):
    """Tracer settings; flags override a config file, which overrides these defaults."""

    model_config = ConfigDict(extra="forbid")

    q: int = Field(default=3, ge=2)
    n: int = Field(default=4, ge=1)
    colours: int = Field(default=2, ge=1)
    seed: int = DEFAULT_SEED
    a: int = 1
    b: int = 1
    breadth: int = Field(default=TOY_BREADTH, ge=1, description="spectral candidates per kernel step")
    codim_budget: int = Field(default=TOY_CODIM_BUDGET, ge=1, description="codimension allowed per increment")
    book: ConstantBook = Field(default_factory=lambda: DEFAULT_BOOK)

    @classmethod
    def load(cls, path: str | Path | None, **overrides) -> "ToyConfig":
        """Read a JSON config (or start from defaults) and apply non-None overrides."""
        payload = json.loads(Path(path).read_text()) if path else {}
        payload.update({key: value for key, value in overrides.items() if value is not None})
        return cls.model_validate(payload)


def gain_bound(r: int, book: ConstantBook = DEFAULT_BOOK) -> int:
    """ceil(log 2r / log(1 + c32)) + 1 gains of factor 1 + c32 fit between 1/2r and 1."""
    return math.ceil(math.log(2 * r) / math.log1p(book.c32)) + 1


def colouring_from_labels(group: FiniteGroup, labels) -> list[GroupSubset]:
    """Colour classes from one label per element, dropping labels that are never used."""
    labels = np.asarray(labels)
    if labels.shape != (group.order,):
        raise InputError(f"expected {group.order} labels, got {labels.shape}")
    return [GroupSubset(group=group, mask=labels == c) for c in np.unique(labels)]


def random_colouring(group: FiniteGroup, colours: int, seed: int = DEFAULT_SEED) -> list[GroupSubset]:
    rng = np.random.default_rng(seed)
    return colouring_from_labels(group, rng.integers(0, colours, size=group.order))


def flag_colouring(group: FiniteGroup, depth: int) -> list[GroupSubset]:
    """
    Classes {x_1 = ... = x_{t-1} = 0, x_t = c} for t <= depth and c != 0, plus the
    subspace {x_1 = ... = x_depth = 0}.

    Only the last class has solutions of x - y = z, so for depth 3 over F_3 the
    count threshold fails at V = G and the trace must pass to a subspace first.
    """
    if not 1 <= depth <= group.n:
        raise InputError(f"depth must lie in [1, {group.n}], got {depth}")
    coords = group.coords
    classes = []
    for t in range(depth):
        prefix = np.all(coords[:, :t] == 0, axis=1)
        for c in range(1, group.q):
            classes.append(GroupSubset(group=group, mask=prefix & (coords[:, t] == c)))
    classes.append(GroupSubset(group=group, mask=np.all(coords[:, :depth] == 0, axis=1)))
    return classes


def coset_densities(A: GroupSubset, V: GroupSubset) -> np.ndarray:
    """|A n (x + V)| / |V| for every x, i.e. 1_A * mu_V for a subgroup V."""
    return integer_convolve(A.mask, V.mask, A.group) / V.size


def kernel(group: FiniteGroup, u: int) -> GroupSubset:
    return GroupSubset(group=group, mask=group.frequency_phases(u) == 0)


def codimension(group: FiniteGroup, V: GroupSubset) -> int:
    return round(math.log(group.order / V.size, group.q))


class SpectralIncrement(BaseModel):
    """A subspace V' <= V on one of whose cosets A is denser by the factor 1 + c32."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    subspace: GroupSubset = Field(exclude=True)
    frequencies: list[int]
    codimension: int
    density: float
    previous: float
    coset: int


def spectral_increment(
    A: GroupSubset,
    V: GroupSubset,
    budget: int = TOY_CODIM_BUDGET,
    book: ConstantBook = DEFAULT_BOOK,
    breadth: int = TOY_BREADTH,
) -> SpectralIncrement | None:
    """
    Search for V' <= V with ||1_A * mu_V'||_inf >= (1 + c32) mu_V(A).

    Candidates are the characters nontrivial on V with the largest
    |(1_A dmu_V)^(u)|, one per kernel inside V. Kernels are intersected
    greedily, each time keeping the candidate whose kernel gives the densest
    coset, until the target is met or the codimension budget is spent.

    Raises:
        InputError: if A is not a subset of V
        ContractError: if the winning coset density does not re-count
    """
    if not A.issubset(V):
        raise InputError("spectral increment expects A inside V")
    group = A.group
    alpha = A.size / V.size
    if alpha == 0:
        return None
    target = (1 + book.c32) * alpha

    coefficients = np.abs(dft(A.indicator, group)) * group.order / V.size
    candidates: list[int] = []
    seen: set[bytes] = set()
    for u in sorted(range(group.order), key=lambda u: (-coefficients[u], u)):
        if len(candidates) >= breadth or coefficients[u] <= COMPLEX_TOL:
            break
        cut = kernel(group, u).mask[V.mask]
        if cut.all() or cut.tobytes() in seen:
            continue
        seen.add(cut.tobytes())
        candidates.append(u)

    W, chosen = V, []
    for _ in range(budget):
        best = None
        for u in candidates:
            if u in chosen:
                continue
            trial = W & kernel(group, u)
            if trial == W:
                continue
            densities = coset_densities(A, trial)
            if best is None or densities.max() > best[2].max() + COMPLEX_TOL:
                best = (u, trial, densities)
        if best is None:
            break
        u, W, densities = best
        chosen.append(u)
        density = float(densities.max())
        logger.debug(f"spectral increment: kernel of {u} gives density {density:.4f} (target {target:.4f})")
        if density >= target - COMPLEX_TOL:
            coset = int(np.argmax(densities))
            recount = (A & W.translate(coset)).size / W.size
            if abs(recount - density) > COMPLEX_TOL:
                raise ContractError(f"coset density {density} re-counts as {recount}", coset=coset)
            return SpectralIncrement(
                subspace=W, frequencies=chosen, codimension=codimension(group, W) - codimension(group, V),
                density=density, previous=alpha, coset=coset,
            )
    return None


# === NODE FUNCTIONS ===

def measure_node(state: ToyTraceState) -> ToyTraceState:
    """Measure S_{i,j} = ||1_{a.A_j} * mu_{V_i}||_inf for every class."""
    V = state['subspace']
    state['s_row'] = [
        float(coset_densities(dilate(A_j, state['a']), V).max()) for A_j in state['classes']
    ]
    if not state['counts']:
        state['counts'] = [count_triples(A_j, state['a'], state['b']) for A_j in state['classes']]
    logger.info(f"toy step {state['step']}: codim {codimension(state['group'], V)}, S = "
                f"{[round(s, 4) for s in state['s_row']]}")
    return state


def count_check_node(state: ToyTraceState) -> ToyTraceState:
    """
    Case (1): some class has at least mu(V_i)^2 / 2r^3 |G|^2 solutions.

    Otherwise pick the class with the largest mu_{V_i}(b.A_j), ties to the
    smallest index, for the increment.
    """
    group, V, classes = state['group'], state['subspace'], state['classes']
    r = len(classes)
    threshold = V.density**2 / (2 * r**3) * group.order**2
    best = max(range(r), key=lambda j: (state['counts'][j], -j))
    state['pending'] = {"count_threshold": threshold, "count": state['counts'][best]}

    if state['counts'][best] >= threshold:
        state['case'] = "case1"
        state['chosen_class'] = best
        state['processing_log'].append(f"step {state['step']}: case 1 with class {best}")
        return state

    limit = r * gain_bound(r, state['config'].book) + 1
    if state['step'] >= limit:
        state['case'] = "flagged"
        state['outcome'] = TraceOutcome(
            status="flagged", reason=f"step budget of {limit} exhausted", state_dump=_dump(state),
        )
        return state

    shares = [dilate(A_j, state['b']).density_in(V) for A_j in classes]
    state['chosen_class'] = max(range(r), key=lambda j: (shares[j], -j))
    state['case'] = None
    return state


def increment_node(state: ToyTraceState) -> ToyTraceState:
    """Recentre a.A_j at the densest coset of V_i and search for the next subspace."""
    group, V, config = state['group'], state['subspace'], state['config']
    j = state['chosen_class']
    aA = dilate(state['classes'][j], state['a'])
    densities = coset_densities(aA, V)
    x = int(np.argmax(densities))
    A = aA.negate().translate(x) & V

    found = spectral_increment(A, V, config.codim_budget, config.book, config.breadth)
    if found is None:
        logger.warning(f"toy step {state['step']}: no increment within codimension {config.codim_budget}")
        state['case'] = "flagged"
        state['outcome'] = TraceOutcome(
            status="flagged",
            reason=f"increment search exhausted its codimension budget of {config.codim_budget}",
            state_dump=_dump(state) | {"translate": x, "density": A.size / V.size},
        )
        return state

    state['steps'].append(TraceStep(
        step=state['step'], case="increment", chosen_class=j, s_row=state['s_row'],
        structure_size=V.size, codimension=codimension(group, V), translate=x,
        density_before=found.previous, density_after=found.density,
        count=state['pending']['count'], count_threshold=state['pending']['count_threshold'],
        nested=found.subspace.issubset(V), notes={"kernel": found.frequencies},
    ))
    state['gain_counts'][j] += 1
    state['subspace'] = found.subspace
    state['kernel'] = state['kernel'] + found.frequencies
    state['processing_log'].append(
        f"step {state['step']}: class {j} gains {found.previous:.4f} -> {found.density:.4f}"
    )
    state['step'] += 1
    state['case'] = "increment"
    return state


def finalize_node(state: ToyTraceState) -> ToyTraceState:
    """Record the terminal step and cross-check the count against enumeration."""
    V = state['subspace']
    if state['case'] == "case1":
        j = state['chosen_class']
        count = state['counts'][j]
        oracle = enumerate_triples(state['classes'][j], state['a'], state['b'])
        state['steps'].append(TraceStep(
            step=state['step'], case="case1", chosen_class=j, s_row=state['s_row'],
            structure_size=V.size, codimension=codimension(state['group'], V),
            count=count, count_threshold=state['pending']['count_threshold'],
        ))
        state['outcome'] = TraceOutcome(
            status="terminated", final_class=j, count=count, oracle_count=oracle, verified=count == oracle,
        )
        logger.info(f"toy trace ended in case 1 at step {state['step']} with {count} solutions")
    else:
        state['steps'].append(TraceStep(
            step=state['step'], case="flagged", chosen_class=state['chosen_class'], s_row=state['s_row'],
            structure_size=V.size, codimension=codimension(state['group'], V),
        ))
        logger.warning(f"toy trace flagged: {state['outcome'].reason}")
    return state


def _dump(state: ToyTraceState) -> dict:
    return {
        "step": state['step'],
        "kernel": state['kernel'],
        "subspace_size": state['subspace'].size,
        "s_row": state['s_row'],
        "chosen_class": state['chosen_class'],
        "gain_counts": state['gain_counts'],
        "processing_log": state['processing_log'],
    }


def route_after_count(state: ToyTraceState) -> str:
    return "increment" if state['case'] is None else "finalize"


def route_after_increment(state: ToyTraceState) -> str:
    return "finalize" if state['case'] == "flagged" else "measure"


# === GRAPH CONSTRUCTION ===

def create_toy_graph() -> StateGraph:
    """
    Create the subspace-iteration workflow.

    Flow:
    1. Measure the S-row on V_i
    2. Check the case-(1) count threshold, else choose a class
    3. Search for an increment and loop back to 1
    4. Finalize with the oracle-checked count or a flag

    Returns:
        Compiled StateGraph ready for execution
    """
    workflow = StateGraph(ToyTraceState)

    workflow.add_node("measure", measure_node)
    workflow.add_node("count_check", count_check_node)
    workflow.add_node("increment", increment_node)
    workflow.add_node("finalize", finalize_node)

    workflow.set_entry_point("measure")
    workflow.add_edge("measure", "count_check")
    workflow.add_conditional_edges(
        "count_check", route_after_count, {"increment": "increment", "finalize": "finalize"}
    )
    workflow.add_conditional_edges(
        "increment", route_after_increment, {"measure": "measure", "finalize": "finalize"}
    )
    workflow.add_edge("finalize", END)

    return workflow.compile()


def _check_partition(group: FiniteGroup, classes: list[GroupSubset]) -> None:
    if not classes:
        raise InputError("a colouring needs at least one class")
    cover = np.zeros(group.order, dtype=np.int64)
    for A_j in classes:
        if A_j.group != group:
            raise InputError("colour classes live in different groups")
        cover += A_j.mask
    if np.any(cover != 1):
        raise InputError("colour classes must partition the group")


def toy_iterate(
    classes: list[GroupSubset],
    a: int,
    b: int,
    config: ToyConfig | None = None,
) -> TraceRecord:
    """
    Run the subspace iteration on a colouring of F_q^n until case (1) or a flag.

    Raises:
        InputError: for a malformed colouring or non-invertible a, b
        VerificationFailed: if the finished trace breaks one of its invariants
    """
    config = config or ToyConfig()
    group = classes[0].group if classes else None
    if group is None:
        raise InputError("a colouring needs at least one class")
    a, b = group.unit(a), group.unit(b)
    _check_partition(group, classes)

    r = len(classes)
    bound = gain_bound(r, config.book)
    initial_state = create_toy_state(group=group, classes=classes, a=a, b=b, config=config)
    graph = create_toy_graph()
    final_state = graph.invoke(initial_state, {"recursion_limit": 4 * (r * bound + 2) + 10})

    record = TraceRecord(
        kind="toy",
        parameters={
            "group": group.label, "r": r, "a": a, "b": b,
            **config.model_dump(exclude={"book", "a", "b"}), "book": config.book.digest(),
        },
        steps=final_state['steps'],
        outcome=final_state['outcome'],
        gain_counts=final_state['gain_counts'],
        gain_bound=bound,
    )
    is_valid, errors = TraceValidator().validate(record)
    if not is_valid:
        raise VerificationFailed(f"toy trace breaks its invariants: {'; '.join(errors)}", errors=errors)
    return record
