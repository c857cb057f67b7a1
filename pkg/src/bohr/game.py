"""Hereditary density as a matrix game: min over measures nu on a support of ||1_A * nu||_inf."""
from fractions import Fraction
from typing import Literal

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field
from scipy.optimize import linprog
from sympy import Matrix, Rational

from src.applemmas.constants import ConstantBook, DEFAULT_BOOK
from src.applemmas.verdicts import LemmaVerdict
from src.config import EXACT_GAME_SUPPORT, GAME_GAP_TOL
from src.errors import ContractError, InputError
from src.harmonics.fourier import difference_set, smooth, sumset, sup_norm
from src.harmonics.groups import DensityWeight, GroupSubset
from src.validation.validator import HypothesisValidator

DENOMINATOR_CAPS = (10**3, 10**6, 10**9)
ACTIVE_TOL = 1e-9


class GameValue(BaseModel):
    """Value of the game with a primal measure nu (upper bound) and a dual distribution (lower bound)."""

    value: float
    exact: str | None = None
    lower: float
    upper: float
    gap: float
    method: Literal["trivial", "exact", "approximate"]
    nu: dict[int, float] = Field(default_factory=dict)
    dual: dict[int, float] = Field(default_factory=dict)

    @property
    def fraction(self) -> Fraction | None:
        return Fraction(self.exact) if self.exact is not None else None

    def measure(self, support: GroupSubset) -> DensityWeight:
        """The optimal nu as a weight table on the group."""
        weights = np.zeros(support.group.order)
        for x, w in self.nu.items():
            weights[x] = w
        return DensityWeight(group=support.group, weights=weights / weights.sum())


def _payoff(A: GroupSubset, columns: list[int]) -> tuple[np.ndarray, list[int]]:
    """Rows y in A + support with M[y, x] = 1_A(y - x)."""
    full = np.stack([A.translate(x).mask for x in columns], axis=1)
    rows = np.flatnonzero(full.any(axis=1))
    return full[rows].astype(np.int64), [int(y) for y in rows]


def _exact_sums(M: np.ndarray, nu: list[Fraction], w: list[Fraction]) -> tuple[Fraction, Fraction]:
    """Exact max_y (M nu)_y and min_x (w M)_x."""
    nu_support = [i for i, v in enumerate(nu) if v]
    w_support = [i for i, v in enumerate(w) if v]
    upper = max(sum((nu[i] for i in nu_support if M[y, i]), Fraction(0)) for y in range(M.shape[0]))
    lower = min(sum((w[y] for y in w_support if M[y, i]), Fraction(0)) for i in range(M.shape[1]))
    return upper, lower


def _rationalise(values: np.ndarray, cap: int) -> list[Fraction] | None:
    fractions = [Fraction(float(max(v, 0.0))).limit_denominator(cap) for v in values]
    total = sum(fractions)
    if total == 0:
        return None
    return [f / total for f in fractions]


def _vertex_solve(M: np.ndarray, active_cols: list[int], active_rows: list[int], transpose: bool):
    """
    Solve the equalising system on the active strategies exactly.

    For the primal (transpose=False): sum_{x in S} M[y, x] nu_x = v for y in R, sum nu = 1.
    """
    n_vars = len(active_cols)
    eqs = []
    for y in active_rows:
        row = [Rational(int(M[y, x] if not transpose else M[x, y])) for x in active_cols] + [Rational(-1)]
        eqs.append(row)
    eqs.append([Rational(1)] * n_vars + [Rational(0)])
    rhs = Matrix([0] * len(active_rows) + [1])
    try:
        solution, params = Matrix(eqs).gauss_jordan_solve(rhs)
    except ValueError:
        return None
    if params.shape[0]:
        solution = solution.subs({p: 0 for p in params})
    values = [Fraction(int(s.p), int(s.q)) for s in solution[:n_vars]]
    if any(v < 0 for v in values):
        return None
    return values


def _certify_exact(M: np.ndarray, nu_f: np.ndarray, w_f: np.ndarray):
    """Try to turn the float optimum into an exact rational saddle point."""
    for cap in DENOMINATOR_CAPS:
        nu = _rationalise(nu_f, cap)
        w = _rationalise(w_f, cap)
        if nu is None or w is None:
            continue
        upper, lower = _exact_sums(M, nu, w)
        if upper == lower:
            logger.debug(f"Exact game value {upper} certified at denominator cap {cap}")
            return upper, nu, w

    cols = [i for i, v in enumerate(nu_f) if v > ACTIVE_TOL]
    rows = [y for y, v in enumerate(w_f) if v > ACTIVE_TOL]
    nu_active = _vertex_solve(M, cols, rows, transpose=False)
    w_active = _vertex_solve(M, rows, cols, transpose=True)
    if nu_active is None or w_active is None:
        return None
    nu = [Fraction(0)] * M.shape[1]
    for i, v in zip(cols, nu_active):
        nu[i] = v
    w = [Fraction(0)] * M.shape[0]
    for y, v in zip(rows, w_active):
        w[y] = v
    upper, lower = _exact_sums(M, nu, w)
    if upper == lower:
        logger.debug(f"Exact game value {upper} certified from the active vertex")
        return upper, nu, w
    return None


def game_density(A: GroupSubset, support: GroupSubset) -> GameValue:
    """
    min over probability measures nu on support of max_y sum_x nu(x) 1_A(y - x).

    Solved as a linear program with HiGHS. For supports of at most
    EXACT_GAME_SUPPORT points the optimum is certified as an exact rational
    saddle point; otherwise the value is the primal upper bound, with the dual
    lower bound and a duality gap of at most GAME_GAP_TOL.

    Raises:
        InputError: if the support is empty
        ContractError: if the solver fails or the gap exceeds GAME_GAP_TOL
    """
    if support.is_empty():
        raise InputError("game density over an empty support")
    columns = support.members()

    if A.is_empty() or A.size == A.group.order:
        value = 0.0 if A.is_empty() else 1.0
        return GameValue(
            value=value, exact=str(Fraction(int(value))), lower=value, upper=value, gap=0.0,
            method="trivial", nu={columns[0]: 1.0},
        )

    M, rows = _payoff(A, columns)
    m = len(columns)
    c = np.zeros(m + 1)
    c[-1] = 1.0
    A_ub = np.hstack([M.astype(np.float64), -np.ones((M.shape[0], 1))])
    b_ub = np.zeros(M.shape[0])
    A_eq = np.hstack([np.ones((1, m)), np.zeros((1, 1))])
    bounds = [(0, None)] * m + [(0, 1)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=bounds, method="highs")
    if not res.success:
        raise ContractError(f"game LP failed: {res.message}")

    nu_f = np.clip(res.x[:m], 0.0, None)
    nu_f = nu_f / nu_f.sum()
    w_f = np.clip(-res.ineqlin.marginals, 0.0, None)
    w_f = w_f / w_f.sum() if w_f.sum() > 0 else np.full(len(rows), 1.0 / len(rows))

    if m <= EXACT_GAME_SUPPORT:
        certified = _certify_exact(M, nu_f, w_f)
        if certified is not None:
            value, nu, w = certified
            return GameValue(
                value=float(value), exact=str(value), lower=float(value), upper=float(value),
                gap=0.0, method="exact",
                nu={columns[i]: float(v) for i, v in enumerate(nu) if v},
                dual={rows[y]: float(v) for y, v in enumerate(w) if v},
            )
        logger.warning(f"exact certification failed on a support of {m} points; reporting the float bracket")

    upper = float(np.max(M @ nu_f))
    lower = float(np.min(w_f @ M))
    gap = upper - lower
    if gap > GAME_GAP_TOL:
        raise ContractError(f"game duality gap {gap} exceeds {GAME_GAP_TOL}")
    return GameValue(
        value=upper, lower=lower, upper=upper, gap=gap, method="approximate",
        nu={columns[i]: float(v) for i, v in enumerate(nu_f) if v > 0},
        dual={rows[y]: float(v) for y, v in enumerate(w_f) if v > 0},
    )


def hereditary_density_check(
    A: GroupSubset,
    B0: GroupSubset,
    B1: GroupSubset,
    eta: float,
    book: ConstantBook = DEFAULT_BOOK,
) -> LemmaVerdict:
    """
    Compare game_density(A, B1 - B1) with ||1_A * mu_B0||_inf - 2 eta.

    Requires mu(B0 + B1) <= (1 + eta) mu(B0).
    """
    validator = HypothesisValidator("hereditary")
    validator.require("B0 + B1 growth", sumset(B0, B1).size / B0.size, "<=", 1 + eta)
    checks = validator.raise_if_failed()

    game = game_density(A, difference_set(B1, B1))
    alpha = sup_norm(smooth(A.indicator, DensityWeight.uniform_on(B0)))
    return LemmaVerdict.conclude(
        "hereditary", checks, lhs=game.value, rhs=alpha - 2 * eta, book=book,
        game_method=game.method, game_gap=game.gap, sup_density=alpha,
    )
