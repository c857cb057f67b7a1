"""Spectral positivity: a deviation of the difference-function mass on D forces a large L_2k norm."""
import math

import numpy as np
from loguru import logger

from src.applemmas.constants import ConstantBook, DEFAULT_BOOK
from src.applemmas.verdicts import LemmaVerdict
from src.config import COMPLEX_TOL
from src.errors import ContractError, InputError
from src.harmonics.fourier import (
    autocorrelation,
    convolve,
    dft,
    difference_set,
    inner,
    is_positive_definite,
    lp_norm,
    sumset,
)
from src.harmonics.groups import DensityWeight, GroupSubset
from src.validation.validator import HypothesisValidator


def balanced_spectrum(A: GroupSubset, B0: GroupSubset) -> np.ndarray:
    """Fourier transform of (1_{A'} - alpha 1_{B0}) * (1_{-A'} - alpha 1_{-B0}) with A' = A n B0."""
    group = A.group
    inside = A & B0
    alpha = inside.size / B0.size
    balanced = inside.indicator - alpha * B0.indicator
    reflected = balanced[group.neg_index()]
    return dft(convolve(balanced, reflected, group), group)


def verify_specpos(
    A: GroupSubset,
    B0: GroupSubset,
    B1: GroupSubset,
    mu: DensityWeight,
    D: GroupSubset,
    k: int,
    epsilon: float,
    eta: float,
    book: ConstantBook = DEFAULT_BOOK,
    seed: int | None = None,
) -> LemmaVerdict:
    """
    Check ||1_{A'} * 1_{-A'}||_{L_2k(mu)} >= ((1 + eps)(delta/2)^{1/2k} - C eta / alpha) alpha^2 mu(B0).

    Here A' = A n B0, alpha = mu_{B0}(A) and delta = mu(D). The hypotheses
    are that B1 barely grows B0, mu is positive definite and supported on
    B1 - B1, and the mass of the difference function on D deviates from
    delta alpha^2 mu(B0) by at least eps delta alpha^2 mu(B0).

    Raises:
        InputError: for out-of-range parameters
        HypothesisFail: when a measured hypothesis does not hold
        ContractError: when the balanced function has a negative Fourier coefficient
    """
    if k < 1:
        raise InputError(f"k must be a positive integer, got {k}")
    if not 0 < epsilon <= 1 or not 0 < eta <= 1:
        raise InputError(f"epsilon and eta must lie in (0, 1], got {epsilon}, {eta}")
    if B0.is_empty():
        raise InputError("B0 must be nonempty")

    group = A.group
    inside = A & B0
    alpha = inside.size / B0.size
    delta = mu.mass(D)
    scale = alpha**2 * B0.density
    difference = autocorrelation(inside)
    correlation = inner(difference, D.indicator, mu)
    deviation = abs(correlation - delta * scale)

    validator = HypothesisValidator("specpos")
    validator.require("alpha", alpha, ">=", COMPLEX_TOL)
    validator.require("delta", delta, ">=", COMPLEX_TOL)
    validator.require("B1 + B0 growth", sumset(B1, B0).size / B0.size, "<=", 1 + eta)
    validator.require_true("mu positive definite", is_positive_definite(mu))
    validator.require_true("mu supported on B1 - B1", mu.support().issubset(difference_set(B1, B1)))
    validator.require("deviation on D", deviation, ">=", epsilon * delta * scale)
    checks = validator.raise_if_failed()

    spectrum = balanced_spectrum(A, B0)
    lowest = float(spectrum.real.min())
    if lowest < -COMPLEX_TOL or np.abs(spectrum.imag).max() > COMPLEX_TOL:
        raise ContractError(
            f"balanced difference function has a Fourier coefficient {lowest} below zero",
            group=group.label,
        )

    lhs = lp_norm(difference, mu, 2 * k)
    rhs = ((1 + epsilon) * (delta / 2) ** (1 / (2 * k)) - book.C_specpos * eta / alpha) * scale
    logger.debug(f"specpos: norm {lhs:.6g} against {rhs:.6g} (k={k}, delta={delta:.4g})")
    return LemmaVerdict.conclude(
        "specpos", checks, lhs=lhs, rhs=rhs, book=book, seed=seed,
        alpha=alpha, delta=delta, k=k, correlation=correlation,
        relative_deviation=deviation / (delta * scale), lowest_coefficient=lowest,
        normalised=lhs / scale if scale else math.inf,
    )
