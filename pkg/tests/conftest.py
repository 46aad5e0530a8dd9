"""Shared fixtures and independent integration oracles.

The oracle helpers integrate on a dense uniform grid with the trapezoid
rule and re-derive every density from scratch, so they share no code path
with the package quadrature they are used to check.
"""

import math

import numpy as np
import pytest

from dabawgn import AwgnChannel, FinitePmf


def gaussian_pdf(y, x, noise_power):
    return np.exp(-((y - x) ** 2) / (2.0 * noise_power)) / math.sqrt(
        2.0 * math.pi * noise_power
    )


def kl_trapezoid(x, pmf: FinitePmf, noise_power: float, points: int = 200_001,
                 half_width_sigmas: float = 12.0) -> float:
    """D(p(y|x) || p(y)) in bits by brute-force trapezoid integration."""
    sigma = math.sqrt(noise_power)
    y = np.linspace(x - half_width_sigmas * sigma, x + half_width_sigmas * sigma, points)
    cond = gaussian_pdf(y, x, noise_power)
    mix = np.zeros_like(y)
    for xi, pi in zip(pmf.locations, pmf.probabilities):
        mix += pi * gaussian_pdf(y, xi, noise_power)
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = np.where(
            cond > 1e-300, cond * (np.log2(cond) - np.log2(mix)), 0.0
        )
    return float(np.trapezoid(integrand, y))


def mi_trapezoid(pmf: FinitePmf, noise_power: float, points: int = 200_001) -> float:
    """Mutual information in bits from the brute-force KL oracle."""
    return float(
        sum(
            pi * kl_trapezoid(xi, pmf, noise_power, points)
            for xi, pi in zip(pmf.locations, pmf.probabilities)
        )
    )


def dense_grid_ba_capacity(ch, grid_points=201):
    """Capacity of the grid-restricted channel by plain Blahut-Arimoto.

    Runs a bounded pass on the full grid, prunes dead grid points, converges
    tightly on the survivors, and returns (mi, certificate) where the
    certificate bounds how far mi sits below the exact grid-restricted
    capacity (relative-entropy upper bound over the full grid).
    """
    import dabawgn as dw

    grid = np.linspace(-1.0, 1.0, grid_points)
    try:
        coarse = dw.ba_fixed_support(
            grid, ch, opts=dw.BaOptions(tol=1e-6, max_iters=1200)
        )
    except dw.MaxItersExceeded as err:
        coarse = err.outcome
    keep = coarse.probabilities > 1e-9
    init = coarse.probabilities[keep]
    try:
        fine = dw.ba_fixed_support(
            grid[keep],
            ch,
            opts=dw.BaOptions(tol=1e-8, max_iters=20_000),
            init_probabilities=init / init.sum(),
        )
    except dw.MaxItersExceeded as err:
        fine = err.outcome
    pmf = dw.FinitePmf(grid[keep], fine.probabilities)
    profile = dw.relative_entropy_profile(grid, pmf, ch)
    certificate = float(profile.max()) - fine.mutual_information
    return fine.mutual_information, certificate


@pytest.fixture
def bpsk():
    return FinitePmf([-1.0, 1.0], [0.5, 0.5])


@pytest.fixture
def channel_quarter():
    return AwgnChannel(0.25)
