"""Closed-form and classical reference curves."""

import math

import numpy as np

from .numerics import (
    DEFAULT_QUADRATURE,
    AwgnChannel,
    FinitePmf,
    QuadratureScheme,
    mutual_information,
)


def shannon_capacity_bits(snr_linear: float) -> float:
    """Gaussian-input capacity 0.5 * log2(1 + SNR) of the power-constrained channel."""
    if snr_linear < 0.0:
        raise ValueError("snr_linear must be nonnegative")
    return 0.5 * math.log2(1.0 + snr_linear)


def equilattice(cardinality: int, power_limit: float) -> FinitePmf:
    """Equiprobable, equally spaced points with the widest spacing that
    meets the power budget exactly (classic uniform PAM)."""
    if cardinality < 2:
        raise ValueError("an equilattice needs at least two points")
    if not power_limit > 0.0:
        raise ValueError("power_limit must be positive")
    spacing = math.sqrt(12.0 * power_limit / (cardinality**2 - 1))
    locations = spacing * (np.arange(cardinality) - (cardinality - 1) / 2.0)
    probabilities = np.full(cardinality, 1.0 / cardinality)
    return FinitePmf(locations, probabilities)


def equilattice_rate(
    cardinality: int,
    ch: AwgnChannel,
    power_limit: float,
    q: QuadratureScheme = DEFAULT_QUADRATURE,
) -> float:
    """Information rate of the equilattice over the channel, in bits."""
    return mutual_information(equilattice(cardinality, power_limit), ch, q)
