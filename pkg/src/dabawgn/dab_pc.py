"""Dynamic-assignment Blahut-Arimoto under an average-power constraint.

Cardinality is fixed from outside; the solver alternates power-constrained
probability optimization with round-robin moves of symmetric location
pairs.  A move rescales group probabilities so the total probability stays
1 and the realized power stays on the budget; convergence is declared when
the per-iteration rate gain falls below a tolerance, with an iteration cap
as the fallback.  No relative-entropy upper bound is claimed here.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._optim import golden_section_max
from .ba import BaOptions, ba_power_constrained
from .baselines import equilattice
from .errors import InfeasibleFlow, MaxItersExceeded, SecantDivergence
from .numerics import (
    DEFAULT_QUADRATURE,
    AwgnChannel,
    FinitePmf,
    QuadratureScheme,
    mutual_information,
    pmf_power,
)

_ORDER_MARGIN = 1e-11
_SINGULAR_TOL = 1e-14
# Minimum spacing a line search keeps between a moved pair and its
# neighbors (and the origin).  Nearly coincident support points make the
# inner probability problem degenerate at float precision while buying a
# vanishing amount of rate.
_SEPARATION = 1e-4


@dataclass
class DabPcOptions:
    delta_i_tol: float = 1e-5
    max_iters: int = 400
    power_tol: float = 1e-8
    keep_trace: bool = False
    ba: BaOptions = field(default_factory=BaOptions)

    def __post_init__(self):
        if not (self.delta_i_tol > 0.0 and self.power_tol > 0.0 and self.max_iters >= 1):
            raise ValueError("all DabPcOptions fields must be positive")


@dataclass
class FlowDecomposition:
    """Probability and power split into outer / moving-pair / inner groups."""

    p_out: float
    p_move: float
    p_in: float
    e_out: float
    e_move: float
    e_in: float


@dataclass
class DabPcResult:
    pmf: FinitePmf
    rate: float
    iterations: int
    converged_by: str
    lagrange_multiplier: float
    realized_power: float
    symmetry_gap: float
    mi_trace: list = field(default=None, repr=False)


def _pair_indices(cardinality: int, j: int):
    if not 0 <= j < cardinality // 2:
        raise ValueError(f"pair index {j} out of range for cardinality {cardinality}")
    return j, cardinality - 1 - j


def decompose_flow(pmf: FinitePmf, pair_index: int) -> FlowDecomposition:
    """Group probabilities and second moments around one symmetric pair.

    The moving pair's power uses the shared location magnitude, so the two
    pair locations must mirror each other.
    """
    j, mirror = _pair_indices(pmf.cardinality, pair_index)
    locs = pmf.locations
    probs = pmf.probabilities
    if abs(locs[j] + locs[mirror]) > 1e-9:
        raise ValueError("pair locations must be symmetric about 0")
    outer = np.r_[0:j, mirror + 1 : pmf.cardinality]
    inner = np.r_[j + 1 : mirror]
    p_move = float(probs[j] + probs[mirror])
    magnitude = float(locs[mirror])
    return FlowDecomposition(
        p_out=float(probs[outer].sum()),
        p_move=p_move,
        p_in=float(probs[inner].sum()),
        e_out=float(probs[outer] @ (locs[outer] * locs[outer])),
        e_move=p_move * magnitude * magnitude,
        e_in=float(probs[inner] @ (locs[inner] * locs[inner])),
    )


def _solve_two_by_two(a11, a12, a21, a22, b1, b2):
    det = a11 * a22 - a12 * a21
    scale = max(abs(a11 * a22), abs(a12 * a21), 1e-30)
    if abs(det) <= _SINGULAR_TOL * scale:
        raise InfeasibleFlow("flow system is singular")
    return (b1 * a22 - b2 * a12) / det, (a11 * b2 - a21 * b1) / det


def power_preserving_move(
    pmf: FinitePmf,
    pair,
    new_pair_locations,
    power_limit: float,
) -> FinitePmf:
    """Move one symmetric pair and rescale group probabilities so the pmf
    still sums to 1 with power exactly ``power_limit``.

    For interior pairs the probability flows to or from the outer points;
    for the outermost pair it flows through the inner points instead.
    Raises InfeasibleFlow when the 2x2 system is singular or a scale factor
    would go negative.
    """
    j, mirror = pair
    n = pmf.cardinality
    if mirror != n - 1 - j or not 0 <= j < mirror:
        raise ValueError("pair must be (j, cardinality - 1 - j) with j < mirror")
    new_lo, new_hi = float(new_pair_locations[0]), float(new_pair_locations[1])
    if abs(new_lo + new_hi) > 1e-9:
        raise ValueError("new pair locations must be symmetric about 0")
    locs = pmf.locations.copy()
    locs[j] = new_lo
    locs[mirror] = new_hi
    if np.any(np.diff(locs) <= 0.0):
        raise ValueError("new pair locations break the location ordering")

    flow = decompose_flow(pmf, j)
    t_sq = new_hi * new_hi
    # Solve for the moving pair's total mass directly: the scale-factor
    # form alpha_move * p_move is catastrophically ill-conditioned when the
    # pair's current mass is (near) zero, while the system in the total
    # mass stays well-scaled and can even revive a dead pair.
    pair_old = flow.p_move
    if pair_old > 0.0:
        ratio = pmf.probabilities[j] / pair_old
    else:
        ratio = 0.5

    def snapped_magnitude(pair_mass, power_for_pair):
        # A degenerate companion group leaves exactly one feasible
        # magnitude; accept nearby requests and snap onto it.
        if pair_mass <= 0.0 or power_for_pair < 0.0:
            raise InfeasibleFlow("degenerate flow cannot meet the power budget")
        t_exact = math.sqrt(power_for_pair / pair_mass)
        if abs(t_exact - new_hi) > 1e-6:
            raise InfeasibleFlow(
                "degenerate flow admits only one pair magnitude, "
                f"{t_exact:.12g}, not {new_hi:.12g}"
            )
        locs[j] = -t_exact
        locs[mirror] = t_exact
        if np.any(np.diff(locs) <= 0.0):
            raise InfeasibleFlow("snapped pair magnitude breaks the ordering")
        return t_exact * t_exact

    probs = pmf.probabilities.copy()
    if j == 0:
        # Outermost pair: no outer group, flow through the inner points.
        if flow.p_in <= 0.0:
            pair_mass = 1.0
            t_sq = snapped_magnitude(pair_mass, power_limit)
            alpha_in = 1.0
        else:
            pair_mass, alpha_in = _solve_two_by_two(
                1.0, flow.p_in, t_sq, flow.e_in, 1.0, power_limit
            )
        if pair_mass < 0.0 or alpha_in < 0.0:
            raise InfeasibleFlow("negative mass in outermost-pair flow")
        probs[j + 1 : mirror] *= alpha_in
    else:
        b1 = 1.0 - flow.p_in
        b2 = power_limit - flow.e_in
        if flow.p_out <= 0.0:
            # Dead outer group: the power equation pins the magnitude.
            pair_mass = b1
            t_sq = snapped_magnitude(pair_mass, b2 - flow.e_out)
            alpha_out = 1.0
        else:
            alpha_out, pair_mass = _solve_two_by_two(
                flow.p_out, 1.0, flow.e_out, t_sq, b1, b2
            )
        if alpha_out < 0.0 or pair_mass < 0.0:
            raise InfeasibleFlow("negative probability scale in pair flow")
        probs[:j] *= alpha_out
        probs[mirror + 1 :] *= alpha_out
    probs[j] = pair_mass * ratio
    probs[mirror] = pair_mass * (1.0 - ratio)

    total = float(probs.sum())
    power = float(probs @ (locs * locs))
    if abs(total - 1.0) > 1e-12 or abs(power - power_limit) > 1e-12 * max(
        1.0, power_limit
    ):
        raise InfeasibleFlow(
            "flow system too ill-conditioned to satisfy the constraints exactly"
        )
    return FinitePmf(locs, probs)


def round_robin_pairs(cardinality: int):
    """Yield pair indices 0, 1, ..., floor(n/2) - 1 forever.

    The center point of an odd cardinality is never part of a pair.
    """
    if cardinality < 2:
        raise ValueError("need at least two mass points to form a pair")
    while True:
        yield from range(cardinality // 2)


def _pair_line_search(pmf, pair_index, ch, power_limit, q, current_rate):
    """Best power-preserving displacement of one pair; None if no candidate
    beats the current rate."""
    j, mirror = _pair_indices(pmf.cardinality, pair_index)
    locs = pmf.locations
    n = pmf.cardinality
    magnitude = float(locs[mirror])
    inner_bound = 0.0 if mirror - 1 == j else max(float(locs[mirror - 1]), 0.0)
    if mirror + 1 < n:
        outer_bound = float(locs[mirror + 1]) - _SEPARATION
    else:
        p_move = float(pmf.probabilities[j] + pmf.probabilities[mirror])
        if p_move <= 0.0:
            return None
        outer_bound = max(2.0 * magnitude, math.sqrt(power_limit / p_move) * 1.5)
    lam_lo = inner_bound + _SEPARATION - magnitude
    lam_hi = outer_bound - magnitude
    lam_lo = min(lam_lo, 0.0)  # the current magnitude always stays reachable
    lam_hi = max(lam_hi, 0.0)
    if lam_hi <= lam_lo:
        return None

    def candidate(lam):
        t = magnitude + lam
        try:
            return power_preserving_move(pmf, (j, mirror), (-t, t), power_limit)
        except InfeasibleFlow:
            return None

    for _ in range(60):
        if lam_hi <= 0.0 or candidate(lam_hi) is not None:
            break
        lam_hi *= 0.5
    for _ in range(60):
        if lam_lo >= 0.0 or candidate(lam_lo) is not None:
            break
        lam_lo *= 0.5
    if lam_hi <= lam_lo:
        return None

    def objective(lam):
        moved = candidate(lam)
        if moved is None:
            return -1e30
        return mutual_information(moved, ch, q)

    lam_star, rate_star = golden_section_max(objective, lam_lo, lam_hi, xtol=1e-9)
    if rate_star <= current_rate:
        return None
    moved = candidate(lam_star)
    if moved is None:
        return None
    return moved, rate_star


def dab_pc_solve(
    ch: AwgnChannel,
    power_limit: float,
    cardinality: int,
    init: FinitePmf = None,
    opts: DabPcOptions = None,
    q: QuadratureScheme = DEFAULT_QUADRATURE,
) -> DabPcResult:
    """Best rate over pmfs with the given cardinality and E[X^2] <= limit.

    The reported rate is a lower estimate of the fixed-cardinality capacity;
    locations stay symmetric throughout while probabilities are free.
    """
    opts = opts or DabPcOptions()
    if cardinality < 2:
        raise ValueError("cardinality must be at least 2")
    if init is None:
        init = equilattice(cardinality, power_limit)
    if init.cardinality != cardinality:
        raise ValueError("init cardinality does not match the requested cardinality")
    if pmf_power(init) > power_limit * (1.0 + 1e-9):
        raise ValueError("init pmf violates the power limit")

    locs = init.locations.copy()
    warm = init.probabilities.copy()
    state = {"multiplier": None, "outcome": None}
    trace = [] if opts.keep_trace else None

    def reoptimize():
        """Probability re-optimization; returns None when the support is so
        degenerate (stacked near-coincident points) that the secant cannot
        pin the power even from a fresh start."""
        for attempt, (probs0, mult0) in enumerate(
            ((warm, state["multiplier"]), (None, None))
        ):
            try:
                outcome = ba_power_constrained(
                    locs,
                    ch,
                    power_limit,
                    q,
                    opts.ba,
                    init_probabilities=probs0,
                    init_multiplier=mult0,
                )
                break
            except MaxItersExceeded as err:
                warnings.warn("power-constrained BA hit its iteration cap")
                outcome = err.outcome
                break
            except SecantDivergence:
                if attempt == 1:
                    warnings.warn(
                        "secant could not settle the power multiplier on a "
                        "degenerate support; keeping the previous iterate"
                    )
                    return None
        state["outcome"] = outcome
        state["multiplier"] = outcome.lagrange_multiplier or None
        if trace is not None:
            trace.append(outcome.mutual_information)
        return outcome

    outcome = reoptimize()
    if outcome is None:
        raise SecantDivergence(
            "could not optimize probabilities on the initial support"
        )
    rate = outcome.mutual_information
    warm = outcome.probabilities
    pmf = FinitePmf(locs, warm)
    converged_by = "iteration_cap"
    iterations = 0
    pair_cycle = range(cardinality // 2)

    # One iteration is a full round-robin cycle: every pair gets a line
    # search (moves accepted only when the rate improves), then the
    # probabilities are re-optimized on the moved support.
    for it in range(1, opts.max_iters + 1):
        iterations = it
        cycle_start = rate
        any_move = False
        for j in pair_cycle:
            found = _pair_line_search(pmf, j, ch, power_limit, q, rate)
            if found is None:
                continue
            pmf, rate = found
            any_move = True
        if any_move:
            locs = pmf.locations.copy()
            warm = pmf.probabilities.copy()
            refreshed = reoptimize()
            if refreshed is None:
                break
            outcome = refreshed
            rate = outcome.mutual_information
            warm = outcome.probabilities
            pmf = FinitePmf(locs, warm)
        if rate - cycle_start < opts.delta_i_tol:
            converged_by = "delta_i"
            break

    outcome = state["outcome"]
    symmetry_gap = float(
        np.max(np.abs(pmf.locations + pmf.locations[::-1]))
        + np.max(np.abs(pmf.probabilities - pmf.probabilities[::-1]))
    )
    return DabPcResult(
        pmf=pmf,
        rate=rate,
        iterations=iterations,
        converged_by=converged_by,
        lagrange_multiplier=outcome.lagrange_multiplier,
        realized_power=pmf_power(pmf),
        symmetry_gap=symmetry_gap,
        mi_trace=trace,
    )
