"""Blahut-Arimoto on a fixed support set.

Two entry points: plain probability optimization over the simplex, and the
power-constrained variant where the multiplicative update is tilted by
2^(-s * x_i^2) and the multiplier s is tuned by a secant search until the
realized power matches the budget.
"""

import numpy as np

from .errors import Infeasible, MaxItersExceeded, SecantDivergence
from .numerics import (
    DEFAULT_QUADRATURE,
    AwgnChannel,
    QuadratureScheme,
    _composite_nodes,
    _divergence_rows,
    _log_conditional,
    _mixture_log_density,
    _output_window,
)
from dataclasses import dataclass, field


@dataclass
class BaOptions:
    """Stopping controls for the inner probability iteration."""

    tol: float = 1e-9
    max_iters: int = 20_000
    power_tol: float = 1e-8
    keep_trace: bool = False

    def __post_init__(self):
        if not (self.tol > 0.0 and self.power_tol > 0.0 and self.max_iters >= 1):
            raise ValueError("tol and power_tol must be positive, max_iters >= 1")


@dataclass
class BaOutcome:
    probabilities: np.ndarray
    mutual_information: float
    lagrange_multiplier: float
    iterations: int
    realized_power: float
    divergences: np.ndarray
    mi_trace: list = field(default=None, repr=False)


class _Support:
    """Cached discretization for one (locations, channel, quadrature) triple."""

    def __init__(self, locations, ch: AwgnChannel, q: QuadratureScheme):
        locations = np.asarray(locations, dtype=float)
        if locations.ndim != 1 or locations.size < 1:
            raise ValueError("need at least one support location")
        if np.any(np.diff(locations) <= 0.0):
            raise ValueError("locations must be strictly increasing")
        lo, hi = _output_window(locations, ch.sigma, q.truncation_radius)
        self.y, self.w = _composite_nodes(lo, hi, q.node_count)
        self.log_k = _log_conditional(self.y, locations, ch.noise_power)
        self.k = np.exp(self.log_k)
        self.locations = locations
        self.x_sq = locations * locations

    def divergences(self, probs) -> np.ndarray:
        logpy = _mixture_log_density(probs, self.log_k, kernel=self.k)
        return _divergence_rows(self.log_k, logpy, self.w, kernel=self.k)


def _init_probs(n, init):
    """Normalized starting point, blended with a trace of uniform mass.

    The multiplicative update cannot regrow a probability that is exactly
    zero, so a warm start carrying hard zeros would silently restrict the
    optimization to whatever face of the simplex it starts on; the blend
    keeps every point reachable while perturbing a converged warm start
    only transiently.
    """
    if init is None:
        return np.full(n, 1.0 / n)
    probs = np.asarray(init, dtype=float)
    if probs.shape != (n,) or np.any(probs < 0.0) or probs.sum() <= 0.0:
        raise ValueError("init probabilities must be nonnegative with positive sum")
    probs = probs / probs.sum()
    return (1.0 - 1e-6) * probs + 1e-6 / n


def _iterate(support: _Support, probs, multiplier, tol, max_iters, trace=None):
    """Multiplicative updates at a fixed multiplier.

    Stops when the tilted support bound max_i (D_i - s*x_i^2) exceeds the
    tilted objective I - s*E by less than ``tol``, which certifies the
    objective is within ``tol`` of its optimum on this support (and implies
    the per-iteration gain is below ``tol`` as well).  Points whose
    probability underflowed to exactly zero cannot revive and are excluded
    from the bound.
    """
    d = support.divergences(probs)
    tilted = d - multiplier * support.x_sq
    mi = float(probs @ d)
    if trace is not None:
        trace.append(mi)
    iterations = 0
    converged = False
    refine_deadline = None
    stall_mark = None
    while True:
        power = float(probs @ support.x_sq)
        objective = mi - multiplier * power
        bound_gap = float(tilted[probs > 0.0].max()) - objective
        if bound_gap < tol:
            # Optimality is certified; spend a bounded extra budget pulling
            # the non-negligible points' tilted divergences together so the
            # returned point looks like the fixed point it approximates.
            active = tilted[probs > 1e-6]
            if refine_deadline is None:
                refine_deadline = min(max_iters, 3 * iterations + 1000)
            if (
                float(active.max() - active.min()) < 8.0 * tol
                or iterations >= refine_deadline
            ):
                converged = True
                break
        if iterations % 500 == 0:
            # Nearly degenerate support geometry can leave flat directions
            # the multiplicative update cannot settle; when the certificate
            # is already close and a long window moves neither objective nor
            # power, the iterate is a fixed point at float resolution.  The
            # bound-gap gate keeps this from firing mid-way through the slow
            # geometric regrowth of an underweighted point.
            if stall_mark is not None and iterations > 0:
                prev_objective, prev_power = stall_mark
                if (
                    bound_gap < max(1e-6, 100.0 * tol)
                    and abs(objective - prev_objective) < 1e-12
                    and abs(power - prev_power) < 1e-12
                ):
                    converged = True
                    break
            stall_mark = (objective, power)
        if iterations >= max_iters:
            break
        probs = probs * np.exp2(tilted - tilted.max())
        probs = probs / probs.sum()
        d = support.divergences(probs)
        tilted = d - multiplier * support.x_sq
        mi = float(probs @ d)
        iterations += 1
        if trace is not None:
            trace.append(mi)
    return probs, d, mi, iterations, converged


def ba_fixed_support(
    locations,
    ch: AwgnChannel,
    q: QuadratureScheme = DEFAULT_QUADRATURE,
    opts: BaOptions = None,
    init_probabilities=None,
) -> BaOutcome:
    """MI-maximizing probabilities on a fixed support set."""
    opts = opts or BaOptions()
    support = _Support(locations, ch, q)
    probs = _init_probs(support.locations.size, init_probabilities)
    trace = [] if opts.keep_trace else None
    probs, d, mi, iters, converged = _iterate(
        support, probs, 0.0, opts.tol, opts.max_iters, trace
    )
    outcome = BaOutcome(
        probabilities=probs,
        mutual_information=mi,
        lagrange_multiplier=0.0,
        iterations=iters,
        realized_power=float(probs @ support.x_sq),
        divergences=d,
        mi_trace=trace,
    )
    if not converged:
        raise MaxItersExceeded(
            f"Blahut-Arimoto did not meet tol={opts.tol} in {opts.max_iters} iterations",
            outcome,
        )
    return outcome


def solve_multiplier_secant(power_of, target: float, tol: float = 1e-8,
                            max_iters: int = 200, initial: float = None) -> float:
    """Find s >= 0 with |power_of(s) - target| <= tol.

    ``power_of`` must be nonincreasing in s and the target attainable.
    Secant steps are used inside a maintained bracket, falling back to
    bisection whenever an iterate escapes it.  Acceptance is one-sided:
    the returned multiplier realizes a power in [target - tol, target], so
    the constraint itself is never overshot.
    """
    e0 = power_of(0.0)
    if e0 <= target:
        return 0.0
    lo, e_lo = 0.0, e0
    hi = initial if (initial is not None and initial > 0.0) else 1.0
    e_hi = power_of(hi)
    doublings = 0
    while e_hi > target:
        lo, e_lo = hi, e_hi
        hi *= 2.0
        e_hi = power_of(hi)
        doublings += 1
        if doublings > 120:
            raise SecantDivergence(f"could not bracket the multiplier below s={hi}")
    s0, f0 = lo, e_lo - target
    s1, f1 = hi, e_hi - target
    for _ in range(max_iters):
        if -tol <= f1 <= 0.0:
            return s1
        denom = f1 - f0
        if denom != 0.0 and np.isfinite(denom):
            s2 = s1 - f1 * (s1 - s0) / denom
        else:
            s2 = 0.5 * (lo + hi)
        if not (lo < s2 < hi) or not np.isfinite(s2):
            s2 = 0.5 * (lo + hi)
        f2 = power_of(s2) - target
        if f2 > 0.0:
            lo = s2
        else:
            hi = s2
        s0, f0, s1, f1 = s1, f1, s2, f2
    raise SecantDivergence(f"secant did not converge to |power - target| <= {tol}")


def ba_power_constrained(
    locations,
    ch: AwgnChannel,
    power_limit: float,
    q: QuadratureScheme = DEFAULT_QUADRATURE,
    opts: BaOptions = None,
    init_probabilities=None,
    init_multiplier: float = None,
) -> BaOutcome:
    """Capacity-achieving probabilities under E[X^2] <= power_limit.

    The inner iteration runs three decades tighter than ``power_tol`` so
    the realized-power map the secant searches is smooth at the tolerance
    it must resolve.
    """
    opts = opts or BaOptions()
    if not power_limit > 0.0:
        raise ValueError("power_limit must be positive")
    inner_tol = min(opts.tol, 1e-3 * opts.power_tol)
    support = _Support(locations, ch, q)
    if float(np.min(support.x_sq)) > power_limit * (1.0 + 1e-12):
        raise Infeasible(
            f"every support point exceeds the power limit {power_limit}"
        )
    probs0 = _init_probs(support.locations.size, init_probabilities)
    trace = [] if opts.keep_trace else None

    state = {"probs": probs0, "iterations": 0}

    def realized_power(multiplier: float) -> float:
        probs, d, mi, iters, _ = _iterate(
            support, state["probs"], multiplier, inner_tol, opts.max_iters
        )
        state["probs"] = probs
        state["iterations"] += iters
        return float(probs @ support.x_sq)

    multiplier = solve_multiplier_secant(
        realized_power, power_limit, tol=opts.power_tol, initial=init_multiplier
    )
    probs, d, mi, iters, converged = _iterate(
        support, state["probs"], multiplier, inner_tol, opts.max_iters, trace
    )
    outcome = BaOutcome(
        probabilities=probs,
        mutual_information=mi,
        lagrange_multiplier=multiplier,
        iterations=state["iterations"] + iters,
        realized_power=float(probs @ support.x_sq),
        divergences=d,
        mi_trace=trace,
    )
    if not converged:
        raise MaxItersExceeded(
            f"power-constrained inner loop did not meet tol={opts.tol}", outcome
        )
    return outcome
