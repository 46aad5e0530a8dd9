"""Dynamic-assignment Blahut-Arimoto for the amplitude-constrained channel.

The outer loop alternates four steps: optimize probabilities on the current
support (Blahut-Arimoto), test the relative-entropy upper bound against the
achieved mutual information, add or split a mass point when no point lies
between the divergence maximizer and the center, and move the symmetric
pair closest to the maximizer by a bounded line search.  Amplitudes are
normalized so the support lives in [-1, +1] centered at 0.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from ._optim import golden_section_max
from .ba import BaOptions, ba_fixed_support
from .errors import MaxItersExceeded, MaxOuterItersExceeded, NoMovableIndex
from .numerics import (
    DEFAULT_QUADRATURE,
    AwgnChannel,
    FinitePmf,
    QuadratureScheme,
    mutual_information,
    relative_entropy_at,
    relative_entropy_profile,
)

SPLIT_OFFSET = 1e-4
_SYMMETRY_TOL = 1e-9
_ORDER_MARGIN = 1e-11


@dataclass
class DabAcOptions:
    epsilon: float = 1e-5
    max_outer_iters: int = 300
    xmax_grid: int = 4001
    prune_threshold: float = 1e-9
    keep_trace: bool = False
    ba: BaOptions = field(default_factory=BaOptions)

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")


@dataclass
class DabAcResult:
    pmf: FinitePmf
    capacity_lower: float
    capacity_upper: float
    outer_iterations: int
    converged: bool
    trace: list = field(default=None, repr=False)


def _check_symmetric(locations, probabilities=None):
    if np.max(np.abs(locations + locations[::-1])) > _SYMMETRY_TOL:
        raise ValueError("locations must be symmetric about 0")
    if probabilities is not None and np.max(
        np.abs(probabilities - probabilities[::-1])
    ) > 1e-6:
        raise ValueError("probabilities must be symmetric")


def _inside_indices(locations, x_max):
    """Indices of mass points strictly between the center and x_max."""
    lo, hi = min(0.0, x_max), max(0.0, x_max)
    return np.nonzero((locations > lo) & (locations < hi))[0]


def find_x_max(
    pmf: FinitePmf,
    ch: AwgnChannel,
    q: QuadratureScheme = DEFAULT_QUADRATURE,
    grid: int = 4001,
):
    """Maximizer of D(p(y|x) || p(y)) over x in [-1, 1] and its value in bits.

    Dense grid scan followed by golden-section refinement; the value is the
    running capacity upper bound.  Near-ties are broken toward +1.
    """
    xs = np.linspace(-1.0, 1.0, grid)
    profile = relative_entropy_profile(xs, pmf, ch, q)
    best = float(profile.max())
    idx = int(np.nonzero(profile >= best - 1e-12 * (1.0 + abs(best)))[0][-1])
    width = 2.0 / (grid - 1)
    lo = max(-1.0, xs[idx] - 2.0 * width)
    hi = min(1.0, xs[idx] + 2.0 * width)
    x_star, value = golden_section_max(
        lambda x: relative_entropy_at(x, pmf, ch, q), lo, hi, xtol=1e-10
    )
    return float(x_star), float(value)


def add_mass_point(locations, x_max: float):
    """Grow the support when no point lies strictly between 0 and x_max.

    Even cardinality inserts a point at the center; odd cardinality splits
    the center point into a pair at +-SPLIT_OFFSET that the next line
    search pulls apart.  Returns (new_locations, added).
    """
    locations = np.asarray(locations, dtype=float)
    _check_symmetric(locations)
    if _inside_indices(locations, x_max).size > 0:
        return locations.copy(), False
    n = locations.size
    if n % 2 == 0:
        return np.sort(np.append(locations, 0.0)), True
    center = n // 2
    delta = SPLIT_OFFSET
    if center + 1 < n:
        delta = min(delta, 0.5 * locations[center + 1])
    new = np.concatenate(
        [locations[:center], [-delta, delta], locations[center + 1 :]]
    )
    return np.sort(new), True


def improve_locations(
    pmf: FinitePmf,
    ch: AwgnChannel,
    x_max: float,
    q: QuadratureScheme = DEFAULT_QUADRATURE,
) -> FinitePmf:
    """Move the symmetric pair closest to x_max along +-lambda.

    Probabilities stay fixed during the search; the step is bounded so the
    ordering is preserved and |x| <= 1.  The unmoved pmf is always a
    candidate, so the mutual information cannot decrease.
    """
    locs = pmf.locations
    probs = pmf.probabilities
    _check_symmetric(locs)
    inside = _inside_indices(locs, x_max)
    if inside.size == 0:
        raise NoMovableIndex(f"no mass point strictly between 0 and {x_max}")
    j = int(inside[np.argmin(np.abs(locs[inside] - x_max))])
    n = locs.size
    mirror = n - 1 - j
    upper = max(j, mirror)
    lower = min(j, mirror)
    magnitude = locs[upper]
    bound_hi = locs[upper + 1] if upper + 1 < n else 1.0
    bound_hi = min(bound_hi, 1.0)
    bound_lo = max(locs[upper - 1], 0.0) if upper > 0 else 0.0
    lam_lo = (bound_lo - magnitude) + _ORDER_MARGIN
    lam_hi = (bound_hi - magnitude) - _ORDER_MARGIN
    if lam_hi <= lam_lo:
        return pmf

    def shifted(lam):
        new = locs.copy()
        new[upper] = magnitude + lam
        new[lower] = -(magnitude + lam)
        return new

    mi_now = mutual_information(pmf, ch, q)
    lam_star, mi_star = golden_section_max(
        lambda lam: mutual_information(FinitePmf(shifted(lam), probs), ch, q),
        lam_lo,
        lam_hi,
        xtol=1e-10,
    )
    if mi_star <= mi_now:
        return pmf
    return FinitePmf(shifted(lam_star), probs)


def _prune(locations, probabilities, threshold):
    """Drop points below the probability threshold, keeping mirror pairs
    together so symmetry survives."""
    keep = probabilities >= threshold
    keep = keep | keep[::-1]
    if not keep.any():
        keep[np.argmax(probabilities)] = True
    if keep.all():
        return locations, probabilities, False
    locs = locations[keep]
    probs = probabilities[keep]
    return locs, probs / probs.sum(), True


def dab_ac_solve(
    ch: AwgnChannel,
    init: FinitePmf = None,
    opts: DabAcOptions = None,
    q: QuadratureScheme = DEFAULT_QUADRATURE,
) -> DabAcResult:
    """Capacity of the AWGN channel under |X| <= 1, bracketed within epsilon.

    Returns the converged pmf together with the achieved mutual information
    (lower bound) and the tightest relative-entropy upper bound seen.
    """
    opts = opts or DabAcOptions()
    if init is None:
        init = FinitePmf(np.array([-1.0, 1.0]), np.array([0.5, 0.5]))
    if np.max(np.abs(init.locations)) > 1.0 + 1e-12:
        raise ValueError("initial support must lie within [-1, 1]")
    _check_symmetric(init.locations)

    locs = init.locations.copy()
    warm = init.probabilities.copy()
    best_upper = np.inf
    trace = [] if opts.keep_trace else None
    lower = 0.0
    pmf = init

    for outer in range(1, opts.max_outer_iters + 1):
        try:
            outcome = ba_fixed_support(locs, ch, q, opts.ba, init_probabilities=warm)
        except MaxItersExceeded as err:
            warnings.warn(f"inner BA hit its iteration cap at outer step {outer}")
            outcome = err.outcome
        probs = outcome.probabilities
        lower = outcome.mutual_information
        locs, probs, pruned = _prune(locs, probs, opts.prune_threshold)
        pmf = FinitePmf(locs, probs)
        if pruned:
            lower = mutual_information(pmf, ch, q)
        x_max, d_max = find_x_max(pmf, ch, q, opts.xmax_grid)
        best_upper = min(best_upper, d_max)
        if trace is not None:
            trace.append((lower, d_max))
        if d_max - lower < opts.epsilon:
            # The bracket can cross by float noise once both sides agree.
            return DabAcResult(pmf, lower, max(best_upper, lower), outer, True, trace)

        new_locs, added = add_mass_point(locs, x_max)
        if added:
            if locs.size % 2 == 0:
                probs = np.insert(probs, new_locs.size // 2, 0.0)
            else:
                center = locs.size // 2
                half = 0.5 * probs[center]
                probs = np.concatenate(
                    [probs[:center], [half, half], probs[center + 1 :]]
                )
            locs = new_locs
        try:
            moved = improve_locations(FinitePmf(locs, probs), ch, x_max, q)
            locs, probs = moved.locations.copy(), moved.probabilities.copy()
        except NoMovableIndex:
            pass
        warm = probs if np.all(probs > 0.0) else None

    result = DabAcResult(pmf, lower, best_upper, opts.max_outer_iters, False, trace)
    raise MaxOuterItersExceeded(
        f"no epsilon={opts.epsilon} bracket within {opts.max_outer_iters} outer iterations",
        result,
    )


def ac_optimum_fixed_cardinality(
    cardinality: int,
    ch: AwgnChannel,
    q: QuadratureScheme = DEFAULT_QUADRATURE,
    value_tol: float = 1e-11,
    max_rounds: int = 200,
):
    """Best symmetric pmf on [-1, 1] with exactly ``cardinality`` points.

    The optimum is symmetric (concave objective, symmetric channel), so the
    search runs on half the parameters: interior pair magnitudes with the
    peaks pinned at +-1 and the center at 0 for odd cardinalities, plus
    unnormalized symmetric weights.  Cyclic golden-section passes repeat
    until a full pass gains less than ``value_tol`` bits.  Returns
    (pmf, mutual_information).  Used by the transition bisection, which
    needs adjacent-cardinality optima far sharper than the outer-loop
    capacity bracket; direct search avoids the critically slow mixing of
    the multiplicative update near a degenerate (vanishing-mass) optimum.
    """
    if cardinality < 1:
        raise ValueError("cardinality must be >= 1")
    if cardinality == 1:
        return FinitePmf(np.array([0.0]), np.array([1.0])), 0.0

    n = cardinality
    odd = n % 2 == 1
    pairs = n // 2
    n_mags = (n - 2) // 2
    n_weights = pairs + (1 if odd else 0)

    def build(mags, weights):
        mags_full = np.append(np.asarray(mags, dtype=float), 1.0)
        locs = [-mags_full[::-1]]
        probs_half = weights[:pairs]
        total = 2.0 * probs_half.sum() + (weights[pairs] if odd else 0.0)
        if odd:
            locs.append(np.array([0.0]))
        locs.append(mags_full)
        left = probs_half[::-1] / total
        right = probs_half / total
        if odd:
            p = np.concatenate([left, [weights[pairs] / total], right])
        else:
            p = np.concatenate([left, right])
        return FinitePmf(np.concatenate(locs), p)

    def value(mags, weights):
        return mutual_information(build(mags, weights), ch, q)

    mags = np.linspace(0.0, 1.0, n_mags + 2)[1:-1].copy()
    weights = np.ones(n_weights)
    best = value(mags, weights)
    for _ in range(max_rounds):
        pass_start = best
        for i in range(n_mags):
            lo = mags[i - 1] if i > 0 else 0.0
            hi = mags[i + 1] if i + 1 < n_mags else 1.0

            def at_mag(m, i=i):
                trial = mags.copy()
                trial[i] = m
                return value(trial, weights)

            m_star, val = golden_section_max(
                at_mag, lo + _ORDER_MARGIN, hi - _ORDER_MARGIN, xtol=1e-9
            )
            if val > best:
                mags[i], best = m_star, val
        for jdx in range(n_weights):

            def at_weight(u, jdx=jdx):
                trial = weights.copy()
                trial[jdx] = u
                if trial.sum() <= 0.0:
                    return -np.inf
                return value(mags, trial)

            u_star, val = golden_section_max(at_weight, 0.0, 10.0, xtol=1e-9)
            if val > best:
                weights[jdx], best = u_star, val
        scale = weights.max()
        if scale > 0.0:
            weights = weights / scale
        if best - pass_start < value_tol:
            break
    return build(mags, weights), best
