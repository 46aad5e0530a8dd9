"""Numerical kernels shared by every solver in the package.

Everything here is a pure function of its inputs: Gaussian conditional
densities, induced output mixtures, relative entropy, mutual information,
and the moment/entropy helpers used for bookkeeping.  Integrals over the
continuous output alphabet use a composite Gauss-Legendre rule on a
truncated window; the window always covers the support of every density
that appears in the integrand.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalUnderflow

LOG2E = math.log2(math.e)

# Conditional-density values below this are treated as an exact zero of the
# integrand (the x*log(x) -> 0 limit).
_DENSITY_GUARD = 1e-300
_LOG_GUARD = math.log(_DENSITY_GUARD)

# Columns of the output mixture below this are recomputed in log space.
_LINEAR_FLOOR = 1e-280

_PANEL_ORDER = 10
_PANEL_NODES, _PANEL_WEIGHTS = np.polynomial.legendre.leggauss(_PANEL_ORDER)


@dataclass(frozen=True, eq=False)
class FinitePmf:
    """Finite-support input distribution: ordered locations with probabilities."""

    locations: np.ndarray
    probabilities: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, FinitePmf):
            return NotImplemented
        return np.array_equal(self.locations, other.locations) and np.array_equal(
            self.probabilities, other.probabilities
        )

    def __post_init__(self):
        locs = np.atleast_1d(np.asarray(self.locations, dtype=float))
        probs = np.atleast_1d(np.asarray(self.probabilities, dtype=float))
        if locs.ndim != 1 or probs.ndim != 1:
            raise ValueError("locations and probabilities must be 1-D")
        if locs.size == 0:
            raise ValueError("a pmf needs at least one mass point")
        if locs.size != probs.size:
            raise ValueError("locations and probabilities must have equal length")
        if not (np.all(np.isfinite(locs)) and np.all(np.isfinite(probs))):
            raise ValueError("locations and probabilities must be finite")
        if np.any(np.diff(locs) <= 0.0):
            raise ValueError("locations must be strictly increasing")
        if np.any(probs < 0.0):
            raise ValueError("probabilities must be nonnegative")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")
        locs = locs.copy()
        probs = probs.copy()
        locs.flags.writeable = False
        probs.flags.writeable = False
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "probabilities", probs)

    @property
    def cardinality(self) -> int:
        return int(self.locations.size)


@dataclass(frozen=True)
class AwgnChannel:
    """Real AWGN channel, fully described by its noise power."""

    noise_power: float

    def __post_init__(self):
        if not (self.noise_power > 0.0 and math.isfinite(self.noise_power)):
            raise ValueError("noise_power must be positive and finite")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.noise_power)


@dataclass(frozen=True)
class QuadratureScheme:
    """Composite Gauss-Legendre rule on a sigma-truncated output window."""

    node_count: int = 2001
    truncation_radius: float = 10.0

    def __post_init__(self):
        if self.node_count < 2:
            raise ValueError("node_count must be at least 2")
        if self.truncation_radius < 6.0:
            raise ValueError("truncation_radius must be at least 6 sigma")


DEFAULT_QUADRATURE = QuadratureScheme()


def _composite_nodes(lo: float, hi: float, node_count: int):
    """Nodes and weights of a composite Gauss-Legendre rule on [lo, hi]."""
    panels = max(1, -(-node_count // _PANEL_ORDER))
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    y = (mid[:, None] + half[:, None] * _PANEL_NODES[None, :]).ravel()
    w = (half[:, None] * _PANEL_WEIGHTS[None, :]).ravel()
    return y, w


def _output_window(locations, sigma, radius, cover=None):
    """Integration window: mass-point hull, optionally widened to cover
    extra evaluation points, padded by ``radius`` noise deviations."""
    lo = float(locations[0])
    hi = float(locations[-1])
    if cover is not None:
        lo = min(lo, float(np.min(cover)))
        hi = max(hi, float(np.max(cover)))
    return lo - radius * sigma, hi + radius * sigma


def _log_conditional(y, x, noise_power):
    """log p(y|x) for each (x, y) pair, shape (len(x), len(y))."""
    d = y[None, :] - np.asarray(x, dtype=float)[:, None]
    return -0.5 * math.log(2.0 * math.pi * noise_power) - d * d / (2.0 * noise_power)


def _mixture_log_density(probs, log_kernel, kernel=None):
    """log of the induced output density at each node.

    Fast path sums in the linear domain; columns that underflow are redone
    with a shifted log-sum-exp so the result stays finite wherever any
    component density is representable.
    """
    if kernel is None:
        kernel = np.exp(log_kernel)
    py = probs @ kernel
    with np.errstate(divide="ignore"):
        logpy = np.log(py)
    tiny = py < _LINEAR_FLOOR
    if np.any(tiny):
        logp = np.where(probs > 0.0, np.log(np.where(probs > 0.0, probs, 1.0)), -np.inf)
        a = logp[:, None] + log_kernel[:, tiny]
        amax = a.max(axis=0)
        ok = amax > -np.inf
        redo = np.full(a.shape[1], -np.inf)
        if np.any(ok):
            shifted = np.exp(a[:, ok] - amax[ok][None, :])
            redo[ok] = amax[ok] + np.log(shifted.sum(axis=0))
        logpy[tiny] = redo
    return logpy


def _divergence_rows(log_kernel, logpy, weights, kernel=None, check_underflow=False):
    """Relative entropy D(p(y|x_i) || p(y)) in bits, one value per row.

    Nodes where the conditional density is below the guard contribute 0:
    clamping log p(y) from below makes those products vanish at double
    precision without a mask (guard * clamp is ~1e-294).
    """
    if kernel is None:
        kernel = np.exp(log_kernel)
    if check_underflow and not bool(
        (log_kernel > _LOG_GUARD).any(axis=1).all()
    ):
        raise NumericalUnderflow(
            "conditional density vanished at every quadrature node; "
            "the truncation window misses the integrand"
        )
    integrand = (log_kernel - np.maximum(logpy, 40.0 * _LOG_GUARD)[None, :]) * kernel
    return (integrand @ weights) * LOG2E


def output_density(pmf: FinitePmf, ch: AwgnChannel, y):
    """Induced output density sum_i p_i N(y; x_i, N) at ``y`` (scalar or array)."""
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    dens = pmf.probabilities @ np.exp(_log_conditional(y_arr, pmf.locations, ch.noise_power))
    return float(dens[0]) if np.isscalar(y) or np.ndim(y) == 0 else dens


def relative_entropy_at(
    x: float,
    pmf: FinitePmf,
    ch: AwgnChannel,
    q: QuadratureScheme = DEFAULT_QUADRATURE,
) -> float:
    """D(p(y|x) || p(y)) in bits, where p(y) is induced by ``pmf``."""
    return float(relative_entropy_profile(np.array([x]), pmf, ch, q)[0])


def relative_entropy_profile(
    xs,
    pmf: FinitePmf,
    ch: AwgnChannel,
    q: QuadratureScheme = DEFAULT_QUADRATURE,
) -> np.ndarray:
    """Vectorized relative entropy over many candidate inputs ``xs``."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    lo, hi = _output_window(pmf.locations, ch.sigma, q.truncation_radius, cover=xs)
    y, w = _composite_nodes(lo, hi, q.node_count)
    log_k_pmf = _log_conditional(y, pmf.locations, ch.noise_power)
    logpy = _mixture_log_density(pmf.probabilities, log_k_pmf)
    out = np.empty(xs.size)
    # Chunked so a dense profile does not materialize a huge kernel at once.
    step = max(1, 8_000_000 // y.size)
    for start in range(0, xs.size, step):
        rows = _log_conditional(y, xs[start : start + step], ch.noise_power)
        out[start : start + step] = _divergence_rows(rows, logpy, w, check_underflow=True)
    return np.maximum(out, 0.0)


def mutual_information(
    pmf: FinitePmf,
    ch: AwgnChannel,
    q: QuadratureScheme = DEFAULT_QUADRATURE,
) -> float:
    """I(X; Y) in bits: sum_i p_i D(p(y|x_i) || p(y))."""
    lo, hi = _output_window(pmf.locations, ch.sigma, q.truncation_radius)
    y, w = _composite_nodes(lo, hi, q.node_count)
    log_k = _log_conditional(y, pmf.locations, ch.noise_power)
    k = np.exp(log_k)
    logpy = _mixture_log_density(pmf.probabilities, log_k, kernel=k)
    d = _divergence_rows(log_k, logpy, w, kernel=k)
    return float(pmf.probabilities @ d)


def pmf_power(pmf: FinitePmf) -> float:
    """Second moment sum_i p_i x_i^2."""
    return float(pmf.probabilities @ (pmf.locations * pmf.locations))


def pmf_mean(pmf: FinitePmf) -> float:
    return float(pmf.probabilities @ pmf.locations)


def pmf_entropy(pmf: FinitePmf) -> float:
    """Input entropy in bits, with 0*log(0) taken as 0."""
    p = pmf.probabilities[pmf.probabilities > 0.0]
    return float(-(p @ np.log2(p)))


def peak_snr_db(ch: AwgnChannel) -> float:
    """SNR in dB as if all probability sat on the amplitude peaks +-1."""
    return -10.0 * math.log10(ch.noise_power)


def true_snr_db(pmf: FinitePmf, ch: AwgnChannel) -> float:
    """SNR in dB using the realized power of the pmf."""
    power = pmf_power(pmf)
    if power == 0.0:
        return -math.inf
    return 10.0 * math.log10(power / ch.noise_power)
