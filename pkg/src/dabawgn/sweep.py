"""Sweep orchestration: evolution curves, transition bisection, selection.

Amplitude-constrained sweeps run a single warm-started chain over peak SNR.
Power-constrained sweeps run one warm-started SNR chain per cardinality with
the power budget normalized to 1 and the noise power set from the SNR, then
a selection pass picks the smallest cardinality within a capacity gap at
each SNR.
"""

import logging
import math
import os
from dataclasses import dataclass

import numpy as np

from .baselines import shannon_capacity_bits
from .dab_ac import (
    DabAcOptions,
    ac_optimum_fixed_cardinality,
    dab_ac_solve,
)
from .dab_pc import DabPcOptions, dab_pc_solve
from .errors import BracketInvalid, DabError, NoSatisfyingCardinality
from .numerics import (
    DEFAULT_QUADRATURE,
    AwgnChannel,
    FinitePmf,
    QuadratureScheme,
    pmf_entropy,
    pmf_power,
    true_snr_db,
)
from .serialize import atomic_write_json, pmf_from_dict, pmf_to_dict, read_json

log = logging.getLogger(__name__)


@dataclass
class AcSweepRecord:
    peak_snr_db: float
    true_snr_db: float
    capacity: float
    cardinality: int
    entropy: float
    pmf: FinitePmf
    pc_capacity_at_true_snr: float


@dataclass
class PcSweepRecord:
    snr_db: float
    cardinality: int
    rate: float
    gap_to_capacity: float
    pmf: FinitePmf
    converged_by: str


@dataclass
class SelectionRecord:
    snr_db: float
    cardinality: int
    rate: float
    capacity: float
    gap: float
    log2_cardinality_minus_capacity: float
    entropy_minus_capacity: float
    pmf: FinitePmf


def _noise_from_peak_snr(peak_snr_db: float) -> float:
    return 10.0 ** (-peak_snr_db / 10.0)


def _snr_grid(start: float, end: float, step: float) -> np.ndarray:
    if not end > start:
        raise ValueError("end SNR must exceed start SNR")
    if not step > 0.0:
        raise ValueError("step must be positive")
    count = int(round((end - start) / step))
    grid = start + step * np.arange(count + 1)
    if grid[-1] < end - 1e-9:
        grid = np.append(grid, end)
    return grid


def _ac_record(snr_db: float, result, ch: AwgnChannel) -> AcSweepRecord:
    power = pmf_power(result.pmf)
    return AcSweepRecord(
        peak_snr_db=snr_db,
        true_snr_db=true_snr_db(result.pmf, ch),
        capacity=result.capacity_lower,
        cardinality=result.pmf.cardinality,
        entropy=pmf_entropy(result.pmf),
        pmf=result.pmf,
        pc_capacity_at_true_snr=shannon_capacity_bits(power / ch.noise_power),
    )


def _ac_record_to_dict(rec: AcSweepRecord) -> dict:
    return {
        "peak_snr_db": rec.peak_snr_db,
        "true_snr_db": rec.true_snr_db,
        "capacity": rec.capacity,
        "cardinality": rec.cardinality,
        "entropy": rec.entropy,
        "pmf": pmf_to_dict(rec.pmf),
        "pc_capacity_at_true_snr": rec.pc_capacity_at_true_snr,
    }


def _ac_record_from_dict(data: dict) -> AcSweepRecord:
    return AcSweepRecord(
        peak_snr_db=data["peak_snr_db"],
        true_snr_db=data["true_snr_db"],
        capacity=data["capacity"],
        cardinality=data["cardinality"],
        entropy=data["entropy"],
        pmf=pmf_from_dict(data["pmf"]),
        pc_capacity_at_true_snr=data["pc_capacity_at_true_snr"],
    )


def _pc_record_to_dict(rec: PcSweepRecord) -> dict:
    return {
        "snr_db": rec.snr_db,
        "cardinality": rec.cardinality,
        "rate": rec.rate,
        "gap_to_capacity": rec.gap_to_capacity,
        "pmf": pmf_to_dict(rec.pmf),
        "converged_by": rec.converged_by,
    }


def _pc_record_from_dict(data: dict) -> PcSweepRecord:
    return PcSweepRecord(
        snr_db=data["snr_db"],
        cardinality=data["cardinality"],
        rate=data["rate"],
        gap_to_capacity=data["gap_to_capacity"],
        pmf=pmf_from_dict(data["pmf"]),
        converged_by=data["converged_by"],
    )


def ac_sweep(
    peak_snr_start: float,
    peak_snr_end: float,
    delta_s: float = 0.05,
    epsilon: float = 1e-5,
    q: QuadratureScheme = DEFAULT_QUADRATURE,
    opts: DabAcOptions = None,
    checkpoint_path: str = None,
) -> list:
    """Warm-started amplitude-constrained chain over a peak-SNR grid.

    The step should be small enough that the optimal cardinality changes by
    at most one between neighboring grid points.
    """
    grid = _snr_grid(peak_snr_start, peak_snr_end, delta_s)
    records = []
    init = None
    if checkpoint_path and os.path.exists(checkpoint_path):
        state = read_json(checkpoint_path)
        records = [_ac_record_from_dict(r) for r in state["records"]]
        records = records[: np.searchsorted(grid, state["records"][-1]["peak_snr_db"] + 1e-9)]
        if records:
            init = records[-1].pmf
            log.info("resuming AC chain after %.3f dB", records[-1].peak_snr_db)
    for snr_db in grid[len(records):]:
        ch = AwgnChannel(_noise_from_peak_snr(snr_db))
        solve_opts = opts or DabAcOptions(epsilon=epsilon)
        try:
            result = dab_ac_solve(ch, init=init, opts=solve_opts, q=q)
        except DabError as err:
            err.args = (f"peak SNR {snr_db:.4f} dB: {err.args[0] if err.args else err}",) + err.args[1:]
            raise
        records.append(_ac_record(snr_db, result, ch))
        init = result.pmf
        if checkpoint_path:
            atomic_write_json(
                checkpoint_path,
                {"kind": "ac_chain", "records": [_ac_record_to_dict(r) for r in records]},
            )
    return records


def detect_transition(
    low_snr: float,
    high_snr: float,
    from_card: int,
    rate_tol: float = 1e-7,
    q: QuadratureScheme = DEFAULT_QUADRATURE,
    bracket_db: float = 0.005,
) -> float:
    """Peak SNR where ``from_card`` points stop being optimal.

    At each probe the best pmf of the next cardinality is compared with the
    best pmf of ``from_card`` points; the smaller cardinality is declared
    still optimal while the gain stays below ``rate_tol`` bits.  Bisection
    stops once the bracket is narrower than ``bracket_db``.
    """

    def gain(snr_db: float) -> float:
        ch = AwgnChannel(_noise_from_peak_snr(snr_db))
        _, mi_small = ac_optimum_fixed_cardinality(from_card, ch, q)
        _, mi_large = ac_optimum_fixed_cardinality(from_card + 1, ch, q)
        return mi_large - mi_small

    if gain(low_snr) >= rate_tol:
        raise BracketInvalid(f"{from_card} points are already suboptimal at {low_snr} dB")
    if gain(high_snr) < rate_tol:
        raise BracketInvalid(f"{from_card} points are still optimal at {high_snr} dB")
    lo, hi = low_snr, high_snr
    while hi - lo >= bracket_db:
        mid = 0.5 * (lo + hi)
        if gain(mid) < rate_tol:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def pc_sweep(
    snr_grid_db,
    cardinalities,
    opts: DabPcOptions = None,
    q: QuadratureScheme = DEFAULT_QUADRATURE,
    checkpoint_dir: str = None,
    gap_stop: float = None,
) -> list:
    """One warm-started SNR chain per cardinality, power normalized to 1.

    Failed cells are logged and skipped; the chain continues from the
    equilattice at the next SNR.  With ``gap_stop`` set, no further
    cardinalities are attempted once every SNR has a record within that gap.
    """
    snr_grid = sorted(float(s) for s in snr_grid_db)
    cards = sorted(int(c) for c in cardinalities)
    if not snr_grid or not cards:
        raise ValueError("snr grid and cardinality list must be nonempty")
    records = []
    satisfied = {}
    for card in cards:
        records.extend(
            _pc_chain(card, snr_grid, opts, q, checkpoint_dir)
        )
        if gap_stop is not None:
            for rec in records:
                if rec.gap_to_capacity <= gap_stop:
                    satisfied[rec.snr_db] = True
            if all(satisfied.get(s) for s in snr_grid):
                break
    records.sort(key=lambda r: (r.cardinality, r.snr_db))
    return records


def _pc_chain(card, snr_grid, opts, q, checkpoint_dir):
    checkpoint_path = (
        os.path.join(checkpoint_dir, f"pc_chain_card{card}.json")
        if checkpoint_dir
        else None
    )
    chain = []
    init = None
    if checkpoint_path and os.path.exists(checkpoint_path):
        state = read_json(checkpoint_path)
        done = [_pc_record_from_dict(r) for r in state["records"]]
        done = [r for r in done if any(abs(r.snr_db - s) < 1e-9 for s in snr_grid)]
        chain = done
        if chain:
            init = chain[-1].pmf
            log.info("resuming cardinality-%d chain after %.3f dB", card, chain[-1].snr_db)
    done_snrs = {r.snr_db for r in chain}
    for snr_db in snr_grid:
        if snr_db in done_snrs:
            continue
        ch = AwgnChannel(10.0 ** (-snr_db / 10.0))
        try:
            result = dab_pc_solve(ch, 1.0, card, init=init, opts=opts, q=q)
        except DabError as err:
            log.warning("cell (card=%d, snr=%.3f dB) failed: %s", card, snr_db, err)
            init = None
            continue
        capacity = shannon_capacity_bits(10.0 ** (snr_db / 10.0))
        chain.append(
            PcSweepRecord(
                snr_db=snr_db,
                cardinality=card,
                rate=result.rate,
                gap_to_capacity=capacity - result.rate,
                pmf=result.pmf,
                converged_by=result.converged_by,
            )
        )
        init = result.pmf
        if checkpoint_path:
            atomic_write_json(
                checkpoint_path,
                {
                    "kind": "pc_chain",
                    "cardinality": card,
                    "power_limit": 1.0,
                    "records": [_pc_record_to_dict(r) for r in chain],
                },
            )
    return chain


def min_cardinality_selection(records, gap_target: float = 0.01) -> list:
    """Per SNR, the smallest swept cardinality whose gap meets the target."""
    by_snr = {}
    for rec in records:
        by_snr.setdefault(rec.snr_db, []).append(rec)
    selections = []
    for snr_db in sorted(by_snr):
        candidates = sorted(by_snr[snr_db], key=lambda r: r.cardinality)
        chosen = next((r for r in candidates if r.gap_to_capacity <= gap_target), None)
        if chosen is None:
            raise NoSatisfyingCardinality(
                f"no swept cardinality reaches gap <= {gap_target} at {snr_db} dB"
            )
        capacity = shannon_capacity_bits(10.0 ** (snr_db / 10.0))
        selections.append(
            SelectionRecord(
                snr_db=snr_db,
                cardinality=chosen.cardinality,
                rate=chosen.rate,
                capacity=capacity,
                gap=chosen.gap_to_capacity,
                log2_cardinality_minus_capacity=math.log2(chosen.cardinality) - capacity,
                entropy_minus_capacity=pmf_entropy(chosen.pmf) - capacity,
                pmf=chosen.pmf,
            )
        )
    return selections
