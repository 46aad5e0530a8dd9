"""Command-line frontend: solves, sweeps, selection, and baselines.

Solve commands emit nested JSON; sweep and selection commands emit either
JSON or flat CSV tables.  Identical invocations produce byte-identical
output; there is no random number generation anywhere in the package.

Exit status: 0 on success, 2 on usage errors, 3 on numerical failures
(with a JSON error record on stderr).
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .baselines import equilattice, equilattice_rate, shannon_capacity_bits
from .dab_ac import DabAcOptions, dab_ac_solve
from .dab_pc import DabPcOptions, dab_pc_solve
from .errors import DabError
from .numerics import (
    AwgnChannel,
    FinitePmf,
    QuadratureScheme,
    peak_snr_db,
    pmf_entropy,
    pmf_power,
    true_snr_db,
)
from .serialize import dump_json, pmf_from_dict, pmf_to_dict
from .sweep import (
    ac_sweep,
    min_cardinality_selection,
    pc_sweep,
    PcSweepRecord,
)

OUTPUT_DIR_ENV = "DABAWGN_OUTDIR"

SWEEP_COLUMNS = [
    "snr_db",
    "peak_snr_db",
    "cardinality",
    "rate_bits",
    "capacity_bits",
    "gap_bits",
    "entropy_bits",
    "power",
    "converged_by",
]

SELECT_COLUMNS = [
    "snr_db",
    "cardinality",
    "rate_bits",
    "capacity_bits",
    "gap_bits",
    "log2_cardinality_minus_capacity_bits",
    "entropy_minus_capacity_bits",
]


def _parse_range(text: str):
    """start:end:step (inclusive end) or a single value."""
    parts = text.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) == 2:
        parts.append("1")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"bad range {text!r}, want start:end:step")
    start, end, step = (float(p) for p in parts)
    if step <= 0 or end < start:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    count = int(round((end - start) / step))
    values = [start + step * i for i in range(count + 1)]
    if values[-1] > end + 1e-9:
        values.pop()
    return values


def _parse_card_range(text: str):
    values = _parse_range(text)
    cards = [int(round(v)) for v in values]
    if any(c < 2 for c in cards):
        raise argparse.ArgumentTypeError("cardinalities must be >= 2")
    return cards


def _resolve_out(path):
    if path in (None, "-"):
        return None
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _emit(text: str, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        os.makedirs(os.path.dirname(os.path.abspath(out_path)), exist_ok=True)
        with open(out_path, "w") as handle:
            handle.write(text)


def _num(value):
    """CSV cell for a float with exact round-trip formatting."""
    return repr(float(value))


def _sweep_csv(rows, max_card: int) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = list(SWEEP_COLUMNS)
    for i in range(1, max_card + 1):
        header += [f"loc_{i}", f"prob_{i}"]
    writer.writerow(header)
    for row in rows:
        pmf = row.pop("_pmf")
        cells = [row[c] for c in SWEEP_COLUMNS]
        for i in range(max_card):
            if i < pmf.cardinality:
                cells += [_num(pmf.locations[i]), _num(pmf.probabilities[i])]
            else:
                cells += ["", ""]
        writer.writerow(cells)
    return buffer.getvalue()


def _quadrature(args) -> QuadratureScheme:
    return QuadratureScheme(
        node_count=args.node_count, truncation_radius=args.truncation_radius
    )


def _solve_payload_ac(result, ch):
    return {
        "pmf": pmf_to_dict(result.pmf),
        "cardinality": result.pmf.cardinality,
        "capacity_lower_bits": result.capacity_lower,
        "capacity_upper_bits": result.capacity_upper,
        "outer_iterations": result.outer_iterations,
        "converged": result.converged,
        "entropy_bits": pmf_entropy(result.pmf),
        "power": pmf_power(result.pmf),
        "peak_snr_db": peak_snr_db(ch),
        "true_snr_db": true_snr_db(result.pmf, ch),
    }


def cmd_ac_solve(args) -> int:
    ch = AwgnChannel(10.0 ** (-args.peak_snr_db / 10.0))
    opts = DabAcOptions(epsilon=args.epsilon, max_outer_iters=args.max_outer_iters)
    result = dab_ac_solve(ch, opts=opts, q=_quadrature(args))
    payload = {"command": "ac-solve", "result": _solve_payload_ac(result, ch)}
    _emit(dump_json(payload), _resolve_out(args.out))
    return 0


def cmd_ac_sweep(args) -> int:
    records = ac_sweep(
        args.peak_snr_db[0],
        args.peak_snr_db[-1],
        delta_s=args.peak_snr_db[1] - args.peak_snr_db[0]
        if len(args.peak_snr_db) > 1
        else 0.05,
        epsilon=args.epsilon,
        q=_quadrature(args),
        checkpoint_path=os.path.join(args.checkpoint_dir, "ac_chain.json")
        if args.checkpoint_dir
        else None,
    )
    if args.format == "json":
        payload = {
            "command": "ac-sweep",
            "records": [
                {
                    "peak_snr_db": r.peak_snr_db,
                    "true_snr_db": r.true_snr_db,
                    "capacity_bits": r.capacity,
                    "cardinality": r.cardinality,
                    "entropy_bits": r.entropy,
                    "pc_capacity_at_true_snr_bits": r.pc_capacity_at_true_snr,
                    "pmf": pmf_to_dict(r.pmf),
                }
                for r in records
            ],
        }
        _emit(dump_json(payload), _resolve_out(args.out))
    else:
        rows = [
            {
                "snr_db": _num(r.true_snr_db),
                "peak_snr_db": _num(r.peak_snr_db),
                "cardinality": r.cardinality,
                "rate_bits": _num(r.capacity),
                "capacity_bits": _num(r.pc_capacity_at_true_snr),
                "gap_bits": _num(r.pc_capacity_at_true_snr - r.capacity),
                "entropy_bits": _num(r.entropy),
                "power": _num(pmf_power(r.pmf)),
                "converged_by": "bracket",
                "_pmf": r.pmf,
            }
            for r in records
        ]
        max_card = max(r.cardinality for r in records)
        _emit(_sweep_csv(rows, max_card), _resolve_out(args.out))
    return 0


def cmd_pc_solve(args) -> int:
    ch = AwgnChannel(args.power / (10.0 ** (args.snr_db / 10.0)))
    opts = DabPcOptions(delta_i_tol=args.delta_i_tol, max_iters=args.max_iters)
    result = dab_pc_solve(
        ch, args.power, args.cardinality, opts=opts, q=_quadrature(args)
    )
    capacity = shannon_capacity_bits(args.power / ch.noise_power)
    payload = {
        "command": "pc-solve",
        "result": {
            "pmf": pmf_to_dict(result.pmf),
            "cardinality": result.pmf.cardinality,
            "rate_bits": result.rate,
            "capacity_bits": capacity,
            "gap_bits": capacity - result.rate,
            "iterations": result.iterations,
            "converged_by": result.converged_by,
            "lagrange_multiplier": result.lagrange_multiplier,
            "realized_power": result.realized_power,
            "symmetry_gap": result.symmetry_gap,
            "entropy_bits": pmf_entropy(result.pmf),
            "snr_db": args.snr_db,
        },
    }
    _emit(dump_json(payload), _resolve_out(args.out))
    return 0


def _pc_chain_worker(packed):
    card, snr_grid, delta_i_tol, max_iters, node_count, radius, checkpoint_dir = packed
    q = QuadratureScheme(node_count=node_count, truncation_radius=radius)
    opts = DabPcOptions(delta_i_tol=delta_i_tol, max_iters=max_iters)
    return pc_sweep([*snr_grid], [card], opts=opts, q=q, checkpoint_dir=checkpoint_dir)


def _pc_records_payload(records) -> dict:
    return {
        "command": "pc-sweep",
        "records": [
            {
                "snr_db": r.snr_db,
                "cardinality": r.cardinality,
                "rate_bits": r.rate,
                "gap_bits": r.gap_to_capacity,
                "converged_by": r.converged_by,
                "pmf": pmf_to_dict(r.pmf),
            }
            for r in records
        ],
    }


def load_pc_records(path) -> list:
    """Parse a pc-sweep JSON file back into sweep records."""
    data = json.loads(open(path).read())
    records = []
    for entry in data["records"]:
        records.append(
            PcSweepRecord(
                snr_db=entry["snr_db"],
                cardinality=entry["cardinality"],
                rate=entry["rate_bits"],
                gap_to_capacity=entry["gap_bits"],
                pmf=pmf_from_dict(entry["pmf"]),
                converged_by=entry["converged_by"],
            )
        )
    return records


def cmd_pc_sweep(args) -> int:
    if args.jobs > 1:
        packed = [
            (
                card,
                args.snr_db,
                args.delta_i_tol,
                args.max_iters,
                args.node_count,
                args.truncation_radius,
                args.checkpoint_dir,
            )
            for card in args.cards
        ]
        records = []
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for chain in pool.map(_pc_chain_worker, packed):
                records.extend(chain)
        records.sort(key=lambda r: (r.cardinality, r.snr_db))
    else:
        opts = DabPcOptions(delta_i_tol=args.delta_i_tol, max_iters=args.max_iters)
        records = pc_sweep(
            args.snr_db,
            args.cards,
            opts=opts,
            q=_quadrature(args),
            checkpoint_dir=args.checkpoint_dir,
            gap_stop=args.gap_stop,
        )
    if args.format == "json":
        _emit(dump_json(_pc_records_payload(records)), _resolve_out(args.out))
    else:
        rows = [
            {
                "snr_db": _num(r.snr_db),
                "peak_snr_db": "",
                "cardinality": r.cardinality,
                "rate_bits": _num(r.rate),
                "capacity_bits": _num(r.rate + r.gap_to_capacity),
                "gap_bits": _num(r.gap_to_capacity),
                "entropy_bits": _num(pmf_entropy(r.pmf)),
                "power": _num(pmf_power(r.pmf)),
                "converged_by": r.converged_by,
                "_pmf": r.pmf,
            }
            for r in records
        ]
        max_card = max(r.cardinality for r in records)
        _emit(_sweep_csv(rows, max_card), _resolve_out(args.out))
    return 0


def cmd_select(args) -> int:
    records = load_pc_records(args.records)
    selections = min_cardinality_selection(records, gap_target=args.gap)
    if args.format == "json":
        payload = {
            "command": "select",
            "gap_target": args.gap,
            "selections": [
                {
                    "snr_db": s.snr_db,
                    "cardinality": s.cardinality,
                    "rate_bits": s.rate,
                    "capacity_bits": s.capacity,
                    "gap_bits": s.gap,
                    "log2_cardinality_minus_capacity_bits": s.log2_cardinality_minus_capacity,
                    "entropy_minus_capacity_bits": s.entropy_minus_capacity,
                    "pmf": pmf_to_dict(s.pmf),
                }
                for s in selections
            ],
        }
        _emit(dump_json(payload), _resolve_out(args.out))
    else:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(SELECT_COLUMNS)
        for s in selections:
            writer.writerow(
                [
                    _num(s.snr_db),
                    s.cardinality,
                    _num(s.rate),
                    _num(s.capacity),
                    _num(s.gap),
                    _num(s.log2_cardinality_minus_capacity),
                    _num(s.entropy_minus_capacity),
                ]
            )
        _emit(buffer.getvalue(), _resolve_out(args.out))
    return 0


def cmd_baseline(args) -> int:
    payload = {"command": "baseline"}
    if args.equilattice is not None:
        pmf = equilattice(args.equilattice, args.power)
        payload["equilattice"] = {
            "cardinality": args.equilattice,
            "power": args.power,
            "pmf": pmf_to_dict(pmf),
        }
        if args.snr_db is not None:
            ch = AwgnChannel(args.power / (10.0 ** (args.snr_db / 10.0)))
            payload["equilattice"]["rate_bits"] = equilattice_rate(
                args.equilattice, ch, args.power, _quadrature(args)
            )
    if args.snr_db is not None:
        payload["shannon_capacity_bits"] = shannon_capacity_bits(
            10.0 ** (args.snr_db / 10.0)
        )
        payload["snr_db"] = args.snr_db
    _emit(dump_json(payload), _resolve_out(args.out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dabawgn",
        description="Finite-support capacity solvers for AWGN channels",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", default=None, help="output path (default stdout; "
                       f"relative paths join ${OUTPUT_DIR_ENV} when set)")
        p.add_argument("--node-count", type=int, default=2001)
        p.add_argument("--truncation-radius", type=float, default=10.0)

    p = sub.add_parser("ac-solve", help="amplitude-constrained capacity at one peak SNR")
    p.add_argument("--peak-snr-db", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--max-outer-iters", type=int, default=300)
    add_common(p)
    p.set_defaults(func=cmd_ac_solve)

    p = sub.add_parser("ac-sweep", help="amplitude-constrained evolution sweep")
    p.add_argument("--peak-snr-db", type=_parse_range, required=True,
                   help="start:end:step in dB")
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--checkpoint-dir", default=None)
    add_common(p)
    p.set_defaults(func=cmd_ac_sweep)

    p = sub.add_parser("pc-solve", help="power-constrained rate at one SNR and cardinality")
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument("--cardinality", type=int, required=True)
    p.add_argument("--power", type=float, default=1.0)
    p.add_argument("--delta-i-tol", type=float, default=1e-5)
    p.add_argument("--max-iters", type=int, default=400)
    add_common(p)
    p.set_defaults(func=cmd_pc_solve)

    p = sub.add_parser("pc-sweep", help="power-constrained cardinality x SNR sweep")
    p.add_argument("--snr-db", type=_parse_range, required=True,
                   help="start:end:step in dB")
    p.add_argument("--cards", type=_parse_card_range, required=True,
                   help="start:end[:step] cardinalities")
    p.add_argument("--delta-i-tol", type=float, default=1e-5)
    p.add_argument("--max-iters", type=int, default=400)
    p.add_argument("--gap-stop", type=float, default=None,
                   help="stop sweeping larger cardinalities once every SNR "
                        "has a record within this gap")
    p.add_argument("--jobs", type=int, default=1,
                   help="run cardinality chains in parallel")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--checkpoint-dir", default=None)
    add_common(p)
    p.set_defaults(func=cmd_pc_sweep)

    p = sub.add_parser("select", help="minimum-cardinality selection from pc-sweep records")
    p.add_argument("--records", required=True, help="pc-sweep JSON output file")
    p.add_argument("--gap", type=float, default=0.01)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    add_common(p)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("baseline", help="Shannon capacity and equilattice references")
    p.add_argument("--equilattice", type=int, default=None, metavar="CARDINALITY")
    p.add_argument("--power", type=float, default=1.0)
    p.add_argument("--snr-db", type=float, default=None)
    add_common(p)
    p.set_defaults(func=cmd_baseline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DabError as err:
        record = {"error": type(err).__name__, "detail": str(err)}
        sys.stderr.write(json.dumps(record) + "\n")
        return 3
    except ValueError as err:
        parser.exit(2, f"dabawgn: invalid arguments: {err}\n")


if __name__ == "__main__":
    sys.exit(main())
