"""Fixed-cardinality rates on the power-constrained channel.

For a few input cardinalities, runs warm-started SNR chains and compares
the optimized rates against Shannon capacity and the uniform equilattice.
The optimized pmfs close most of the lattice's shaping loss until the
log2-cardinality ceiling takes over. Writes pc_rates.csv.
"""

import csv

import dabawgn as dw

CARDS = [2, 4, 8]
SNRS_DB = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0]
OUT = "pc_rates.csv"


def main():
    print("card  snr_db   capacity   dab_rate   lattice    dab_gap  lattice_gap")
    rows = []
    records = dw.pc_sweep(SNRS_DB, CARDS)
    for rec in records:
        ch = dw.AwgnChannel(10.0 ** (-rec.snr_db / 10.0))
        capacity = rec.rate + rec.gap_to_capacity
        lattice = dw.equilattice_rate(rec.cardinality, ch, 1.0)
        print(
            f"{rec.cardinality:4d}  {rec.snr_db:6.1f}  {capacity:9.5f}"
            f"  {rec.rate:9.5f}  {lattice:9.5f}"
            f"  {rec.gap_to_capacity:8.5f}  {capacity - lattice:10.5f}"
        )
        rows.append(
            [rec.cardinality, rec.snr_db, capacity, rec.rate, lattice,
             rec.gap_to_capacity, capacity - lattice, rec.converged_by]
        )

    with open(OUT, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["cardinality", "snr_db", "capacity_bits", "dab_rate_bits",
             "equilattice_rate_bits", "dab_gap_bits", "equilattice_gap_bits",
             "converged_by"]
        )
        writer.writerows(rows)
    print(f"\nTable written to {OUT}")
    print("Note how the 8-point optimized input hugs capacity until about "
          "15 dB, while the 8-point lattice keeps a shaping loss.")


if __name__ == "__main__":
    main()
