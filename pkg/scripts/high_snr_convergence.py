"""High-SNR behaviour: log-log outage slope vs diversity order, and how fast the
asymptotic outage / SER expressions close in on the exact ones."""

import argparse

import numpy as np

from cdfmr import analytic
from cdfmr.network import ClusterTopology, modulation_from_name, unbalanced_budget
from cdfmr.scenario import db_to_linear


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--clusters", nargs="+", default=["2,1", "3,2", "3,3", "3,3,3,3,3"])
    ap.add_argument("--delta", type=float, default=4.0)
    ap.add_argument("--rate", type=float, default=0.3)
    args = ap.parse_args()

    th = analytic.OutageThreshold(args.rate)
    bpsk = modulation_from_name("BPSK")
    grid = np.arange(30.0, 60.0 + 1e-9, 5.0)
    for spec in args.clusters:
        topo = ClusterTopology(tuple(int(s) for s in spec.split(",")))
        rows = []
        for g in grid:
            b = unbalanced_budget(topo.n_clusters, args.delta, db_to_linear(g))
            p, s = analytic.outage_probability(topo, b, th), analytic.ser(topo, b, bpsk)
            rows.append((g, p, analytic.asymptotic_outage(topo, b, th) / p, s, analytic.asymptotic_ser(topo, b, bpsk) / s))
        hi = [r for r in rows if r[0] >= 40]
        slope = np.polyfit([r[0] / 10 for r in hi], [np.log10(r[1]) for r in hi], 1)[0]
        print(f"{topo}  L_m={topo.min_size}  outage slope 40-60 dB: {slope:.4f}")
        print("  gd_db      outage  asym/exact         ser  asym/exact")
        for g, p, rp, s, rs in rows:
            print(f"  {g:5.0f}  {p:10.3e}  {rp:10.6f}  {s:10.3e}  {rs:10.6f}")


if __name__ == "__main__":
    main()
