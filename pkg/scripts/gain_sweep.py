#!/usr/bin/env python3
"""Amplification gain vs segment count for the built-in schedule.

The pairwise trap-and-merge walk turns N cylinder segments into
floor(N/2) independent rings, each carrying the full input quanta, so
the readout sees gain = floor(N/2) (1 for the degenerate N=1 drum).
"""

from fluxdsm.fluxtrap import (CylinderGeometry,
                              default_amplification_schedule,
                              run_amplification_sequence)

B_IN = 1e-10


def main() -> None:
    print(f"{'segments':>9} {'gain':>5} {'quanta out':>11}")
    for n in range(1, 13):
        geom = CylinderGeometry(radius=0.02, n_segments=n, n_eff=4.0)
        schedule = default_amplification_schedule(n)
        state, gain = run_amplification_sequence(geom, B_IN, schedule)
        print(f"{n:>9} {gain:>5} {state.trapped_flux_total:>11}")


if __name__ == "__main__":
    main()
