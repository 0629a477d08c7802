#!/usr/bin/env python3
"""Recover periodic-orbit actions from a computed spectrum.

Computes the exact levels of a scaled step potential, Fourier transforms the
level sequence over a window of reduced actions, and matches every resolved
|F(s)| peak against the complete action lattice 2 (a l1 + c l2).  The printed
table marks which peaks belong to the ballistic (Newtonian) family and which
exist only because the step splits rays.

Writes <outdir>/fourier.csv and <outdir>/peaks.json.
"""

import argparse
import json
import math
from pathlib import Path

import numpy as np

from raysplit.analysis import (
    default_s_spacing,
    default_tolerance,
    detect_peaks,
    fourier_transform,
    match_peaks,
)
from raysplit.model import build_potential
from raysplit.orbits import action_spectrum, enumerate_primitive, orbit_record
from raysplit.spectrum import find_roots


def action_lattice(pot, s_max):
    """Every repeated reduced action is 2 (a l1 + c l2) with a, c >= 0."""
    out = []
    for a in range(int(s_max / (2 * pot.l1)) + 2):
        for c in range(int(s_max / (2 * pot.l2)) + 2):
            if (a, c) == (0, 0):
                continue
            s = 2.0 * (a * pot.l1 + c * pot.l2)
            if s <= s_max:
                out.append(s)
    return sorted(out)


def orbit_labels(pot, s_max, max_length):
    """Map lattice actions to the orbit words that realize them."""
    recs = [orbit_record(c, pot) for c in enumerate_primitive(max_length)]
    nu_max = max(1, int(s_max / min(r.s0 for r in recs)) + 1)
    return action_spectrum(recs, nu_max, s_max)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--b", type=float, default=0.7, help="step position")
    ap.add_argument("--lam", type=float, default=0.5, help="step strength")
    ap.add_argument("--kmax", type=float, default=10_000.0, help="spectrum cutoff")
    ap.add_argument("--smin", type=float, default=0.2)
    ap.add_argument("--smax", type=float, default=10.0)
    ap.add_argument("--threshold", type=float, default=0.05,
                    help="peak floor as a fraction of the level count")
    ap.add_argument("--max-length", type=int, default=8,
                    help="orbit code length used for labelling peaks")
    ap.add_argument("--outdir", type=Path, default=Path("out/spectroscopy"))
    args = ap.parse_args()

    pot = build_potential(args.b, args.lam)
    result = find_roots(pot, args.kmax)
    roots = result.roots
    k_top = float(roots[-1])
    print(f"levels: {len(roots)} roots up to k = {k_top:.3f} "
          f"(staircase deviation {result.completeness.max_staircase_deviation:.3f})")

    ds = default_s_spacing(k_top)
    s = np.arange(args.smin + ds, args.smax + ds, ds)
    profile = fourier_transform(roots, s)
    peaks = detect_peaks(profile, args.threshold)
    tol = default_tolerance(k_top)
    match = match_peaks(peaks, action_lattice(pot, args.smax + tol), tol)
    labels = orbit_labels(pot, args.smax + tol, args.max_length)

    newtonian = 2.0 * pot.omega1 * np.arange(1, int(args.smax / (2 * pot.omega1)) + 2)
    print(f"\npeaks above {args.threshold:.2f} J on ({args.smin}, {args.smax}] "
          f"(match tolerance {tol:.2e}):")
    print(f"{'s_peak':>10} {'|F|/J':>7} {'action':>10} {'type':>10}  orbits")
    rows = []
    for peak, action, resid in match.pairs:
        height = float(np.interp(peak, s, profile.magnitude)) / profile.j_roots
        if math.isnan(action):
            kind, words = "unmatched", ""
        else:
            kind = "Newtonian" if np.min(np.abs(newtonian - action)) <= tol else "ray-split"
            near = [lab for val, labs in labels for lab in labs if abs(val - action) <= tol]
            words = ", ".join(near[:4]) + ("..." if len(near) > 4 else "")
        print(f"{peak:10.5f} {height:7.3f} {action:10.5f} {kind:>10}  {words}")
        rows.append({"s": peak, "height_fraction": height,
                     "action": None if math.isnan(action) else action,
                     "residual": None if math.isinf(resid) else resid,
                     "kind": kind, "orbits": words})
    print(f"\nmatched fraction: {match.matched_fraction:.3f} "
          f"(worst residual {match.worst_residual:.2e})")

    args.outdir.mkdir(parents=True, exist_ok=True)
    with open(args.outdir / "fourier.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# schema_version=1 kind=fourier\ns,absF\n")
        for sv, mv in zip(profile.s_grid, profile.magnitude):
            fh.write(f"{sv:.15g},{mv:.15g}\n")
    with open(args.outdir / "peaks.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump({"schema_version": 1, "kind": "fourier-peaks",
                   "b": args.b, "lambda": args.lam, "k_max": k_top,
                   "tolerance": tol, "matched_fraction": match.matched_fraction,
                   "peaks": rows}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {args.outdir}/fourier.csv and {args.outdir}/peaks.json")


if __name__ == "__main__":
    main()
