"""Exact quantization condition and complete root finding.

The spectrum of a single scaled step is the positive zero set of

    secular(k) = sin(k omega1) - r sin(k omega2),

an almost-periodic function with mean zero spacing pi/omega1.  Roots are
isolated by a uniform sign-change scan oversampling that spacing, refined by
bisection plus one Newton step, and certified against the Weyl average
staircase: any deficit triggers progressively finer rescans before failing
loudly.  N-region chains use det(1 - S(k)) rotated onto the real axis so the
same sign-change machinery applies.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import graph
from .model import NStepPotential, ScaledStepPotential

__all__ = [
    "CompletenessError",
    "CompletenessReport",
    "SpectrumResult",
    "secular",
    "secular_slope",
    "matching_determinant",
    "weyl_count",
    "find_roots",
    "nstep_find_roots",
]

STAIRCASE_TOLERANCE = 1.5
_BISECT_ITERS = 46
_MAX_RESCANS = 4
_DEGENERATE_SLOPE = 1e-8
_REFINE_BLOCK = 4096


class CompletenessError(RuntimeError):
    """Raised when the root list stays short of the Weyl bound after rescans.

    Carries the offending k interval and the measured staircase deviation so
    the failure is auditable rather than a silently truncated spectrum.
    """

    def __init__(self, message: str, interval: tuple[float, float], deviation: float):
        super().__init__(message)
        self.interval = interval
        self.deviation = deviation


@dataclass(frozen=True)
class CompletenessReport:
    """Diagnostics certifying the returned root list.

    max_staircase_deviation is sup |N(k) - slope * k / pi| over the scanned
    range, bounded by tolerance (an engineering margin covering the constant
    -1/2 offset plus oscillation, not a theorem).  near_degenerate lists roots
    whose secular slope is below 1e-8 in magnitude; rescans counts how many
    times the scan step was halved.
    """

    max_staircase_deviation: float
    tolerance: float
    near_degenerate: tuple[float, ...]
    rescans: int


@dataclass(frozen=True)
class SpectrumResult:
    roots: np.ndarray
    k_max: float
    completeness: CompletenessReport

    @property
    def energies(self) -> np.ndarray:
        return self.roots ** 2


def secular(pot: ScaledStepPotential, k):
    """sin(k omega1) - r sin(k omega2); zero exactly on the spectrum."""
    k = np.asarray(k, dtype=float) if np.ndim(k) else k
    return np.sin(k * pot.omega1) - pot.r * np.sin(k * pot.omega2)


def secular_slope(pot: ScaledStepPotential, k):
    """d/dk of secular, used for Newton polish and degeneracy flagging."""
    return pot.omega1 * np.cos(k * pot.omega1) - pot.r * pot.omega2 * np.cos(k * pot.omega2)


def matching_determinant(pot: ScaledStepPotential, k):
    """Wavefunction-matching form of the quantization condition,

        cos(k b) sin(kappa (1 - b)) + (kappa / k) sin(k b) cos(kappa (1 - b))

    with kappa = beta k.  Derived by joining sine solutions at the step, so it
    is an independent route to the same zero set: it equals
    (1 + beta) / 2 times secular.  The k -> 0 limit of kappa / k is beta.
    """
    k = np.asarray(k, dtype=float)
    kappa = pot.beta * k
    ratio = np.where(k == 0.0, pot.beta, kappa / np.where(k == 0.0, 1.0, k))
    right = 1.0 - pot.b
    out = np.cos(k * pot.b) * np.sin(kappa * right) + ratio * np.sin(k * pot.b) * np.cos(kappa * right)
    return out if out.ndim else float(out)


def weyl_count(pot: ScaledStepPotential | NStepPotential, k):
    """Average staircase slope * k / pi, the smooth part of the counting."""
    slope = pot.omega1 if isinstance(pot, ScaledStepPotential) else pot.total_length
    return slope * np.asarray(k, dtype=float) / np.pi


def _refine_blocks(f, lo, hi, flo, threads: int):
    """Bisect every bracket to ~1e-15 width, in fixed blocks of brackets.

    Block boundaries do not depend on the thread count, and each block is
    refined independently, so the merged result is bit-identical for any
    number of threads.
    """

    def refine(block):
        lo_b, hi_b, flo_b = (a.copy() for a in block)
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo_b + hi_b)
            fm = f(mid)
            go_left = np.sign(flo_b) * np.sign(fm) <= 0
            hi_b = np.where(go_left, mid, hi_b)
            lo_b = np.where(go_left, lo_b, mid)
            flo_b = np.where(go_left, flo_b, fm)
        return 0.5 * (lo_b + hi_b)

    blocks = [
        (lo[i:i + _REFINE_BLOCK], hi[i:i + _REFINE_BLOCK], flo[i:i + _REFINE_BLOCK])
        for i in range(0, len(lo), _REFINE_BLOCK)
    ]
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            refined = list(pool.map(refine, blocks))
    else:
        refined = [refine(b) for b in blocks]
    return np.concatenate(refined) if refined else np.empty(0)


def _scan_interval(f, k_lo: float, k_hi: float, h: float, threads: int) -> np.ndarray:
    """All sign-change roots of f in (k_lo, k_hi], scan step h."""
    grid = np.arange(k_lo + h / 2, k_hi + h, h)
    if len(grid) < 2:
        grid = np.array([k_lo + h / 2, k_hi + h])
    vals = np.asarray(f(grid))
    sign = np.sign(vals)
    # nudge exact grid zeros so every root sits strictly inside a bracket
    zero = sign == 0
    if zero.any():
        vals = np.where(zero, np.asarray(f(grid + h * 1e-9)), vals)
        sign = np.sign(vals)
    idx = np.where(sign[:-1] * sign[1:] < 0)[0]
    roots = _refine_blocks(f, grid[idx], grid[idx + 1], vals[idx], threads)
    return roots[(roots > 1e-9) & (roots <= k_hi)]


def _staircase_deviation(roots: np.ndarray, slope: float, k_max: float):
    """sup_k |N(k) - slope k / pi| over (0, k_max] and the location of the sup.

    N(k) jumps at the roots and the comparison line is monotone, so the
    supremum is attained at a root position or at k_max.
    """
    w = slope * roots / np.pi
    n = np.arange(1, len(roots) + 1)
    devs = np.concatenate([
        np.abs(n - w),                                   # just after each root
        np.abs(n - 1 - w),                               # just before each root
        [abs(len(roots) - slope * k_max / np.pi)],       # tail up to k_max
    ])
    where = np.concatenate([roots, roots, [k_max]])
    i = int(np.argmax(devs))
    return float(devs[i]), float(where[i])


def _find_roots_engine(
    f, slope: float, k_max: float, threads: int,
    slope_fn=None,
) -> SpectrumResult:
    if k_max <= 0:
        raise ValueError(f"k_max must be positive, got {k_max!r}")
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads!r}")
    h = np.pi / (20.0 * slope)
    roots = _scan_interval(f, 0.0, k_max, h, threads)
    rescans = 0
    dev, where = _staircase_deviation(roots, slope, k_max)
    while dev > STAIRCASE_TOLERANCE and rescans < _MAX_RESCANS:
        rescans += 1
        h *= 0.5
        pad = 2.0 * np.pi / slope
        lo, hi = max(0.0, where - pad), min(k_max, where + pad)
        extra = _scan_interval(f, lo, hi, h, threads)
        roots = np.unique(np.concatenate([roots, extra]))
        keep = np.ones(len(roots), dtype=bool)
        keep[1:] = np.diff(roots) > 1e-10     # same root found in two scans
        roots = roots[keep]
        dev, where = _staircase_deviation(roots, slope, k_max)
    if dev > STAIRCASE_TOLERANCE:
        lo = max(0.0, where - np.pi / slope)
        hi = min(k_max, where + np.pi / slope)
        raise CompletenessError(
            f"staircase deviates by {dev:.3f} (> {STAIRCASE_TOLERANCE}) near "
            f"k = {where:.6g} after {rescans} rescans",
            interval=(lo, hi),
            deviation=dev,
        )
    if slope_fn is not None and len(roots):
        # one Newton polish from analytic slope, kept only when it stays put
        step = np.asarray(f(roots)) / slope_fn(roots)
        polished = roots - step
        roots = np.where(np.abs(step) < h, polished, roots)
        slopes = np.abs(slope_fn(roots))
    else:
        slopes = np.abs(_numeric_slope(f, roots)) if len(roots) else np.empty(0)
    near = tuple(float(x) for x in roots[slopes < _DEGENERATE_SLOPE])
    report = CompletenessReport(
        max_staircase_deviation=dev,
        tolerance=STAIRCASE_TOLERANCE,
        near_degenerate=near,
        rescans=rescans,
    )
    return SpectrumResult(roots=roots, k_max=float(k_max), completeness=report)


def _numeric_slope(f, k: np.ndarray, delta: float = 1e-7) -> np.ndarray:
    return (np.asarray(f(k + delta)) - np.asarray(f(k - delta))) / (2 * delta)


def find_roots(pot: ScaledStepPotential, k_max: float, threads: int = 1) -> SpectrumResult:
    """All roots of the secular equation in (0, k_max], refined below 1e-12.

    k = 0 solves the secular equation trivially but is not an eigenvalue and
    is always excluded.  Raises CompletenessError (with the offending
    interval) if the Weyl staircase bound cannot be met after four rescans.
    """
    return _find_roots_engine(
        lambda k: secular(pot, k),
        pot.omega1,
        k_max,
        threads,
        slope_fn=lambda k: secular_slope(pot, k),
    )


def _real_secular_chain(pot: NStepPotential):
    """Rotate det(1 - S(k)) onto the real axis.

    S(k) factors into a k-independent real vertex part T and bond phases, so
    det S(k) = det(T) e^{2 i Omega k} with Omega the total weighted length.
    Unitarity then makes

        xi(k) = Re[ e^{-i (2 Omega k + theta0 + pi d) / 2 } det(1 - S(k)) ]

    (d the matrix dimension, theta0 = arg det T) a real function with exactly
    the zeros of det(1 - S); its sign changes are scannable like secular's.
    """
    dim = 2 * pot.n_regions
    theta0 = np.angle(np.linalg.det(graph.build_smatrix(pot, 0.0)))
    omega = pot.total_length

    def xi(k):
        karr = np.asarray(k, dtype=float)
        d = graph.det_one_minus_s(pot, karr)
        phase = np.exp(-0.5j * (2.0 * omega * karr + theta0 + np.pi * dim))
        out = (phase * d).real
        return out if np.ndim(k) else float(out)

    return xi


def nstep_find_roots(pot: NStepPotential, k_max: float, threads: int = 1) -> SpectrumResult:
    """Roots of det(1 - S(k)) = 0 for an N-region chain.

    Same contract as find_roots, with Weyl slope sum(l_i) / pi.  For a
    two-region chain this agrees with find_roots root by root.
    """
    if not isinstance(pot, NStepPotential):
        raise TypeError("nstep_find_roots requires an NStepPotential")
    return _find_roots_engine(
        _real_secular_chain(pot),
        pot.total_length,
        k_max,
        threads,
    )
