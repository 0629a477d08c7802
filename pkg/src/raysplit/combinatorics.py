"""Exact sum rules over cyclic binary words.

Closed walks of even length 2M on the two-bond chain, grouped into cyclic
classes, carry rational primitive times T_w = M / nu_w and integer weights
read off adjacent pairs: beta_w reflection pairs, gamma_w transmission pairs
(beta_w + gamma_w = M) and a sign from the parity alpha_w of RR pairs.  Two
identities tie the family together exactly, independent of the potential:
summed against x^beta (1-x)^gamma the classes give the constant polynomial 1;
restricted to fixed beta they give the binomial coefficient C(M, beta).  Both
are verified here in exact rational arithmetic, never floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from . import orbits as _orbits
from . import spectrum as _spectrum
from .model import ScaledStepPotential, build_potential

__all__ = [
    "WordClass",
    "WordClassTable",
    "PoissonCaseReport",
    "build_word_table",
    "verify_sum_rule",
    "binomial_sums",
    "poisson_special_case_check",
]

_DEFAULT_MAX_M = 13
_HARD_MAX_M = 16


@dataclass(frozen=True)
class WordClass:
    """One cyclic class: canonical word, repetitions, exact weights."""

    word: str
    nu: int
    t_w: Fraction
    alpha: int
    beta: int
    gamma: int


@dataclass(frozen=True)
class WordClassTable:
    """All cyclic classes of binary words of length 2M, lexicographic order."""

    m: int
    classes: tuple[WordClass, ...]

    @property
    def class_count(self) -> int:
        return len(self.classes)


def _check_m(m: int, allow_large: bool) -> None:
    cap = _HARD_MAX_M if allow_large else _DEFAULT_MAX_M
    if not 1 <= m <= cap:
        raise ValueError(
            f"M must lie in [1, {cap}] (pass allow_large=True to go beyond "
            f"{_DEFAULT_MAX_M}), got {m!r}"
        )


def _pair_weights(x: int, n: int) -> tuple[int, int, int]:
    """(alpha, beta, gamma) of a length-n word encoded with R as bit 1."""
    rot = (x >> 1) | ((x & 1) << (n - 1))
    rr = (x & rot).bit_count()
    tau2 = (x ^ rot).bit_count()
    return rr & 1, (n - tau2) >> 1, tau2 >> 1


def build_word_table(m: int, allow_large: bool = False) -> WordClassTable:
    """Enumerate every cyclic class of length 2M with its exact weights.

    Memory grows with the necklace count (~2.6M classes at M = 13); the
    streaming verifiers below avoid materializing the table.
    """
    _check_m(m, allow_large)
    n = 2 * m
    classes = []
    for word, period in _orbits._necklaces_with_period(n):
        x = 0
        for ch in word:
            x = (x << 1) | (ch == "R")
        alpha, beta, gamma = _pair_weights(x, n)
        nu = n // period
        classes.append(WordClass(
            word=word, nu=nu, t_w=Fraction(m, nu),
            alpha=alpha, beta=beta, gamma=gamma,
        ))
    return WordClassTable(m=m, classes=tuple(classes))


def _signed_counts(m: int) -> dict[int, dict[int, int]]:
    """acc[beta][nu] = sum over classes with that beta and nu of (-1)^alpha.

    Streams the necklace generator with integer words only; exact rational
    work happens once per (beta, nu) cell instead of once per class.
    """
    n = 2 * m
    acc: dict[int, dict[int, int]] = {}
    a = [0] * (n + 1)

    def emit(period: int) -> None:
        x = 0
        for bit in a[1:]:
            x = (x << 1) | bit
        alpha, beta, _ = _pair_weights(x, n)
        by_nu = acc.setdefault(beta, {})
        nu = n // period
        by_nu[nu] = by_nu.get(nu, 0) + (-1 if alpha else 1)

    def gen(t: int, p: int) -> None:
        if t > n:
            if n % p == 0:
                emit(p)
            return
        a[t] = a[t - p]
        gen(t + 1, p)
        if a[t - p] == 0:
            a[t] = 1
            gen(t + 1, t)

    gen(1, 1)
    return acc


def binomial_sums(m: int, allow_large: bool = False) -> tuple[Fraction, ...]:
    """For each beta in 0..M, the exact sum of (-1)^alpha T_w over classes.

    Every entry must equal C(M, beta); returning the computed values rather
    than a verdict keeps the oracle reusable.
    """
    _check_m(m, allow_large)
    acc = _signed_counts(m)
    sums = []
    for beta in range(m + 1):
        total = Fraction(0)
        for nu, count in sorted(acc.get(beta, {}).items()):
            total += Fraction(m * count, nu)
        sums.append(total)
    return tuple(sums)


def verify_sum_rule(m: int, allow_large: bool = False) -> tuple[tuple[Fraction, ...], bool]:
    """Expand P(x) = sum_w T_w (-1)^alpha x^beta (1-x)^gamma exactly.

    Returns the coefficient tuple of P (degree M) and whether P is the
    constant polynomial 1.  gamma = M - beta for every class, so the sum
    collapses onto the per-beta totals before expansion.
    """
    _check_m(m, allow_large)
    per_beta = binomial_sums(m, allow_large)
    coeffs = [Fraction(0)] * (m + 1)
    for beta, total in enumerate(per_beta):
        gamma = m - beta
        for j in range(gamma + 1):
            coeffs[beta + j] += total * comb(gamma, j) * (-1) ** j
    expected = [Fraction(1)] + [Fraction(0)] * m
    return tuple(coeffs), coeffs == expected


@dataclass(frozen=True)
class PoissonCaseReport:
    """Check of the degenerate geometry where both regions weigh the same.

    Choosing b = beta / (1 + beta) makes l1 = l2 = b, every orbit action an
    integer multiple of 2b, and the spectrum the exact comb n pi / (2b).
    """

    lam: float
    b: float
    potential: ScaledStepPotential
    roots_checked: int
    max_root_deviation: float
    max_action_deviation: float
    ok: bool


def poisson_special_case_check(
    lam: float,
    n_roots: int = 20,
    max_orbit_length: int = 6,
    root_tol: float = 1e-10,
    action_tol: float = 1e-12,
) -> PoissonCaseReport:
    """Verify the equal-weight geometry end to end for a given lam in (0, 1)."""
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lambda must lie in (0, 1), got {lam!r}")
    beta = float(np.sqrt(1.0 - lam))
    b = beta / (1.0 + beta)
    pot = build_potential(b, lam)
    comb_spacing = np.pi / (2.0 * b)
    result = _spectrum.find_roots(pot, (n_roots + 0.5) * comb_spacing)
    roots = result.roots[:n_roots]
    expected = comb_spacing * np.arange(1, len(roots) + 1)
    root_dev = float(np.max(np.abs(roots - expected))) if len(roots) else np.inf
    action_dev = 0.0
    for code in _orbits.enumerate_primitive(max_orbit_length):
        rec = _orbits.orbit_record(code, pot)
        multiple = rec.s0 / (2.0 * b)
        action_dev = max(action_dev, abs(multiple - round(multiple)))
    ok = len(roots) == n_roots and root_dev <= root_tol and action_dev <= action_tol
    return PoissonCaseReport(
        lam=lam, b=b, potential=pot,
        roots_checked=len(roots),
        max_root_deviation=root_dev,
        max_action_deviation=action_dev,
        ok=ok,
    )
