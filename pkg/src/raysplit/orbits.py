"""Periodic orbits of the step potential as binary necklaces over {L, R}.

Every periodic orbit bounces between the outer walls and the step, spending
each traversal entirely in the left (L) or right (R) region.  An orbit is
therefore a cyclic binary word; cyclically equivalent words describe the same
orbit, so orbits are necklaces.  Adjacent equal symbols (LL or RR) mean a
reflection off the step, adjacent unequal symbols a transmission through it.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, gcd
from typing import Iterable, Iterator

from .model import ScaledStepPotential

_MAX_LENGTH = 32

__all__ = [
    "OrbitCode",
    "OrbitRecord",
    "canonical_rotation",
    "enumerate_necklaces",
    "enumerate_primitive",
    "orbit_record",
    "amplitude",
    "action_spectrum",
]


@dataclass(frozen=True)
class OrbitCode:
    """Canonical representative of a cyclic binary word.

    word is the lexicographically smallest rotation (L < R), nu the number of
    repetitions of the shortest sub-code, primitive_length = len(word) // nu.
    """

    word: str
    nu: int
    primitive_length: int

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def is_primitive(self) -> bool:
        return self.nu == 1


@dataclass(frozen=True)
class OrbitRecord:
    """Scattering counts and reduced action of one orbit on a given potential.

    sigma counts step reflections (cyclic LL or RR pairs), tau2 counts step
    transmissions (LR or RL pairs), sign is the phase factor (-1)^(length +
    rr_pairs) collecting one -1 per wall bounce and one per right-side step
    reflection.  s0 is the reduced action 2 * (n_l * l1 + n_r * l2); the full
    action at wavenumber k is s0 * k.
    """

    code: OrbitCode
    n_l: int
    n_r: int
    sigma: int
    tau2: int
    rr_pairs: int
    sign: int
    s0: float

    def period(self, k: float) -> float:
        """Orbit period in the energy domain, dS/dE = s0 / (2k)."""
        return self.s0 / (2.0 * k)


def canonical_rotation(word: str) -> str:
    """Lexicographically smallest rotation of a word over {L, R}."""
    if not word or set(word) - {"L", "R"}:
        raise ValueError(f"word must be a non-empty string over {{L, R}}, got {word!r}")
    doubled = word + word
    n = len(word)
    return min(doubled[i:i + n] for i in range(n))


def _code_from_word(word: str, period: int) -> OrbitCode:
    return OrbitCode(word=word, nu=len(word) // period, primitive_length=period)


def _necklaces_with_period(n: int) -> Iterator[tuple[str, int]]:
    """Yield (canonical word, primitive period) for all binary necklaces of
    length n, in lexicographic order.

    Classic iterative-deepening generator: extends pre-necklaces a[1..t]
    maintaining the current period p, emitting whenever p divides n.  Each
    emitted word is the smallest rotation of its class.
    """
    a = [0] * (n + 1)
    symbols = "LR"

    def gen(t: int, p: int) -> Iterator[tuple[str, int]]:
        if t > n:
            if n % p == 0:
                yield "".join(symbols[x] for x in a[1:]), p
        else:
            a[t] = a[t - p]
            yield from gen(t + 1, p)
            if a[t - p] == 0:
                a[t] = 1
                yield from gen(t + 1, t)

    yield from gen(1, 1)


def necklace_count(length: int) -> int:
    """Number of binary necklaces of the given length (cyclic Burnside sum)."""
    return sum(_totient(d) * 2 ** (length // d) for d in _divisors(length)) // length


def primitive_count(length: int) -> int:
    """Number of primitive binary necklaces of the given length (Moebius sum)."""
    return sum(_moebius(d) * 2 ** (length // d) for d in _divisors(length)) // length


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _totient(n: int) -> int:
    return sum(1 for i in range(1, n + 1) if gcd(i, n) == 1)


def _moebius(n: int) -> int:
    result, m = 1, n
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


def _check_length(length: int, what: str) -> None:
    if not 1 <= length <= _MAX_LENGTH:
        raise ValueError(f"{what} must lie in [1, {_MAX_LENGTH}], got {length!r}")


def enumerate_necklaces(length: int) -> list[OrbitCode]:
    """All binary necklaces of exactly the given length, lexicographic order."""
    _check_length(length, "length")
    return [_code_from_word(w, p) for w, p in _necklaces_with_period(length)]


def enumerate_primitive(max_length: int) -> list[OrbitCode]:
    """All primitive necklaces of length 1..max_length.

    Ordered by length, then lexicographically; this is the deterministic
    "shortest orbits first" ordering used for trace-formula truncations.
    """
    _check_length(max_length, "max_length")
    out: list[OrbitCode] = []
    for n in range(1, max_length + 1):
        out.extend(
            _code_from_word(w, p) for w, p in _necklaces_with_period(n) if p == n
        )
    return out


def orbit_record(code: OrbitCode, pot: ScaledStepPotential) -> OrbitRecord:
    """Compute counts, sign and reduced action by one cyclic scan of the word."""
    w = code.word
    n = len(w)
    n_r = w.count("R")
    n_l = n - n_r
    rr = sum(1 for i in range(n) if w[i] == "R" and w[(i + 1) % n] == "R")
    tau2 = sum(1 for i in range(n) if w[i] != w[(i + 1) % n])
    sigma = n - tau2
    sign = -1 if (n + rr) % 2 else 1
    s0 = 2.0 * (n_l * pot.l1 + n_r * pot.l2)
    return OrbitRecord(
        code=code, n_l=n_l, n_r=n_r, sigma=sigma, tau2=tau2,
        rr_pairs=rr, sign=sign, s0=s0,
    )


def amplitude(rec: OrbitRecord, pot: ScaledStepPotential) -> float:
    """Stability amplitude sign * r^sigma * t^(2 tau) of one orbit traversal."""
    return rec.sign * pot.r ** rec.sigma * pot.t ** rec.tau2


def action_spectrum(
    orbits: Iterable[OrbitRecord],
    nu_max: int,
    s_max: float,
    merge_tol: float = 1e-9,
) -> list[tuple[float, tuple[str, ...]]]:
    """All repeated reduced actions nu * s0 <= s_max, sorted and merged.

    Returns (action, labels) pairs where labels are "word^nu" strings of every
    contributing orbit; actions closer than merge_tol share one entry.
    """
    if nu_max < 1:
        raise ValueError(f"nu_max must be >= 1, got {nu_max!r}")
    entries: list[tuple[float, str]] = []
    for rec in orbits:
        if rec.code.nu != 1:
            raise ValueError(f"orbit {rec.code.word!r} is not primitive")
        if rec.s0 <= 0.0:
            continue
        nu = 1
        while nu <= nu_max and nu * rec.s0 <= s_max:
            entries.append((nu * rec.s0, f"{rec.code.word}^{nu}"))
            nu += 1
    entries.sort()
    merged: list[tuple[float, tuple[str, ...]]] = []
    for s, label in entries:
        if merged and s - merged[-1][0] <= merge_tol:
            prev_s, prev_labels = merged[-1]
            merged[-1] = (prev_s, prev_labels + (label,))
        else:
            merged.append((s, (label,)))
    return merged
