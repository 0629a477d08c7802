"""Quantum-graph scattering matrix for step-potential chains.

The potential is mapped onto a linear graph: one bond per constant region
(weighted length l_i), dead-end vertices at the walls and a scattering vertex
at each interface.  Waves live on directed bonds; the unitary matrix S(k)
propagates amplitudes across one vertex scattering plus one bond traversal.
The spectrum is the zero set of det(1 - S(k)), and traces of powers of S
expand into sums over closed bond sequences, which is what ties the matrix
to the periodic-orbit sums.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import NStepPotential, ScaledStepPotential, interface_coefficients

__all__ = [
    "GraphScatteringModel",
    "build_graph",
    "build_smatrix",
    "det_one_minus_s",
    "trace_power",
    "orbit_trace_sum",
    "counting_function",
]

_MAX_WORD_POWER = 24


@dataclass(frozen=True)
class GraphScatteringModel:
    """Static description of the chain graph underlying a potential.

    connectivity is the symmetric vertex adjacency matrix, vertex_blocks holds
    -1.0 for each dead end and the 2x2 orthogonal block [[r, t], [t, -r]] for
    each interface vertex, bond_lengths the weighted lengths, and dimension
    the size 2 * n_bonds of the directed-bond basis.
    """

    connectivity: np.ndarray
    vertex_blocks: tuple
    bond_lengths: np.ndarray
    dimension: int


def _chain_params(pot: ScaledStepPotential | NStepPotential):
    """Betas and weighted lengths of the chain, for either potential type."""
    if isinstance(pot, ScaledStepPotential):
        return (1.0, pot.beta), (pot.l1, pot.l2)
    if isinstance(pot, NStepPotential):
        return pot.betas, pot.lengths
    raise TypeError(f"unsupported potential type {type(pot).__name__}")


def build_graph(pot: ScaledStepPotential | NStepPotential) -> GraphScatteringModel:
    """Connectivity, vertex blocks and bond lengths of the chain graph."""
    betas, lengths = _chain_params(pot)
    n = len(lengths)
    conn = np.zeros((n + 1, n + 1), dtype=int)
    for i in range(n):
        conn[i, i + 1] = conn[i + 1, i] = 1
    blocks: list = [-1.0]
    for i in range(n - 1):
        r, t = interface_coefficients(betas[i], betas[i + 1])
        blocks.append(np.array([[r, t], [t, -r]]))
    blocks.append(-1.0)
    return GraphScatteringModel(
        connectivity=conn,
        vertex_blocks=tuple(blocks),
        bond_lengths=np.asarray(lengths, dtype=float),
        dimension=2 * n,
    )


def _smatrix_stack(pot, k: np.ndarray) -> np.ndarray:
    """S(k) for an array of wavenumbers, shape (len(k), 2N, 2N).

    Single step: the 4x4 block form [[0, -D], [D sigma, 0]] with
    D = diag(e^{i l1 k}, e^{i l2 k}) and sigma = [[r, t], [t, -r]].

    Chain: directed-bond basis (1>, ..., N>, 1<, ..., N<) where i> moves
    right.  Each entry carries the vertex coefficient into the new bond times
    that bond's phase e^{i l k}; dead ends contribute -1.
    """
    k = np.asarray(k)
    betas, lengths = _chain_params(pot)
    n = len(lengths)
    ph = np.exp(1j * np.multiply.outer(k, np.asarray(lengths)))  # (..., n)
    S = np.zeros(k.shape + (2 * n, 2 * n), dtype=complex)
    if isinstance(pot, ScaledStepPotential):
        r, t = pot.r, pot.t
        S[..., 0, 2] = -ph[..., 0]
        S[..., 1, 3] = -ph[..., 1]
        S[..., 2, 0] = r * ph[..., 0]
        S[..., 2, 1] = t * ph[..., 0]
        S[..., 3, 0] = t * ph[..., 1]
        S[..., 3, 1] = -r * ph[..., 1]
        return S
    for i in range(n - 1):
        r, t = interface_coefficients(betas[i], betas[i + 1])
        S[..., n + i, i] = r * ph[..., i]            # i> reflects into i<
        S[..., i + 1, i] = t * ph[..., i + 1]        # i> transmits into (i+1)>
        S[..., i + 1, n + i + 1] = -r * ph[..., i + 1]   # (i+1)< reflects back
        S[..., n + i, n + i + 1] = t * ph[..., i]    # (i+1)< transmits into i<
    S[..., 0, n] = -ph[..., 0]                       # left wall
    S[..., 2 * n - 1, n - 1] = -ph[..., n - 1]       # right wall
    return S


def build_smatrix(pot: ScaledStepPotential | NStepPotential, k: float) -> np.ndarray:
    """Graph scattering matrix S(k), unitary for real k."""
    return _smatrix_stack(pot, np.asarray(float(k)))


def det_one_minus_s(pot, k) -> complex | np.ndarray:
    """det(1 - S(k)); vanishes exactly on the spectrum.

    Accepts scalar or array k, real or complex (small imaginary parts are
    useful for probing zeros off the real axis).
    """
    karr = np.asarray(k, dtype=complex)
    S = _smatrix_stack(pot, karr)
    eye = np.eye(S.shape[-1])
    d = np.linalg.det(eye - S)
    return complex(d) if karr.ndim == 0 else d


def trace_power(pot, k: float, n: int) -> complex:
    """Tr S(k)^n from the matrix power.

    Odd powers vanish identically because the chain graph is bipartite (every
    closed walk alternates between the two wall-to-step bond directions).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    S = build_smatrix(pot, k)
    return complex(np.trace(np.linalg.matrix_power(S, n)))


def _popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x).astype(np.int64)


def orbit_trace_sum(pot: ScaledStepPotential, k: float, n: int) -> complex:
    """Tr S^{2n} assembled from binary words instead of the matrix.

    Each length-n word over {L, R} is one closed bond sequence; scanning its
    cyclic pairs gives reflection and transmission counts and the word's
    weighted length L_n = n_L l1 + n_R l2.  The sum

        2 * sum_words (-1)^chi r^sigma t^(2 tau) e^{2 i k L_n}

    must reproduce trace_power(pot, k, 2n), which is the central oracle
    equivalence between the graph and orbit pictures.
    """
    if not isinstance(pot, ScaledStepPotential):
        raise TypeError("orbit_trace_sum requires the two-bond step potential")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    if n > _MAX_WORD_POWER:
        raise ValueError(f"n must be <= {_MAX_WORD_POWER}, got {n!r} (2^n words)")
    total = 0.0 + 0.0j
    chunk = 1 << 20
    top = np.uint64(1) << np.uint64(n - 1)
    for start in range(0, 1 << n, chunk):
        w = np.arange(start, min(start + chunk, 1 << n), dtype=np.uint64)
        rot = (w >> np.uint64(1)) | ((w & np.uint64(1)) * top)
        n_r = _popcount(w)                      # bit 1 encodes R
        rr = _popcount(w & rot)
        tau2 = _popcount(w ^ rot)
        sigma = n - tau2
        sign = np.where((n + rr) % 2, -1.0, 1.0)
        amp = sign * pot.r ** sigma * pot.t ** tau2
        ln = (n - n_r) * pot.l1 + n_r * pot.l2
        total += np.sum(amp * np.exp(2j * k * ln))
    return complex(2.0 * total)


def counting_function(pot, k: float, n_max: int) -> float:
    """Spectral staircase from the trace expansion,

        N(k) = (sum_i l_i) k / pi - 1/2 + (1/pi) Im sum_{n<=n_max} Tr S^n / n.

    Approaches the exact number of levels below k as n_max grows, with the
    usual half-step at the levels themselves.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max!r}")
    _, lengths = _chain_params(pot)
    S = build_smatrix(pot, k)
    acc = 0.0
    power = np.eye(S.shape[0], dtype=complex)
    for n in range(1, n_max + 1):
        power = power @ S
        acc += np.trace(power).imag / n
    return sum(lengths) * k / np.pi - 0.5 + acc / np.pi
