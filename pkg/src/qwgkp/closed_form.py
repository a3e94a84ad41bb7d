"""Closed-form walk amplitudes, normalizations and codeword wavefunctions.

These formulas are evaluated independently of :mod:`qwgkp.walk` and serve
as its oracle.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .lattice import LatticeParams

EXACT_BINOMIAL_LIMIT = 30


class AmplitudePair(NamedTuple):
    u: float  # R component
    v: float  # L component


def binom(n: int, k: int) -> float:
    """Binomial coefficient, zero outside ``0 <= k <= n``.

    Exact integer arithmetic for ``n <= 30``, log-gamma above.
    """
    if n < 0 or k < 0 or k > n:
        return 0.0
    if n <= EXACT_BINOMIAL_LIMIT:
        return float(math.comb(n, k))
    return math.exp(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1))


def _check_site(N: int, n: int) -> None:
    if N < 1:
        raise ValueError(f"step count must be positive, got {N}")
    if abs(n) > N or (N - n) % 2:
        raise ValueError(f"site {n} is not reachable after {N} steps")


def _alt_sum(a: int, b: int, shift_b: int, upper: int, sign_offset: int, N: int, n: int) -> float:
    # sum_{k=0}^{upper} C(a,k) C(b,k+shift_b) (-1)^{(N-n)/2 - k + sign_offset}
    half = (N - n) // 2
    total = 0.0
    for k in range(0, upper + 1):
        total += binom(a, k) * binom(b, k + shift_b) * (-1) ** ((half - k + sign_offset) % 2)
    return total


def amp_unitary(N: int, n: int, eps: str) -> AmplitudePair:
    """Hadamard-walk amplitudes ``(u, v)`` at site ``n`` after ``N`` steps from ``|0>|eps>``."""
    _check_site(N, n)
    scale = 1.0 / math.sqrt(2.0**N)
    if eps == "R":
        if n == N:
            return AmplitudePair(scale, 0.0)
        if n == -N:
            return AmplitudePair(0.0, (-1) ** (N - 1) * scale)
        a = (N - n - 2) // 2
        k_u = min((N - n - 2) // 2, (N + n - 2) // 2)
        k_v = min((N - n - 2) // 2, (N + n) // 2)
        u = _alt_sum(a, (N + n) // 2, 1, k_u, -1, N, n)
        v = _alt_sum(a, (N + n) // 2, 0, k_v, -1, N, n)
        return AmplitudePair(scale * u, scale * v)
    if eps == "L":
        if n == N:
            return AmplitudePair(scale, 0.0)
        if n == -N:
            return AmplitudePair(0.0, (-1) ** N * scale)
        a = (N + n - 2) // 2
        k_u = min((N + n - 2) // 2, (N - n) // 2)
        k_v = min((N + n - 2) // 2, (N - n - 2) // 2)
        u = _alt_sum(a, (N - n) // 2, 0, k_u, 0, N, n)
        v = _alt_sum(a, (N - n) // 2, 1, k_v, -1, N, n)
        return AmplitudePair(scale * u, scale * v)
    raise ValueError(f"initial coin must be 'R' or 'L', got {eps!r}")


def amp_dissipative(N: int, n: int) -> AmplitudePair:
    """Amplitudes of the diagonal-projector walk; identical for both initial coins."""
    _check_site(N, n)
    scale = 0.5**N
    if n == N:
        return AmplitudePair(scale, 0.0)
    if n == -N:
        return AmplitudePair(0.0, scale)
    return AmplitudePair(scale * binom(N - 1, (N + n - 2) // 2), scale * binom(N - 1, (N + n) // 2))


def weight_dissipative(N: int, n: int) -> float:
    """Coefficient ``w_N(n)`` of ``|n>_r |D>`` after the final D projection."""
    if N < 0:
        raise ValueError("step count must be nonnegative")
    if abs(n) > N or (N - n) % 2:
        return 0.0
    return binom(N, (N + n) // 2) / 2.0 ** (N + 0.5)


def dissipative_sites(N: int) -> np.ndarray:
    return np.arange(-N, N + 1, 2)


def dissipative_weights(N: int) -> np.ndarray:
    return np.array([weight_dissipative(N, int(n)) for n in dissipative_sites(N)])


def z_exact(N: int) -> float:
    """Squared norm of the projected dissipative state with orthogonal sites."""
    return binom(2 * N, N) / 2.0 ** (2 * N + 1)


def z_approx(N: int) -> float:
    if N < 1:
        raise ValueError("large-N approximation needs N >= 1")
    return 1.0 / (2.0 * math.sqrt(math.pi * N))


def momentum_wf_dqw(N: int, params: LatticeParams, p) -> np.ndarray:
    """Momentum wavefunction of the normalized dissipative codeword (coin factor dropped)."""
    p = np.asarray(p, dtype=float)
    pref = math.sqrt(math.exp(-params.r) / (2 * math.sqrt(math.pi) * z_exact(N)))
    return pref * np.exp(-(p**2) / (2 * math.exp(2 * params.r))) * np.cos(params.x_d * p) ** N


def position_wf_dqw_largeN(N: int, params: LatticeParams, x) -> np.ndarray:
    """Large-N (Stirling) position wavefunction of the dissipative codeword."""
    x = np.asarray(x, dtype=float)
    pref = math.sqrt(2 * math.exp(params.r) / (math.pi * math.sqrt(N)))
    var2 = 2 * math.exp(-2 * params.r)
    out = np.zeros(x.shape)
    for n in dissipative_sites(N):
        out += math.exp(-(n**2) / (2 * N)) * np.exp(-((x - n * params.x_d) ** 2) / var2)
    return pref * out
