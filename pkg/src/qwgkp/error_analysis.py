"""Glancy-Knill no-error probability over the shifted-grid basis.

The basis ``|s,t>_l`` is the ideal GKP comb of logical value ``l``
(positions ``(2m + l) sqrt(pi)``) shifted by ``s`` in position and ``t`` in
momentum.  A codeword's shift density is ``|<s,t|psi>|^2``; integrating it
over the box ``|s|, |t| <= sqrt(pi)/6`` gives the probability that repeated
correction never incurs a Pauli error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import closed_form
from .codewords import Codeword, build_dqw_codeword, gkp_codeword, gkp_spike_sites, squeezing_db
from .lattice import SQRT_PI, LatticeParams, QumodeState

GK_HALF_WIDTH = SQRT_PI / 6
TAIL_SIGMAS = 12.0


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


@dataclass(frozen=True)
class ShiftDomain:
    s_range: tuple[float, float] = (-GK_HALF_WIDTH, GK_HALF_WIDTH)
    t_range: tuple[float, float] = (-GK_HALF_WIDTH, GK_HALF_WIDTH)
    order: int = 32

    @classmethod
    def glancy_knill(cls, order: int = 32) -> "ShiftDomain":
        return cls(order=order)

    @classmethod
    def full(cls, order: int = 128) -> "ShiftDomain":
        """One full period of the basis labels; integrates to the total probability."""
        return cls((-SQRT_PI, SQRT_PI), (-SQRT_PI / 2, SQRT_PI / 2), order)


@dataclass(frozen=True)
class PerfPoint:
    N: int
    delta: float
    squeezing_db: float
    p_dqw: float
    p_gkp: float | None


def _teeth(sites, width, s_max, reference):
    reach = s_max + TAIL_SIGMAS * width
    lo = math.floor((sites.min() - reference - reach / SQRT_PI) / 2) - 1
    hi = math.ceil((sites.max() - reference + reach / SQRT_PI) / 2) + 1
    return np.arange(lo, hi + 1, dtype=float)


def _position_factors(sites, coeffs, width, s, reference):
    # psi((2m + l) sqrt(pi) + s), without the ket prefactor; shape (len(s), len(m))
    m = _teeth(sites, width, float(np.max(np.abs(s), initial=0.0)), reference)
    d = (s[:, None, None] + (2 * m[None, :, None] + reference - sites[None, None, :]) * SQRT_PI) / width
    return np.exp(-0.5 * d**2) @ coeffs, m


def comb_overlap(sites, coeffs, width: float, s, t, reference: int = 0) -> np.ndarray:
    """``<s,t|psi>`` for ``psi(x) = sum_n c_n (pi w^2)^{-1/4} exp(-(x - n sqrt(pi))^2 / 2w^2)``.

    ``sites`` and ``coeffs`` describe a Gaussian comb on the ``sqrt(pi)``
    lattice with spike width ``width``; the coefficients must already carry
    the state normalization.  ``s`` and ``t`` broadcast against each other.
    """
    sites = np.asarray(sites, dtype=float)
    coeffs = np.asarray(coeffs, dtype=complex)
    s_b, t_b = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
    g, m = _position_factors(sites, coeffs, width, s_b.ravel(), reference)
    phase = np.exp(2j * SQRT_PI * t_b.ravel()[:, None] * m[None, :])
    out = np.sum(g * phase, axis=1) / math.sqrt(math.pi * width)
    return out.reshape(s_b.shape)


def comb_overlap_grid(sites, coeffs, width: float, s, t, reference: int = 0) -> np.ndarray:
    """Outer-product form of :func:`comb_overlap`: rows follow ``s``, columns ``t``."""
    sites = np.asarray(sites, dtype=float)
    coeffs = np.asarray(coeffs, dtype=complex)
    g, m = _position_factors(sites, coeffs, width, np.asarray(s, dtype=float).ravel(), reference)
    phase = np.exp(2j * SQRT_PI * np.asarray(t, dtype=float).ravel()[:, None] * m[None, :])
    return (g @ phase.T) / math.sqrt(math.pi * width)


def _require_sqrt_pi_spacing(params: LatticeParams) -> None:
    if abs(params.x_d - SQRT_PI) > 1e-12:
        raise ValueError(f"shifted-grid overlaps need x_d = sqrt(pi), got {params.x_d!r}")


def grid_overlap_dqw(N: int, params: LatticeParams, s, t, reference: int | None = None) -> np.ndarray:
    """``<s,t|phi_N>`` for the normalized dissipative codeword after ``N`` steps.

    ``reference`` selects the ideal comb (even or odd sites); it defaults to
    the parity of ``N``, which is the parity of the codeword's support.
    """
    _require_sqrt_pi_spacing(params)
    reference = N % 2 if reference is None else reference
    coeffs = closed_form.dissipative_weights(N) / math.sqrt(closed_form.z_exact(N))
    return comb_overlap(closed_form.dissipative_sites(N), coeffs, params.width, s, t, reference)


def _gkp_comb(l: int, delta_x: float, delta_p: float):
    sites = gkp_spike_sites(l, delta_p)
    coeffs = np.exp(-(sites**2) * math.pi * delta_p**2 / 2)
    diff = sites[:, None] - sites[None, :]
    gram = np.exp(-(diff**2) * math.pi / (4 * delta_x**2))
    return sites, coeffs / math.sqrt(coeffs @ gram @ coeffs)


def grid_overlap_gkp(l: int, delta_x: float, delta_p: float, s, t, reference: int | None = None) -> np.ndarray:
    """``<s,t|l~>`` for the normalized finite-squeezing GKP codeword."""
    sites, coeffs = _gkp_comb(l, delta_x, delta_p)
    reference = l if reference is None else reference
    return comb_overlap(sites, coeffs, delta_x, s, t, reference)


def grid_overlap_state(state: QumodeState, s, t, reference: int = 0) -> np.ndarray:
    """``<s,t|state>`` for any lattice state with ``x_d = sqrt(pi)`` (orthogonal sites)."""
    _require_sqrt_pi_spacing(state.params)
    sites = sorted(state.amplitudes)
    coeffs = [state.amplitudes[n] for n in sites]
    return comb_overlap(sites, coeffs, state.params.width, s, t, reference)


def integrate_box(density: Callable, domain: ShiftDomain, tol: float = 1e-6, max_order: int = 2048) -> float:
    """Tensor Gauss-Legendre integral with order doubling.

    ``density(s, t)`` receives 1-D node arrays and returns the
    ``(len(s), len(t))`` table of integrand values.  Doubling stops once
    successive estimates differ by less than ``tol``.
    """

    def estimate(order):
        x, w = np.polynomial.legendre.leggauss(order)
        (s0, s1), (t0, t1) = domain.s_range, domain.t_range
        s = 0.5 * (s1 - s0) * x + 0.5 * (s1 + s0)
        t = 0.5 * (t1 - t0) * x + 0.5 * (t1 + t0)
        return float(w @ density(s, t) @ w) * 0.25 * (s1 - s0) * (t1 - t0)

    order = domain.order
    prev = estimate(order)
    while order < max_order:
        order *= 2
        cur = estimate(order)
        if abs(cur - prev) < tol:
            return cur
        prev = cur
    raise QuadratureError(f"no convergence to {tol} by order {max_order} (last estimate {prev})")


def codeword_comb(codeword: Codeword):
    """``(sites, coeffs, width, reference)`` of a codeword on the sqrt(pi) lattice."""
    if codeword.kind == "dQW" and codeword.logical in (0, 1):
        _require_sqrt_pi_spacing(codeword.params)
        N = codeword.steps
        coeffs = closed_form.dissipative_weights(N) / math.sqrt(closed_form.z_exact(N))
        return closed_form.dissipative_sites(N), coeffs, codeword.params.width, N % 2
    if codeword.kind == "GKP_approx":
        dx, dp = codeword.widths
        sites, coeffs = _gkp_comb(codeword.logical, dx, dp)
        return sites, coeffs, dx, codeword.logical
    if isinstance(codeword.state, QumodeState):
        state = codeword.state
        _require_sqrt_pi_spacing(state.params)
        sites = state.sites()
        return sites, [state.amplitudes[n] for n in sites], state.params.width, sites[0] % 2
    raise ValueError(f"no shift-grid projection for {codeword.kind} codeword {codeword.logical!r}")


def shift_density(codeword: Codeword) -> Callable:
    """``(s, t) -> |<s,t|codeword>|^2`` on the outer product of node arrays."""
    sites, coeffs, width, ref = codeword_comb(codeword)
    return lambda s, t: np.abs(comb_overlap_grid(sites, coeffs, width, s, t, ref)) ** 2


def p_no_error(codeword: Codeword, domain: ShiftDomain | None = None, tol: float = 1e-6) -> float:
    """Probability of repeated correction without Pauli errors."""
    return integrate_box(shift_density(codeword), domain or ShiftDomain(), tol)


def symmetric_delta(N: int) -> float:
    """Width ``1/sqrt(N pi)`` that equalizes position and momentum widths."""
    return 1.0 / math.sqrt(N * math.pi)


def perf_point(N: int, compare_gkp: bool = True) -> PerfPoint:
    delta = symmetric_delta(N)
    params = LatticeParams.from_width(delta)
    p_dqw = p_no_error(build_dqw_codeword(0, N, params))
    p_gkp = p_no_error(gkp_codeword(delta)) if compare_gkp else None
    return PerfPoint(N, delta, squeezing_db(params.r), p_dqw, p_gkp)


def sweep(N_list: Sequence[int], compare_gkp: bool = True) -> list[PerfPoint]:
    return [perf_point(int(N), compare_gkp) for N in N_list]


PERF_HEADER = ("N", "delta", "squeezing_db", "p_dqw", "p_gkp")


def write_perf_csv(fh, points: Sequence[PerfPoint]) -> None:
    fh.write(",".join(PERF_HEADER) + "\n")
    for pt in points:
        gkp = "" if pt.p_gkp is None else repr(pt.p_gkp)
        fh.write(f"{pt.N},{pt.delta!r},{pt.squeezing_db!r},{pt.p_dqw!r},{gkp}\n")
