"""Walk codewords, encodings, reference GKP wavefunctions and densities."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Mapping, TextIO

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import find_peaks

from . import closed_form
from .lattice import (
    LatticeParams,
    QumodeState,
    WalkerState,
    make_basis_state,
    momentum_wavefunction,
    position_wavefunction,
)
from .walk import COIN_D, coin_diag_projector, coin_hadamard, prepare_delayed, project_coin, walk_n

KINDS = ("QW", "dQW", "GKP_approx")
LOGICALS = (0, 1, "plus", "minus")
QUADRATURES = ("x", "p")


@dataclass(frozen=True, eq=False)
class Codeword:
    kind: str
    logical: int | str
    N: int | None = None
    state: WalkerState | QumodeState | None = None
    widths: tuple[float, float] | None = None  # (delta_x, delta_p), GKP_approx only

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown codeword kind {self.kind!r}")
        if self.logical not in LOGICALS:
            raise ValueError(f"unknown logical value {self.logical!r}")

    @property
    def steps(self) -> int | None:
        """Walk steps taken by this codeword (bit 1 takes one more)."""
        if self.N is None or self.logical not in (0, 1):
            return None
        return self.N + self.logical

    @property
    def params(self) -> LatticeParams | None:
        return None if self.state is None else self.state.params


@dataclass(frozen=True)
class EncodingReport:
    alpha: complex
    beta: complex
    alpha_eff: complex
    beta_eff: complex
    gamma: float
    norm: float  # overall factor sqrt(|alpha|^2 Z_N + |beta|^2 Z_{N+1})

    def to_dict(self) -> dict:
        def c(z):
            return {"re": complex(z).real, "im": complex(z).imag}

        return {
            "alpha": c(self.alpha),
            "beta": c(self.beta),
            "alpha_eff": c(self.alpha_eff),
            "beta_eff": c(self.beta_eff),
            "gamma": self.gamma,
            "norm": self.norm,
        }


def _check_bit(bit):
    if bit not in (0, 1):
        raise ValueError(f"logical bit must be 0 or 1, got {bit!r}")


def _check_steps(N):
    if int(N) != N or N < 1:
        raise ValueError(f"step count must be a positive integer, got {N!r}")


def _check_coefficients(alpha, beta):
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > 1e-12:
        raise ValueError("coefficients must satisfy |alpha|^2 + |beta|^2 = 1")


# -- unitary (Hadamard) codewords ---------------------------------------------


def build_qw_codeword(bit: int, N: int, params: LatticeParams) -> Codeword:
    _check_bit(bit)
    _check_steps(N)
    start = make_basis_state(0, "R" if bit == 0 else "L", params)
    state = walk_n(start, coin_hadamard(), N + bit)
    return Codeword("QW", bit, N, state.normalized())


def encode_qw(alpha: complex, beta: complex, N: int, params: LatticeParams) -> WalkerState:
    _check_coefficients(alpha, beta)
    zero = build_qw_codeword(0, N, params).state
    one = build_qw_codeword(1, N, params).state
    return alpha * zero + beta * one


def encode_qw_pipeline(alpha: complex, beta: complex, N: int, params: LatticeParams) -> WalkerState:
    """Encode through the delayed input state followed by ``N`` walk steps."""
    coin = coin_hadamard()
    return walk_n(prepare_delayed(alpha, beta, coin, params), coin, N)


# -- dissipative codewords ----------------------------------------------------


def dissipative_state(steps: int, params: LatticeParams, start: str = "R") -> QumodeState:
    """Unnormalized D-projected output of ``steps`` diagonal-projector walk steps."""
    walked = walk_n(make_basis_state(0, start, params), coin_diag_projector(), steps)
    return project_coin(walked, COIN_D)


def build_dqw_codeword(bit: int, N: int, params: LatticeParams, mode: str = "orthogonal") -> Codeword:
    _check_bit(bit)
    _check_steps(N)
    raw = dissipative_state(N + bit, params, start="R" if bit == 0 else "L")
    return Codeword("dQW", bit, N, raw.normalized(mode))


def encode_dqw(
    alpha: complex, beta: complex, N: int, params: LatticeParams, mode: str = "orthogonal"
) -> tuple[QumodeState, EncodingReport]:
    """Normalized dissipative encoding of ``alpha |R> + beta |L>`` and its coefficient report.

    With ``mode="gram"`` the normalizations use exact site overlaps instead
    of the closed-form ``Z_N``.
    """
    _check_coefficients(alpha, beta)
    _check_steps(N)
    if mode == "orthogonal":
        z0, z1 = closed_form.z_exact(N), closed_form.z_exact(N + 1)
    else:
        z0 = dissipative_state(N, params).norm2(mode)
        z1 = dissipative_state(N + 1, params, "L").norm2(mode)
    gamma = math.sqrt(z1 / z0)
    denom = math.sqrt(abs(alpha) ** 2 + gamma**2 * abs(beta) ** 2)
    alpha_eff = alpha / denom
    beta_eff = gamma * beta / denom
    norm = math.sqrt(abs(alpha) ** 2 * z0 + abs(beta) ** 2 * z1)
    zero = build_dqw_codeword(0, N, params, mode).state
    one = build_dqw_codeword(1, N, params, mode).state
    state = alpha_eff * zero + beta_eff * one
    return state, EncodingReport(alpha, beta, alpha_eff, beta_eff, gamma, norm)


def encode_dqw_pipeline(alpha: complex, beta: complex, N: int, params: LatticeParams) -> QumodeState:
    """Delayed input, ``N`` dissipative steps, final D projection, normalization."""
    coin = coin_diag_projector()
    walked = walk_n(prepare_delayed(alpha, beta, coin, params), coin, N)
    return project_coin(walked, COIN_D).normalized()


def conjugate_codewords(kind: str, N: int, params: LatticeParams) -> tuple[Codeword, Codeword]:
    builders = {"QW": build_qw_codeword, "dQW": build_dqw_codeword}
    if kind not in builders:
        raise ValueError(f"conjugate codewords are defined for QW and dQW, got {kind!r}")
    zero = builders[kind](0, N, params).state
    one = builders[kind](1, N, params).state
    plus = Codeword(kind, "plus", N, ((zero + one) / math.sqrt(2)).normalized())
    minus = Codeword(kind, "minus", N, ((zero - one) / math.sqrt(2)).normalized())
    return plus, minus


def gkp_codeword(delta_x: float, delta_p: float | None = None, logical: int = 0) -> Codeword:
    """Descriptor of the finite-squeezing GKP reference codeword."""
    _check_bit(logical)
    delta_p = delta_x if delta_p is None else delta_p
    if not (delta_x > 0 and delta_p > 0):
        raise ValueError("GKP widths must be positive")
    return Codeword("GKP_approx", logical, widths=(float(delta_x), float(delta_p)))


def gkp_spike_sites(l: int, delta_p: float, cutoff: float = 1e-16) -> np.ndarray:
    """Lattice sites ``n`` of parity ``l`` whose envelope ``e^{-n^2 pi delta_p^2 / 2}`` exceeds ``cutoff``."""
    nmax = int(math.ceil(math.sqrt(-2 * math.log(cutoff) / (math.pi * delta_p**2)))) + 2
    n = np.arange(-nmax, nmax + 1)
    return n[(n - l) % 2 == 0]


def gkp_reference_wavefunction(l: int, delta_x: float, delta_p: float, quadrature: str, grid) -> np.ndarray:
    """Reference GKP wavefunction on ``grid``, normalized on the grid by trapezoid rule."""
    _check_bit(l)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid must be a 1-D array with at least two samples")
    sp = math.sqrt(math.pi)
    out = np.zeros(grid.shape)
    if quadrature == "x":
        for n in gkp_spike_sites(l, delta_p):
            out += math.exp(-(n**2) * math.pi * delta_p**2 / 2) * np.exp(-((grid - n * sp) ** 2) / (2 * delta_x**2))
    elif quadrature == "p":
        nmax = int(math.ceil((abs(grid).max() + 40 * delta_p) / sp))
        for n in range(-nmax, nmax + 1):
            out += (-1) ** (n * l) * np.exp(-((grid - n * sp) ** 2) / (2 * delta_p**2))
        out *= np.exp(-(delta_x**2) * grid**2 / 2)
    else:
        raise ValueError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    return out / math.sqrt(trapezoid(out**2, grid))


# -- densities ----------------------------------------------------------------


def wavefunction(state, quadrature: str, grid, coin: str | None = None) -> np.ndarray:
    fn = {"x": position_wavefunction, "p": momentum_wavefunction}
    if quadrature not in fn:
        raise ValueError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    return fn[quadrature](state, grid, coin)


def density(state, quadrature: str, grid, coin: str | None = None) -> np.ndarray:
    """Probability density on ``grid``.

    Coin-entangled walker states are traced over the coin unless ``coin``
    selects a single slice.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty grid")
    if isinstance(state, WalkerState) and coin is None:
        return sum(np.abs(wavefunction(state, quadrature, grid, c)) ** 2 for c in ("R", "L"))
    return np.abs(wavefunction(state, quadrature, grid, coin)) ** 2


def coin_basis_density(state: WalkerState, quadrature: str, grid, basis) -> np.ndarray:
    """Coin-traced density computed in an arbitrary orthonormal coin basis."""
    basis = np.asarray(basis, dtype=complex)
    total = np.zeros(np.shape(grid))
    for k in range(2):
        total += density(project_coin(state, basis[:, k]), quadrature, grid)
    return total


def density_peaks(grid, dens, min_rel: float = 1e-3) -> np.ndarray:
    """Local maxima of a sampled density, refined by a parabola through each peak sample.

    Peaks lower than ``min_rel`` times the global maximum are dropped.
    """
    grid = np.asarray(grid, dtype=float)
    dens = np.asarray(dens, dtype=float)
    idx, _ = find_peaks(dens, height=min_rel * dens.max())
    out = []
    for i in idx:
        y0, y1, y2 = dens[i - 1], dens[i], dens[i + 1]
        curv = y0 - 2 * y1 + y2
        off = 0.5 * (y0 - y2) / curv if curv != 0 else 0.0
        out.append(grid[i] + off * (grid[i + 1] - grid[i]))
    return np.array(out)


def squeezing_db(r: float) -> float:
    """Squeezing in dB, ``-10 log10(e^{-2r})``."""
    return 20.0 * r / math.log(10.0)


def r_from_db(db: float) -> float:
    return db * math.log(10.0) / 20.0


def write_density_csv(
    fh: TextIO,
    quadrature: str,
    grid,
    dens,
    wf=None,
    meta: Mapping | None = None,
) -> None:
    """Write a density table; ``meta`` entries become ``#`` comment lines."""
    for key, value in (meta or {}).items():
        fh.write(f"# {key}={value}\n")
    w = csv.writer(fh, lineterminator="\n")
    header = ["quadrature", "value", "density"]
    if wf is not None:
        header += ["re", "im"]
    w.writerow(header)
    for i, v in enumerate(np.asarray(grid, dtype=float)):
        row = [quadrature, repr(float(v)), repr(float(dens[i]))]
        if wf is not None:
            row += [repr(float(wf[i].real)), repr(float(wf[i].imag))]
        w.writerow(row)
