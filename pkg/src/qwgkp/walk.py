"""Coin operators and the discrete-time walk on the squeezed-state lattice.

Displacements by multiples of ``xi_d`` act on the lattice as integer site
shifts, so every walk here is exact up to floating-point rounding.  Coin
matrices use the column convention: ``matrix[:, 0]`` is the image of
``|R>`` and ``matrix[:, 1]`` the image of ``|L>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import COINS, LatticeParams, QumodeState, WalkerState, make_basis_state

COIN_R = np.array([1.0, 0.0], dtype=complex)
COIN_L = np.array([0.0, 1.0], dtype=complex)
COIN_D = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)

_INDEX = {"R": 0, "L": 1}

COIN_LABELS = ("hadamard", "diag_projector", "biased_hadamard", "biased_diagonal", "custom")


@dataclass(frozen=True, eq=False)
class CoinOperator:
    matrix: np.ndarray
    label: str = "custom"
    unitary: bool | None = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"coin matrix must be 2x2, got shape {m.shape}")
        if self.label not in COIN_LABELS:
            raise ValueError(f"unknown coin label {self.label!r}")
        is_unitary = bool(np.linalg.norm(m.conj().T @ m - np.eye(2)) < 1e-12)
        if self.unitary is None:
            object.__setattr__(self, "unitary", is_unitary)
        elif self.unitary and not is_unitary:
            raise ValueError("coin flagged unitary but C^dagger C != I")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, vec):
        return self.matrix @ np.asarray(vec, dtype=complex)


def coin_hadamard() -> CoinOperator:
    return CoinOperator(np.array([[1, 1], [1, -1]]) / math.sqrt(2.0), "hadamard")


def coin_diag_projector() -> CoinOperator:
    return CoinOperator(np.outer(COIN_D, COIN_D.conj()), "diag_projector")


def coin_biased(kind: str) -> CoinOperator:
    """Biased coin: leaves ``|R>`` alone and tosses ``|L>`` with the fair coin.

    ``kind`` is ``"hadamard"`` or ``"diagonal"``.
    """
    fair = {"hadamard": coin_hadamard, "diagonal": coin_diag_projector}
    if kind not in fair:
        raise ValueError(f"kind must be 'hadamard' or 'diagonal', got {kind!r}")
    m = np.column_stack([COIN_R, fair[kind]() @ COIN_L])
    return CoinOperator(m, f"biased_{kind}", unitary=False)


def coin_by_name(name: str) -> CoinOperator:
    aliases = {
        "hadamard": coin_hadamard,
        "dissipative": coin_diag_projector,
        "diag_projector": coin_diag_projector,
    }
    if name not in aliases:
        raise ValueError(f"unknown coin {name!r}")
    return aliases[name]()


# -- lattice gates -------------------------------------------------------------


def apply_coin(state: WalkerState, coin: CoinOperator) -> WalkerState:
    """Apply ``I (x) C`` to a walker state."""
    m = coin.matrix
    out: dict = {}
    for (n, c), amp in state.amplitudes.items():
        j = _INDEX[c]
        for i, c_out in enumerate(COINS):
            if m[i, j] != 0:
                out[(n, c_out)] = out.get((n, c_out), 0) + m[i, j] * amp
    return WalkerState(state.params, out)


def shift(state: WalkerState, k: int) -> WalkerState:
    """Unconditional displacement ``D(k xi_d) (x) I``."""
    return WalkerState(state.params, {(n + k, c): a for (n, c), a in state.amplitudes.items()})


def conditional_shift(state: WalkerState, k_r: int, k_l: int) -> WalkerState:
    """``D(k_r xi_d) (x) |R><R| + D(k_l xi_d) (x) |L><L|``."""
    step = {"R": k_r, "L": k_l}
    return WalkerState(state.params, {(n + step[c], c): a for (n, c), a in state.amplitudes.items()})


def walk_step(state: WalkerState, coin: CoinOperator) -> WalkerState:
    """One walk step: coin toss, then move R right and L left by one site."""
    return conditional_shift(apply_coin(state, coin), +1, -1)


def walk_n(state: WalkerState, coin: CoinOperator, N: int) -> WalkerState:
    if N < 0:
        raise ValueError("number of steps must be nonnegative")
    for _ in range(N):
        state = walk_step(state, coin)
    return state


def prepare_delayed(alpha: complex, beta: complex, coin: CoinOperator, params: LatticeParams) -> WalkerState:
    """Delayed input ``alpha |0>|R> + beta W |0>|L>``."""
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > 1e-12:
        raise ValueError("coin coefficients must satisfy |alpha|^2 + |beta|^2 = 1")
    return alpha * make_basis_state(0, "R", params) + beta * walk_step(make_basis_state(0, "L", params), coin)


def project_coin(state: WalkerState, v) -> QumodeState:
    """Contract the coin index against ``<v|``; the result is unnormalized."""
    v = np.asarray(v, dtype=complex)
    out: dict = {}
    for (n, c), amp in state.amplitudes.items():
        out[n] = out.get(n, 0) + np.conj(v[_INDEX[c]]) * amp
    return QumodeState(state.params, out)
