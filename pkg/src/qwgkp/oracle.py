"""Step-by-step walk engine against the closed-form amplitudes."""

from __future__ import annotations

from dataclasses import dataclass

from . import closed_form
from .lattice import LatticeParams, make_basis_state
from .walk import COIN_D, coin_diag_projector, coin_hadamard, project_coin, walk_n


@dataclass(frozen=True)
class OracleRow:
    coin: str
    start: str
    N: int
    max_dev: float


def _engine_vs_closed(coin_name: str, start: str, N: int, params: LatticeParams) -> float:
    coin = coin_hadamard() if coin_name == "hadamard" else coin_diag_projector()
    state = walk_n(make_basis_state(0, start, params), coin, N)
    worst = 0.0
    for n in range(-N, N + 1, 2):
        if coin_name == "hadamard":
            u, v = closed_form.amp_unitary(N, n, start)
        else:
            u, v = closed_form.amp_dissipative(N, n)
        worst = max(worst, abs(state.amplitude(n, "R") - u), abs(state.amplitude(n, "L") - v))
    # nothing may leak onto sites of the wrong parity or outside the light cone
    stray = [k for k in state.amplitudes if abs(k[0]) > N or (N - k[0]) % 2]
    if stray:
        worst = max(worst, max(abs(state.amplitudes[k]) for k in stray))
    if coin_name == "dissipative":
        projected = project_coin(state, COIN_D)
        for n in range(-N, N + 1, 2):
            worst = max(worst, abs(projected.amplitude(n) - closed_form.weight_dissipative(N, n)))
    return worst


def compare_engine(max_steps: int = 12, params: LatticeParams | None = None) -> list[OracleRow]:
    """Max amplitude deviation per (coin, initial coin, N) for ``1 <= N <= max_steps``.

    The dissipative rows also cover the projected weights ``w_N(n)``.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    params = params or LatticeParams(1.0)
    rows = []
    for coin in ("hadamard", "dissipative"):
        for start in ("R", "L"):
            for N in range(1, max_steps + 1):
                rows.append(OracleRow(coin, start, N, _engine_vs_closed(coin, start, N, params)))
    return rows
