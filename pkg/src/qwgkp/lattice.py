"""Squeezed coherent states on a uniform phase-space lattice.

A walker ket ``|n>_r`` is the position-squeezed vacuum displaced by ``n``
lattice steps.  States are stored as sparse maps from lattice site (and,
for walker states, coin label) to complex amplitude.  Two inner products
are offered: ``"orthogonal"`` treats distinct sites as orthonormal, while
``"gram"`` weights cross terms with the exact Gaussian overlap.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

COINS = ("R", "L")
PRUNE_TOL = 1e-30
INNER_PRODUCT_MODES = ("orthogonal", "gram")

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class LatticeParams:
    """Squeezing ``r`` and displacement step ``xi_d`` (hbar = 1).

    The walker moves in position by ``x_d = sqrt(2) * xi_d`` per step,
    so the default ``xi_d = sqrt(pi / 2)`` gives ``x_d = sqrt(pi)``.
    """

    r: float
    xi_d: float = math.sqrt(math.pi / 2)

    def __post_init__(self):
        if not math.isfinite(self.r):
            raise ValueError(f"squeezing parameter must be finite, got {self.r!r}")
        if not (math.isfinite(self.xi_d) and self.xi_d > 0):
            raise ValueError(f"step length xi_d must be positive, got {self.xi_d!r}")

    @property
    def x_d(self) -> float:
        return math.sqrt(2.0) * self.xi_d

    @property
    def width(self) -> float:
        """Position standard width ``e^{-r}`` of a single spike."""
        return math.exp(-self.r)

    @classmethod
    def from_xd(cls, r: float, x_d: float = SQRT_PI) -> "LatticeParams":
        return cls(r=r, xi_d=x_d / math.sqrt(2.0))

    @classmethod
    def from_width(cls, width: float, x_d: float = SQRT_PI) -> "LatticeParams":
        """Build from the squeeze factor ``e^{-r}``."""
        if not width > 0:
            raise ValueError("squeeze factor e^{-r} must be positive")
        return cls.from_xd(-math.log(width), x_d)


def _clean(amplitudes: Mapping) -> dict:
    out = {}
    for key, value in amplitudes.items():
        value = complex(value)
        if abs(value) >= PRUNE_TOL:
            out[key] = value
    return out


class _LatticeState:
    """Arithmetic shared by walker and qumode states."""

    params: LatticeParams
    amplitudes: dict

    def _new(self, amplitudes):
        return type(self)(self.params, amplitudes)

    def _check_compatible(self, other):
        if type(other) is not type(self):
            raise TypeError(
                f"cannot combine {type(self).__name__} with {type(other).__name__}"
            )
        if other.params != self.params:
            raise ValueError("lattice parameters differ")

    def __add__(self, other):
        self._check_compatible(other)
        out = dict(self.amplitudes)
        for key, value in other.amplitudes.items():
            out[key] = out.get(key, 0) + value
        return self._new(out)

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, float, complex, np.number)):
            return NotImplemented
        return self._new({k: scalar * v for k, v in self.amplitudes.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def __len__(self):
        return len(self.amplitudes)

    def norm2(self, mode: str = "orthogonal") -> float:
        return inner_product(self, self, mode).real

    def norm(self, mode: str = "orthogonal") -> float:
        return math.sqrt(self.norm2(mode))

    def normalized(self, mode: str = "orthogonal"):
        n = self.norm(mode)
        if n == 0:
            raise ValueError("cannot normalize the zero state")
        return self / n

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm2() - 1.0) < 1e-10

    def sites(self) -> list[int]:
        return sorted({_site(k) for k in self.amplitudes})

    def is_zero(self) -> bool:
        return not self.amplitudes

    def max_abs_diff(self, other) -> float:
        self._check_compatible(other)
        keys = set(self.amplitudes) | set(other.amplitudes)
        return max(
            (abs(self.amplitudes.get(k, 0) - other.amplitudes.get(k, 0)) for k in keys),
            default=0.0,
        )


def _site(key) -> int:
    return key[0] if isinstance(key, tuple) else key


@dataclass(frozen=True, eq=False)
class WalkerState(_LatticeState):
    """Joint qumode-coin state, amplitudes keyed by ``(site, coin)``."""

    params: LatticeParams
    amplitudes: dict = field(default_factory=dict)

    def __post_init__(self):
        amps = _clean(self.amplitudes)
        for n, c in amps:
            if c not in COINS:
                raise ValueError(f"unknown coin label {c!r}")
            if int(n) != n:
                raise ValueError(f"site index must be an integer, got {n!r}")
        object.__setattr__(self, "amplitudes", {(int(n), c): v for (n, c), v in amps.items()})

    def coin_slice(self, coin: str) -> "QumodeState":
        """Qumode amplitudes attached to one coin basis state."""
        if coin not in COINS:
            raise ValueError(f"unknown coin label {coin!r}")
        return QumodeState(self.params, {n: v for (n, c), v in self.amplitudes.items() if c == coin})

    def amplitude(self, n: int, coin: str) -> complex:
        return self.amplitudes.get((n, coin), 0j)


@dataclass(frozen=True, eq=False)
class QumodeState(_LatticeState):
    """Qumode state with the coin projected out, keyed by site."""

    params: LatticeParams
    amplitudes: dict = field(default_factory=dict)

    def __post_init__(self):
        amps = _clean(self.amplitudes)
        object.__setattr__(self, "amplitudes", {int(n): v for n, v in amps.items()})

    def amplitude(self, n: int) -> complex:
        return self.amplitudes.get(n, 0j)


def make_basis_state(n: int, coin: str, params: LatticeParams) -> WalkerState:
    return WalkerState(params, {(n, coin): 1.0})


def site_overlap(m: int, n: int, params: LatticeParams) -> float:
    """Overlap ``<m|n>_r = exp(-(m-n)^2 xi_d^2 e^{2r} / 2)``."""
    return math.exp(-((m - n) ** 2) * params.xi_d**2 * math.exp(2 * params.r) / 2)


def inner_product(a, b, mode: str = "orthogonal") -> complex:
    """Inner product ``<a|b>`` of two lattice states of the same kind."""
    if mode not in INNER_PRODUCT_MODES:
        raise ValueError(f"mode must be one of {INNER_PRODUCT_MODES}, got {mode!r}")
    a._check_compatible(b)
    if mode == "orthogonal":
        return complex(sum(np.conj(v) * b.amplitudes.get(k, 0) for k, v in a.amplitudes.items()))
    total = 0j
    for ka, va in a.amplitudes.items():
        for kb, vb in b.amplitudes.items():
            if isinstance(ka, tuple) and ka[1] != kb[1]:
                continue
            total += np.conj(va) * vb * site_overlap(_site(ka), _site(kb), a.params)
    return complex(total)


def _qumode_amplitudes(state, coin):
    if isinstance(state, WalkerState):
        if coin is None:
            raise ValueError("a coin slice is required for walker states")
        return state.coin_slice(coin).amplitudes
    return state.amplitudes


def position_wavefunction(state, x, coin: str | None = None) -> np.ndarray:
    """Position-space wavefunction sampled on ``x``.

    For a :class:`WalkerState`, ``coin`` selects the coin slice.
    """
    x = np.asarray(x, dtype=float)
    p = state.params
    pref = math.exp(p.r / 2) / math.pi**0.25
    var2 = 2 * math.exp(-2 * p.r)
    out = np.zeros(x.shape, dtype=complex)
    for n, c in sorted(_qumode_amplitudes(state, coin).items()):
        out += c * np.exp(-((x - n * p.x_d) ** 2) / var2)
    return pref * out


def momentum_wavefunction(state, p_grid, coin: str | None = None) -> np.ndarray:
    """Momentum-space wavefunction sampled on ``p_grid``."""
    p_grid = np.asarray(p_grid, dtype=float)
    p = state.params
    envelope = math.exp(-p.r / 2) / math.pi**0.25 * np.exp(-(p_grid**2) / (2 * math.exp(2 * p.r)))
    out = np.zeros(p_grid.shape, dtype=complex)
    for n, c in sorted(_qumode_amplitudes(state, coin).items()):
        out += c * np.exp(1j * n * p.x_d * p_grid)
    return envelope * out


def recommended_grid(state, samples_per_width: int = 8, extra_sites: int = 6) -> np.ndarray:
    """Symmetric grid spanning ``±(nmax + extra_sites) x_d`` with step ``<= e^{-r}/8``."""
    p = state.params
    nmax = max((abs(n) for n in state.sites()), default=0)
    half = (nmax + extra_sites) * p.x_d
    step = p.width / samples_per_width
    count = int(math.ceil(2 * half / step)) + 1
    return np.linspace(-half, half, count)


# -- serialization -----------------------------------------------------------


def state_to_dict(state, meta: Mapping | None = None) -> dict:
    amps = []
    for key in sorted(state.amplitudes, key=lambda k: (k, "") if not isinstance(k, tuple) else k):
        n, coin = key if isinstance(key, tuple) else (key, None)
        v = state.amplitudes[key]
        amps.append({"n": n, "coin": coin, "re": v.real, "im": v.imag})
    doc = {"r": state.params.r, "xi_d": state.params.xi_d, "amplitudes": amps}
    if meta:
        doc["meta"] = dict(meta)
    return doc


def state_from_dict(doc: Mapping):
    params = LatticeParams(r=float(doc["r"]), xi_d=float(doc["xi_d"]))
    entries: Iterable[Mapping] = doc["amplitudes"]
    coins = {e.get("coin") for e in entries}
    if coins and coins != {None} and None in coins:
        raise ValueError("amplitude entries mix coin-resolved and coin-free records")
    if coins and None not in coins:
        return WalkerState(params, {(int(e["n"]), e["coin"]): complex(e["re"], e["im"]) for e in entries})
    return QumodeState(params, {int(e["n"]): complex(e["re"], e["im"]) for e in entries})


def dump_state(state, path, meta: Mapping | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_to_dict(state, meta), fh, indent=2)
        fh.write("\n")


def load_state(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return state_from_dict(doc), doc.get("meta", {})
