import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from qwgkp.lattice import (
    SQRT_PI,
    LatticeParams,
    QumodeState,
    WalkerState,
    dump_state,
    inner_product,
    load_state,
    make_basis_state,
    momentum_wavefunction,
    position_wavefunction,
    recommended_grid,
    site_overlap,
    state_from_dict,
    state_to_dict,
)

WIDTH_02 = LatticeParams.from_width(0.2)


def random_qumode(rng, params, sites=5, lo=-2):
    amps = rng.normal(size=sites) + 1j * rng.normal(size=sites)
    return QumodeState(params, {lo + k: amps[k] for k in range(sites)})


def test_params_derived_spacing():
    p = LatticeParams(1.0)
    assert np.isclose(p.x_d, SQRT_PI)
    assert np.isclose(p.x_d, math.sqrt(2) * p.xi_d)
    assert np.isclose(LatticeParams.from_xd(0.3, 2.0).xi_d, 2.0 / math.sqrt(2))
    assert np.isclose(WIDTH_02.width, 0.2)


@pytest.mark.parametrize("kw", [dict(r=1.0, xi_d=0.0), dict(r=1.0, xi_d=-1.0), dict(r=float("nan"))])
def test_params_rejects_bad_values(kw):
    with pytest.raises(ValueError):
        LatticeParams(**kw)


def test_basis_state_definition():
    p = LatticeParams(1.0)
    assert make_basis_state(0, "R", p).amplitudes == {(0, "R"): 1}
    assert make_basis_state(-3, "L", p).amplitudes == {(-3, "L"): 1}
    for mode in ("orthogonal", "gram"):
        assert np.isclose(make_basis_state(2, "L", p).norm2(mode), 1.0)
    with pytest.raises(ValueError):
        make_basis_state(0, "X", p)


def test_site_overlap_values():
    p = WIDTH_02
    assert site_overlap(3, 3, p) == 1.0
    expected = math.exp(-p.xi_d**2 * math.exp(2 * p.r) / 2)
    assert np.isclose(expected, 2.97e-9, rtol=2e-3)
    assert abs(site_overlap(0, 1, p) / expected - 1) < 1e-6
    assert np.isclose(site_overlap(0, 2, p), site_overlap(0, 1, p) ** 4, rtol=1e-12)
    assert site_overlap(4, 1, p) == site_overlap(1, 4, p)


@given(st.integers(-20, 20), st.integers(-20, 20), st.floats(0.0, 2.0))
def test_site_overlap_range(m, n, r):
    v = site_overlap(m, n, LatticeParams(r))
    assert 0 <= v <= 1
    assert (v == 1.0) == (m == n)


def test_inner_product_modes():
    p = WIDTH_02
    a = make_basis_state(0, "R", p).coin_slice("R")
    b = make_basis_state(1, "R", p).coin_slice("R")
    assert inner_product(a, b) == 0
    assert np.isclose(inner_product(a, b, "gram"), 2.97e-9, rtol=2e-3)
    # coin components are orthonormal regardless of mode
    w_r, w_l = make_basis_state(0, "R", p), make_basis_state(0, "L", p)
    assert inner_product(w_r, w_l, "gram") == 0
    with pytest.raises(ValueError):
        inner_product(a, b, "bogus")
    with pytest.raises(ValueError):
        inner_product(a, QumodeState(LatticeParams(0.5), {0: 1}))


def test_gram_agrees_with_orthogonal_at_high_squeezing():
    rng = np.random.default_rng(1)
    s = random_qumode(rng, WIDTH_02)
    mass = sum(abs(v) for v in s.amplitudes.values())
    gap = abs(s.norm2("gram") - s.norm2("orthogonal"))
    assert gap <= 10 * site_overlap(0, 1, WIDTH_02) * mass**2


@settings(max_examples=30)
@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False), min_size=1, max_size=6),
       st.floats(0.0, 1.5))
def test_norm_real_nonnegative(coeffs, r):
    s = QumodeState(LatticeParams(r, xi_d=0.4), {k: c for k, c in enumerate(coeffs)})
    for mode in ("orthogonal", "gram"):
        v = inner_product(s, s, mode)
        assert abs(v.imag) < 1e-12
        assert v.real >= -1e-12


def test_pruning_and_arithmetic():
    p = LatticeParams(1.0)
    s = QumodeState(p, {0: 1.0, 1: 1e-31})
    assert s.sites() == [0]
    z = make_basis_state(0, "R", p) - make_basis_state(0, "R", p)
    assert z.is_zero
    two = 2 * make_basis_state(1, "L", p)
    assert two.amplitude(1, "L") == 2
    assert np.isclose((two / 2).norm(), 1.0)
    assert two.normalized().is_normalized


def test_position_peak_value():
    p = WIDTH_02
    s = make_basis_state(0, "R", p).coin_slice("R")
    assert np.isclose(position_wavefunction(s, 0.0), math.exp(p.r / 2) / math.pi**0.25)


def test_position_normalization_on_grid():
    s = make_basis_state(0, "R", WIDTH_02).coin_slice("R")
    x = np.linspace(-3, 3, 6001)
    assert np.isclose(trapezoid(np.abs(position_wavefunction(s, x)) ** 2, x), 1.0, atol=1e-10)


def test_position_translation_covariance():
    rng = np.random.default_rng(2)
    p = LatticeParams(1.0)
    s = random_qumode(rng, p)
    shifted = QumodeState(p, {n + 1: a for n, a in s.amplitudes.items()})
    x = np.linspace(-6, 6, 301)
    assert np.allclose(position_wavefunction(shifted, x + p.x_d), position_wavefunction(s, x))


def test_momentum_single_ket_moments():
    p = LatticeParams(0.8)
    s0 = make_basis_state(0, "R", p).coin_slice("R")
    s1 = make_basis_state(1, "R", p).coin_slice("R")
    grid = np.linspace(-25, 25, 20001)
    d0 = np.abs(momentum_wavefunction(s0, grid)) ** 2
    assert np.isclose(trapezoid(d0, grid), 1.0)
    sd = math.sqrt(trapezoid(grid**2 * d0, grid))
    assert np.isclose(sd, math.exp(p.r) / math.sqrt(2), rtol=1e-8)
    assert np.allclose(np.abs(momentum_wavefunction(s1, grid)) ** 2, d0)


def test_parseval():
    rng = np.random.default_rng(3)
    p = LatticeParams(1.0)
    s = random_qumode(rng, p).normalized("gram")
    x = np.linspace(-20, 20, 40001)
    px = trapezoid(np.abs(position_wavefunction(s, x)) ** 2, x)
    pp = trapezoid(np.abs(momentum_wavefunction(s, x)) ** 2, x)
    assert abs(px - pp) < 1e-8


def test_linearity_walker_states():
    rng = np.random.default_rng(4)
    p = LatticeParams(1.0)
    x = np.linspace(-8, 8, 401)
    for _ in range(5):
        amps = {(int(n), c): complex(*rng.normal(size=2)) for n in rng.integers(-4, 5, size=5) for c in "RL"}
        state = WalkerState(p, amps)
        for coin in "RL":
            expect = sum(a * position_wavefunction(make_basis_state(n, c, p), x, coin) for (n, c), a in amps.items())
            assert np.allclose(position_wavefunction(state, x, coin), expect)


def test_walker_requires_coin():
    with pytest.raises(ValueError):
        position_wavefunction(make_basis_state(0, "R", LatticeParams(1.0)), np.zeros(3))


def test_grid_normalization_matches_gram_norm():
    rng = np.random.default_rng(5)
    for r in (0.3, 1.0, WIDTH_02.r):
        s = random_qumode(rng, LatticeParams(r))
        x = recommended_grid(s)
        assert np.diff(x).max() <= math.exp(-r) / 8 + 1e-12
        val = trapezoid(np.abs(position_wavefunction(s, x)) ** 2, x)
        assert abs(val - s.norm2("gram")) < 1e-6


def test_json_round_trip(tmp_path):
    rng = np.random.default_rng(6)
    p = LatticeParams(1.3)
    q = random_qumode(rng, p)
    w = WalkerState(p, {(1, "R"): 0.5 + 0.25j, (-1, "L"): -0.5})
    for s in (q, w):
        doc = json.loads(json.dumps(state_to_dict(s)))
        back = state_from_dict(doc)
        assert type(back) is type(s)
        assert back.max_abs_diff(s) == 0.0
        assert back.params == s.params
    path = tmp_path / "s.json"
    dump_state(w, path, {"kind": "QW"})
    back, meta = load_state(path)
    assert meta == {"kind": "QW"}
    assert back.max_abs_diff(w) == 0.0
    doc = json.loads(path.read_text())
    assert set(doc) == {"r", "xi_d", "amplitudes", "meta"}
    assert {e["coin"] for e in doc["amplitudes"]} <= {"R", "L"}
