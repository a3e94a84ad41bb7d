import io
import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from qwgkp import closed_form as cf
from qwgkp import codewords as cw
from qwgkp.lattice import SQRT_PI, LatticeParams, inner_product, make_basis_state, momentum_wavefunction

QW_PARAMS = LatticeParams.from_width(0.2)
DQW_PARAMS = LatticeParams.from_width(1 / math.sqrt(8 * math.pi))
XGRID = np.linspace(-12 * SQRT_PI, 12 * SQRT_PI, 4096)


def nearest_multiple(peaks):
    k = np.round(np.asarray(peaks) / SQRT_PI).astype(int)
    return k, np.abs(peaks - k * SQRT_PI)


@pytest.mark.parametrize("bit", [0, 1])
def test_qw_codeword_support(bit):
    c = cw.build_qw_codeword(bit, 8, QW_PARAMS)
    assert c.steps == 8 + bit
    assert abs(c.state.norm2() - 1) < 1e-13
    assert {n % 2 for n, _ in c.state.amplitudes} == {bit}


def test_codeword_validation():
    with pytest.raises(ValueError):
        cw.build_qw_codeword(2, 8, QW_PARAMS)
    with pytest.raises(ValueError):
        cw.build_dqw_codeword(0, 0, QW_PARAMS)
    with pytest.raises(ValueError):
        cw.Codeword("XYZ", 0)
    with pytest.raises(ValueError):
        cw.gkp_codeword(-0.1)


@pytest.mark.parametrize("kind", ["QW", "dQW"])
def test_parity_separation(kind):
    build = cw.build_qw_codeword if kind == "QW" else cw.build_dqw_codeword
    zero, one = build(0, 6, QW_PARAMS).state, build(1, 6, QW_PARAMS).state
    assert inner_product(zero, one) == 0


def test_dqw_codeword_weights():
    c = cw.build_dqw_codeword(0, 8, DQW_PARAMS)
    assert abs(c.state.norm2() - 1) < 1e-12
    ratio = np.array([c.state.amplitude(int(n)) for n in cf.dissipative_sites(8)]) / cf.dissipative_weights(8)
    assert np.allclose(ratio, ratio[0])


@pytest.mark.parametrize("bit", [0, 1])
def test_dqw_position_peaks(bit):
    c = cw.build_dqw_codeword(bit, 8, DQW_PARAMS)
    peaks = cw.density_peaks(XGRID, cw.density(c.state, "x", XGRID))
    k, dev = nearest_multiple(peaks)
    assert dev.max() < 0.01
    assert set(k % 2) == {bit}


def test_encode_dqw_trivial():
    state, rep = cw.encode_dqw(1, 0, 8, DQW_PARAMS)
    assert rep.alpha_eff == 1 and rep.beta_eff == 0
    assert state.max_abs_diff(cw.build_dqw_codeword(0, 8, DQW_PARAMS).state) == 0


def test_encode_dqw_coefficients():
    a = b = 1 / math.sqrt(2)
    state, rep = cw.encode_dqw(a, b, 8, DQW_PARAMS)
    assert np.isclose(rep.gamma, math.sqrt(cf.z_exact(9) / cf.z_exact(8)), rtol=1e-14)
    assert abs(abs(rep.alpha_eff) ** 2 + abs(rep.beta_eff) ** 2 - 1) < 1e-12
    assert abs(rep.norm * rep.alpha_eff - a * math.sqrt(cf.z_exact(8))) < 1e-12
    assert abs(rep.norm * rep.beta_eff - b * math.sqrt(cf.z_exact(9))) < 1e-12
    assert abs(state.norm2() - 1) < 1e-12
    with pytest.raises(ValueError):
        cw.encode_dqw(1, 1, 8, DQW_PARAMS)


def test_encode_dqw_gram_mode():
    low = LatticeParams(0.2)
    _, rep = cw.encode_dqw(0.6, 0.8, 4, low, mode="gram")
    z0 = cw.dissipative_state(4, low).norm2("gram")
    z1 = cw.dissipative_state(5, low, "L").norm2("gram")
    assert np.isclose(rep.gamma, math.sqrt(z1 / z0))
    assert not np.isclose(rep.gamma, math.sqrt(cf.z_exact(5) / cf.z_exact(4)))


@pytest.mark.parametrize("ab", [(1, 0), (0.6, 0.8j), (1 / math.sqrt(2), -1 / math.sqrt(2))])
def test_pipeline_equals_codeword_sum(ab):
    a, b = ab
    direct, _ = cw.encode_dqw(a, b, 8, DQW_PARAMS)
    piped = cw.encode_dqw_pipeline(a, b, 8, DQW_PARAMS)
    assert abs(abs(inner_product(direct, piped)) - 1) < 1e-10
    qw = cw.encode_qw(a, b, 8, QW_PARAMS)
    qw_piped = cw.encode_qw_pipeline(a, b, 8, QW_PARAMS)
    assert qw.max_abs_diff(qw_piped) < 1e-14


def test_encode_qw():
    assert cw.encode_qw(1, 0, 5, QW_PARAMS).max_abs_diff(cw.build_qw_codeword(0, 5, QW_PARAMS).state) == 0
    s = cw.encode_qw(1 / math.sqrt(2), 1 / math.sqrt(2), 5, QW_PARAMS)
    assert abs(s.norm2() - 1) < 1e-13


@pytest.mark.parametrize("kind", ["QW", "dQW"])
def test_conjugate_orthogonal(kind):
    plus, minus = cw.conjugate_codewords(kind, 8, QW_PARAMS)
    assert abs(inner_product(plus.state, minus.state)) < 1e-6
    with pytest.raises(ValueError):
        cw.conjugate_codewords("GKP_approx", 8, QW_PARAMS)


def _envelope():
    return np.abs(momentum_wavefunction(make_basis_state(0, "R", QW_PARAMS).coin_slice("R"), XGRID)) ** 2


@pytest.mark.parametrize("which,parity", [(0, 0), (1, 1)])
def test_conjugate_momentum_peaks(which, parity):
    c = cw.conjugate_codewords("QW", 8, QW_PARAMS)[which]
    dens = cw.density(c.state, "p", XGRID)
    # comb modulation on top of the single-ket envelope sits on the multiples
    k, dev = nearest_multiple(cw.density_peaks(XGRID, dens / _envelope(), 1e-6))
    assert dev.max() < 0.01 and set(k % 2) == {parity}
    # raw peaks are pulled inward by the envelope but keep their parity
    raw = cw.density_peaks(XGRID, dens, 1e-2)
    k, dev = nearest_multiple(raw)
    assert set(k % 2) == {parity}
    assert dev[np.abs(k) <= 2].max() < SQRT_PI / 4


@pytest.mark.parametrize("bit", [0, 1])
def test_qw_momentum_featureless(bit):
    c = cw.build_qw_codeword(bit, 8, QW_PARAMS)
    dens = cw.density(c.state, "p", XGRID)
    assert len(cw.density_peaks(XGRID, dens, 1e-12)) == 1
    assert np.allclose(dens, _envelope(), atol=1e-12)


def test_qw_position_density_even_sites():
    c = cw.build_qw_codeword(0, 8, QW_PARAMS)
    k, dev = nearest_multiple(cw.density_peaks(XGRID, cw.density(c.state, "x", XGRID)))
    assert dev.max() < 0.01 and set(k % 2) == {0}


def test_density_integrates_to_one():
    for s in (cw.build_qw_codeword(0, 8, QW_PARAMS).state, cw.build_dqw_codeword(1, 8, DQW_PARAMS).state):
        for q in "xp":
            assert abs(trapezoid(cw.density(s, q, XGRID), XGRID) - 1) < 1e-6


def test_coin_trace_basis_independent():
    s = cw.build_qw_codeword(1, 6, QW_PARAMS).state
    theta, phi = 0.7, 1.9
    u = np.array([[math.cos(theta), -math.sin(theta) * np.exp(-1j * phi)],
                  [math.sin(theta) * np.exp(1j * phi), math.cos(theta)]])
    for q in "xp":
        ref = cw.density(s, q, XGRID)
        assert np.allclose(cw.coin_basis_density(s, q, XGRID, u), ref, atol=1e-12)
        assert np.allclose(cw.density(s, q, XGRID, "R") + cw.density(s, q, XGRID, "L"), ref)


def test_density_empty_grid():
    with pytest.raises(ValueError):
        cw.density(cw.build_qw_codeword(0, 2, QW_PARAMS).state, "x", [])
    with pytest.raises(ValueError):
        cw.density(cw.build_qw_codeword(0, 2, QW_PARAMS).state, "q", XGRID)


def test_gkp_reference():
    d = 1 / math.sqrt(8 * math.pi)
    x0 = cw.gkp_reference_wavefunction(0, d, d, "x", XGRID)
    p0 = cw.gkp_reference_wavefunction(0, d, d, "p", XGRID)
    assert abs(trapezoid(x0**2, XGRID) - 1) < 1e-8
    k, dev = nearest_multiple(cw.density_peaks(XGRID, x0**2))
    assert dev.max() < 0.01 and set(k % 2) == {0}
    x1 = cw.gkp_reference_wavefunction(1, d, d, "x", XGRID)
    # symmetric widths: the momentum comb of 0 mirrors the position comb of |+>
    plus = (x0 + x1) / math.sqrt(trapezoid((x0 + x1) ** 2, XGRID))
    assert trapezoid(plus * p0, XGRID) > 0.999
    peaks = cw.density_peaks(XGRID, p0**2)
    k, _ = nearest_multiple(peaks)
    # the smooth envelope pulls each spike maximum to k sqrt(pi) / (1 + delta^4)
    assert np.abs(peaks - k * SQRT_PI / (1 + d**4)).max() < 1e-3
    assert set(k % 2) == {0, 1}
    assert set(nearest_multiple(cw.density_peaks(XGRID, x1**2))[0] % 2) == {1}
    with pytest.raises(ValueError):
        cw.gkp_reference_wavefunction(0, d, d, "x", [0.0])


def test_dqw_matches_gkp_shape():
    # the dQW codeword approximates the GKP codeword with matching widths
    d = 1 / math.sqrt(8 * math.pi)
    gkp = cw.gkp_reference_wavefunction(0, d, d, "x", XGRID)
    dqw = cw.wavefunction(cw.build_dqw_codeword(0, 8, DQW_PARAMS).state, "x", XGRID).real
    assert trapezoid(gkp * dqw, XGRID) > 0.99


@pytest.mark.parametrize("N", [4, 8, 16])
def test_spike_width_stable_envelope_grows(N):
    params = LatticeParams(2.0)
    s = cw.build_dqw_codeword(0, N, params).state
    x = np.linspace(-0.05, 0.05, 21)
    c2 = np.polyfit(x, np.log(cw.wavefunction(s, "x", x).real), 2)[0]
    assert abs(math.sqrt(-1 / (2 * c2)) / params.width - 1) < 0.05
    n = np.array(s.sites(), dtype=float)
    amps = np.array([s.amplitude(int(k)) for k in n]).real
    var = np.sum(n**2 * amps**2) / np.sum(amps**2)
    # squared-binomial weights: exact variance N^2 / (2N - 1), i.e. width ~ sqrt(N / 2)
    assert np.isclose(var, N**2 / (2 * N - 1), rtol=1e-12)


def test_squeezing_db():
    assert abs(cw.squeezing_db(-math.log(0.2)) - 13.98) < 0.01
    assert abs(cw.squeezing_db(math.log(math.sqrt(8 * math.pi))) - 14.00) < 0.01
    assert cw.squeezing_db(0) == 0
    assert np.isclose(cw.r_from_db(cw.squeezing_db(1.234)), 1.234)


def test_density_csv_format():
    buf = io.StringIO()
    grid = np.array([0.0, 0.5])
    cw.write_density_csv(buf, "x", grid, np.array([1.0, 0.25]), np.array([1 + 0j, 0.5j]), {"kind": "dQW", "N": 8})
    lines = buf.getvalue().splitlines()
    assert lines[:2] == ["# kind=dQW", "# N=8"]
    assert lines[2] == "quadrature,value,density,re,im"
    assert lines[3] == "x,0.0,1.0,1.0,0.0"
    assert lines[4] == "x,0.5,0.25,0.0,0.5"
