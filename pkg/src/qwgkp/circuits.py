"""Dense-operator checks of the walk's circuit implementation.

Cavity operators live on a truncated Fock space of dimension ``dim``;
joint cavity-qubit operators use ``np.kron(cavity, qubit)`` ordering and
two-qubit operators ``np.kron(coin, ancilla)``.  Qubit basis ``|0> = |R>``,
``|1> = |L>``.  Rotations follow ``R_a(phi) = exp(-i phi sigma_a)`` (no
factor 1/2).

Truncated displacements are only trusted on low photon numbers, so Fock
residuals are measured on the block with photon number below
``dim - margin`` and against a reference built at a larger dimension.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .lattice import LatticeParams, WalkerState, make_basis_state
from .walk import (
    CoinOperator,
    apply_coin,
    coin_biased,
    coin_diag_projector,
    coin_hadamard,
    conditional_shift,
    prepare_delayed,
    shift,
    walk_step,
)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)
KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET_PLUS = (KET0 + KET1) / math.sqrt(2)
KET_MINUS = (KET0 - KET1) / math.sqrt(2)

DEFAULT_DIM = 64
DEFAULT_MARGIN = 20


# -- truncated Fock space --------------------------------------------------------


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)


def number_op(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim)).astype(complex)


def fock_displacement(xi: complex, dim: int) -> np.ndarray:
    """``exp(xi a^dagger - xi^* a)`` on the truncated space."""
    a = annihilation(dim)
    return scipy.linalg.expm(xi * a.conj().T - np.conj(xi) * a)


def fock_squeeze(r: float, dim: int) -> np.ndarray:
    """``exp((r/2)(a^2 - a^dagger^2))``; ``r > 0`` squeezes position."""
    a = annihilation(dim)
    return scipy.linalg.expm(0.5 * r * (a @ a - a.conj().T @ a.conj().T))


def position_op(dim: int) -> np.ndarray:
    a = annihilation(dim)
    return (a + a.conj().T) / math.sqrt(2)


def vacuum(dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[0] = 1
    return v


def squeezed_ket(n: int, params: LatticeParams, dim: int) -> np.ndarray:
    """``D(n xi_d) S(r) |vac>`` in the truncated Fock basis."""
    return fock_displacement(n * params.xi_d, dim) @ fock_squeeze(params.r, dim) @ vacuum(dim)


def fock_site_overlap(m: int, n: int, params: LatticeParams, dim: int = 80) -> complex:
    return np.vdot(squeezed_ket(m, params, dim), squeezed_ket(n, params, dim))


def conditional_rotation(angle: float, dim: int) -> np.ndarray:
    """``exp(-i angle n (x) Z)`` on cavity (x) qubit."""
    phases = np.exp(-1j * angle * np.arange(dim))
    return np.kron(np.diag(phases), P0) + np.kron(np.diag(phases.conj()), P1)


def sqrt_parity(dim: int) -> np.ndarray:
    return np.diag(np.exp(-0.5j * np.pi * np.arange(dim)))


def kept_photons(dim: int, margin: int, keep: int | None = None) -> int:
    """Photon-number cutoff of the trusted block: ``keep`` if given, else ``dim - margin``."""
    if keep is not None:
        if not 0 < keep <= dim:
            raise ValueError(f"keep must lie in 1..{dim}, got {keep}")
        return keep
    return dim - min(margin, dim // 2)


def block_residual(a: np.ndarray, b: np.ndarray, dim: int, margin: int, keep: int | None = None) -> float:
    """Spectral-norm distance of two cavity (x) qubit operators on the low-photon block."""
    idx = np.arange(2 * kept_photons(dim, margin, keep))
    return float(np.linalg.norm((a - b)[np.ix_(idx, idx)], 2))


def _reference_dim(dim: int) -> int:
    return 2 * dim + 64


def _controlled_displacement_exact(xi: float, dim: int) -> np.ndarray:
    big = _reference_dim(dim)
    d_minus = fock_displacement(-xi, big)[:dim, :dim]
    d_plus = fock_displacement(xi, big)[:dim, :dim]
    return np.kron(d_minus, P0) + np.kron(d_plus, P1)


def controlled_displacement_algebraic(xi: float, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the controlled-displacement identity at truncation ``dim``."""
    left = np.kron(fock_displacement(-xi, dim), P0) + np.kron(fock_displacement(xi, dim), P1)
    right = (np.kron(np.eye(dim), P0) + np.kron(fock_displacement(2 * xi, dim), P1)) @ np.kron(
        fock_displacement(-xi, dim), I2
    )
    return left, right


def controlled_displacement_circuit(xi: float, dim: int) -> np.ndarray:
    """Conditional quarter-turn rotations sandwiching the unconditional ``D(-i xi)``."""
    c = conditional_rotation(np.pi / 2, dim)
    return c @ np.kron(fock_displacement(-1j * xi, dim), I2) @ c.conj().T


def verify_controlled_displacement(
    xi: float, dim: int = DEFAULT_DIM, margin: int = DEFAULT_MARGIN, form: str = "both", keep: int | None = None
) -> float:
    """Residual of the controlled-displacement identity.

    ``form="algebraic"`` compares the two sides of the product identity at
    the same truncation.  ``form="construction"`` compares the
    rotation-sandwich circuit with the exact controlled displacement.
    ``"both"`` returns the larger of the two.  ``keep`` fixes the
    photon-number cutoff of the compared block, which makes residuals at
    different ``dim`` comparable.
    """
    out = []
    if form in ("algebraic", "both"):
        left, right = controlled_displacement_algebraic(xi, dim)
        out.append(block_residual(left, right, dim, margin, keep))
    if form in ("construction", "both"):
        exact = _controlled_displacement_exact(xi, dim)
        out.append(block_residual(controlled_displacement_circuit(xi, dim), exact, dim, margin, keep))
    if not out:
        raise ValueError(f"form must be 'algebraic', 'construction' or 'both', got {form!r}")
    return max(out)


def controlled_displacement_lattice_residual(seed: int = 0, sites: int = 7) -> float:
    """Product identity on lattice states, where displacements by ``k xi`` are exact shifts."""
    rng = np.random.default_rng(seed)
    params = LatticeParams(1.0)
    amps = rng.normal(size=(sites, 2)) + 1j * rng.normal(size=(sites, 2))
    state = WalkerState(params, {(n - sites // 2, c): amps[n, j] for n in range(sites) for j, c in enumerate("RL")})
    # R = |0>, L = |1>: left applies D(-xi), D(+xi); right applies D(-xi) then D(2 xi) on |1>
    left = conditional_shift(state, -1, +1)
    right = conditional_shift(shift(state, -1), 0, +2)
    return left.max_abs_diff(right)


# -- walk factorization ----------------------------------------------------------


def factorized_walk_step(state: WalkerState, coin: CoinOperator) -> WalkerState:
    """``[I (x) |R><R| + D(-2 xi_d) (x) |L><L|] (D(+xi_d) (x) C)`` on the lattice."""
    return conditional_shift(shift(apply_coin(state, coin), +1), 0, -2)


def _random_walker(rng, params, sites=9) -> WalkerState:
    amps = rng.normal(size=(sites, 2)) + 1j * rng.normal(size=(sites, 2))
    return WalkerState(params, {(n - sites // 2, c): amps[n, j] for n in range(sites) for j, c in enumerate("RL")})


def verify_walk_factorization(coin: CoinOperator | None = None, seed: int = 0) -> float:
    """Max amplitude difference between the walk step and its circuit factorization.

    Checks the given coin, or the Hadamard, diagonal-projector and identity
    coins when ``coin`` is None.
    """
    coins = [coin] if coin is not None else [coin_hadamard(), coin_diag_projector(), CoinOperator(I2)]
    rng = np.random.default_rng(seed)
    params = LatticeParams(1.0)
    worst = 0.0
    for c in coins:
        state = _random_walker(rng, params)
        worst = max(worst, walk_step(state, c).max_abs_diff(factorized_walk_step(state, c)))
    return worst


def verify_walk_factorization_fock(coin: CoinOperator, xi: float = 0.5, dim: int = DEFAULT_DIM,
                                   margin: int = DEFAULT_MARGIN) -> float:
    """The same factorization with truncated Fock displacements."""
    d = {k: fock_displacement(k * xi, dim) for k in (-2, -1, 1)}
    c = coin.matrix
    walk = (np.kron(d[1], P0) + np.kron(d[-1], P1)) @ np.kron(np.eye(dim), c)
    fact = (np.kron(np.eye(dim), P0) + np.kron(d[-2], P1)) @ np.kron(d[1], c)
    return block_residual(walk, fact, dim, margin)


# -- delayed-state preparation ---------------------------------------------------


def delayed_prep_circuit(state: WalkerState, biased: CoinOperator) -> WalkerState:
    """Controlled displacement, then one biased walk step."""
    return walk_step(conditional_shift(state, -1, 0), biased)


def delayed_prep_reduced(state: WalkerState, biased: CoinOperator) -> WalkerState:
    """Reduced two-controlled-displacement form of the same gate sequence."""
    return conditional_shift(apply_coin(conditional_shift(state, 0, +1), biased), 0, -2)


def verify_delayed_prep(alpha: complex, beta: complex, kind: str, params: LatticeParams | None = None) -> float:
    """Max amplitude mismatch between circuit, reduced circuit and the delayed state.

    ``kind`` is ``"hadamard"`` or ``"diagonal"``.
    """
    params = params or LatticeParams(1.0)
    fair = {"hadamard": coin_hadamard, "diagonal": coin_diag_projector}[kind]()
    biased = coin_biased(kind)
    inp = alpha * make_basis_state(0, "R", params) + beta * make_basis_state(0, "L", params)
    via_circuit = delayed_prep_circuit(inp, biased)
    via_reduced = delayed_prep_reduced(inp, biased)
    target = prepare_delayed(alpha, beta, fair, params)
    return max(via_circuit.max_abs_diff(via_reduced), via_circuit.max_abs_diff(target))


# -- POVM for the biased diagonal coin ------------------------------------------


class SvdBundle(NamedTuple):
    V: np.ndarray
    U: np.ndarray
    D1: np.ndarray
    D2: np.ndarray
    theta1: float
    theta2: float
    eps: float


def povm_measurement_ops() -> tuple[np.ndarray, np.ndarray]:
    """Measurement operators ``M1``, ``M2`` of the two-outcome biased-coin POVM."""
    c = math.sqrt(2 / 3)
    m1 = c * np.array([[1, 0], [0.5, 0.5]], dtype=complex)
    m2 = c * np.array([[0.5, -0.5], [0, 1]], dtype=complex)
    return m1, m2


def povm_effects() -> tuple[np.ndarray, np.ndarray]:
    """Effects ``M_i^dagger M_i``; these carry the prefactor 2/3."""
    return tuple(m.conj().T @ m for m in povm_measurement_ops())


def povm_svd() -> SvdBundle:
    s5 = math.sqrt(5)
    V = np.array([[-2, 1 + s5], [1 + s5, 2]], dtype=complex) / math.sqrt(10 + 2 * s5)
    U = np.array([[-1, 2 + s5], [2 + s5, 1]], dtype=complex) / math.sqrt(10 + 4 * s5)
    D1 = np.diag([s5 - 1, s5 + 1]).astype(complex) / (2 * math.sqrt(3))
    D2 = np.diag([s5 + 1, s5 - 1]).astype(complex) / (2 * math.sqrt(3))
    theta1 = math.atan2(D2[0, 0].real, D1[0, 0].real)
    theta2 = math.atan2(D2[1, 1].real, D1[1, 1].real)
    return SvdBundle(V, U, D1, D2, theta1, theta2, theta1 - theta2)


def rx(phi: float) -> np.ndarray:
    return scipy.linalg.expm(-1j * phi * X)


def ry(phi: float) -> np.ndarray:
    return scipy.linalg.expm(-1j * phi * Y)


def rz(phi: float) -> np.ndarray:
    return scipy.linalg.expm(-1j * phi * Z)


def conditional_z_rotation(phi: float) -> np.ndarray:
    """``|0><0| (x) R_z(phi) + |1><1| (x) R_z(-phi)``, coin first."""
    return np.kron(P0, rz(phi)) + np.kron(P1, rz(-phi))


def biased_coin_unitary(svd: SvdBundle | None = None, transpose: bool = False) -> np.ndarray:
    """Two-qubit Neumark circuit for the biased-coin POVM.

    Gate order in time: ``U`` on the coin, ``R_x(+pi/4)`` on the ancilla,
    conditional ``R_z(eps/2)``, ``R_x(-pi/4)`` and ``R_y((theta1+theta2)/2)``
    on the ancilla, ``V`` on the coin.  With ``transpose=True`` the coin
    unitaries become ``V^T`` (first) and ``U^T`` (last), which realizes the
    transposed measurement operators.
    """
    svd = svd or povm_svd()
    first, last = (svd.V.T, svd.U.T) if transpose else (svd.U, svd.V)
    mean = 0.5 * (svd.theta1 + svd.theta2)
    controlled_ry = np.kron(I2, rx(-np.pi / 4)) @ conditional_z_rotation(svd.eps / 2) @ np.kron(I2, rx(np.pi / 4))
    return np.kron(last, I2) @ np.kron(I2, ry(mean)) @ controlled_ry @ np.kron(first, I2)


def kraus_from_circuit(unitary: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Coin Kraus operators for ancilla outcomes 0 and 1, ancilla prepared in ``|0>``."""
    u = unitary.reshape(2, 2, 2, 2)  # (coin_out, anc_out, coin_in, anc_in)
    return u[:, 0, :, 0], u[:, 1, :, 0]


def biased_coin_circuit(psi_c, transpose: bool = False) -> tuple[np.ndarray, float]:
    """Pre-measurement joint state and its residual against ``M1|psi>|0> + M2|psi>|1>``."""
    psi_c = np.asarray(psi_c, dtype=complex)
    joint = biased_coin_unitary(transpose=transpose) @ np.kron(psi_c, KET0)
    m1, m2 = povm_measurement_ops()
    if transpose:
        m1, m2 = m1.T, m2.T
    target = np.kron(m1 @ psi_c, KET0) + np.kron(m2 @ psi_c, KET1)
    return joint, float(np.linalg.norm(joint - target))


def conditional_phase_family(phi01: float, phi10: float, phi_zeta: float) -> np.ndarray:
    phi11 = phi01 + phi10 - phi_zeta
    return np.diag(np.exp(1j * np.array([0.0, phi01, phi10, phi11])))


def fair_coin_unitary() -> np.ndarray:
    """Ancilla Hadamard, coin-conjugated controlled-Z, ancilla Hadamard.

    The Hadamards on the coin turn the controlled-Z into an X-basis test, so
    ancilla outcome 0 projects the coin onto ``|+>``.
    """
    cz = np.diag([1, 1, 1, -1]).astype(complex)
    h_anc = np.kron(I2, H)
    h_coin = np.kron(H, I2)
    return h_anc @ h_coin @ cz @ h_coin @ h_anc


def fair_coin_circuit(psi_c) -> tuple[np.ndarray, float]:
    """Joint state before measurement and its residual against ``C_D|psi>|0> + (I - C_D)|psi>|1>``."""
    psi_c = np.asarray(psi_c, dtype=complex)
    joint = fair_coin_unitary() @ np.kron(psi_c, KET0)
    proj = np.outer(KET_PLUS, KET_PLUS.conj())
    target = np.kron(proj @ psi_c, KET0) + np.kron((I2 - proj) @ psi_c, KET1)
    return joint, float(np.linalg.norm(joint - target))


def outcome_probability(joint: np.ndarray, outcome: int) -> float:
    return float(np.sum(np.abs(joint.reshape(2, 2)[:, outcome]) ** 2))


def post_measurement_coin(joint: np.ndarray, outcome: int) -> np.ndarray:
    branch = joint.reshape(2, 2)[:, outcome]
    return branch / np.linalg.norm(branch)


def global_phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``min_phi ||a - e^{i phi} b||`` for equal-shape operators."""
    inner = np.vdot(b, a)
    phase = inner / abs(inner) if abs(inner) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))


def random_qubit_states(count: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(count, 2)) + 1j * rng.normal(size=(count, 2))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# -- suite -----------------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual < self.threshold)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


REPORT_SCHEMA = {
    "type": "object",
    "required": ["dim", "xi", "seed", "passed", "checks"],
    "additionalProperties": False,
    "properties": {
        "dim": {"type": "integer", "minimum": 2},
        "xi": {"type": "number"},
        "seed": {"type": "integer"},
        "passed": {"type": "boolean"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "residual", "threshold", "passed"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "residual": {"type": "number"},
                    "threshold": {"type": "number"},
                    "passed": {"type": "boolean"},
                },
            },
        },
    },
}


def run_suite(dim: int = DEFAULT_DIM, xi: float = 1.0, seed: int = 0, margin: int = DEFAULT_MARGIN) -> list[CheckResult]:
    """Every circuit identity with its residual and pass threshold."""
    out = []

    out.append(CheckResult("controlled_displacement_lattice", controlled_displacement_lattice_residual(seed), 1e-13))
    out.append(CheckResult(
        "controlled_displacement_algebraic",
        verify_controlled_displacement(xi, dim, margin, "algebraic"), 1e-13))
    out.append(CheckResult(
        "controlled_displacement_construction",
        verify_controlled_displacement(xi, dim, margin, "construction"), 1e-8))

    out.append(CheckResult("parity_conjugation", parity_conjugation_residual(xi, dim, margin), 1e-8))
    out.append(CheckResult("site_overlap_fock", fock_overlap_residual(LatticeParams(0.5, 0.5)), 1e-6))

    out.append(CheckResult("walk_factorization", verify_walk_factorization(seed=seed), 1e-15))
    out.append(CheckResult(
        "walk_factorization_fock",
        max(verify_walk_factorization_fock(c, min(xi, 0.5), dim, margin) for c in (coin_hadamard(), coin_diag_projector())),
        1e-8))

    states = random_qubit_states(20, seed)
    delayed = max(
        verify_delayed_prep(a, b, kind) for a, b in states for kind in ("hadamard", "diagonal")
    )
    out.append(CheckResult("delayed_prep", delayed, 1e-15))

    m1, m2 = povm_measurement_ops()
    completeness = np.linalg.norm(m1.conj().T @ m1 + m2.conj().T @ m2 - I2)
    out.append(CheckResult("povm_completeness", float(completeness), 1e-14))
    out.append(CheckResult("povm_effects_psd", max(0.0, -povm_min_effect_eigenvalue()), 1e-14))

    svd = povm_svd()
    recon = max(np.linalg.norm(svd.V @ svd.D1 @ svd.U - m1), np.linalg.norm(svd.V @ svd.D2 @ svd.U - m2))
    out.append(CheckResult("povm_svd_reconstruction", float(recon), 1e-12))
    out.append(CheckResult("povm_angle", abs(svd.eps - math.acos(2 / 3)), 1e-12))

    out.append(CheckResult("biased_coin_map", max(biased_coin_circuit(s)[1] for s in states), 1e-12))
    out.append(CheckResult("biased_coin_map_transposed", max(biased_coin_circuit(s, True)[1] for s in states), 1e-12))

    eps = svd.eps
    u2 = conditional_phase_family(eps, eps, 2 * (eps - np.pi))
    out.append(CheckResult(
        "conditional_phase_crot",
        float(np.linalg.norm(u2 - np.exp(0.5j * eps) * conditional_z_rotation(eps / 2))), 1e-12))
    u3 = conditional_phase_family(2 * np.pi, 2 * np.pi, 3 * np.pi)
    cz = np.kron(P0, I2) + np.kron(P1, Z)
    out.append(CheckResult("conditional_phase_cz", float(np.linalg.norm(u3 - cz)), 1e-12))

    out.append(CheckResult("fair_coin", max(fair_coin_circuit(s)[1] for s in states), 1e-12))
    return out


# -- auxiliary checks ------------------------------------------------------------


def unitarity_residual(op: np.ndarray, keep: int | None = None) -> float:
    """``||O^dagger O - I||`` on the leading ``keep`` basis states (all when None)."""
    g = op.conj().T @ op - np.eye(op.shape[0])
    if keep is not None:
        g = g[:keep, :keep]
    return float(np.linalg.norm(g, 2))


def parity_conjugation_residual(xi: complex, dim: int = DEFAULT_DIM, margin: int = DEFAULT_MARGIN) -> float:
    """``sqrt(Pi) D(xi) sqrt(Pi)^dagger`` against ``D(-i xi)`` on the low-photon block."""
    s = sqrt_parity(dim)
    diff = s @ fock_displacement(xi, dim) @ s.conj().T - fock_displacement(-1j * xi, dim)
    k = kept_photons(dim, margin)
    return float(np.linalg.norm(diff[:k, :k], 2))


def povm_min_effect_eigenvalue() -> float:
    return float(min(np.linalg.eigvalsh(e).min() for e in povm_effects()))


def fock_overlap_residual(params: LatticeParams, pairs=((0, 1), (0, 2), (1, -1)), dim: int = 80) -> float:
    """Largest gap between the lattice site overlap and its truncated-Fock value."""
    from .lattice import site_overlap

    return max(abs(fock_site_overlap(m, n, params, dim) - site_overlap(m, n, params)) for m, n in pairs)
