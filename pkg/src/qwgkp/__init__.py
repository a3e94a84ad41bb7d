"""Quantum-walk preparation of approximate GKP codewords on a squeezed-state lattice."""

from .closed_form import amp_dissipative, amp_unitary, weight_dissipative, z_approx, z_exact
from .codewords import (
    Codeword,
    EncodingReport,
    build_dqw_codeword,
    build_qw_codeword,
    conjugate_codewords,
    density,
    encode_dqw,
    encode_qw,
    gkp_codeword,
    r_from_db,
    squeezing_db,
)
from .error_analysis import PerfPoint, QuadratureError, ShiftDomain, p_no_error, perf_point, sweep
from .lattice import (
    LatticeParams,
    QumodeState,
    WalkerState,
    inner_product,
    load_state,
    dump_state,
    make_basis_state,
    site_overlap,
)
from .walk import CoinOperator, coin_biased, coin_diag_projector, coin_hadamard, walk_n, walk_step

__version__ = "0.1.0"
