"""Quasienergy states, Husimi fields and stochastic-web sections of a
resonantly driven harmonic oscillator."""

from .classical import (
    ClassicalState,
    SectionSet,
    poincare_section,
    ring_ensemble,
    section_symmetry_error,
    strobo_step,
    web_ensemble,
)
from .floquet import (
    CellHamiltonian,
    DegenerateSpectrumError,
    GaussianAnsatz,
    QEState,
    build_cell_hamiltonian,
    build_ladder_hamiltonian,
    edge_spacing,
    gaussian_ansatz,
    gaussian_overlap,
    ground_states,
    packet_width_quasiclassical,
    parity_transform,
    solve_cell,
)
from .husimi import (
    FockState,
    HusimiField,
    PolarGrid,
    coherent_coefficients,
    default_grid,
    factored_field,
    find_maxima,
    gamma_radial,
    husimi_fock,
    husimi_point,
    husimi_qe,
    husimi_state,
    normalization_integral,
    rotational_symmetry_error,
    xi_angular,
)
from .specfun import (
    Cell,
    Params,
    bessel_j,
    bessel_zeros,
    cell_boundaries,
    coupling_g,
    coupling_sequence,
    lamb_dicke_to_hbar0,
    laguerre_assoc,
    log_factorial,
)

__version__ = "0.1.0"
