"""Zeroth-order (resonance approximation) quasienergy problem per cell.

At exact resonance each cell reduces to a symmetric tridiagonal matrix with
zero diagonal, so the spectrum is symmetric about zero and the two extreme
eigenstates (the "quasienergy ground states") are mapped onto each other by
the parity transform coeffs[m] -> (-1)^m coeffs[m].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import minimize_scalar

from .specfun import Cell, Params, bessel_j, coupling_g

UPPER_GROUND = "upper-ground"
LOWER_GROUND = "lower-ground"
INTERIOR = "interior"


class DegenerateSpectrumError(RuntimeError):
    """Raised when the extreme quasienergies are indistinguishable (eps = 0)."""


@dataclass(frozen=True)
class CellHamiltonian:
    """Symmetric tridiagonal block of one resonance cell, in units hbar*omega."""

    cell: Cell
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self) -> None:
        if self.offdiag.shape[0] != self.diag.shape[0] - 1:
            raise ValueError("offdiag must be one shorter than diag")

    @property
    def size(self) -> int:
        return self.diag.shape[0]


@dataclass(frozen=True)
class QEState:
    """One quasienergy eigenstate of a cell block.

    `coeffs` are the real ladder coefficients over m = m_lo..m_hi, unit norm;
    `energy` is in units hbar*omega.
    """

    cell: Cell
    energy: float
    coeffs: np.ndarray
    kind: str = INTERIOR


@dataclass(frozen=True)
class GaussianAnsatz:
    """Gaussian packet model of a quasienergy ground state.

    n_e is the (continuous) packet center in level number, r_e = sqrt(2 n_e
    hbar0) the elliptic-point radius, a_e the packet width in level index,
    delta_m = ceil(2 a_e) the truncation used in the factored-field sums and
    norm the normalization of the sampled coefficient sequence.
    """

    cell: Cell
    mu: int
    n_e: float
    r_e: float
    a_e: float
    delta_m: int
    norm: float

    def action_half_width(self, hbar0: float) -> float:
        """Half width in action of the classical cell implied by a_e."""
        return math.sqrt(2.0) * hbar0 * self.a_e**2

    @property
    def level_width(self) -> float:
        """Packet width in level number of the actual chain ground state.

        The cell chain steps by mu levels per link, which stretches the
        harmonic ground packet to sqrt(mu) * a_e in n (equal to a_e only
        for mu = 1).
        """
        return math.sqrt(self.mu) * self.a_e

    def coefficient_sequence(self, levels: np.ndarray) -> np.ndarray:
        """Normalized Gaussian coefficients sampled at the given levels."""
        seq = np.exp(-((levels - self.n_e) ** 2) / (2.0 * self.level_width**2))
        nrm = np.linalg.norm(seq)
        if nrm == 0:
            raise ValueError("Gaussian sequence vanishes on these levels")
        return seq / nrm


def build_cell_hamiltonian(params: Params, cell: Cell) -> CellHamiltonian:
    """Tridiagonal block with couplings (eps / 2 hbar0) g_mu(n) and zero diagonal."""
    levels = cell.levels(params.mu)
    if levels[-1] + params.mu > params.n_max:
        raise ValueError("cell exceeds the basis truncation")
    scale = params.eps / (2.0 * params.hbar0)
    offdiag = scale * np.array(
        [coupling_g(params, int(n)) for n in levels[:-1]]
    )
    return CellHamiltonian(cell, np.zeros(cell.n_states), offdiag)


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of each column positive."""
    out = vecs.copy()
    for j in range(out.shape[1]):
        k = int(np.argmax(np.abs(out[:, j])))
        if out[k, j] < 0:
            out[:, j] = -out[:, j]
    return out


def solve_cell(h: CellHamiltonian) -> list[QEState]:
    """Full eigendecomposition of a cell block, eigenvalues ascending."""
    if h.size == 1:
        raise ValueError("cell block must have at least 2 states")
    try:
        vals, vecs = eigh_tridiagonal(h.diag, h.offdiag)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise RuntimeError(
            f"eigensolve failed for cell {h.cell.index} "
            f"(ladder {h.cell.ladder})"
        ) from exc
    vecs = _fix_signs(vecs)
    return [
        QEState(h.cell, float(vals[j]), vecs[:, j].copy()) for j in range(h.size)
    ]


def ground_states(states: list[QEState]) -> tuple[QEState, QEState]:
    """The extreme (upper, lower) quasienergy states of one cell."""
    if len(states) < 2:
        raise ValueError("need at least 2 states")
    ordered = sorted(states, key=lambda s: s.energy)
    lower, upper = ordered[0], ordered[-1]
    if abs(upper.energy - lower.energy) < 1e-14:
        raise DegenerateSpectrumError(
            "extreme quasienergies are degenerate (eps = 0?)"
        )
    upper = QEState(upper.cell, upper.energy, upper.coeffs, UPPER_GROUND)
    lower = QEState(lower.cell, lower.energy, lower.coeffs, LOWER_GROUND)
    return upper, lower


def parity_transform(state: QEState) -> QEState:
    """x -> -x: coeffs[m] -> (-1)^m coeffs[m], energy -> -energy."""
    signs = np.where(np.arange(state.coeffs.size) % 2 == 0, 1.0, -1.0)
    kind = {UPPER_GROUND: LOWER_GROUND, LOWER_GROUND: UPPER_GROUND}.get(
        state.kind, INTERIOR
    )
    return QEState(state.cell, -state.energy, signs * state.coeffs, kind)


def gaussian_ansatz(params: Params, cell: Cell) -> GaussianAnsatz:
    """Gaussian packet parameters of a cell's ground states.

    The packet center anchors at the ladder level maximizing |g_mu| and is
    refined continuously through the Bessel proxy J_mu(sqrt(2 n hbar0)); the
    width comes from the discrete second difference of g_mu (step mu in n).
    """
    if cell.n_states < 5:
        raise ValueError("cell too small for a Gaussian ansatz")
    mu, h = params.mu, params.hbar0
    levels = cell.levels(mu)
    g = np.array([coupling_g(params, int(n)) for n in levels])
    k = int(np.argmax(np.abs(g)))
    if k == 0 or k == levels.size - 1:
        raise ValueError("|g_mu| maximum sits on the cell boundary")
    n0 = int(levels[k])

    r_lo = math.sqrt(2.0 * max(n0 - mu, 0) * h)
    r_hi = math.sqrt(2.0 * (n0 + mu) * h)
    res = minimize_scalar(
        lambda r: -abs(bessel_j(mu, r)),
        bounds=(r_lo, r_hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    r_e = float(res.x)
    n_e = r_e * r_e / (2.0 * h)

    g2 = (g[k + 1] - 2.0 * g[k] + g[k - 1]) / mu**2
    a_e = (abs(g[k]) / abs(g2)) ** 0.25
    delta_m = max(1, math.ceil(2.0 * a_e))

    width_n = math.sqrt(mu) * a_e
    seq = np.exp(-((levels - n_e) ** 2) / (2.0 * width_n**2))
    norm = 1.0 / float(np.linalg.norm(seq))
    return GaussianAnsatz(cell, mu, n_e, r_e, a_e, delta_m, norm)


def packet_width_quasiclassical(params: Params, r_e: float) -> float:
    """Packet width a_e from the Bessel form at the elliptic-point radius.

    a_e = ((r_e^2 / hbar0^2) |J_mu(r_e) / J_mu''(r_e)|)^{1/4}, with J'' taken
    from the Bessel equation at a radial extremum of J_mu (J' = 0 there):
    J'' = -(1 - mu^2/r^2) J.  For mu = 1 this reduces exactly to
    r_e / (hbar0^2 (r_e^2 - 1))^{1/4}.
    """
    if r_e <= 0:
        raise ValueError("r_e must be positive")
    mu, h = params.mu, params.hbar0
    j = bessel_j(mu, r_e)
    j2 = -(1.0 - (mu / r_e) ** 2) * j
    if abs(j2) < 1e-12:
        raise ZeroDivisionError(
            f"J_{mu}''({r_e}) is numerically zero; width diverges"
        )
    return ((r_e**2 / h**2) * abs(j / j2)) ** 0.25


def gaussian_overlap(state: QEState, ansatz: GaussianAnsatz) -> float:
    """Squared overlap between a numeric state and the sampled Gaussian."""
    if state.cell != ansatz.cell:
        raise ValueError("state and ansatz belong to different cells")
    seq = ansatz.coefficient_sequence(ansatz.cell.levels(ansatz.mu))
    return float(np.dot(state.coeffs, seq) ** 2)


def edge_spacing(states: list[QEState], count: int) -> tuple[float, float]:
    """Mean and relative std of the top `count` quasienergy gaps."""
    if count < 1:
        raise ValueError("count must be positive")
    if count + 1 > len(states):
        raise ValueError("not enough states for the requested gap count")
    energies = np.sort([s.energy for s in states])
    gaps = np.diff(energies[-(count + 1):])
    mean = float(np.mean(gaps))
    rel_std = float(np.std(gaps) / mean) if mean != 0 else math.inf
    return mean, rel_std


def build_ladder_hamiltonian(
    params: Params, ladder: int, m_max: int
) -> CellHamiltonian:
    """Full-chain tridiagonal over m = 0..m_max (all cells coupled).

    Used to test how well the isolated cell blocks approximate the full
    resonance ladder.  Returned with a synthetic spanning Cell.
    """
    span = Cell(ladder, 0, m_max, 0)
    return build_cell_hamiltonian(params, span)
