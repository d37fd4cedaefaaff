"""Husimi quasiprobability fields on polar grids.

The field of any Fock-coefficient state is evaluated through the log-domain
kernel in `_kernels`; closed forms (single Fock state) and the factored
radial/angular approximation of a Gaussian quasienergy packet are provided
as analytic companions, together with maxima detection and rotational
symmetry metrics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import husimi_grid
from .floquet import GaussianAnsatz, QEState
from .specfun import Params

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FockState:
    """Unit-norm complex coefficients over oscillator levels 0..n_max."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        norm2 = float(np.sum(np.abs(self.coeffs) ** 2))
        if abs(norm2 - 1.0) > 1e-10:
            raise ValueError(f"state norm^2 = {norm2}, expected 1 within 1e-10")


@dataclass(frozen=True)
class PolarGrid:
    """Ascending radii and uniformly spaced angles in [0, 2*pi)."""

    r_values: np.ndarray
    phi_values: np.ndarray

    def __post_init__(self) -> None:
        r = np.asarray(self.r_values, dtype=float)
        phi = np.asarray(self.phi_values, dtype=float)
        if r.ndim != 1 or np.any(np.diff(r) <= 0) or r[0] < 0:
            raise ValueError("r_values must be ascending and nonnegative")
        if phi.size < 4:
            raise ValueError("need at least 4 angular samples")
        dphi = _TWO_PI / phi.size
        if not np.allclose(phi, np.arange(phi.size) * dphi, atol=1e-12):
            raise ValueError("phi_values must be uniform over [0, 2*pi)")

    @property
    def n_phi(self) -> int:
        return self.phi_values.size

    @classmethod
    def regular(cls, r_max: float, n_r: int, n_phi: int) -> "PolarGrid":
        if r_max <= 0 or n_r < 2:
            raise ValueError("need r_max > 0 and n_r >= 2")
        return cls(
            np.linspace(0.0, r_max, n_r),
            np.arange(n_phi) * (_TWO_PI / n_phi),
        )


@dataclass(frozen=True)
class HusimiField:
    """Nonnegative Husimi values over a polar grid at stroboscopic time s*T."""

    grid: PolarGrid
    values: np.ndarray
    strobo_index: int
    params: Params

    def __post_init__(self) -> None:
        if self.values.shape != (self.grid.r_values.size, self.grid.n_phi):
            raise ValueError("values shape does not match the grid")
        if np.any(self.values < 0):
            raise ValueError("Husimi values must be nonnegative")


def default_grid(params: Params, r_outer: float) -> PolarGrid:
    """Default field grid: 400 radii up to 1.5*r_outer, 120*mu angles."""
    n_phi = 120 * params.mu
    return PolarGrid.regular(1.5 * r_outer, 400, n_phi)


def coherent_coefficients(params: Params, X: float, P: float) -> FockState:
    """Fock decomposition of the coherent state centered at (X, P)."""
    h = params.hbar0
    rho2 = (X * X + P * P) / (2.0 * h)
    m = np.arange(params.n_max + 1)
    peak = rho2  # |C_m|^2 is Poisson with mean rho2
    if peak > params.n_max - 6.0 * math.sqrt(peak + 1.0):
        raise ValueError(
            "basis truncation too small for this coherent state "
            f"(peak index ~ {peak:.1f}, n_max = {params.n_max})"
        )
    log_mag = (
        -rho2 / 2.0
        + 0.5 * m * math.log(rho2 if rho2 > 0 else 1.0)
        - 0.5 * np.array([math.lgamma(k + 1.0) for k in m])
    )
    phase = m * math.atan2(P, X)
    coeffs = np.exp(log_mag) * np.exp(1j * phase)
    if rho2 == 0.0:
        coeffs = np.zeros(params.n_max + 1, dtype=complex)
        coeffs[0] = 1.0
    tail = float(np.sum(np.abs(coeffs[-3:]) ** 2))
    if tail > 1e-10:
        raise ValueError("coherent-state tail exceeds the truncation budget")
    return FockState(coeffs)


def _field_from_levels(params, levels, coeffs, phases, grid, impl=None):
    weights = np.conj(coeffs) * np.exp(1j * phases)
    return husimi_grid(
        levels, weights, params.hbar0, grid.r_values, grid.phi_values,
        impl=impl,
    )


def husimi_point(
    params: Params,
    state: FockState,
    r: float,
    phi: float,
    phases: np.ndarray | None = None,
) -> float:
    """Husimi value of a Fock-coefficient state at one (r, phi) point.

    `phases` optionally adds a per-level phase (radians) to each term, e.g.
    the stroboscopic rule 2*pi*n*s/mu.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    c = np.asarray(state.coeffs)
    levels = np.nonzero(c)[0]
    if levels.size == 0:
        return 0.0
    ph = np.zeros(levels.size) if phases is None else np.asarray(phases)[levels]
    weights = np.conj(c[levels]) * np.exp(1j * ph)
    half_lf = np.array([0.5 * math.lgamma(int(n) + 1.0) for n in levels])
    if r > 0:
        t = levels * math.log(r) - 0.5 * levels * math.log(2 * params.hbar0) \
            - half_lf - r * r / (4.0 * params.hbar0)
        amp = np.sum(weights * np.exp(t) * np.exp(1j * levels * phi))
    else:
        amp = weights[0] if levels[0] == 0 else 0.0 + 0.0j
    return float((amp.real**2 + amp.imag**2) / _TWO_PI)


def husimi_fock(params: Params, n0: int, r: float) -> float:
    """Closed-form Husimi value of the Fock state |n0> (phase independent)."""
    if n0 < 0 or r < 0:
        raise ValueError("n0 and r must be nonnegative")
    if r == 0.0:
        return 1.0 / _TWO_PI if n0 == 0 else 0.0
    h = params.hbar0
    log_val = (
        -r * r / (2.0 * h)
        + 2.0 * n0 * math.log(r)
        - n0 * math.log(2.0 * h)
        - math.lgamma(n0 + 1.0)
    )
    return math.exp(log_val) / _TWO_PI


def husimi_state(
    params: Params,
    state: FockState,
    grid: PolarGrid,
    phases: np.ndarray | None = None,
    strobo_index: int = 0,
) -> HusimiField:
    """Husimi field of an arbitrary Fock-coefficient state on a grid."""
    c = np.asarray(state.coeffs)
    levels = np.nonzero(c)[0]
    ph = np.zeros(levels.size) if phases is None else np.asarray(phases)[levels]
    values = _field_from_levels(params, levels, c[levels], ph, grid)
    return HusimiField(grid, values, strobo_index, params)


def husimi_qe(
    params: Params, state: QEState, grid: PolarGrid, s: int = 0
) -> HusimiField:
    """Stroboscopic Husimi field of a quasienergy state at time s*T.

    Ladder coefficients embed at levels n = ladder + mu*m and each level
    picks up the phase 2*pi*n*s/mu (drive period T, omega/Omega = 1/mu).
    """
    levels = state.cell.levels(params.mu)
    if levels[-1] > params.n_max:
        raise ValueError("cell exceeds the basis truncation")
    # reduce n*s/mu mod 1 in integer arithmetic so s and s + mu give
    # bitwise-identical fields
    phases = _TWO_PI * ((levels * s) % params.mu) / params.mu
    values = _field_from_levels(
        params, levels, state.coeffs.astype(complex), phases, grid
    )
    return HusimiField(grid, values, s, params)


def gamma_radial(params: Params, ansatz: GaussianAnsatz, r: float) -> float:
    """Radial factor of the factored ground-state Husimi approximation.

    Log-domain sum over j in [-2 delta_m, 2 delta_m] of the anchored powers
    (r / r_e)^j with Gaussian weights, times the Fock-Husimi envelope at the
    packet center n_e.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    h = params.hbar0
    n_e, r_e, a_e = ansatz.n_e, ansatz.r_e, ansatz.a_e
    if r == 0.0:
        return 0.0 if n_e > 0 else ansatz.norm**2 / _TWO_PI
    log_env = (
        -r * r / (2.0 * h)
        + 2.0 * n_e * math.log(r)
        - n_e * math.log(2.0 * h)
        - math.lgamma(n_e + 1.0)
        + 2.0 * math.log(ansatz.norm)
    )
    j = np.arange(-2 * ansatz.delta_m, 2 * ansatz.delta_m + 1)
    log_terms = log_env + j * (math.log(r) - math.log(r_e)) \
        - j * j / (4.0 * a_e**2)
    return float(np.sum(np.exp(log_terms))) / _TWO_PI


def xi_angular(
    mu: int, ansatz: GaussianAnsatz, phi: float, which: str = "upper"
) -> float:
    """Angular factor of the factored approximation, mu-periodic in phi.

    The upper ground state peaks at phi = 2*pi*k/mu; the lower one (cosine
    argument shifted by pi) interleaves at phi = (2k+1)*pi/mu.
    """
    if which not in ("upper", "lower"):
        raise ValueError("which must be 'upper' or 'lower'")
    m_top = max(1, math.ceil(2.0 * ansatz.delta_m / mu))
    total = 1.0
    for m in range(1, m_top + 1):
        arg = mu * m * phi if which == "upper" else (mu * phi - math.pi) * m
        total += 2.0 * math.cos(arg) * math.exp(
            -((mu * m) ** 2) / (4.0 * ansatz.a_e**2)
        )
    return total


def factored_field(
    params: Params,
    ansatz: GaussianAnsatz,
    grid: PolarGrid,
    which: str = "upper",
) -> HusimiField:
    """Separable approximation gamma(r) * xi(phi), normalized to unit peak.

    The truncated angular sum can dip marginally below zero between lobes;
    those values are clipped at zero.
    """
    gamma = np.array([gamma_radial(params, ansatz, r) for r in grid.r_values])
    xi = np.array(
        [xi_angular(params.mu, ansatz, phi, which) for phi in grid.phi_values]
    )
    values = np.clip(np.outer(gamma, xi), 0.0, None)
    peak = values.max()
    if peak <= 0:
        raise RuntimeError("factored field vanished everywhere")
    return HusimiField(grid, values / peak, 0, params)


def _refine_quadratic(xm, x0, xp, fm, f0, fp):
    denom = fm - 2.0 * f0 + fp
    if denom >= 0 or not math.isfinite(denom):
        return x0, f0
    shift = 0.5 * (fm - fp) / denom
    shift = max(-1.0, min(1.0, shift))
    x = x0 + shift * (xp - x0 if shift >= 0 else x0 - xm)
    f = f0 - 0.25 * (fm - fp) * shift
    return x, f


def find_maxima(
    field: HusimiField, rel_floor: float = 1e-12
) -> list[tuple[float, float, float]]:
    """Strict local maxima of the field, refined sub-grid, sorted by value.

    Interior points are compared against their 8 neighbors (phi periodic).
    Candidates below rel_floor * peak are discarded: that deep in the tail
    the log-domain sum is pure roundoff ripple, not structure.  If no
    strictly dominant point exists, points that tie their angular neighbors
    but dominate radially are accepted, so a phase-independent ring reports
    its radius; a constant field raises.
    """
    v = field.values
    n_r, n_phi = v.shape
    if n_r < 3:
        raise ValueError("need at least 3 radial samples")
    inner = v[1:-1, :]
    up = v[2:, :]
    down = v[:-2, :]
    left = np.roll(v, 1, axis=1)[1:-1, :]
    right = np.roll(v, -1, axis=1)[1:-1, :]
    ul = np.roll(v, 1, axis=1)[2:, :]
    ur = np.roll(v, -1, axis=1)[2:, :]
    dl = np.roll(v, 1, axis=1)[:-2, :]
    dr = np.roll(v, -1, axis=1)[:-2, :]
    neighbors = [up, down, left, right, ul, ur, dl, dr]
    strict = np.ones_like(inner, dtype=bool)
    weak = np.ones_like(inner, dtype=bool)
    any_greater = np.zeros_like(inner, dtype=bool)
    for nb in neighbors:
        strict &= inner > nb
        weak &= inner >= nb
        any_greater |= inner > nb
    mask = strict if strict.any() else (weak & any_greater)
    mask &= inner > rel_floor * v.max()
    idx = np.argwhere(mask)
    if idx.size == 0:
        raise RuntimeError("no strict local maxima found")
    r_vals = field.grid.r_values
    phi_vals = field.grid.phi_values
    dphi = _TWO_PI / n_phi
    out = []
    for i, j in idx:
        ir = i + 1
        r, vr = _refine_quadratic(
            r_vals[ir - 1], r_vals[ir], r_vals[ir + 1],
            v[ir - 1, j], v[ir, j], v[ir + 1, j],
        )
        jm, jp = (j - 1) % n_phi, (j + 1) % n_phi
        phi, vp = _refine_quadratic(
            phi_vals[j] - dphi, phi_vals[j], phi_vals[j] + dphi,
            v[ir, jm], v[ir, j], v[ir, jp],
        )
        out.append((float(r), float(phi % _TWO_PI), float(max(vr, vp))))
    out.sort(key=lambda t: -t[2])
    return out


def _rotated(values: np.ndarray, n_phi: int, fold: int) -> np.ndarray:
    shift = n_phi // fold
    return np.roll(values, shift, axis=1)


def rotational_symmetry_error(field: HusimiField, fold: int) -> float:
    """Relative L1 mismatch between the field and its rotation by 2*pi/fold."""
    if fold < 1:
        raise ValueError("fold must be positive")
    n_phi = field.grid.n_phi
    if n_phi % fold != 0:
        raise ValueError(f"n_phi={n_phi} not divisible by fold={fold}")
    rotated = _rotated(field.values, n_phi, fold)
    denom = float(np.abs(field.values).sum())
    if denom == 0:
        return 0.0
    return float(np.abs(field.values - rotated).sum()) / denom


def normalization_integral(field: HusimiField) -> float:
    """Quadrature of the field against r dr dphi.

    Trapezoid in r, rectangle (exact for periodic data) in phi; for a
    unit-norm state the result should approach hbar0.  Raises if the grid
    visibly truncates the field.
    """
    v = field.values
    peak = v.max()
    if peak > 0 and v[-1, :].max() > 1e-14 * peak:
        raise ValueError("grid does not cover the field tail")
    r = field.grid.r_values
    dphi = _TWO_PI / field.grid.n_phi
    radial = np.trapezoid(v * r[:, None], r, axis=0)
    return float(np.sum(radial) * dphi)
