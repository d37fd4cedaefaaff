"""Classical stroboscopic sections of the resonantly driven oscillator.

Dimensionless equation of motion X'' = -X + eps * sin(X - mu * tau),
integrated by a symmetric kick-rotate-kick splitting whose harmonic part is
an exact rotation.  Sections are sampled once per wave period 2*pi/mu.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import strobo_orbits
from .specfun import Params, bessel_zeros


@dataclass
class ClassicalState:
    """Dimensionless phase-space point (X = k x, P = p k / m omega) at time tau."""

    X: float
    P: float
    tau: float = 0.0


@dataclass
class SectionSet:
    """Per-orbit stroboscopic samples at tau = s * 2*pi/mu.

    xs/ps have shape (n_orbits, n_periods + 1); escaped orbits carry NaN
    samples from the recorded escape period onward.
    """

    params: Params
    xs: np.ndarray
    ps: np.ndarray
    escaped_at: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def n_orbits(self) -> int:
        return self.xs.shape[0]

    def points(self) -> np.ndarray:
        """All finite (X, P) samples, stacked as an (N, 2) array."""
        mask = np.isfinite(self.xs)
        return np.column_stack([self.xs[mask], self.ps[mask]])


def _step_once(x, p, tau, h, mu, eps, direction):
    """One splitting substep, forward (direction=+1) or its exact inverse."""
    if direction > 0:
        p += 0.5 * h * eps * math.sin(x - mu * tau)
        x, p = x * math.cos(h) + p * math.sin(h), \
            -x * math.sin(h) + p * math.cos(h)
        tau += h
        p += 0.5 * h * eps * math.sin(x - mu * tau)
    else:
        p -= 0.5 * h * eps * math.sin(x - mu * tau)
        x, p = x * math.cos(h) - p * math.sin(h), \
            x * math.sin(h) + p * math.cos(h)
        tau -= h
        p -= 0.5 * h * eps * math.sin(x - mu * tau)
    return x, p, tau


def strobo_step(
    params: Params,
    state: ClassicalState,
    steps_per_period: int,
    direction: int = 1,
    escape_radius: float = 1e3,
) -> ClassicalState:
    """Advance one wave period (direction=+1) or undo one (direction=-1)."""
    if steps_per_period < 16:
        raise ValueError("steps_per_period must be at least 16")
    h = (2.0 * math.pi / params.mu) / steps_per_period
    x, p, tau = state.X, state.P, state.tau
    for _ in range(steps_per_period):
        x, p, tau = _step_once(x, p, tau, h, params.mu, params.eps, direction)
        if abs(x) > escape_radius or abs(p) > escape_radius:
            raise RuntimeError(
                f"orbit escaped beyond radius {escape_radius} at tau={tau}"
            )
    return ClassicalState(x, p, tau)


def poincare_section(
    params: Params,
    initials: list[ClassicalState],
    n_periods: int,
    steps_per_period: int = 256,
    escape_radius: float = 1e3,
) -> SectionSet:
    """Stroboscopic samples of independent orbits from the given initials."""
    if n_periods < 1:
        raise ValueError("n_periods must be at least 1")
    if steps_per_period < 16:
        raise ValueError("steps_per_period must be at least 16")
    if not initials:
        raise ValueError("need at least one initial condition")
    tau0 = initials[0].tau
    if any(abs(s.tau - tau0) > 1e-12 for s in initials):
        raise ValueError("all initial conditions must share one start time")
    x0 = np.array([s.X for s in initials])
    p0 = np.array([s.P for s in initials])
    xs, ps, escaped_at = strobo_orbits(
        x0, p0, params.mu, params.eps, tau0, n_periods, steps_per_period,
        escape_radius,
    )
    provenance = {
        "initials": [[s.X, s.P] for s in initials],
        "tau0": tau0,
        "n_periods": n_periods,
        "steps_per_period": steps_per_period,
        "escape_radius": escape_radius,
    }
    return SectionSet(params, xs, ps, escaped_at, provenance)


def ring_ensemble(
    n_rings: int, n_angles: int, r_min: float, r_max: float
) -> list[ClassicalState]:
    """Deterministic initial conditions: n_rings radii x n_angles angles."""
    if n_rings < 1 or n_angles < 1:
        raise ValueError("need at least one ring and one angle")
    radii = np.linspace(r_min, r_max, n_rings)
    angles = np.arange(n_angles) * (2.0 * math.pi / n_angles)
    return [
        ClassicalState(r * math.cos(a), r * math.sin(a))
        for r in radii
        for a in angles
    ]


def web_ensemble(
    params: Params,
    n_rings: int = 6,
    radial_offsets: tuple[float, ...] = (-0.02, 0.0, 0.02),
) -> list[ClassicalState]:
    """Initial conditions on the saddle points of the stochastic web.

    The separatrix network of the resonance is the zero level of
    g(I) cos(mu * theta): circles at radii where J_mu vanishes, crossed by
    2*mu spokes at cos(mu*theta) = 0.  Seeds at the circle/spoke
    intersections (plus small radial offsets to thicken the layer) land in
    the chaotic layer and spread along the whole web, which makes them the
    natural ensemble for measuring its rotational symmetry.  Orbits trapped
    inside the resonance islands would instead show an O(eps) asymmetry of
    the stroboscopic sampling density and never equilibrate it away.
    """
    if n_rings < 1:
        raise ValueError("need at least one ring")
    if not radial_offsets:
        raise ValueError("need at least one radial offset")
    mu = params.mu
    radii = bessel_zeros(mu, n_rings)
    angles = [(2 * k + 1) * math.pi / (2 * mu) for k in range(2 * mu)]
    return [
        ClassicalState((r + dr) * math.cos(a), (r + dr) * math.sin(a))
        for r in radii
        for a in angles
        for dr in radial_offsets
    ]


def section_symmetry_error(
    sections: SectionSet, fold: int, bins: int = 128
) -> float:
    """L1 distance between the section histogram and its rotation by 2*pi/fold.

    Both point clouds (raw and rotated-before-binning) are histogrammed on
    the same bins x bins grid over a shared symmetric square and normalized
    to unit mass; 0 means perfect fold symmetry, 2 means disjoint supports.
    """
    if fold < 1:
        raise ValueError("fold must be positive")
    pts = sections.points()
    if pts.shape[0] < 1000:
        raise ValueError(f"need at least 1000 points, got {pts.shape[0]}")
    ang = 2.0 * math.pi / fold
    c, s = math.cos(ang), math.sin(ang)
    rot = pts @ np.array([[c, s], [-s, c]])
    lim = float(np.max(np.abs(np.concatenate([pts, rot])))) * (1 + 1e-12)
    edges = np.linspace(-lim, lim, bins + 1)
    h1, _, _ = np.histogram2d(pts[:, 0], pts[:, 1], bins=[edges, edges])
    h2, _, _ = np.histogram2d(rot[:, 0], rot[:, 1], bins=[edges, edges])
    h1 /= h1.sum()
    h2 /= h2.sum()
    return float(np.abs(h1 - h2).sum())
