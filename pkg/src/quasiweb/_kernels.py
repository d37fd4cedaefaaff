"""Hot inner loops: Husimi grid evaluation and the stroboscopic map.

Both kernels exist in two flavors: a numba @njit version and a vectorized
pure-numpy one; `benchmarks/bench_kernels.py` compares them and the default
per kernel is whichever wins (numba for the stroboscopic map, BLAS-backed
numpy for the Husimi sum).  Set QUASIWEB_DISABLE_NUMBA=1 to force the numpy
path everywhere.  The flavors agree to floating-point roundoff, not bitwise.
"""
from __future__ import annotations

import math
import os

import numpy as np

_TWO_PI = 2.0 * math.pi

USE_NUMBA = os.environ.get("QUASIWEB_DISABLE_NUMBA", "0") != "1"
if USE_NUMBA:
    try:
        import numba
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


# ---------------------------------------------------------------------------
# Husimi field over a polar grid
# ---------------------------------------------------------------------------

def _husimi_grid_loops(levels, w_re, w_im, half_logfact, log2h, inv4h,
                       r_values, phi_values, out):
    """Per-point sum over levels, ascending, in the log domain.

    w = conj(C_n) * exp(i * phase_n) per populated level; out[i, j] gets
    |sum_n w_n exp(t_n(r_i)) exp(i n phi_j)|^2 / (2 pi).
    """
    n_r = r_values.shape[0]
    n_phi = phi_values.shape[0]
    n_lev = levels.shape[0]
    t = np.empty(n_lev)
    for i in range(n_r):
        r = r_values[i]
        base = -r * r * inv4h
        if r > 0.0:
            logr = math.log(r)
            for k in range(n_lev):
                n = levels[k]
                t[k] = math.exp(n * logr - 0.5 * n * log2h
                                - half_logfact[k] + base)
        else:
            for k in range(n_lev):
                t[k] = math.exp(base) if levels[k] == 0 else 0.0
        for j in range(n_phi):
            phi = phi_values[j]
            a_re = 0.0
            a_im = 0.0
            for k in range(n_lev):
                ang = levels[k] * phi
                c = math.cos(ang)
                s = math.sin(ang)
                a_re += t[k] * (w_re[k] * c - w_im[k] * s)
                a_im += t[k] * (w_re[k] * s + w_im[k] * c)
            out[i, j] = (a_re * a_re + a_im * a_im) / _TWO_PI
    return out


def _husimi_grid_numpy(levels, w_re, w_im, half_logfact, log2h, inv4h,
                       r_values, phi_values, out):
    lev = levels.astype(np.float64)
    w = w_re + 1j * w_im
    harm = np.exp(1j * np.outer(lev, phi_values))            # (M, n_phi)
    pos = r_values > 0.0
    logr = np.log(np.where(pos, r_values, 1.0))
    t = (np.outer(logr, lev)
         - 0.5 * lev * log2h
         - half_logfact
         - (r_values * r_values * inv4h)[:, None])
    weights = np.exp(t)                                      # (n_r, M)
    if not pos.all():
        zero_rows = ~pos
        weights[zero_rows, :] = 0.0
        at_origin = levels == 0
        if at_origin.any():
            weights[np.ix_(zero_rows, at_origin)] = np.exp(
                -(r_values[zero_rows, None] ** 2) * inv4h
            )
    amps = (weights * w) @ harm
    np.divide(amps.real**2 + amps.imag**2, _TWO_PI, out=out)
    return out


# ---------------------------------------------------------------------------
# Stroboscopic (kick-rotate-kick) map of the driven oscillator
# ---------------------------------------------------------------------------

def _strobo_orbits_loops(x0, p0, mu, eps, tau0, n_periods, steps_per_period,
                         escape_radius, xs, ps, escaped_at):
    """Advance each orbit n_periods wave periods, sampling once per period.

    One period is split into `steps_per_period` Strang steps: half kick at
    tau, exact harmonic rotation by h, half kick at tau + h.  Escaped orbits
    stop; their remaining samples stay NaN and escaped_at records the period.
    """
    n_orb = x0.shape[0]
    period = _TWO_PI / mu
    h = period / steps_per_period
    ch = math.cos(h)
    sh = math.sin(h)
    for o in range(n_orb):
        x = x0[o]
        p = p0[o]
        tau = tau0
        xs[o, 0] = x
        ps[o, 0] = p
        escaped_at[o] = -1
        for s in range(1, n_periods + 1):
            for _ in range(steps_per_period):
                p += 0.5 * h * eps * math.sin(x - mu * tau)
                x, p = x * ch + p * sh, -x * sh + p * ch
                tau += h
                p += 0.5 * h * eps * math.sin(x - mu * tau)
            if abs(x) > escape_radius or abs(p) > escape_radius:
                escaped_at[o] = s
                break
            xs[o, s] = x
            ps[o, s] = p
    return xs, ps, escaped_at


def _strobo_orbits_numpy(x0, p0, mu, eps, tau0, n_periods, steps_per_period,
                         escape_radius, xs, ps, escaped_at):
    period = _TWO_PI / mu
    h = period / steps_per_period
    ch = math.cos(h)
    sh = math.sin(h)
    x = x0.copy()
    p = p0.copy()
    tau = tau0
    active = np.ones(x.shape[0], dtype=bool)
    escaped_at[:] = -1
    xs[:, 0] = x
    ps[:, 0] = p
    for s in range(1, n_periods + 1):
        for _ in range(steps_per_period):
            p[active] += 0.5 * h * eps * np.sin(x[active] - mu * tau)
            xa, pa = x[active], p[active]
            x[active] = xa * ch + pa * sh
            p[active] = -xa * sh + pa * ch
            tau += h
            p[active] += 0.5 * h * eps * np.sin(x[active] - mu * tau)
        gone = active & ((np.abs(x) > escape_radius)
                         | (np.abs(p) > escape_radius))
        if gone.any():
            escaped_at[gone] = s
            active &= ~gone
        xs[active, s] = x[active]
        ps[active, s] = p[active]
    return xs, ps, escaped_at


# Default flavors follow benchmarks/bench_kernels.py: the Husimi sum reduces
# to a complex matmul where BLAS beats the jitted loops by an order of
# magnitude, while the sequential stroboscopic map is where numba pays off.
_husimi_grid = _husimi_grid_numpy
if USE_NUMBA:
    _husimi_grid_jit = numba.njit(cache=True)(_husimi_grid_loops)
    _strobo_orbits = numba.njit(cache=True)(_strobo_orbits_loops)
else:
    _strobo_orbits = _strobo_orbits_numpy


def husimi_grid(levels, weights, hbar0, r_values, phi_values,
                impl=None) -> np.ndarray:
    """Husimi values on the (r, phi) grid for complex per-level weights.

    weights[k] must already hold conj(C_n) exp(i phase_n) for level
    levels[k]; hbar0 sets the coherent-state scale.
    """
    levels = np.ascontiguousarray(levels, dtype=np.int64)
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    r_values = np.ascontiguousarray(r_values, dtype=np.float64)
    phi_values = np.ascontiguousarray(phi_values, dtype=np.float64)
    half_logfact = np.array([0.5 * math.lgamma(n + 1.0) for n in levels])
    out = np.empty((r_values.size, phi_values.size))
    fn = impl if impl is not None else _husimi_grid
    fn(levels, np.ascontiguousarray(weights.real),
       np.ascontiguousarray(weights.imag), half_logfact,
       math.log(2.0 * hbar0), 1.0 / (4.0 * hbar0),
       r_values, phi_values, out)
    return out


def strobo_orbits(x0, p0, mu, eps, tau0, n_periods, steps_per_period,
                  escape_radius, impl=None):
    """Stroboscopic samples of a batch of orbits; see _strobo_orbits_loops."""
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    p0 = np.ascontiguousarray(p0, dtype=np.float64)
    n_orb = x0.size
    xs = np.full((n_orb, n_periods + 1), np.nan)
    ps = np.full((n_orb, n_periods + 1), np.nan)
    escaped_at = np.empty(n_orb, dtype=np.int64)
    fn = impl if impl is not None else _strobo_orbits
    fn(x0, p0, mu, float(eps), float(tau0), n_periods, steps_per_period,
       float(escape_radius), xs, ps, escaped_at)
    return xs, ps, escaped_at
