"""Special functions and oscillator matrix elements.

Everything downstream (cell structure, quasienergy spectra, Husimi fields)
is driven by the level coupling g_mu(n), which is evaluated here through
associated Laguerre polynomials in the log domain and cross-checked against
its Bessel asymptotics J_mu(sqrt(2 n hbar0)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

# Exact resonance throughout: the drive frequency is mu times the oscillator
# frequency.  Nonzero detuning is out of scope; it would only add a diagonal
# to the cell Hamiltonians.
DETUNING = 0.0


@dataclass(frozen=True)
class Params:
    """Dimensionless control parameters of the driven oscillator.

    mu     -- resonance number (drive frequency / oscillator frequency)
    eps    -- dimensionless perturbation strength, expected << 1
    hbar0  -- dimensionless Planck constant (effective quantum scale)
    n_max  -- Fock-basis truncation
    """

    mu: int
    eps: float
    hbar0: float
    n_max: int

    def __post_init__(self) -> None:
        if int(self.mu) != self.mu or self.mu < 1:
            raise ValueError(f"mu must be a positive integer, got {self.mu}")
        if self.eps < 0:
            raise ValueError(f"eps must be nonnegative, got {self.eps}")
        if self.hbar0 <= 0:
            raise ValueError(f"hbar0 must be positive, got {self.hbar0}")
        if int(self.n_max) != self.n_max or self.n_max < self.mu + 2:
            raise ValueError(
                f"n_max must be an integer >= mu + 2, got {self.n_max}"
            )


@dataclass(frozen=True)
class Cell:
    """A resonance cell: a contiguous run of ladder states n = ladder + mu*m.

    The couplings linking consecutive states inside the cell all share one
    sign; the cell ends where the coupling sign flips (discrete zero of
    g_mu).  `index` counts cells outward from the origin, starting at 1.
    """

    ladder: int
    m_lo: int
    m_hi: int
    index: int

    def __post_init__(self) -> None:
        if self.m_hi < self.m_lo + 1:
            raise ValueError("a cell needs at least 2 ladder states")

    @property
    def n_states(self) -> int:
        return self.m_hi - self.m_lo + 1

    def levels(self, mu: int) -> np.ndarray:
        """Oscillator level numbers of the cell's ladder states."""
        return self.ladder + mu * np.arange(self.m_lo, self.m_hi + 1)


def log_factorial(n: int) -> float:
    """ln(n!) for n >= 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return math.lgamma(n + 1.0)


def laguerre_assoc(n: int, alpha: int, x: float) -> float:
    """Associated Laguerre polynomial L_n^alpha(x), three-term recurrence in n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if n == 0:
        return 1.0
    prev = 1.0
    cur = 1.0 + alpha - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur


def bessel_j(mu: int, x: float) -> float:
    """Bessel function J_mu(x) for integer order mu >= 0 and x >= 0.

    Downward (Miller) recurrence normalized with J_0 + 2*sum J_2k = 1;
    accurate to ~1e-14 absolute on x in [0, 50].
    """
    if mu < 0:
        raise ValueError("order must be nonnegative")
    if x < 0:
        raise ValueError("argument must be nonnegative")
    if x == 0.0:
        return 1.0 if mu == 0 else 0.0
    if x < 1e-8:
        # leading series terms; the recurrence would need heavy rescaling here
        return math.exp(mu * math.log(x / 2) - math.lgamma(mu + 1)) * (
            1.0 - (x * x / 4.0) / (mu + 1)
        )

    top = int(max(mu, x) + 20 + 12.0 * math.sqrt(max(mu, x) + 1.0))
    if top % 2:
        top += 1

    j_hi = 0.0          # J_{k+1}, unnormalized
    j_k = 1e-30         # J_k
    out = 0.0
    norm = 0.0
    if mu == top:
        out = j_k
    for k in range(top, 0, -1):
        j_lo = (2.0 * k / x) * j_k - j_hi
        j_hi, j_k = j_k, j_lo
        i = k - 1
        if i == mu:
            out = j_k
        if i > 0 and i % 2 == 0:
            norm += 2.0 * j_k
        if abs(j_k) > 1e250:
            scale = 1e-250
            j_k *= scale
            j_hi *= scale
            out *= scale
            norm *= scale
    norm += j_k  # j_k is now the unnormalized J_0
    return out / norm


def bessel_zeros(mu: int, count: int) -> np.ndarray:
    """First `count` positive zeros of J_mu, to ~1e-12 absolute.

    Located by a sign-change scan starting past the order (J_mu > 0 on
    (0, first zero)) and refined by bisection with brentq.
    """
    if mu < 0:
        raise ValueError("order must be nonnegative")
    if count < 1:
        raise ValueError("count must be positive")
    zeros = []
    r = max(mu, 1.0) * 1.0 + 1e-3
    prev_r, prev_v = r, bessel_j(mu, r)
    step = 0.2
    while len(zeros) < count:
        r += step
        v = bessel_j(mu, r)
        if prev_v == 0.0:
            zeros.append(prev_r)
        elif prev_v * v < 0.0:
            zeros.append(brentq(lambda t: bessel_j(mu, t), prev_r, r,
                                xtol=1e-13))
        prev_r, prev_v = r, v
    return np.array(zeros[:count])


def coupling_g(params: Params, n: int) -> float:
    """Resonance coupling g_mu(n) between levels n and n + mu.

    Signed magnitude of <psi_n| e^{iX} |psi_{n+mu}>:
    exp(-hbar0/4) (hbar0/2)^{mu/2} sqrt(n!/(n+mu)!) L_n^mu(hbar0/2),
    with the factorial ratio taken in the log domain.  The sign structure
    (the discrete zeros bounding the cells) comes from the Laguerre factor.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n + params.mu > params.n_max:
        raise ValueError(
            f"coupling at n={n} needs level n+mu={n + params.mu} beyond "
            f"n_max={params.n_max}"
        )
    mu, h = params.mu, params.hbar0
    log_pref = (
        -h / 4.0
        + 0.5 * mu * math.log(h / 2.0)
        + 0.5 * (log_factorial(n) - log_factorial(n + mu))
    )
    return math.exp(log_pref) * laguerre_assoc(n, mu, h / 2.0)


def coupling_sequence(params: Params, ladder: int, m_max: int) -> np.ndarray:
    """g_mu at the ladder levels n = ladder + mu*m for m = 0..m_max."""
    return np.array(
        [coupling_g(params, ladder + params.mu * m) for m in range(m_max + 1)]
    )


def cell_boundaries(params: Params, ladder: int, m_max: int) -> list[Cell]:
    """Partition ladder indices 0..m_max into resonance cells.

    Each cell is a maximal run of couplings g_mu(ladder + mu*m) sharing one
    sign; the boundary sits at the link where the sign flips, and that weak
    link is dropped from both neighboring cells.  Every ladder index belongs
    to exactly one cell.
    """
    if not 0 <= ladder < params.mu:
        raise ValueError(f"ladder must be in [0, mu), got {ladder}")
    if ladder + params.mu * m_max > params.n_max - params.mu:
        raise ValueError("ladder scan exceeds the basis truncation")
    g = coupling_sequence(params, ladder, m_max)

    def sgn(v: float) -> int:
        return 1 if v >= 0 else -1

    cells: list[Cell] = []
    start = 0
    for m in range(1, m_max + 1):
        if sgn(g[m]) != sgn(g[start]):
            cells.append(Cell(ladder, start, m - 1, len(cells) + 1))
            start = m
    cells.append(Cell(ladder, start, m_max, len(cells) + 1))

    if cells[0].n_states < 2:
        raise RuntimeError(
            "fewer than 2 ladder states before the first sign change"
        )
    return cells


def lamb_dicke_to_hbar0(eta: float) -> float:
    """Convert the ion-trap Lamb-Dicke parameter eta to hbar0 = 2 eta^2."""
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    return 2.0 * eta * eta
