"""Closed-form density and exponent curves for (N, L-1) list packings.

All rates are natural-log based and per dimension.  The lower bounds may be
negative; no clamping is applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import gammaln

TWO_PI_E = 2.0 * math.pi * math.e


def _as_int(name, value):
    if value != int(value):
        raise ValueError(f"{name} must be an integer, got {value}")
    return int(value)


@dataclass(frozen=True)
class BoundQuery:
    """Noise level N > 0 and list size L >= 2."""

    N: float
    L: int

    def __post_init__(self):
        object.__setattr__(self, "N", float(self.N))
        object.__setattr__(self, "L", _as_int("L", self.L))
        if not self.N > 0:
            raise ValueError(f"N must be positive, got {self.N}")
        if self.L < 2:
            raise ValueError(f"L must be >= 2, got {self.L}")


@dataclass(frozen=True)
class ExponentQuery:
    """Bound query plus the cube half-width K > 0."""

    N: float
    L: int
    K: float

    def __post_init__(self):
        object.__setattr__(self, "N", float(self.N))
        object.__setattr__(self, "L", _as_int("L", self.L))
        object.__setattr__(self, "K", float(self.K))
        BoundQuery(self.N, self.L)
        if not self.K > 0:
            raise ValueError(f"K must be positive, got {self.K}")

    @property
    def query(self) -> BoundQuery:
        return BoundQuery(self.N, self.L)


def lb_ppp(q: BoundQuery) -> float:
    """Random-coding achievability rate with pair expurgation."""
    N, L = q.N, q.L
    return 0.5 * math.log((L - 1) / (TWO_PI_E * N * L)) - math.log(L) / (2 * (L - 1))


def lb_blachman_few(q: BoundQuery) -> float:
    """Classical achievability rate; weaker than lb_ppp by half a bit or so."""
    N, L = q.N, q.L
    return 0.5 * math.log((L - 1) / (2.0 * TWO_PI_E * N * L))


def ub_elias_bassalygo(q: BoundQuery) -> float:
    """Converse rate; meets lb_ppp up to the ln(L)/(2(L-1)) defect."""
    N, L = q.N, q.L
    return 0.5 * math.log((L - 1) / (TWO_PI_E * N * L))


def ld_capacity(N: float) -> float:
    """Large-list limit of both curves at noise level N."""
    if not N > 0:
        raise ValueError(f"N must be positive, got {N}")
    return 0.5 * math.log(1.0 / (TWO_PI_E * N))


def exponent_E(q: ExponentQuery) -> float:
    """Decay exponent of the probability that L uniform points on [-K, K]^n
    form a list of average squared radius at most n*N."""
    N, L, K = q.N, q.L, q.K
    return (
        (L - 1) / 2.0 * math.log((L - 1) / (TWO_PI_E * N * L))
        - 0.5 * math.log(L)
        + (L - 1) * math.log(2.0 * K)
    )


def lambda_star(q: BoundQuery) -> float:
    """Maximizer of -L*N*lam + ((L-1)/2) ln(lam): the tilt used by the
    Gaussian-limit exponent."""
    return (q.L - 1) / (2.0 * q.L * q.N)


def lambda_n_threshold(q: ExponentQuery, n: int) -> float:
    """Point density above which expurgation removes half the code, at block
    length n.  K cancels from the exponent and does not affect the value."""
    n = _as_int("n", n)
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    L = q.L
    prefactor = (math.factorial(L) / 2.0) ** (1.0 / (L - 1))
    return prefactor * math.exp(n * lb_ppp(q.query))


def ball_log_volume_rate(N: float) -> float:
    """Asymptotic (1/n) log-volume of the n-ball of radius sqrt(n*N)."""
    if not N > 0:
        raise ValueError(f"N must be positive, got {N}")
    return 0.5 * math.log(TWO_PI_E * N)


def ball_log_volume_rate_finite(N: float, n: int) -> float:
    """Exact (1/n) log-volume of the n-ball of radius sqrt(n*N)."""
    if not N > 0:
        raise ValueError(f"N must be positive, got {N}")
    n = _as_int("n", n)
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return 0.5 * math.log(n * N) + 0.5 * math.log(math.pi) - float(gammaln(n / 2.0 + 1.0)) / n
