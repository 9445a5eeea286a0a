"""Large-deviation engine for the spread of uniform lists.

The central object is the lower tail of the average squared radius of L
points drawn uniformly on [-K, K]^n, whose per-coordinate summand is the
centering form t'At scaled by K^2.  The module evaluates the log moment
generating function of that summand, the Cramer rate of the tail, the
Laplace asymptotic used by the closed-form exponent, and a direct Monte
Carlo estimate with an exact binomial confidence interval.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import erf
from scipy.stats import beta as beta_dist

from .errors import BudgetError, ConvergenceWarning
from .rng import CHUNK, check_seed, chunk_rng, resolve_workers

# coordinates are generated in blocks of this many dimensions per chunk;
# fixed constant, part of the (seed, index) -> draw mapping
NBLOCK = 128

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class RateFunctionResult:
    rate: float
    lambda_opt: float
    mgf_log_at_opt: float
    iterations: int


@dataclass(frozen=True)
class LaplaceCheck:
    numeric: float
    asymptotic: float
    ratio: float


@dataclass(frozen=True)
class TailEstimate:
    """Monte Carlo lower-tail estimate with a 95% Clopper-Pearson interval."""

    L: int
    n: int
    K: float
    N: float
    samples: int
    hits: int
    p_hat: float
    exponent_hat: float
    ci_low: float
    ci_high: float
    seed: int

    CSV_HEADER = "L,n,K,N,samples,hits,p_hat,exponent_hat,ci_low,ci_high,seed"

    def csv_row(self) -> str:
        return ",".join(
            [
                str(self.L),
                str(self.n),
                repr(self.K),
                repr(self.N),
                str(self.samples),
                str(self.hits),
                repr(self.p_hat),
                repr(self.exponent_hat),
                repr(self.ci_low),
                repr(self.ci_high),
                str(self.seed),
            ]
        )


def cube_form_mean(L: int, K: float) -> float:
    """Mean of the per-coordinate form K^2 * t'At under uniform t."""
    return K * K * (L - 1) / 3.0


def _validate_quad_args(L, K, lam, quad_order):
    if L != int(L) or not 2 <= int(L) <= 5:
        raise BudgetError(f"quadrature supports 2 <= L <= 5, got L = {L}")
    if not K > 0:
        raise ValueError(f"K must be positive, got {K}")
    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")
    if quad_order < 16:
        raise ValueError(f"quad_order must be >= 16, got {quad_order}")
    return int(L), float(K), float(lam), int(quad_order)


@lru_cache(maxsize=64)
def _leggauss(order: int):
    return np.polynomial.legendre.leggauss(order)


def _panel_quad(f, edges, order):
    """Composite Gauss-Legendre over consecutive [edges[i], edges[i+1]] panels."""
    x, w = _leggauss(order)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        total += half * float(w @ f(mid + half * x))
    return total


def _shoulder_integral(L: int, c: float, order: int) -> float:
    """integral over mu of G(mu)^L, G(mu) = (erf(sqrt(c)(1-mu)) + erf(sqrt(c)(1+mu)))/2.

    G is a smoothed indicator of [-1, 1] with shoulder width 1/sqrt(c), so
    the panels are pinned to the shoulders; the integrand is negligible
    beyond 8 widths outside.
    """
    rc = math.sqrt(c)

    def gpow(mu):
        return (0.5 * (erf(rc * (1.0 - mu)) + erf(rc * (1.0 + mu)))) ** L

    w = 8.0 / rc
    if w < 0.5:
        edges = [-1.0 - w, -1.0 + w, 1.0 - w, 1.0 + w]
    else:
        edges = list(np.linspace(-(1.0 + w), 1.0 + w, 5))
    return _panel_quad(gpow, edges, order)


def mgf_log(L: int, K: float, lam: float, quad_order: int = 64) -> float:
    """Log moment generating function of the scaled centering form.

    Returns ln of the [-1,1]^L cube average of exp(-K^2*lam*t'At) with
    A = I - J/L.  The form is flat along the all-ones direction (the kernel
    of A), and a Gaussian auxiliary-variable identity decouples that rank-one
    term exactly, leaving

        avg = 2^-L * (pi/c)^((L-1)/2) * sqrt(L) * J(c),    c = K^2 * lam,
        J(c) = integral G(mu)^L dmu,
        G(mu) = (erf(sqrt(c)(1-mu)) + erf(sqrt(c)(1+mu))) / 2,

    which holds for every c > 0.  J is evaluated by composite Gauss-Legendre
    with ``quad_order`` nodes per panel; the value is recomputed at twice the
    order and a ConvergenceWarning is raised if the two differ by more than
    1e-9 (the doubled-order value is returned either way).
    """
    L, K, lam, quad_order = _validate_quad_args(L, K, lam, quad_order)
    if lam == 0.0:
        return 0.0
    c = K * K * lam
    j1 = _shoulder_integral(L, c, quad_order)
    j2 = _shoulder_integral(L, c, 2 * quad_order)
    if abs(j2 - j1) > 1e-9 * max(1.0, abs(j2)):
        warnings.warn(
            f"quadrature not converged at order {quad_order}: "
            f"delta = {abs(j2 - j1):.3e}",
            ConvergenceWarning,
        )
    val = (
        -L * LOG2
        + 0.5 * (L - 1) * (math.log(math.pi) - math.log(c))
        + 0.5 * math.log(L)
        + math.log(j2)
    )
    return min(val, 0.0)


def mgf_log_tensor(L: int, K: float, lam: float, quad_order: int = 64) -> float:
    """Reference evaluation of mgf_log on the dense tensor product grid.

    Accurate only while the Gaussian ridge width 1/sqrt(K^2*lam) is resolved
    by the per-axis rule, so this serves as an independent cross-check at
    moderate K^2*lam, not as the production path.
    """
    L, K, lam, quad_order = _validate_quad_args(L, K, lam, quad_order)
    if quad_order**L > 2 * 10**7:
        raise BudgetError(f"tensor grid {quad_order}^{L} exceeds the 2e7 budget")
    if lam == 0.0:
        return 0.0
    c = K * K * lam
    x, w = _leggauss(quad_order)
    grids = np.meshgrid(*([x] * L), indexing="ij")
    T = np.stack([g.ravel() for g in grids], axis=1)
    wgrids = np.meshgrid(*([w] * L), indexing="ij")
    wprod = np.ones(T.shape[0])
    for g in wgrids:
        wprod *= g.ravel()
    form = np.einsum("ij,ij->i", T, T) - T.sum(axis=1) ** 2 / L
    total = float(wprod @ np.exp(-c * form))
    return min(math.log(total) - L * LOG2, 0.0)


def laplace_check(L: int, K: float, lam: float, quad_order: int = 64) -> LaplaceCheck:
    """Raw integral of exp(-K^2*lam*t'At) over the cube against its
    large-c saddle value (pi/c)^((L-1)/2) * 2*sqrt(L)."""
    if lam <= 0:
        raise ValueError("lam must be positive for the asymptotic comparison")
    c = K * K * lam
    log_numeric = mgf_log(L, K, lam, quad_order) + int(L) * LOG2
    log_asym = 0.5 * (int(L) - 1) * math.log(math.pi / c) + math.log(2.0 * math.sqrt(int(L)))
    return LaplaceCheck(
        numeric=math.exp(log_numeric),
        asymptotic=math.exp(log_asym),
        ratio=math.exp(log_numeric - log_asym),
    )


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def rate_function(L: int, K: float, N: float, quad_order: int = 64) -> RateFunctionResult:
    """Cramer rate of the event {average squared radius <= n*N} per dimension.

    Maximizes psi(lam) = -lam*L*N - mgf_log(lam) over lam >= 0 by golden
    section after doubling the bracket until the objective is decreasing at
    the right end.  The tail must be rare: L*N may not exceed the mean of
    the per-coordinate form.
    """
    if not N > 0:
        raise ValueError(f"N must be positive, got {N}")
    mean = cube_form_mean(int(L), K)
    if L * N > mean * (1.0 + 1e-12):
        raise ValueError(
            f"tail is not rare: L*N = {L * N!r} exceeds the cube mean "
            f"{mean!r} of the form; need N <= {mean / L!r}"
        )

    def psi(lam):
        if lam <= 0.0:
            return 0.0
        return -lam * L * N - mgf_log(L, K, lam, quad_order)

    hi = 4.0 * (L - 1) / (2.0 * L * N)
    iterations = 0
    for _ in range(70):
        iterations += 1
        if psi(hi) < psi(0.99 * hi):
            break
        hi *= 2.0
    lo = 0.0
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = psi(x1), psi(x2)
    while hi - lo > 1e-10:
        iterations += 1
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = psi(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = psi(x1)
    lam_opt = 0.5 * (lo + hi)
    val = psi(lam_opt)
    if val <= 0.0:
        return RateFunctionResult(rate=0.0, lambda_opt=0.0, mgf_log_at_opt=0.0, iterations=iterations)
    mgf_at = mgf_log(L, K, lam_opt, quad_order)
    return RateFunctionResult(
        rate=-(lam_opt * L * N + mgf_at),
        lambda_opt=lam_opt,
        mgf_log_at_opt=mgf_at,
        iterations=iterations,
    )


def _tail_chunk(L, n, K, threshold, seed, chunk, count):
    rng = chunk_rng(seed, chunk)
    q = np.zeros(count)
    s2 = np.zeros(count)
    for j0 in range(0, n, NBLOCK):
        nb = min(NBLOCK, n - j0)
        x = rng.uniform(-K, K, size=(count, L, nb))
        q += np.einsum("ilj,ilj->i", x, x)
        s2 += np.einsum("ij,ij->i", x.sum(axis=1), x.sum(axis=1))
    stat = q - s2 / L
    return int((stat <= threshold).sum())


def mc_tail(L: int, n: int, K: float, N: float, samples: int, seed, workers=None) -> TailEstimate:
    """Monte Carlo estimate of P(average squared radius <= n*N).

    Draws ``samples`` independent L-lists with coordinates uniform on
    [-K, K]^n and counts hits of the closed event, accumulating the
    quadratic form coordinate-block by coordinate-block so full lists are
    never materialized for large n.  Sampling is chunked over counter-based
    streams, making the hit count a pure function of (seed, sample index)
    and bit-identical for every worker count.
    """
    L, n = int(L), int(n)
    if L < 2:
        raise ValueError("L must be >= 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    if not K > 0 or not N > 0:
        raise ValueError("K and N must be positive")
    if samples < 1000:
        raise ValueError(f"samples must be >= 1000, got {samples}")
    seed = check_seed(seed)
    threshold = L * n * N
    nchunks = (samples + CHUNK - 1) // CHUNK

    def run(chunk):
        count = min(CHUNK, samples - chunk * CHUNK)
        return _tail_chunk(L, n, K, threshold, seed, chunk, count)

    w = resolve_workers(workers)
    if w == 1 or nchunks == 1:
        hits = sum(run(c) for c in range(nchunks))
    else:
        with ThreadPoolExecutor(max_workers=w) as pool:
            hits = sum(pool.map(run, range(nchunks)))

    p_hat = hits / samples
    alpha = 0.05
    if hits == 0:
        ci_low = 0.0
        ci_high = 1.0 - (alpha / 2.0) ** (1.0 / samples)
        exponent_hat = -math.log(ci_high) / n  # lower bound: no hits observed
    else:
        ci_low = float(beta_dist.ppf(alpha / 2.0, hits, samples - hits + 1))
        ci_high = (
            1.0
            if hits == samples
            else float(beta_dist.ppf(1.0 - alpha / 2.0, hits + 1, samples - hits))
        )
        exponent_hat = -math.log(p_hat) / n
    return TailEstimate(
        L=L,
        n=n,
        K=float(K),
        N=float(N),
        samples=int(samples),
        hits=hits,
        p_hat=p_hat,
        exponent_hat=exponent_hat,
        ci_low=ci_low,
        ci_high=ci_high,
        seed=seed,
    )
