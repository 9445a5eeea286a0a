"""Random cube codes, expurgation, tiling, and packing verification.

The pipeline samples M uniform points in [-K, K]^n at the density threshold
rate, removes points greedily until no L-subset has average squared radius
at or below n*N, wraps the survivor set into a periodic constellation with a
guard gap, and verifies the packing property on a finite window.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import beta as beta_dist

from .bounds import ExponentQuery, ball_log_volume_rate_finite, lambda_n_threshold
from .errors import BudgetError
from .geometry import PointList, chebyshev_radius, pairwise_sq_dists
from .rng import CHUNK, check_seed, chunk_rng

SUBSET_BUDGET = 10**8
WINDOW_BUDGET = 10**7
COMBO_CHUNK = 200_000


@dataclass(frozen=True)
class FiniteCode:
    """M points in [-K, K]^n with the parameters they were sampled under."""

    points: np.ndarray
    n: int
    L: int
    N: float
    K: float
    seed: int
    expurgated_count: int = 0

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.n:
            raise ValueError(f"points must have shape (M, {self.n})")
        if self.L < 2:
            raise ValueError("L must be >= 2")
        if not self.N > 0 or not self.K > 0:
            raise ValueError("N and K must be positive")
        if pts.size and np.abs(pts).max() > self.K * (1.0 + 1e-12):
            raise ValueError("coordinates must lie in [-K, K]")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def M(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class Constellation:
    """A finite code repeated on the lattice (period * Z)^n.

    period = 2K + 2*gap, so distinct tiles are separated by at least 2*gap
    in some coordinate.
    """

    base: FiniteCode
    gap: float

    def __post_init__(self):
        if not self.gap > 0:
            raise ValueError("gap must be positive")

    @property
    def period(self) -> float:
        return 2.0 * self.base.K + 2.0 * self.gap

    @property
    def nld(self) -> float:
        """Normalized log density (1/n) ln(M / period^n)."""
        if self.base.M == 0:
            raise ValueError("empty base code has no density")
        return math.log(self.base.M) / self.base.n - math.log(self.period)


@dataclass(frozen=True)
class PackingVerdict:
    passed: bool
    threshold: float
    window_points: int
    same_tile_lists: int
    min_avg_radius_sq: float
    min_cross_half_dist_sq: float
    violation: np.ndarray | None
    violation_base_indices: tuple | None


@dataclass(frozen=True)
class DensityReport:
    rate_nld: float
    delta_hat: float
    P_used: float
    mc_samples: int
    covered: int
    delta_ci_low: float
    delta_ci_high: float
    predicted_delta: float


def sample_code(n, L, N, K, rate_margin, seed, M=None) -> FiniteCode:
    """Uniform code at the expurgation-threshold density, backed off by
    exp(n * rate_margin).

    M defaults to round(lambda_n * e^(n*margin) * (2K)^n); pass M explicitly
    to override.  Refuses parameter sets whose C(M, L) would exceed the
    enumeration budget.
    """
    n, L = int(n), int(L)
    if rate_margin > 0:
        raise ValueError(f"rate_margin must be <= 0, got {rate_margin}")
    seed = check_seed(seed)
    if M is None:
        lam_n = lambda_n_threshold(ExponentQuery(N=N, L=L, K=K), n)
        target = lam_n * math.exp(n * rate_margin) * (2.0 * K) ** n
        if not math.isfinite(target):
            raise BudgetError(f"code size overflows at n = {n}")
        M = int(round(target))
        if M < 1:
            raise ValueError(
                f"computed code size rounds to {M}; relax rate_margin or parameters"
            )
        if math.comb(M, L) > SUBSET_BUDGET:
            raise BudgetError(
                f"C(M, L) = C({M}, {L}) exceeds the {SUBSET_BUDGET:.0e} subset "
                "budget; pass a smaller explicit M"
            )
    else:
        M = int(M)
        if M < 1:
            raise ValueError("M must be >= 1")
    pts = chunk_rng(seed, 0).uniform(-K, K, size=(M, n))
    return FiniteCode(points=pts, n=n, L=L, N=float(N), K=float(K), seed=seed)


def _combo_batches(M, L):
    it = itertools.combinations(range(M), L)
    while True:
        batch = list(itertools.islice(it, COMBO_CHUNK))
        if not batch:
            return
        yield np.array(batch, dtype=np.intp)


def _scan_subsets(D2, M, L, threshold):
    """Collect (indices, avg_sq_radius <= threshold) subsets in lexicographic
    order, plus the overall minimizer."""
    if L == 2:
        iu, ju = np.triu_indices(M, 1)
        avg = D2[iu, ju] / 4.0
        if len(avg) == 0:
            return [], (math.inf, None)
        i = int(np.argmin(avg))
        best = (float(avg[i]), (int(iu[i]), int(ju[i])))
        sel = np.flatnonzero(avg <= threshold)
        return [(int(iu[k]), int(ju[k])) for k in sel], best
    pair_cols = list(itertools.combinations(range(L), 2))
    best = (math.inf, None)
    bad = []
    for C in _combo_batches(M, L):
        S = np.zeros(len(C))
        for a, b in pair_cols:
            S += D2[C[:, a], C[:, b]]
        avg = S / (L * L)
        i = int(np.argmin(avg))
        if avg[i] < best[0]:
            best = (float(avg[i]), tuple(int(v) for v in C[i]))
        for row in np.flatnonzero(avg <= threshold):
            bad.append(tuple(int(v) for v in C[row]))
    return bad, best


def find_bad_lists(code: FiniteCode) -> list[tuple[int, ...]]:
    """Index tuples of every L-subset with average squared radius <= n*N,
    in lexicographic order."""
    M, L = code.M, code.L
    if M < L:
        return []
    if math.comb(M, L) > SUBSET_BUDGET:
        raise BudgetError(f"C({M}, {L}) exceeds the {SUBSET_BUDGET:.0e} subset budget")
    D2 = pairwise_sq_dists(code.points)
    bad, _ = _scan_subsets(D2, M, L, code.n * code.N)
    return bad


def min_avg_subset(code: FiniteCode) -> tuple[float, tuple[int, ...] | None]:
    """Smallest average squared radius over all L-subsets and its indices."""
    M, L = code.M, code.L
    if M < L:
        return math.inf, None
    if math.comb(M, L) > SUBSET_BUDGET:
        raise BudgetError(f"C({M}, {L}) exceeds the {SUBSET_BUDGET:.0e} subset budget")
    D2 = pairwise_sq_dists(code.points)
    _, best = _scan_subsets(D2, M, L, -math.inf)
    return best


def expurgate(code: FiniteCode, bad: list[tuple[int, ...]]) -> FiniteCode:
    """Remove points until no bad list survives.

    Greedy maximum coverage: repeatedly delete the point lying in the most
    surviving bad lists (lowest index on ties).  ``bad`` must be the exact
    output of find_bad_lists(code).
    """
    if not bad:
        return code
    lists = [frozenset(t) for t in bad]
    removed = []
    while lists:
        counts = Counter()
        for s in lists:
            counts.update(s)
        pick = min(counts, key=lambda i: (-counts[i], i))
        removed.append(pick)
        lists = [s for s in lists if pick not in s]
    keep = np.setdiff1d(np.arange(code.M), np.array(removed, dtype=np.intp))
    return replace(
        code,
        points=code.points[keep],
        expurgated_count=code.expurgated_count + len(removed),
    )


def achieved_rate(code: FiniteCode) -> float:
    """(1/n) ln(M / (2K)^n) for the current point count."""
    if code.M == 0:
        raise ValueError("empty code has no rate")
    return math.log(code.M) / code.n - math.log(2.0 * code.K)


def tile(code: FiniteCode, gap: float | None = None) -> Constellation:
    """Wrap a finite code into a periodic constellation with a guard gap.

    The default gap is 1.01 * sqrt(n*N).  Gaps below sqrt(n*N) are rejected:
    they would leave cross-tile lists without the automatic half-distance
    safety certificate.
    """
    root = math.sqrt(code.n * code.N)
    if gap is None:
        gap = 1.01 * root
    gap = float(gap)
    if gap < root * (1.0 - 1e-12):
        raise ValueError(f"gap {gap!r} is below sqrt(n*N) = {root!r}")
    return Constellation(base=code, gap=gap)


def _window(c: Constellation, center, radius: float):
    """Constellation points in the closed ball, with tile and base indices."""
    base = c.base.points
    M, n = base.shape
    if M == 0:
        return np.empty((0, n)), np.empty(0, dtype=np.intp), np.empty(0, dtype=np.intp)
    P = c.period
    K = c.base.K
    center = np.asarray(center, dtype=float).reshape(n)
    los = np.ceil((center - radius - K) / P).astype(int)
    his = np.floor((center + radius + K) / P).astype(int)
    counts = np.maximum(his - los + 1, 0)
    total = int(np.prod(counts, dtype=float)) if np.all(counts > 0) else 0
    if np.prod(counts, dtype=float) > WINDOW_BUDGET:
        raise BudgetError(
            f"window spans {np.prod(counts, dtype=float):.3g} tiles, over the "
            f"{WINDOW_BUDGET:.0e} budget"
        )
    if total == 0:
        return np.empty((0, n)), np.empty(0, dtype=np.intp), np.empty(0, dtype=np.intp)
    pts_out, tiles_out, base_out = [], [], []
    r2 = radius * radius
    ranges = [range(lo, hi + 1) for lo, hi in zip(los, his)]
    tile_iter = itertools.product(*ranges)
    tile_id = 0
    while True:
        block = list(itertools.islice(tile_iter, 2048))
        if not block:
            break
        offs = np.array(block, dtype=float) * P
        cand = offs[:, None, :] + base[None, :, :]
        d2 = ((cand - center) ** 2).sum(axis=2)
        sel = d2 <= r2
        if sel.any():
            ti, bi = np.nonzero(sel)
            pts_out.append(cand[ti, bi])
            tiles_out.append(ti + tile_id)
            base_out.append(bi)
        tile_id += len(block)
    if not pts_out:
        return np.empty((0, n)), np.empty(0, dtype=np.intp), np.empty(0, dtype=np.intp)
    return (
        np.concatenate(pts_out),
        np.concatenate(tiles_out),
        np.concatenate(base_out).astype(np.intp),
    )


def enumerate_window(c: Constellation, center, radius: float) -> np.ndarray:
    """All constellation points within the closed ball (center, radius)."""
    pts, _, _ = _window(c, center, radius)
    return pts


def verify_packing(c: Constellation, window_radius: float) -> PackingVerdict:
    """Check the packing property on a window around the origin.

    Same-tile L-subsets are tested exactly through their average squared
    radius.  Any subset spanning two tiles contains a cross-tile pair, and
    an enclosing ball of such a subset has squared radius at least a quarter
    of that pair's squared distance, so one vectorized bound over cross-tile
    pairs certifies all of them at once; if that certificate is inconclusive
    the cross subsets are re-checked exactly with the enclosing-ball solver.
    """
    code = c.base
    L = code.L
    thr = code.n * code.N
    pts, tiles, base_idx = _window(c, np.zeros(code.n), window_radius)
    W = len(pts)

    min_avg = math.inf
    min_avg_subset_rows = None
    same_tile_lists = 0
    for t in np.unique(tiles):
        rows = np.flatnonzero(tiles == t)
        if len(rows) < L:
            continue
        if math.comb(len(rows), L) > WINDOW_BUDGET:
            raise BudgetError(
                f"tile {t} holds {len(rows)} points: C({len(rows)}, {L}) same-tile "
                "subsets exceed the budget"
            )
        D2 = pairwise_sq_dists(pts[rows])
        _, best = _scan_subsets(D2, len(rows), L, -math.inf)
        same_tile_lists += math.comb(len(rows), L)
        if best[0] < min_avg:
            min_avg = best[0]
            min_avg_subset_rows = rows[list(best[1])]

    min_cross = math.inf
    if W:
        for start in range(0, W, 512):
            stop = min(start + 512, W)
            d2 = (
                np.einsum("ij,ij->i", pts[start:stop], pts[start:stop])[:, None]
                + np.einsum("ij,ij->i", pts, pts)[None, :]
                - 2.0 * pts[start:stop] @ pts.T
            )
            cross = tiles[start:stop, None] != tiles[None, :]
            if cross.any():
                min_cross = min(min_cross, float(d2[cross].min()))
    min_cross_half = min_cross / 4.0 if math.isfinite(min_cross) else math.inf

    if min_avg <= thr:
        rows = min_avg_subset_rows
        return PackingVerdict(
            passed=False,
            threshold=thr,
            window_points=W,
            same_tile_lists=same_tile_lists,
            min_avg_radius_sq=min_avg,
            min_cross_half_dist_sq=min_cross_half,
            violation=pts[rows],
            violation_base_indices=tuple(int(i) for i in base_idx[rows]),
        )

    if min_cross_half <= thr:
        # certificate inconclusive: fall back to exact enclosing balls
        if math.comb(W, L) > 10**6:
            raise BudgetError(
                f"cross-tile fallback needs C({W}, {L}) enclosing-ball solves"
            )
        for idx in itertools.combinations(range(W), L):
            rows = np.array(idx)
            if len(set(tiles[rows])) == 1:
                continue
            res = chebyshev_radius(PointList(pts[rows]))
            if res.lower <= thr:
                return PackingVerdict(
                    passed=False,
                    threshold=thr,
                    window_points=W,
                    same_tile_lists=same_tile_lists,
                    min_avg_radius_sq=min_avg,
                    min_cross_half_dist_sq=min_cross_half,
                    violation=pts[rows],
                    violation_base_indices=tuple(int(i) for i in base_idx[rows]),
                )

    return PackingVerdict(
        passed=True,
        threshold=thr,
        window_points=W,
        same_tile_lists=same_tile_lists,
        min_avg_radius_sq=min_avg,
        min_cross_half_dist_sq=min_cross_half,
        violation=None,
        violation_base_indices=None,
    )


def density_report(c: Constellation, P: float, mc_samples: int, seed, workers=None) -> DensityReport:
    """Monte Carlo estimate of the log fraction of space covered by noise
    balls of radius sqrt(n*N) around the constellation.

    Samples uniformly from the ball of radius sqrt(n*P), folds each sample
    into the fundamental cell, and tests coverage against the base code
    extended by one ring of neighbor tiles (equivalent to enumerating the
    window around each sample, since the covering radius never exceeds the
    gap).
    """
    if not P > 0:
        raise ValueError("P must be positive")
    if mc_samples < 1:
        raise ValueError("mc_samples must be >= 1")
    seed = check_seed(seed)
    code = c.base
    n, M = code.n, code.M
    if M == 0:
        raise ValueError("empty base code")
    if (3**n) * M > WINDOW_BUDGET:
        raise BudgetError(f"neighbor ring 3^{n} * {M} exceeds the window budget")
    Pd = c.period
    r_cov = math.sqrt(n * code.N)
    R = math.sqrt(n * P)
    ring = np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=n))) * Pd
    ext = (ring[:, None, :] + code.points[None, :, :]).reshape(-1, n)
    tree = cKDTree(ext)

    covered = 0
    nchunks = (mc_samples + CHUNK - 1) // CHUNK
    for chunk in range(nchunks):
        m = min(CHUNK, mc_samples - chunk * CHUNK)
        rng = chunk_rng(seed, chunk)
        g = rng.standard_normal(size=(m, n))
        u = rng.random(size=m)
        norms = np.sqrt(np.einsum("ij,ij->i", g, g))
        np.maximum(norms, 1e-300, out=norms)
        y = g * (R * u ** (1.0 / n) / norms)[:, None]
        y -= Pd * np.round(y / Pd)
        dmin, _ = tree.query(y, k=1)
        covered += int((dmin <= r_cov).sum())

    frac = covered / mc_samples
    alpha = 0.05
    if covered == 0:
        lo = 0.0
        hi = 1.0 - (alpha / 2.0) ** (1.0 / mc_samples)
        delta_hat = -math.inf
    else:
        lo = float(beta_dist.ppf(alpha / 2.0, covered, mc_samples - covered + 1))
        hi = (
            1.0
            if covered == mc_samples
            else float(beta_dist.ppf(1.0 - alpha / 2.0, covered + 1, mc_samples - covered))
        )
        delta_hat = math.log(frac) / n
    return DensityReport(
        rate_nld=c.nld,
        delta_hat=delta_hat,
        P_used=float(P),
        mc_samples=int(mc_samples),
        covered=covered,
        delta_ci_low=math.log(lo) / n if lo > 0 else -math.inf,
        delta_ci_high=math.log(hi) / n,
        predicted_delta=c.nld + ball_log_volume_rate_finite(code.N, n),
    )
