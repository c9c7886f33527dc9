"""Monte Carlo and exact estimators for max laws and phantom inputs.

Block maxima always come from R independent blocks; for Markov kinds
that means R independent paths, each with its own burn-in and its own
seed substream, so results do not depend on worker chunking.  For kinds
with a closed-form max law the block maxima are drawn by inverse
transform from that law, one uniform per replica, shared across block
sizes (which makes estimated driving levels monotone in n for free).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import stats

from .distributions import DistFn, mixture_component
from .errors import (
    InsufficientDataError,
    InvalidArgumentError,
    NotExactlyComputableError,
    NotRegenerativeError,
)
from .grids import HUGE_INDEX
from .phantom import DrivingSequence, driving_from_estimates
from .processes import (
    IIDSpec,
    LindleySpec,
    MetropolisSpec,
    MixtureSpec,
    MovingMaxSpec,
    ProcessSpec,
    SamplePath,
    _metropolis_paths,
    _mixture_draw_component,
    default_burn_in,
    describe_spec,
    exact_max_cdf,
    generate,
    has_exact_max_law,
    marginal_sf,
    metropolis_accept,
)
from .seeding import rng_for

__all__ = [
    "MaxLawRow",
    "MaxLawEstimate",
    "estimate_max_cdf",
    "DrivingSeqEstimate",
    "estimate_driving_sequence",
    "driving_from_maxima",
    "maxlaw_from_maxima",
    "block_maxima_table",
    "BTPair",
    "BTRow",
    "BTReport",
    "check_BT",
    "CnDiagnostic",
    "estimate_Cn",
    "PropBasicRow",
    "PropBasicSeries",
    "propbasic_series",
    "alpha_delta_exponent",
    "RegenStats",
    "decompose_regenerative",
    "rootzen_phantom",
    "CycleTailBand",
    "cycle_tail_ratio",
    "ThetaRow",
    "ThetaEstimate",
    "estimate_theta_single_sequence",
    "divergence_rule",
]

MIN_REPLICAS = 200
_CHUNK_CAP = 128


def _chunks(R: int, workers: int) -> list[tuple[int, int]]:
    # Worker count only sets the chunk size; replica substreams make the
    # result identical for every chunking.
    size = min(max(1, math.ceil(R / max(1, workers))), _CHUNK_CAP)
    return [(lo, min(lo + size, R)) for lo in range(0, R, size)]


def _validate_sizes(block_sizes) -> list[int]:
    ns = [int(n) for n in np.atleast_1d(block_sizes)]
    if not ns or any(n < 1 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
        raise InvalidArgumentError("block sizes must be strictly increasing, >= 1")
    return ns


# ---------------------------------------------------------------------------
# block maxima
# ---------------------------------------------------------------------------

def _transform_maxima(spec: ProcessSpec, n_list: Sequence[int], R: int,
                      seed: int, tag: str) -> dict[int, np.ndarray]:
    rng = rng_for(seed, tag, "maxima")
    u = np.maximum(rng.random(R), 1e-300)
    logu = np.log(u)
    out: dict[int, np.ndarray] = {}
    if isinstance(spec, IIDSpec):
        for n in n_list:
            out[n] = np.asarray(spec.marginal.quantile(np.exp(logu / n)), dtype=float)
        return out
    if isinstance(spec, MovingMaxSpec):
        for n in n_list:
            e = n + spec.window - 1
            out[n] = np.asarray(spec.base.quantile(np.exp(logu / e)), dtype=float)
        return out
    if isinstance(spec, MixtureSpec):
        krng = rng_for(seed, tag, "component")
        ks = np.array([_mixture_draw_component(krng) for _ in range(R)], dtype=np.int64)
        bases = ks.astype(float) ** 2
        for n in n_list:
            t = -np.expm1(logu / n)  # tail level of the per-component quantile
            idx = np.maximum(np.ceil(1.0 / np.maximum(t, 1e-300)), bases)
            idx = np.minimum(idx, float(HUGE_INDEX))
            out[n] = np.array([spec.vseq.value(int(i)) for i in idx], dtype=float)
        return out
    raise InvalidArgumentError("no transform sampler for this kind")


def _path_matrix(spec: ProcessSpec, L: int, lo: int, hi: int,
                 seed: int, tag: str) -> np.ndarray:
    """Stationary path segment of length L for replicas lo..hi-1."""
    rows = hi - lo
    if isinstance(spec, IIDSpec):
        out = np.empty((rows, L))
        for i, r in enumerate(range(lo, hi)):
            out[i] = spec.marginal.draw(rng_for(seed, tag, r), L)
        return out
    if isinstance(spec, MovingMaxSpec):
        m = spec.window
        out = np.empty((rows, L))
        for i, r in enumerate(range(lo, hi)):
            raw = spec.base.draw(rng_for(seed, tag, r), L + m - 1)
            out[i] = np.lib.stride_tricks.sliding_window_view(raw, m).max(axis=1)
        return out
    if isinstance(spec, MixtureSpec):
        out = np.empty((rows, L))
        for i, r in enumerate(range(lo, hi)):
            rng = rng_for(seed, tag, r)
            comp = mixture_component(_mixture_draw_component(rng), spec.vseq)
            out[i] = comp.draw(rng, L)
        return out
    if isinstance(spec, LindleySpec):
        burn = default_burn_in(spec)
        z = np.empty((rows, burn + L))
        for i, r in enumerate(range(lo, hi)):
            z[i] = spec.step.draw(rng_for(seed, tag, r), burn + L)
        c = np.concatenate([np.zeros((rows, 1)), np.cumsum(z, axis=1)], axis=1)
        x = c[:, 1:] - np.minimum.accumulate(c, axis=1)[:, 1:]
        return x[:, burn:]
    if isinstance(spec, MetropolisSpec):
        burn = default_burn_in(spec)
        rngs = [rng_for(seed, tag, r) for r in range(lo, hi)]
        paths = _metropolis_paths(spec, rngs, burn + L)
        return paths[:, burn:]
    raise InvalidArgumentError(f"unknown spec {type(spec).__name__}")


_SLAB = 16_384  # fixed time-slab length; constant so slab boundaries never
                # depend on worker count or available memory


def _markov_chunk_maxima(spec: LindleySpec | MetropolisSpec, n_list: Sequence[int],
                         lo: int, hi: int, seed: int, tag: str) -> np.ndarray:
    """Running block maxima for replicas lo..hi-1, streamed in time slabs."""
    rows = hi - lo
    burn = default_burn_in(spec)
    total = burn + n_list[-1]
    rngs = [rng_for(seed, tag, r) for r in range(lo, hi)]
    out = np.empty((rows, len(n_list)))
    runmax = np.full(rows, -np.inf)
    if isinstance(spec, LindleySpec):
        c_prev = np.zeros(rows)
        m_prev = np.zeros(rows)
    else:
        x = np.full(rows, spec.init if spec.init is not None
                    else float(spec.target.quantile(0.5)))
        fx = np.asarray(spec.target.pdf(x), dtype=float)
    pos = 0
    while pos < total:
        s_len = min(_SLAB, total - pos)
        if isinstance(spec, LindleySpec):
            z = np.empty((rows, s_len))
            for i, rng in enumerate(rngs):
                z[i] = spec.step.draw(rng, s_len)
            c = c_prev[:, None] + np.cumsum(z, axis=1)
            m = np.minimum(m_prev[:, None], np.minimum.accumulate(c, axis=1))
            xs = c - m
            c_prev, m_prev = c[:, -1].copy(), m[:, -1].copy()
        else:
            z = np.empty((rows, s_len))
            u = np.empty((rows, s_len))
            for i, rng in enumerate(rngs):
                z[i] = spec.proposal.draw(rng, s_len)
                u[i] = rng.random(s_len)
            xs = np.empty((rows, s_len))
            for t in range(s_len):
                y = x + z[:, t]
                fy = np.asarray(spec.target.pdf(y), dtype=float)
                acc = metropolis_accept(fx, fy, u[:, t])
                x = np.where(acc, y, x)
                fx = np.where(acc, fy, fx)
                xs[:, t] = x
        start = max(burn - pos, 0)
        if start < s_len:
            rm = np.maximum.accumulate(xs[:, start:], axis=1)
            rm = np.maximum(runmax[:, None], rm)
            for j, n in enumerate(n_list):
                col = burn + n - 1
                if pos + start <= col < pos + s_len:
                    out[:, j] = rm[:, col - pos - start]
            runmax = rm[:, -1].copy()
        pos += s_len
    return out


def block_maxima_table(spec: ProcessSpec, block_sizes, R: int, seed: int,
                       tag: str = "maxlaw", workers: int = 1) -> dict[int, np.ndarray]:
    """R block maxima for each requested block size."""
    n_list = _validate_sizes(block_sizes)
    if has_exact_max_law(spec):
        return _transform_maxima(spec, n_list, R, seed, tag)
    out = {n: np.empty(R) for n in n_list}
    for lo, hi in _chunks(R, workers):
        chunk = _markov_chunk_maxima(spec, n_list, lo, hi, seed, tag)
        for j, n in enumerate(n_list):
            out[n][lo:hi] = chunk[:, j]
    return out


# ---------------------------------------------------------------------------
# max law estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MaxLawRow:
    n: int
    levels: np.ndarray
    p_hat: np.ndarray
    se: np.ndarray


@dataclass(frozen=True)
class MaxLawEstimate:
    method: str  # "monte-carlo" | "exact"
    replicas: int
    rows: tuple[MaxLawRow, ...]

    def row(self, n: int) -> MaxLawRow:
        for r in self.rows:
            if r.n == int(n):
                return r
        raise InvalidArgumentError(f"no estimate stored for block size {n}")


def exact_max_quantile(spec: ProcessSpec, n: int, p: float) -> float:
    """inf{x : P(M_n <= x) >= p} from the closed-form max law."""
    if not (0.0 < p < 1.0):
        raise InvalidArgumentError("probability must lie in (0, 1)")
    if isinstance(spec, IIDSpec):
        return float(spec.marginal.quantile(math.exp(math.log(p) / n)))
    if isinstance(spec, MovingMaxSpec):
        e = n + spec.window - 1
        return float(spec.base.quantile(math.exp(math.log(p) / e)))
    if isinstance(spec, MixtureSpec):
        def cdf_at(j: int) -> float:
            return math.exp(n * math.log1p(-1.0 / j)) * (1.0 - 1.0 / (math.isqrt(j) + 1))
        lo, hi = 1, 2
        while cdf_at(hi) < p:
            lo = hi
            hi *= 2
            if hi > HUGE_INDEX:
                raise InvalidArgumentError("quantile index overflow")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if cdf_at(mid) < p:
                lo = mid
            else:
                hi = mid
        return spec.vseq.value(hi)
    raise NotExactlyComputableError(f"no closed form for {describe_spec(spec)}")


def _type1_quantile(sorted_vals: np.ndarray, p: float) -> float:
    k = max(1, math.ceil(p * sorted_vals.size))
    return float(sorted_vals[min(k, sorted_vals.size) - 1])


def estimate_max_cdf(spec: ProcessSpec, block_sizes, R: int = 1000, seed: int = 0,
                     level_grid=None, method: str = "monte-carlo",
                     workers: int = 1) -> MaxLawEstimate:
    """Estimate P(M_n <= x) on a level grid for each block size.

    ``level_grid`` may be a shared array, a mapping n -> array, or None
    for an automatic grid spanning the central probability range of M_n.
    """
    n_list = _validate_sizes(block_sizes)
    if method not in ("monte-carlo", "exact"):
        raise InvalidArgumentError("method must be 'monte-carlo' or 'exact'")

    def grid_for(n: int, maxima: np.ndarray | None) -> np.ndarray:
        if level_grid is None:
            probs = np.linspace(0.002, 0.998, 41)
            if maxima is None:
                xs = np.array([exact_max_quantile(spec, n, float(p)) for p in probs])
            else:
                s = np.sort(maxima)
                xs = np.array([_type1_quantile(s, float(p)) for p in probs])
            return np.unique(xs)
        if isinstance(level_grid, Mapping):
            return np.asarray(level_grid[n], dtype=float)
        return np.asarray(getattr(level_grid, "values", level_grid), dtype=float)

    rows = []
    if method == "exact":
        for n in n_list:
            xs = grid_for(n, None)
            p = np.array([exact_max_cdf(spec, n, float(x)) for x in xs])
            rows.append(MaxLawRow(n=n, levels=xs, p_hat=p, se=np.zeros_like(p)))
        return MaxLawEstimate(method="exact", replicas=0, rows=tuple(rows))

    if R < MIN_REPLICAS:
        raise InvalidArgumentError(f"need at least {MIN_REPLICAS} replicas, got {R}")
    table = block_maxima_table(spec, n_list, R, seed, tag="maxlaw", workers=workers)
    for n in n_list:
        maxima = table[n]
        xs = grid_for(n, maxima)
        p = np.searchsorted(np.sort(maxima), xs, side="right") / R
        se = np.sqrt(p * (1.0 - p) / R)
        rows.append(MaxLawRow(n=n, levels=xs, p_hat=p, se=se))
    return MaxLawEstimate(method="monte-carlo", replicas=R, rows=tuple(rows))


# ---------------------------------------------------------------------------
# driving sequence estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DrivingSeqEstimate:
    gamma: float
    n_values: np.ndarray
    v_hat: np.ndarray
    ci_lo: np.ndarray
    ci_hi: np.ndarray
    method: str
    replicas: int
    raw_violations: int = 0

    def level_for(self, n: int) -> float:
        idx = np.nonzero(self.n_values == int(n))[0]
        if idx.size == 0:
            raise InvalidArgumentError(f"no driving level stored for n={n}")
        return float(self.v_hat[idx[0]])

    def ci_for(self, n: int) -> tuple[float, float]:
        idx = np.nonzero(self.n_values == int(n))[0]
        if idx.size == 0:
            raise InvalidArgumentError(f"no driving level stored for n={n}")
        return float(self.ci_lo[idx[0]]), float(self.ci_hi[idx[0]])

    def to_driving_sequence(self) -> DrivingSequence:
        return driving_from_estimates(self.gamma, self.n_values, self.v_hat)


def driving_from_maxima(gamma: float, table: Mapping[int, np.ndarray],
                        R: int) -> DrivingSeqEstimate:
    """Driving-sequence estimate from an existing block-maxima table."""
    if not (0.0 < gamma < 1.0):
        raise InvalidArgumentError("gamma must lie strictly inside (0, 1)")
    n_list = sorted(int(n) for n in table)
    k_lo = max(int(stats.binom.ppf(0.025, R, gamma)), 1)
    k_hi = min(int(stats.binom.ppf(0.975, R, gamma)) + 1, R)
    v_hat = np.empty(len(n_list))
    ci_lo = np.empty(len(n_list))
    ci_hi = np.empty(len(n_list))
    for i, n in enumerate(n_list):
        s = np.sort(table[n])
        v_hat[i] = _type1_quantile(s, gamma)
        ci_lo[i] = s[k_lo - 1]
        ci_hi[i] = s[k_hi - 1]
    violations = int(np.count_nonzero(np.diff(v_hat) < 0))
    return DrivingSeqEstimate(gamma=gamma, n_values=np.asarray(n_list),
                              v_hat=np.maximum.accumulate(v_hat),
                              ci_lo=ci_lo, ci_hi=ci_hi, method="monte-carlo",
                              replicas=R, raw_violations=violations)


def maxlaw_from_maxima(table: Mapping[int, np.ndarray], R: int,
                       probs=None, level_cap: float | None = None) -> MaxLawEstimate:
    """Max-law estimate on empirical-quantile grids of an existing table.

    ``level_cap`` drops grid levels above a known evaluation bound (for
    comparison against a phantom whose stored driving prefix ends there).
    """
    if probs is None:
        probs = np.linspace(0.01, 0.99, 33)
    rows = []
    for n in sorted(int(n) for n in table):
        s = np.sort(table[n])
        xs = np.unique([_type1_quantile(s, float(p)) for p in probs])
        if level_cap is not None:
            xs = xs[xs <= level_cap]
        p = np.searchsorted(s, xs, side="right") / R
        se = np.sqrt(p * (1.0 - p) / R)
        rows.append(MaxLawRow(n=n, levels=xs, p_hat=p, se=se))
    return MaxLawEstimate(method="monte-carlo", replicas=R, rows=tuple(rows))


def estimate_driving_sequence(spec: ProcessSpec, gamma: float, block_sizes,
                              R: int = 1000, seed: int = 0,
                              method: str = "auto",
                              workers: int = 1) -> DrivingSeqEstimate:
    """Estimate v_n = inf{x : P(M_n <= x) >= gamma} for each block size.

    Exact mode inverts the closed-form max law; Monte Carlo mode takes
    the type-1 empirical gamma-quantile of R block maxima, with an
    order-statistic confidence interval, and enforces monotonicity in n
    by a running maximum (violations are counted, not hidden).
    """
    if not (0.0 < gamma < 1.0):
        raise InvalidArgumentError("gamma must lie strictly inside (0, 1)")
    n_list = _validate_sizes(block_sizes)
    if method == "auto":
        method = "exact" if has_exact_max_law(spec) else "monte-carlo"
    if method == "exact":
        v = np.array([exact_max_quantile(spec, n, gamma) for n in n_list])
        return DrivingSeqEstimate(gamma=gamma, n_values=np.asarray(n_list),
                                  v_hat=v, ci_lo=v.copy(), ci_hi=v.copy(),
                                  method="exact", replicas=0)
    if R < MIN_REPLICAS:
        raise InvalidArgumentError(f"need at least {MIN_REPLICAS} replicas, got {R}")
    table = block_maxima_table(spec, n_list, R, seed, tag="driving", workers=workers)
    return driving_from_maxima(gamma, table, R)


# ---------------------------------------------------------------------------
# long-range factorization check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BTPair:
    p: int
    q: int
    value: float  # P(M_{p+q} <= v) - P(M_p <= v) P(M_q <= v)
    se: float


@dataclass(frozen=True)
class BTRow:
    n: int
    level: float
    b_value: float
    worst_pair: tuple[int, int]
    pairs: tuple[BTPair, ...]
    r_n: int
    r_tail_product: float
    cov_diag: float


@dataclass(frozen=True)
class BTReport:
    T: float
    method: str
    replicas: int
    r_exponent: float
    r_adjusted: bool
    rows: tuple[BTRow, ...]

    def max_b(self) -> float:
        return max((r.b_value for r in self.rows), default=0.0)


_DEFAULT_PAIR_FRACTIONS = ((0.5, 0.5), (1.0, 0.5), (0.5, 1.0), (1.0, 1.0))


def _bt_exact_cov(spec: ProcessSpec, v: float, p: int, q: int, r: int) -> float:
    a_len = p - r
    if a_len < 1:
        return 0.0
    if isinstance(spec, IIDSpec):
        return 0.0
    if isinstance(spec, MovingMaxSpec):
        m = spec.window
        overlap = max(0, (a_len + m - 1) - p)
        f = 1.0 - float(spec.base.tail(v))
        if f <= 0.0:
            return 0.0
        total = (a_len + m - 1) + (q + m - 1)
        return f ** (total - overlap) - f ** total
    if isinstance(spec, MixtureSpec):
        j = spec.vseq.count_leq(v)
        if j < 1 or j >= HUGE_INDEX:
            return 0.0
        c = 1.0 - 1.0 / (math.isqrt(j) + 1)
        base = math.exp((a_len + q) * math.log1p(-1.0 / j))
        return c * (1.0 - c) * base
    raise NotExactlyComputableError("no closed-form covariance")


def check_BT(spec: ProcessSpec, dse: DrivingSeqEstimate, T: float = 2.0,
             n_list=None, pair_fractions=_DEFAULT_PAIR_FRACTIONS,
             R: int = 1000, seed: int = 0, method: str = "auto",
             workers: int = 1) -> BTReport:
    """Factorization check sup |P(M_{p+q} <= v_n) - P(M_p <= v_n) P(M_q <= v_n)|.

    Pairs (p, q) come from fractions of n and must satisfy p + q <= T n.
    Alongside the b-values the report carries the covariance diagnostic
    Cov(1{M_{p-r} <= v}, 1{window max over (p, p+q] <= v}) with
    r_n = floor(n**e); e starts at 1/3 and is lowered to 1/4 then 1/5 if
    r_n * P(X_1 > v_n) fails to decay along n_list.
    """
    if T <= 0:
        raise InvalidArgumentError("T must be positive")
    if n_list is None:
        n_list = [int(n) for n in dse.n_values]
    n_list = _validate_sizes(n_list)
    if method == "auto":
        method = "exact" if has_exact_max_law(spec) else "monte-carlo"

    pair_table: dict[int, list[tuple[int, int]]] = {}
    for n in n_list:
        prs = []
        for f1, f2 in pair_fractions:
            p, q = max(1, round(f1 * n)), max(1, round(f2 * n))
            if p + q > T * n:
                raise InvalidArgumentError(
                    f"pair ({p},{q}) violates p + q <= T*n at n={n}")
            prs.append((p, q))
        pair_table[n] = prs

    # marginal tails at the driving levels, for the r_n diagnostic
    tails = {}
    for n in n_list:
        v = dse.level_for(n)
        try:
            tails[n] = marginal_sf(spec, v)
        except NotExactlyComputableError:
            tails[n] = None  # filled from simulation below

    candidates = (1.0 / 3.0, 1.0 / 4.0, 1.0 / 5.0)

    rows = []
    if method == "exact":
        for n in n_list:
            v = dse.level_for(n)
            prs = []
            for p, q in pair_table[n]:
                d = exact_max_cdf(spec, p + q, v) \
                    - exact_max_cdf(spec, p, v) * exact_max_cdf(spec, q, v)
                prs.append(BTPair(p=p, q=q, value=d, se=0.0))
            worst = max(prs, key=lambda b: abs(b.value))
            rows.append((n, v, prs, worst, None))
        replicas = 0
    else:
        if R < MIN_REPLICAS:
            raise InvalidArgumentError(f"need at least {MIN_REPLICAS} replicas, got {R}")
        replicas = R
        for n in n_list:
            v = dse.level_for(n)
            prs_pq = pair_table[n]
            L = max(p + q for p, q in prs_pq)
            fi = np.empty(R, dtype=np.int64)
            win_ok = {pq: np.empty(R, dtype=bool) for pq in prs_pq}
            marg_exceed = 0
            marg_total = 0
            for lo, hi in _chunks(R, workers):
                seg = _path_matrix(spec, L, lo, hi, seed, f"bt-{n}")
                exceed = seg > v
                any_exc = exceed.any(axis=1)
                first = np.where(any_exc, exceed.argmax(axis=1) + 1, L + 1)
                fi[lo:hi] = first
                for p, q in prs_pq:
                    win_ok[(p, q)][lo:hi] = ~exceed[:, p:p + q].any(axis=1)
                marg_exceed += int(exceed[:, 0].sum())
                marg_total += hi - lo
            if tails[n] is None:
                tails[n] = marg_exceed / marg_total
            prs = []
            for p, q in prs_pq:
                ipq = fi > p + q
                ip = fi > p
                iq = fi > q
                d = ipq.mean() - ip.mean() * iq.mean()
                cov = np.cov(np.vstack([ipq, ip, iq]).astype(float), ddof=1) / R
                grad = np.array([1.0, -iq.mean(), -ip.mean()])
                se = float(np.sqrt(max(grad @ cov @ grad, 0.0)))
                prs.append(BTPair(p=p, q=q, value=float(d), se=se))
            worst = max(prs, key=lambda b: abs(b.value))
            rows.append((n, v, prs, worst, (fi, win_ok)))

    # choose the r exponent so that r_n * tail decays along n_list
    chosen = candidates[0]
    adjusted = False
    for e in candidates:
        prods = [math.floor(n ** e) * tails[n] for n in n_list]
        if all(b <= a * 1.05 for a, b in zip(prods, prods[1:])) or len(prods) < 2:
            chosen = e
            adjusted = e != candidates[0]
            break
    else:
        chosen = candidates[-1]
        adjusted = True

    out_rows = []
    for n, v, prs, worst, mc_data in rows:
        r_n = max(1, math.floor(n ** chosen))
        if mc_data is None:
            cov = _bt_exact_cov(spec, v, worst.p, worst.q, r_n)
        else:
            fi, win_ok = mc_data
            a = (fi > max(worst.p - r_n, 0)).astype(float)
            b = win_ok[(worst.p, worst.q)].astype(float)
            cov = float(np.mean(a * b) - a.mean() * b.mean())
        out_rows.append(BTRow(n=n, level=v, b_value=abs(worst.value),
                              worst_pair=(worst.p, worst.q), pairs=tuple(prs),
                              r_n=r_n, r_tail_product=float(r_n * tails[n]),
                              cov_diag=cov))
    return BTReport(T=float(T), method=method, replicas=replicas,
                    r_exponent=chosen, r_adjusted=adjusted, rows=tuple(out_rows))


# ---------------------------------------------------------------------------
# skeleton diagnostic and the sandwich series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CnDiagnostic:
    n: int
    m: int
    k: int
    level: float
    c_hat: float
    worst_j: int
    p_single: float
    p_single_se: float
    p_max_n: float
    p_max_n_se: float
    skeleton_probs: np.ndarray
    upper_bound: float
    sandwich_lower_ok: bool
    sandwich_upper_ok: bool


def estimate_Cn(spec: ProcessSpec, level: float, n: int, m: int, k: int,
                R: int = 1000, seed: int = 0, gamma: float | None = None,
                workers: int = 1) -> CnDiagnostic:
    """Skeleton factorization diagnostic at spacing m with k skeleton points.

    Z_j is the max of X_m, X_{2m}, ..., X_{jm}; the statistic is
    C_hat = max_{2<=j<=k} |P(Z_j <= v) - P(X_1 <= v) P(Z_{j-1} <= v)|,
    and the report checks the sandwich
    gamma <= P(M_n <= v) <= P(X_1 <= v)**k + k * C_hat within 3 SE.
    """
    if k < 2 or m < 1:
        raise InvalidArgumentError("need k >= 2 and m >= 1")
    if k * m > n:
        raise InvalidArgumentError("need k * m <= n")
    if R < MIN_REPLICAS:
        raise InvalidArgumentError(f"need at least {MIN_REPLICAS} replicas, got {R}")
    v = float(level)
    skel_le = np.zeros((R, k), dtype=bool)
    single_le = np.zeros(R, dtype=bool)
    max_le = np.zeros(R, dtype=bool)
    for lo, hi in _chunks(R, workers):
        seg = _path_matrix(spec, n, lo, hi, seed, f"cn-{n}-{m}-{k}")
        skel = seg[:, m - 1::m][:, :k]
        skel_le[lo:hi] = np.minimum.accumulate(skel <= v, axis=1)
        single_le[lo:hi] = seg[:, 0] <= v
        max_le[lo:hi] = seg.max(axis=1) <= v
    pz = skel_le.mean(axis=0)  # P(Z_j <= v), j = 1..k
    p1 = float(single_le.mean())
    pmn = float(max_le.mean())
    diffs = np.abs(pz[1:] - p1 * pz[:-1])
    worst = int(np.argmax(diffs))
    c_hat = float(diffs[worst])
    se1 = math.sqrt(p1 * (1.0 - p1) / R)
    semn = math.sqrt(pmn * (1.0 - pmn) / R)
    bound = p1 ** k + k * c_hat
    se_bound = k * p1 ** (k - 1) * se1 + 2.0 * k * math.sqrt(0.25 / R)
    lower_ok = True if gamma is None else pmn >= gamma - 3.0 * semn
    upper_ok = pmn <= bound + 3.0 * (semn + se_bound)
    return CnDiagnostic(n=n, m=m, k=k, level=v, c_hat=c_hat, worst_j=worst + 2,
                        p_single=p1, p_single_se=se1, p_max_n=pmn,
                        p_max_n_se=semn, skeleton_probs=pz, upper_bound=bound,
                        sandwich_lower_ok=bool(lower_ok),
                        sandwich_upper_ok=bool(upper_ok))


@dataclass(frozen=True)
class PropBasicRow:
    n: int
    k: int
    m: int
    level: float
    k_tail: float  # k_n * P(X_1 > v_n)
    k_c: float     # k_n * C_hat(m_n; k_n)


@dataclass(frozen=True)
class PropBasicSeries:
    rows: tuple[PropBasicRow, ...]
    max_k_tail: float
    diverging: bool


def propbasic_series(spec: ProcessSpec, dse: DrivingSeqEstimate,
                     k_rule: Callable[[int], int] = math.isqrt,
                     m_rule: Callable[[int], int] = math.isqrt,
                     n_list=None, R: int = 1000, seed: int = 0,
                     workers: int = 1) -> PropBasicSeries:
    """Track k_n * C_n(m_n; k_n) and k_n * P(X_1 > v_n) along block sizes.

    When the first series tends to 0, boundedness of the second is the
    necessary condition for a phantom at the driving levels; the report
    flags divergence via the factor-2-per-decade rule.
    """
    if n_list is None:
        n_list = [int(n) for n in dse.n_values]
    n_list = _validate_sizes(n_list)
    rows = []
    for n in n_list:
        k, m = int(k_rule(n)), int(m_rule(n))
        if k < 2:
            k = 2
        if m < 1:
            m = 1
        if k * m > n:
            raise InvalidArgumentError(f"k*m > n at n={n}")
        v = dse.level_for(n)
        diag = estimate_Cn(spec, v, n, m, k, R=R, seed=seed, workers=workers)
        try:
            tail = marginal_sf(spec, v)
        except NotExactlyComputableError:
            tail = 1.0 - diag.p_single
        rows.append(PropBasicRow(n=n, k=k, m=m, level=v,
                                 k_tail=float(k * tail), k_c=float(k * diag.c_hat)))
    series = [r.k_tail for r in rows]
    return PropBasicSeries(rows=tuple(rows), max_k_tail=max(series),
                           diverging=divergence_rule(n_list, series))


def alpha_delta_exponent(beta: float) -> float:
    """Largest usable skeleton-growth exponent beta/(1+beta) for polynomial mixing."""
    if beta <= 0:
        raise InvalidArgumentError("beta must be positive")
    return beta / (1.0 + beta)


# ---------------------------------------------------------------------------
# regenerative decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegenStats:
    cycle_count: int
    waits: np.ndarray      # W_j, cycle lengths
    maxima: np.ndarray     # Y_j, cycle maxima
    mu_hat: float
    mu_se: float
    zero_cycle_diag: dict[int, float]
    head_wait: int | None
    head_max: float | None


def decompose_regenerative(path: SamplePath,
                           diag_windows=(10, 100, 1000),
                           max_diag_windows: int = 20_000) -> RegenStats:
    """Split a regenerative path into cycles at its regeneration marks.

    The zero-cycle diagnostic estimates P(Y_0 > max of the next n cycle
    maxima) by a sliding window over the observed cycles; the delayed
    first cycle is reported but cannot be resampled from a single path,
    so the diagnostic is an approximation, not an assertion.
    """
    marks = path.regeneration_marks
    if marks is None:
        raise NotRegenerativeError("path carries no regeneration marks")
    marks = np.asarray(marks, dtype=np.int64)
    if marks.size < 2:
        raise NotRegenerativeError("path never completes a regeneration cycle")
    values = path.values
    waits = np.diff(marks)
    maxima = np.maximum.reduceat(values, marks)[:-1]
    head_wait = int(marks[0]) if marks[0] > 0 else None
    head_max = float(values[:marks[0]].max()) if marks[0] > 0 else None
    mu = float(waits.mean())
    mu_se = float(waits.std(ddof=1) / math.sqrt(waits.size)) if waits.size > 1 else 0.0
    diag: dict[int, float] = {}
    for w in diag_windows:
        w = int(w)
        if maxima.size <= w + 1:
            continue
        count = min(maxima.size - w, max_diag_windows)
        lead = maxima[:count]
        windows = np.lib.stride_tricks.sliding_window_view(maxima[1:], w)[:count]
        diag[w] = float(np.mean(lead > windows.max(axis=1)))
    return RegenStats(cycle_count=int(waits.size), waits=waits, maxima=maxima,
                      mu_hat=mu, mu_se=mu_se, zero_cycle_diag=diag,
                      head_wait=head_wait, head_max=head_max)


MIN_CYCLES = 500


def rootzen_phantom(rs: RegenStats, smoothing: str = "linear") -> DistFn:
    """Phantom from cycle maxima: G = (empirical law of Y)**(1/mu_hat).

    'linear' interpolates the empirical CDF between distinct observed
    cycle maxima (continuous except for a genuine atom at the cycle
    floor); 'step' keeps the raw step function.
    """
    if rs.cycle_count < MIN_CYCLES:
        raise InsufficientDataError(
            f"need at least {MIN_CYCLES} cycles, got {rs.cycle_count}")
    if smoothing not in ("linear", "step"):
        raise InvalidArgumentError("smoothing must be 'linear' or 'step'")
    uniq, counts = np.unique(rs.maxima, return_counts=True)
    total = rs.cycle_count
    cum = np.cumsum(counts) / total
    tail_knots = 1.0 - cum
    inv_mu = 1.0 / rs.mu_hat

    if smoothing == "linear":
        def ecdf_tail(x):
            return np.interp(np.asarray(x, dtype=float), uniq, tail_knots,
                             left=1.0, right=0.0)

        def ecdf_inv(t):
            return np.interp(np.asarray(t, dtype=float), cum, uniq)
    else:
        def ecdf_tail(x):
            idx = np.searchsorted(uniq, np.asarray(x, dtype=float), side="right")
            return np.where(idx == 0, 1.0, tail_knots[np.maximum(idx - 1, 0)])

        def ecdf_inv(t):
            idx = np.searchsorted(cum, np.asarray(t, dtype=float), side="left")
            return uniq[np.minimum(idx, uniq.size - 1)]

    def log_cdf(x):
        with np.errstate(divide="ignore"):
            return inv_mu * np.log1p(-np.minimum(ecdf_tail(x), 1.0))

    def cdf(x):
        return np.exp(log_cdf(x))

    def sf(x):
        return -np.expm1(log_cdf(x))

    def quantile(p):
        p = np.asarray(p, dtype=float)
        return ecdf_inv(np.exp(rs.mu_hat * np.log(p)))

    return DistFn(name=f"rootzen-phantom[{smoothing}]", cdf=cdf, sf=sf,
                  quantile=quantile, right_end=float(uniq[-1]),
                  left_end=float(uniq[0]),
                  sampler=lambda rng, size: quantile(np.maximum(rng.random(size), 1e-300)))


@dataclass(frozen=True)
class CycleTailBand:
    level: float
    ratio: float  # P(Y > y) / (mu_hat * (1 - H(y)))
    exceedances: int


def cycle_tail_ratio(rs: RegenStats, step: DistFn, q: float = 0.99) -> CycleTailBand:
    """Cycle-maximum tail against mu * step tail at the empirical q-quantile of Y."""
    if not (0.0 < q < 1.0):
        raise InvalidArgumentError("q must lie in (0, 1)")
    s = np.sort(rs.maxima)
    y = _type1_quantile(s, q)
    exc = int(np.count_nonzero(rs.maxima > y))
    p_exc = exc / rs.cycle_count
    denom = rs.mu_hat * float(step.tail(y))
    ratio = math.inf if denom == 0.0 else p_exc / denom
    return CycleTailBand(level=float(y), ratio=float(ratio), exceedances=exc)


# ---------------------------------------------------------------------------
# extremal index from one stationary sequence
# ---------------------------------------------------------------------------

def divergence_rule(n_list: Sequence[int], series: Sequence[float]) -> bool:
    """Factor-2-per-decade divergence: s must grow by >= 2**log10(n'/n) per step."""
    if len(series) < 2:
        return False
    for (n0, s0), (n1, s1) in zip(zip(n_list, series), zip(n_list[1:], series[1:])):
        if s0 <= 0:
            return False
        needed = 2.0 ** math.log10(n1 / n0)
        if s1 / s0 < needed:
            return False
    return True


@dataclass(frozen=True)
class ThetaRow:
    n: int
    level: float
    tail: float
    s: float            # n * P(X_1 > v_n)
    gamma_prime: float  # exp(-s)
    theta: float
    theta_lo: float
    theta_hi: float


@dataclass(frozen=True)
class ThetaEstimate:
    gamma: float
    method: str
    verdict: str  # "zero" | "positive"
    theta_hat: float | None
    se: float | None
    rows: tuple[ThetaRow, ...]
    driving: DrivingSeqEstimate


def estimate_theta_single_sequence(spec: ProcessSpec, gamma: float, n_list,
                                   R: int = 1000, seed: int = 0,
                                   method: str = "auto",
                                   workers: int = 1) -> ThetaEstimate:
    """Extremal index from driving levels of one stationary sequence.

    theta_hat(n) = log(gamma) / log(gamma'_n) with
    gamma'_n = exp(-n P(X_1 > v_hat_n)); the marginal tail is exact when
    the kind has a known stationary marginal, else empirical from an
    auxiliary path.  Verdict 'zero' when n P(X_1 > v_hat_n) diverges per
    the factor-2-per-decade rule.
    """
    n_list = _validate_sizes(n_list)
    dse = estimate_driving_sequence(spec, gamma, n_list, R=R, seed=seed,
                                    method=method, workers=workers)

    emp_sorted = None
    try:
        marginal_sf(spec, dse.v_hat[0])
        def tail_at(x: float) -> float:
            return marginal_sf(spec, x)
    except NotExactlyComputableError:
        aux_len = max(100_000, 20 * n_list[-1])
        aux = generate(spec, int(rng_for(seed, "theta-marginal").integers(2**63)), aux_len)
        emp_sorted = np.sort(aux.values)
        def tail_at(x: float) -> float:
            idx = np.searchsorted(emp_sorted, x, side="right")
            return float((emp_sorted.size - idx) / emp_sorted.size)

    log_gamma = math.log(gamma)
    rows = []
    s_series = []
    for i, n in enumerate(n_list):
        v = float(dse.v_hat[i])
        t = float(tail_at(v))
        s = n * t
        s_series.append(s)
        theta = -log_gamma / s if s > 0 else math.inf
        lo_v, hi_v = float(dse.ci_lo[i]), float(dse.ci_hi[i])
        t_lo, t_hi = float(tail_at(hi_v)), float(tail_at(lo_v))
        th_hi = -log_gamma / (n * t_lo) if t_lo > 0 else math.inf
        th_lo = -log_gamma / (n * t_hi) if t_hi > 0 else math.inf
        rows.append(ThetaRow(n=n, level=v, tail=t, s=s,
                             gamma_prime=math.exp(-s), theta=theta,
                             theta_lo=min(th_lo, th_hi), theta_hi=max(th_lo, th_hi)))
    zero = divergence_rule(n_list, s_series)
    if zero:
        verdict, theta_hat, se = "zero", None, None
    else:
        last = rows[-1]
        verdict = "positive"
        theta_hat = last.theta
        se = (last.theta_hi - last.theta_lo) / (2.0 * 1.959963984540054) \
            if dse.method == "monte-carlo" else 0.0
    return ThetaEstimate(gamma=gamma, method=dse.method, verdict=verdict,
                         theta_hat=theta_hat, se=se, rows=tuple(rows), driving=dse)
