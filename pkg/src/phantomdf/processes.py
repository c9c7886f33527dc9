"""Stationary process specifications and samplers.

Five kinds are supported: i.i.d. sequences, Lindley recursions (waiting
times of a single-server queue), Metropolis random walks, the frozen
exchangeable mixture (a non-ergodic construction whose component is
drawn once per path), and moving maxima over a sliding window.

Where the max law has a closed form (:func:`exact_max_cdf`), estimators
prefer it; Lindley and Metropolis paths are simulated.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .distributions import DistFn, mixture_component
from .errors import (
    InsufficientDataError,
    InvalidArgumentError,
    InvalidSpecError,
    NotExactlyComputableError,
)
from .grids import HUGE_INDEX, LevelSequence, ProbePolicy, classify_ratio_track, converges_to
from .seeding import rng_for

__all__ = [
    "IIDSpec",
    "LindleySpec",
    "MetropolisSpec",
    "MixtureSpec",
    "MovingMaxSpec",
    "SamplePath",
    "generate",
    "exact_max_cdf",
    "marginal_sf",
    "describe_spec",
    "default_burn_in",
    "MetropolisCheck",
    "metropolis_config_check",
    "target_tail_condition",
    "TailShiftReport",
    "lindley_step_tail_vs_stationary",
]

DEFAULT_BURN_IN = 10_000


@dataclass(frozen=True)
class IIDSpec:
    marginal: DistFn


@dataclass(frozen=True)
class LindleySpec:
    """X_{j+1} = max(X_j + Z_j, 0) with i.i.d. steps Z; needs E[Z] < 0."""
    step: DistFn
    burn_in: int | None = None

    def __post_init__(self) -> None:
        if self.step.mean is None:
            raise InvalidSpecError("step law needs a declared mean to check stability")
        if not self.step.mean < 0:
            raise InvalidSpecError(
                f"Lindley recursion is unstable: step mean {self.step.mean} >= 0")


@dataclass(frozen=True)
class MetropolisSpec:
    """Random-walk Metropolis chain with a symmetric proposal.

    The invariant marginal is ``target`` itself, which is why the target
    is carried as a DistFn (density included) rather than a bare density.
    """
    target: DistFn
    proposal: DistFn
    burn_in: int | None = None
    init: float | None = None

    def __post_init__(self) -> None:
        if self.target.pdf is None or self.proposal.pdf is None:
            raise InvalidSpecError("target and proposal need densities")
        z = np.linspace(0.0, 0.999, 101)
        zz = self.proposal.quantile(0.5 + 0.499 * z[1:])
        asym = np.max(np.abs(np.asarray(self.proposal.pdf(zz))
                             - np.asarray(self.proposal.pdf(-zz))))
        if asym > 1e-9:
            raise InvalidSpecError("proposal density must be symmetric about 0")
        probe = np.linspace(-100.0, 100.0, 4001)
        if not np.any(np.asarray(self.target.pdf(probe)) > 0):
            raise InvalidSpecError("target density vanishes on the probe grid")


@dataclass(frozen=True)
class MixtureSpec:
    """Exchangeable mixture: component K with P(K=k) = 1/(k(k+1)), frozen per path."""
    vseq: LevelSequence = field(default_factory=lambda: LevelSequence(rule=float))


@dataclass(frozen=True)
class MovingMaxSpec:
    """X_j = max of a window of m i.i.d. base draws; marginal is base**m."""
    window: int
    base: DistFn

    def __post_init__(self) -> None:
        if int(self.window) < 1:
            raise InvalidSpecError("window must be >= 1")


ProcessSpec = IIDSpec | LindleySpec | MetropolisSpec | MixtureSpec | MovingMaxSpec


@dataclass(frozen=True)
class SamplePath:
    spec: ProcessSpec
    seed: int
    values: np.ndarray
    burn_in: int = 0
    regeneration_marks: np.ndarray | None = None
    mixture_component: int | None = None


def describe_spec(spec: ProcessSpec) -> str:
    if isinstance(spec, IIDSpec):
        return f"iid[{spec.marginal.name}]"
    if isinstance(spec, LindleySpec):
        return f"lindley[step={spec.step.name},burn={spec.burn_in}]"
    if isinstance(spec, MetropolisSpec):
        return (f"metropolis[target={spec.target.name},"
                f"proposal={spec.proposal.name},burn={spec.burn_in}]")
    if isinstance(spec, MixtureSpec):
        return "exchangeable-mixture"
    if isinstance(spec, MovingMaxSpec):
        return f"moving-max[m={spec.window},base={spec.base.name}]"
    raise InvalidArgumentError(f"unknown spec {type(spec).__name__}")


def spec_digest(spec: ProcessSpec) -> str:
    return hashlib.sha256(describe_spec(spec).encode()).hexdigest()[:16]


def default_burn_in(spec: ProcessSpec) -> int:
    if isinstance(spec, LindleySpec):
        if spec.burn_in is not None:
            return int(spec.burn_in)
        return max(DEFAULT_BURN_IN, int(math.ceil(20.0 / abs(spec.step.mean))))
    if isinstance(spec, MetropolisSpec):
        return DEFAULT_BURN_IN if spec.burn_in is None else int(spec.burn_in)
    return 0


# ---------------------------------------------------------------------------
# path generation
# ---------------------------------------------------------------------------

def _lindley_path(spec: LindleySpec, rng: np.random.Generator,
                  length: int, burn: int) -> tuple[np.ndarray, np.ndarray]:
    z = spec.step.draw(rng, burn + length)
    c = np.concatenate([[0.0], np.cumsum(z)])
    x = c[1:] - np.minimum.accumulate(c)[1:]
    values = x[burn:]
    marks = np.nonzero(values == 0.0)[0]
    return values, marks


def metropolis_accept(fx: np.ndarray, fy: np.ndarray, u: np.ndarray) -> np.ndarray:
    # u <= min(fy/fx, 1), with automatic acceptance from states of zero density
    return u * fx <= fy


def _metropolis_paths(spec: MetropolisSpec, rngs: list[np.random.Generator],
                      steps: int) -> np.ndarray:
    """Lockstep evolution of one chain per generator; returns (len(rngs), steps)."""
    m = len(rngs)
    z = np.empty((m, steps))
    u = np.empty((m, steps))
    for i, rng in enumerate(rngs):
        z[i] = spec.proposal.draw(rng, steps)
        u[i] = rng.random(steps)
    x0 = spec.init if spec.init is not None else float(spec.target.quantile(0.5))
    x = np.full(m, x0, dtype=float)
    fx = np.asarray(spec.target.pdf(x), dtype=float)
    out = np.empty((m, steps))
    for t in range(steps):
        y = x + z[:, t]
        fy = np.asarray(spec.target.pdf(y), dtype=float)
        acc = metropolis_accept(fx, fy, u[:, t])
        x = np.where(acc, y, x)
        fx = np.where(acc, fy, fx)
        out[:, t] = x
    return out


def _mixture_draw_component(rng: np.random.Generator) -> int:
    # P(K > k) = 1/(k+1) <=> K = ceil(u / (1 - u))
    u = rng.random()
    k = int(math.ceil(u / max(1.0 - u, 1e-300)))
    return max(1, min(k, HUGE_INDEX))


def generate(spec: ProcessSpec, seed: int, length: int) -> SamplePath:
    """Simulate one path of the given length (after any burn-in).

    Identical (spec, seed, length) triples produce identical values.
    """
    if length < 1:
        raise InvalidArgumentError("length must be >= 1")
    rng = rng_for(seed, "path", describe_spec(spec))
    if isinstance(spec, IIDSpec):
        return SamplePath(spec, seed, spec.marginal.draw(rng, length))
    if isinstance(spec, LindleySpec):
        burn = default_burn_in(spec)
        values, marks = _lindley_path(spec, rng, length, burn)
        return SamplePath(spec, seed, values, burn_in=burn, regeneration_marks=marks)
    if isinstance(spec, MetropolisSpec):
        burn = default_burn_in(spec)
        path = _metropolis_paths(spec, [rng], burn + length)[0]
        return SamplePath(spec, seed, path[burn:], burn_in=burn)
    if isinstance(spec, MixtureSpec):
        k = _mixture_draw_component(rng)
        comp = mixture_component(k, spec.vseq)
        return SamplePath(spec, seed, comp.draw(rng, length), mixture_component=k)
    if isinstance(spec, MovingMaxSpec):
        m = int(spec.window)
        raw = spec.base.draw(rng, length + m - 1)
        win = np.lib.stride_tricks.sliding_window_view(raw, m)
        return SamplePath(spec, seed, win.max(axis=1))
    raise InvalidArgumentError(f"unknown spec {type(spec).__name__}")


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def _mixture_weight_leq(j: int) -> float:
    # sum of 1/(k(k+1)) over components k with k*k <= j
    return 1.0 - 1.0 / (math.isqrt(j) + 1)


def exact_max_cdf(spec: ProcessSpec, n: int, x: float) -> float:
    """P(max of n consecutive values <= x), exact where a closed form exists."""
    if n < 1:
        raise InvalidArgumentError("block size must be >= 1")
    if isinstance(spec, IIDSpec):
        t = float(spec.marginal.tail(x))
        return math.exp(n * math.log1p(-min(t, 1.0))) if t < 1.0 else 0.0
    if isinstance(spec, MovingMaxSpec):
        t = float(spec.base.tail(x))
        e = n + spec.window - 1
        return math.exp(e * math.log1p(-min(t, 1.0))) if t < 1.0 else 0.0
    if isinstance(spec, MixtureSpec):
        j = spec.vseq.count_leq(x)
        if j < 1:
            return 0.0
        if j >= HUGE_INDEX:
            return 1.0
        return math.exp(n * math.log1p(-1.0 / j)) * _mixture_weight_leq(j)
    raise NotExactlyComputableError(
        f"no closed-form max law for {describe_spec(spec)}")


def marginal_sf(spec: ProcessSpec, x: float) -> float:
    """Exact stationary marginal tail P(X_1 > x), where known."""
    if isinstance(spec, IIDSpec):
        return float(spec.marginal.tail(x))
    if isinstance(spec, MetropolisSpec):
        return float(spec.target.tail(x))
    if isinstance(spec, MovingMaxSpec):
        t = float(spec.base.tail(x))
        return -math.expm1(spec.window * math.log1p(-min(t, 1.0)))
    if isinstance(spec, MixtureSpec):
        j = spec.vseq.count_leq(x)
        if j < 1:
            return 1.0
        if j >= HUGE_INDEX:
            return 0.0
        k = math.isqrt(j)
        # components with k*k > j contribute their full weight 1/(K+1)
        return 1.0 / (k + 1) + (1.0 / j) * (1.0 - 1.0 / (k + 1))
    raise NotExactlyComputableError(
        f"no closed-form marginal for {describe_spec(spec)}")


def has_exact_max_law(spec: ProcessSpec) -> bool:
    return isinstance(spec, (IIDSpec, MovingMaxSpec, MixtureSpec))


# ---------------------------------------------------------------------------
# Metropolis diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetropolisCheck:
    ok: bool
    support_connected: bool
    interval_in_support: bool
    monotone_on_interval: bool
    max_constancy_run: float
    proposal_floor: float  # k_h on |x| <= (b-a)/3
    proposal_symmetric: bool
    notes: tuple[str, ...]


def metropolis_config_check(target_pdf: Callable, proposal_pdf: Callable,
                            a: float, b: float,
                            grid_points: int = 1024) -> MetropolisCheck:
    """Grid-based check of the mixing conditions for the Metropolis walk.

    (i) the support of the target is connected (one contiguous positive
    run on a wide probe grid containing [a, b]); (ii) the target is
    monotone on [a, b] with no constancy run longer than (b-a)/4;
    (iii) the proposal is symmetric and bounded away from 0 on
    |x| <= (b-a)/3.
    """
    if not b > a:
        raise InvalidArgumentError("need b > a")
    span = b - a
    notes: list[str] = []

    wide = np.linspace(a - 2.0 * span, b + 2.0 * span, 4 * grid_points)
    fw = np.asarray(target_pdf(wide), dtype=float)
    pos = fw > 0.0
    runs = np.nonzero(np.diff(pos.astype(int)))[0]
    support_connected = bool(pos.any() and runs.size <= 2
                             and (runs.size < 2 or pos[runs[0] + 1]))
    if not support_connected:
        notes.append("target support is empty or disconnected on the probe grid")

    xs = np.linspace(a, b, grid_points)
    fv = np.asarray(target_pdf(xs), dtype=float)
    interval_in_support = bool(np.all(fv > 0.0))
    if not interval_in_support:
        notes.append("target density vanishes somewhere on [a, b]")
    scale = float(np.max(np.abs(fv))) if fv.size else 0.0
    tol = 1e-12 * max(scale, 1.0)
    d = np.diff(fv)
    monotone = bool(np.all(d >= -tol) or np.all(d <= tol))
    if not monotone:
        notes.append("target density is not monotone on [a, b]")
    flat = np.abs(d) <= tol
    max_run = 0
    run = 0
    for is_flat in flat:
        run = run + 1 if is_flat else 0
        max_run = max(max_run, run)
    dx = span / (grid_points - 1)
    max_constancy = max_run * dx
    if max_constancy > span / 4.0:
        monotone_ok = False
        notes.append(f"constancy run of length {max_constancy:.3g} exceeds (b-a)/4")
    else:
        monotone_ok = monotone

    half = span / 3.0
    hz = np.linspace(-half, half, grid_points)
    hv = np.asarray(proposal_pdf(hz), dtype=float)
    floor = float(np.min(hv))
    sym = float(np.max(np.abs(hv - hv[::-1]))) <= 1e-9 * max(float(np.max(np.abs(hv))), 1.0)
    if floor <= 0.0:
        notes.append("proposal density is not bounded away from 0 on |x| <= (b-a)/3")
    if not sym:
        notes.append("proposal density is not symmetric about 0")

    ok = support_connected and interval_in_support and monotone_ok and floor > 0.0 and sym
    return MetropolisCheck(ok=ok, support_connected=support_connected,
                           interval_in_support=interval_in_support,
                           monotone_on_interval=monotone_ok,
                           max_constancy_run=float(max_constancy),
                           proposal_floor=floor, proposal_symmetric=sym,
                           notes=tuple(notes))


@dataclass(frozen=True)
class TailShiftReport:
    m: float
    holds: bool
    levels: np.ndarray
    ratio_track: np.ndarray


def target_tail_condition(F: DistFn, m: float,
                          probe: ProbePolicy = ProbePolicy()) -> TailShiftReport:
    """Does (1 - F(u + m)) / (1 - F(u)) -> 1 toward the right end?

    This is the flat-tail criterion under which a bounded-step chain has
    extremal index zero.  Exponential and bounded-support tails fail it;
    polynomial and slower tails pass.
    """
    if not m > 0:
        raise InvalidArgumentError("shift m must be positive")
    xs = probe.levels(F)
    base = np.asarray(F.tail(xs), dtype=float)
    shifted_tail = np.asarray(F.tail(xs + m), dtype=float)
    keep = base > 0
    track = shifted_tail[keep] / base[keep]
    return TailShiftReport(m=float(m), holds=converges_to(track, 1.0, probe.ratio_tol),
                           levels=xs[keep], ratio_track=track)


# Looser ratio tolerance for comparisons against an empirical tail: at the
# 0.999 quantile of a 1e5-point path the binomial noise alone is ~10%.
EMPIRICAL_RATIO_TOL = 0.2


def lindley_step_tail_vs_stationary(step: DistFn, values,
                                    probe: ProbePolicy = ProbePolicy(),
                                    max_quantile: float = 0.999):
    """Compare the step tail 1-H against the empirical stationary tail.

    For subexponential steps the stationary tail is one order heavier
    (integrated tail), so the expected verdict is 'ratio->0'.  Probe
    levels are the empirical quantiles at 1 - 2**-j, capped at
    ``max_quantile``.
    """
    from .distributions import TailComparison

    values = np.asarray(getattr(values, "values", values), dtype=float)
    if values.size < 100_000:
        raise InsufficientDataError("need at least 1e5 path values")
    vmax = float(values.max())
    if math.isfinite(step.right_end) and vmax > step.right_end:
        return TailComparison(levels=np.array([]), ratio_track=np.array([]),
                              verdict="mismatched-right-ends")
    sorted_vals = np.sort(values)
    qs = 1.0 - 2.0 ** (-np.arange(1.0, probe.depth + 1))
    qs = qs[qs <= max_quantile]
    idx = np.minimum((qs * values.size).astype(int), values.size - 1)
    levels = np.unique(sorted_vals[idx])
    emp_sf = (values.size - np.searchsorted(sorted_vals, levels, side="right")) \
        / values.size
    step_sf = np.asarray(step.tail(levels), dtype=float)
    keep = emp_sf > 0
    track = step_sf[keep] / emp_sf[keep]
    verdict = {"one": "equivalent", "zero": "ratio->0", "inf": "ratio->inf",
               "divergent": "divergent"}[classify_ratio_track(track, EMPIRICAL_RATIO_TOL)]
    return TailComparison(levels=levels[keep], ratio_track=track, verdict=verdict)
