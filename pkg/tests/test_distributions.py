"""Catalog laws and the tail/jump analyzers.

Sampler checks use a Dvoretzky-Kiefer-Wolfowitz band at 99.9% confidence
with a fixed seed, so a failure means a real bug, not bad luck.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phantomdf.distributions import (
    DistFn,
    beta_law,
    concentration_exponent,
    delta_condition,
    dkw_epsilon,
    exponential,
    geometric,
    jump_sequence,
    make_distribution,
    mixture_component,
    pareto,
    powered,
    regularity_check,
    shifted,
    strict_tail_equivalence,
    sup_power_distance,
    superheavy,
    symmetric_pareto,
    uniform,
)
from phantomdf.errors import InvalidArgumentError
from phantomdf.grids import LevelGrid
from phantomdf.seeding import rng_for

CONTINUOUS = [
    exponential(1.0),
    exponential(0.25),
    pareto(2.0, 1.0),
    uniform(-1.0, 3.0),
    beta_law(0.5, 0.5),
    symmetric_pareto(2.0, 1.0),
    superheavy(),
    shifted(pareto(2.0, 1.0), -2.0),
]

probs = st.floats(min_value=1e-6, max_value=1.0 - 1e-6)


@pytest.mark.parametrize("dist", CONTINUOUS, ids=lambda d: d.name)
def test_cdf_sf_complement(dist):
    xs = np.asarray(dist.quantile(np.linspace(0.01, 0.99, 23)))
    np.testing.assert_allclose(np.asarray(dist.cdf(xs)) + np.asarray(dist.tail(xs)),
                               1.0, atol=1e-12)


@pytest.mark.parametrize("dist", CONTINUOUS, ids=lambda d: d.name)
def test_quantile_duality(dist):
    p = np.linspace(0.005, 0.995, 67)
    np.testing.assert_allclose(np.asarray(dist.cdf(dist.quantile(p))), p,
                               atol=1e-9, rtol=1e-9)


@pytest.mark.parametrize("dist", CONTINUOUS + [geometric(0.5), mixture_component(2)],
                         ids=lambda d: d.name)
def test_sampler_matches_cdf_dkw(dist):
    n = 4000
    x = np.sort(dist.draw(rng_for(99, "dkw", dist.name), n))
    u = np.unique(x)
    hi = np.searchsorted(x, u, side="right") / n
    lo = np.searchsorted(x, u, side="left") / n
    cdf = np.asarray(dist.cdf(u), dtype=float)
    cdf_left = cdf - np.array([dist.jump_at(v) for v in u])
    gap = max(np.max(np.abs(hi - cdf)), np.max(np.abs(lo - cdf_left)))
    assert gap <= dkw_epsilon(n, 0.999)


def test_dkw_epsilon_value():
    # sqrt(ln(2/alpha) / (2n)) at alpha = 0.05, n = 1000
    assert dkw_epsilon(1000, 0.95) == pytest.approx(math.sqrt(math.log(40.0) / 2000.0))
    with pytest.raises(InvalidArgumentError):
        dkw_epsilon(0)


def test_superheavy_tail_identity():
    """Survival exp(-sqrt(ln x)) inverts to quantile(1 - 1/n) = exp(ln(n)**2)."""
    d = superheavy()
    for n in (10, 1000, 10**6):
        v = float(d.quantile(1.0 - 1.0 / n))
        assert v == pytest.approx(math.exp(math.log(n) ** 2), rel=1e-8)
        assert n * float(d.tail(v)) == pytest.approx(1.0, rel=1e-7)
    assert float(d.cdf(1.0)) == 0.0
    assert d.mean == math.inf


def test_geometric_atoms():
    d = geometric(0.25)
    assert float(d.cdf(3.0)) == pytest.approx(1.0 - 0.75 ** 3)
    assert float(d.cdf(3.5)) == pytest.approx(1.0 - 0.75 ** 3)
    assert d.jump_at(2.0) == pytest.approx(0.25 * 0.75)
    assert d.jump_at(2.5) == 0.0


def test_mixture_component_tail_identity():
    # tail after the n-th level is exactly 1/n, first atom sits at k*k
    d = mixture_component(3)
    assert float(d.tail(9.0)) == pytest.approx(1.0 / 9.0)
    assert float(d.tail(8.9)) == 1.0
    assert float(d.tail(100.0)) == pytest.approx(1.0 / 100.0)


def test_shifted_and_powered():
    base = exponential(1.0)
    sh = shifted(base, 2.5)
    assert float(sh.quantile(0.3)) == pytest.approx(float(base.quantile(0.3)) + 2.5)
    assert float(sh.cdf(3.0)) == pytest.approx(float(base.cdf(0.5)))

    pw = powered(base, 0.5)
    x = 1.7
    assert float(pw.cdf(x)) == pytest.approx(float(base.cdf(x)) ** 0.5)
    p = 0.42
    assert float(pw.cdf(pw.quantile(p))) == pytest.approx(p)


def test_make_distribution_catalog():
    d = make_distribution("pareto", 2.0, 1.0)
    assert d.name == pareto(2.0, 1.0).name
    with pytest.raises(InvalidArgumentError):
        make_distribution("cauchy")


# ---------------------------------------------------------------------------
# analyzers
# ---------------------------------------------------------------------------


def test_regularity_continuous_laws_pass():
    for d in (exponential(1.0), pareto(2.0, 1.0), uniform(0.0, 1.0)):
        rep = regularity_check(d)
        assert rep.is_regular
        np.testing.assert_allclose(rep.ratio_track, 1.0)


def test_regularity_geometric_fails():
    """Left-limit tail ratio is the constant 1/(1-p), never near 1."""
    rep = regularity_check(geometric(0.5))
    assert not rep.is_regular
    np.testing.assert_allclose(rep.ratio_track, 2.0)


def test_regularity_mixture_component_passes():
    # ratio at the n-th atom is 1 + 1/(n-1) -> 1
    rep = regularity_check(mixture_component(1))
    assert rep.is_regular


def test_tail_equivalence_verdicts():
    e1, e2 = exponential(1.0), exponential(2.0)
    assert strict_tail_equivalence(e1, e1).verdict == "equivalent"
    # (1-H)/(1-G) = exp(-2x)/exp(-x) = exp(-x) -> 0
    assert strict_tail_equivalence(e1, e2).verdict == "ratio->0"
    assert strict_tail_equivalence(e2, e1).verdict == "ratio->inf"
    assert strict_tail_equivalence(uniform(0, 1), e1).verdict == "mismatched-right-ends"


def test_tail_equivalence_constant_ratio_is_divergent():
    # ratio -> 1/2: neither 0, 1 nor infinity
    half = DistFn(name="half-tail", cdf=lambda x: 1.0 - 0.5 * np.exp(-np.asarray(x)),
                  sf=lambda x: 0.5 * np.exp(-np.asarray(x)),
                  quantile=lambda p: -np.log(2.0 * (1.0 - np.asarray(p))),
                  right_end=math.inf, left_end=-math.log(2.0))
    assert strict_tail_equivalence(exponential(1.0), half).verdict == "divergent"


def test_sup_power_distance_self_is_zero():
    F = exponential(1.0)
    grid = LevelGrid.power_scale(F, n=64)
    assert sup_power_distance(F, F, 64, grid) == 0.0


def test_sup_power_distance_squared_law():
    """For H = F**2, sup |F**n - H**n| = max_a |a - a**2| = 1/4."""
    F = exponential(1.0)
    H = powered(F, 2.0)
    for n in (1, 10, 200):
        grid = LevelGrid.power_scale(F, n=n, size=4096)
        assert sup_power_distance(F, H, n, grid) == pytest.approx(0.25, abs=2e-3)


def test_sup_power_distance_validation():
    grid = LevelGrid.from_values([])
    with pytest.raises(InvalidArgumentError):
        sup_power_distance(exponential(1.0), exponential(1.0), 10, grid)


def test_delta_condition_continuous_trivial():
    rep = delta_condition(exponential(1.0), 0.0)
    assert rep.holds and rep.sup_value == 0.0


def test_delta_condition_geometric():
    # mass/tail = p/(1-p) is constant: the xi = 0 limit condition fails
    rep0 = delta_condition(geometric(0.5), 0.0)
    assert not rep0.holds
    np.testing.assert_allclose(rep0.track, 1.0)
    # mass/tail**2 doubles at each atom and blows through any cap
    rep1 = delta_condition(geometric(0.5), 1.0)
    assert not rep1.holds


def test_delta_condition_polynomial_tail():
    # atoms at n with tail 1/n: mass_n/tail_n ~ 1/n -> 0, so xi = 0 holds
    d = jump_sequence(float, lambda n: 1.0 / n)
    rep = delta_condition(d, 0.0)
    assert rep.holds
    with pytest.raises(InvalidArgumentError):
        delta_condition(d, -0.5)


def test_concentration_uniform_lipschitz():
    rep = concentration_exponent(uniform(0.0, 1.0), 1.0)
    assert rep.satisfied
    assert rep.B_hat == pytest.approx(1.0, abs=1e-9)


def test_concentration_jump_law_fails_every_b():
    for b in (0.3, 1.0):
        assert not concentration_exponent(geometric(0.5), b).satisfied


def test_concentration_holder_half():
    # beta(1/2, 1/2) has cdf increments ~ (2/pi) sqrt(u) near 0: b = 1/2 works
    rep = concentration_exponent(beta_law(0.5, 0.5), 0.5)
    assert rep.satisfied
    assert rep.B_hat < 2.0


@settings(max_examples=25)
@given(p=probs)
def test_pareto_quantile_formula(p):
    # tail (1 + x)**-2 on [0, inf); quantile is (1-p)**-1/2 - 1
    d = pareto(2.0, 1.0)
    assert float(d.quantile(p)) == pytest.approx((1.0 - p) ** -0.5 - 1.0, rel=1e-9, abs=1e-12)
