"""Monte Carlo estimators: driving levels, factorization checks, cycles.

Monte Carlo assertions run at fixed seeds with wide z-score margins
(4 SE unless noted), so they are regression tests, not flaky coin flips.
"""

import math

import numpy as np
import pytest

from phantomdf.distributions import exponential, pareto, shifted, symmetric_pareto, uniform
from phantomdf.errors import (
    InsufficientDataError,
    InvalidArgumentError,
    NotRegenerativeError,
)
from phantomdf.estimate import (
    alpha_delta_exponent,
    block_maxima_table,
    check_BT,
    cycle_tail_ratio,
    decompose_regenerative,
    divergence_rule,
    driving_from_maxima,
    estimate_Cn,
    estimate_driving_sequence,
    estimate_max_cdf,
    estimate_theta_single_sequence,
    maxlaw_from_maxima,
    propbasic_series,
    rootzen_phantom,
)
from phantomdf.processes import (
    IIDSpec,
    LindleySpec,
    MetropolisSpec,
    MixtureSpec,
    MovingMaxSpec,
    SamplePath,
    exact_max_cdf,
    generate,
)
from phantomdf.seeding import rng_for

GAMMA = math.exp(-1.0)
IID_EXP = IIDSpec(exponential(1.0))
MOVMAX2 = MovingMaxSpec(window=2, base=uniform(0.0, 1.0))
LINDLEY = LindleySpec(step=shifted(pareto(2.0, 1.0), -2.0), burn_in=300)


class TestValidation:
    def test_replica_floor(self):
        with pytest.raises(InvalidArgumentError):
            estimate_driving_sequence(IID_EXP, GAMMA, [100], R=100,
                                      method="monte-carlo")
        with pytest.raises(InvalidArgumentError):
            estimate_max_cdf(MOVMAX2, [100], R=199)
        with pytest.raises(InvalidArgumentError):
            check_BT(MOVMAX2, _exact_dse([100]), R=50, method="monte-carlo")

    def test_block_sizes_strictly_increasing(self):
        for bad in ([100, 100], [1000, 100], [0, 10]):
            with pytest.raises(InvalidArgumentError):
                estimate_driving_sequence(IID_EXP, GAMMA, bad, method="exact")

    def test_cn_geometry(self):
        with pytest.raises(InvalidArgumentError):
            estimate_Cn(IID_EXP, 1.0, n=50, m=10, k=6, R=300)  # k*m > n
        with pytest.raises(InvalidArgumentError):
            estimate_Cn(IID_EXP, 1.0, n=50, m=5, k=1, R=300)


def _exact_dse(n_list):
    return estimate_driving_sequence(MOVMAX2, GAMMA, n_list, method="exact")


class TestDrivingSequence:
    def test_exact_iid_matches_closed_form(self):
        F = exponential(1.0)
        dse = estimate_driving_sequence(IID_EXP, GAMMA, [10, 100, 1000], method="exact")
        want = F.quantile(GAMMA ** (1.0 / np.array([10.0, 100.0, 1000.0])))
        np.testing.assert_allclose(dse.v_hat, want, rtol=1e-10)
        assert dse.method == "exact"

    def test_monte_carlo_brackets_exact(self):
        R = 2000
        mc = estimate_driving_sequence(MOVMAX2, GAMMA, [20, 80, 320], R=R,
                                       seed=314, method="monte-carlo")
        exact = estimate_driving_sequence(MOVMAX2, GAMMA, [20, 80, 320], method="exact")
        assert np.all(np.diff(mc.v_hat) >= 0)
        for n in (20, 80, 320):
            lo, hi = mc.ci_for(n)
            assert lo <= mc.level_for(n) <= hi
            assert lo <= exact.level_for(n) <= hi

    def test_type1_quantile_on_table(self):
        """v_hat is the ceil(gamma R)-th order statistic of the block maxima."""
        R = 500
        table = block_maxima_table(MOVMAX2, [50], R, seed=7, tag="t1")
        dse = driving_from_maxima(GAMMA, table, R)
        s = np.sort(table[50])
        assert dse.level_for(50) == s[math.ceil(GAMMA * R) - 1]
        # coverage on the sample itself cannot fall below gamma
        assert np.mean(table[50] <= dse.level_for(50)) >= GAMMA

    def test_to_driving_sequence_knots(self):
        dse = _exact_dse([10, 100])
        d = dse.to_driving_sequence()
        assert d.knot(1) == (dse.level_for(10), 10)
        assert d.knot(2) == (dse.level_for(100), 100)


class TestBlockMaximaTable:
    def test_worker_chunking_invariance(self):
        a = block_maxima_table(LINDLEY, [50, 200], 240, seed=9, tag="w")
        b = block_maxima_table(LINDLEY, [50, 200], 240, seed=9, tag="w", workers=3)
        for n in (50, 200):
            np.testing.assert_array_equal(a[n], b[n])

    def test_tag_separates_streams(self):
        a = block_maxima_table(IID_EXP, [50], 300, seed=9, tag="x")
        b = block_maxima_table(IID_EXP, [50], 300, seed=9, tag="y")
        assert not np.array_equal(a[50], b[50])

    def test_markov_and_transform_maxima_nondecreasing_in_n(self):
        for spec in (MOVMAX2, LINDLEY):
            t = block_maxima_table(spec, [25, 100], 210, seed=4, tag="mono")
            assert np.all(t[100] >= t[25] - 1e-12)


class TestMaxLaw:
    def test_monte_carlo_within_4se_of_exact(self):
        R = 1000
        est = estimate_max_cdf(MOVMAX2, [20, 80], R=R, seed=11)
        for row in est.rows:
            exact = np.array([exact_max_cdf(MOVMAX2, row.n, float(x))
                              for x in row.levels])
            se = np.maximum(row.se, 1.0 / R)
            assert np.max(np.abs(row.p_hat - exact) / se) <= 4.0

    def test_level_cap_clips_grid(self):
        R = 400
        table = block_maxima_table(MOVMAX2, [50], R, seed=13, tag="cap")
        cap = float(np.median(table[50]))
        est = maxlaw_from_maxima(table, R, level_cap=cap)
        assert est.row(50).levels.max() <= cap
        assert est.row(50).levels.size >= 10


class TestBT:
    def test_iid_exact_factorizes(self):
        dse = estimate_driving_sequence(IID_EXP, GAMMA, [64, 256], method="exact")
        rep = check_BT(IID_EXP, dse, T=2.0, method="exact")
        assert rep.max_b() <= 1e-15  # roundoff of F**(p+q) - F**p F**q
        assert all(p.se == 0.0 for row in rep.rows for p in row.pairs)

    def test_moving_max_exact_value(self):
        """b(p, q) = F**(p+q+1) (1 - F) for a window-2 moving maximum."""
        dse = _exact_dse([64])
        rep = check_BT(MOVMAX2, dse, T=2.0, method="exact")
        v = dse.level_for(64)
        f = 0.0 if v >= 1.0 else v  # uniform base cdf
        for pair in rep.rows[0].pairs:
            want = f ** (pair.p + pair.q + 1) * (1.0 - f)
            assert pair.value == pytest.approx(want, rel=1e-12)

    def test_iid_monte_carlo_within_4se(self):
        dse = estimate_driving_sequence(IID_EXP, GAMMA, [50, 200], R=800,
                                        seed=21, method="monte-carlo")
        rep = check_BT(IID_EXP, dse, T=2.0, R=800, seed=22, method="monte-carlo")
        for row in rep.rows:
            for pair in row.pairs:
                assert abs(pair.value) <= 4.0 * max(pair.se, 1e-4)

    def test_pair_budget_enforced(self):
        with pytest.raises(InvalidArgumentError):
            check_BT(IID_EXP, _exact_dse([100]), T=1.5, method="exact")  # (1,1) pair needs T >= 2

    def test_r_product_decays_for_iid(self):
        rep = check_BT(IID_EXP,
                       estimate_driving_sequence(IID_EXP, GAMMA, [100, 1000], method="exact"),
                       method="exact")
        prods = [row.r_tail_product for row in rep.rows]
        assert prods[1] <= prods[0] * 1.05
        assert not rep.r_adjusted


class TestCn:
    def test_iid_skeleton_factorizes(self):
        v = float(exponential(1.0).quantile(GAMMA ** (1.0 / 60.0)))
        diag = estimate_Cn(IID_EXP, v, n=60, m=3, k=10, R=600, seed=17, gamma=GAMMA)
        assert diag.c_hat < 0.08
        assert diag.sandwich_lower_ok and diag.sandwich_upper_ok
        assert 2 <= diag.worst_j <= 10

    def test_propbasic_bounded_for_iid(self):
        dse = estimate_driving_sequence(IID_EXP, GAMMA, [100, 400], method="exact")
        series = propbasic_series(IID_EXP, dse, R=400, seed=23)
        assert not series.diverging
        # k_n P(X_1 > v_n) ~ 1/sqrt(n) stays below 1 for the exp marginal
        assert series.max_k_tail < 1.0


def test_alpha_delta_exponent():
    assert alpha_delta_exponent(4.0) == pytest.approx(0.8)
    assert alpha_delta_exponent(1.0) == pytest.approx(0.5)


class TestRegenerative:
    def synthetic(self):
        values = np.array([2.0, 0.0, 5.0, 1.0, 0.0, 3.0, 0.0, 9.0, 0.0, 2.0])
        marks = np.array([1, 4, 6, 8])
        return SamplePath(spec=LINDLEY, seed=0, values=values,
                          regeneration_marks=marks)

    def test_cycle_decomposition_by_hand(self):
        rs = decompose_regenerative(self.synthetic(), diag_windows=(1,))
        assert rs.cycle_count == 3
        np.testing.assert_array_equal(rs.waits, [3, 2, 2])
        np.testing.assert_array_equal(rs.maxima, [5.0, 3.0, 9.0])
        assert rs.mu_hat == pytest.approx(7.0 / 3.0)
        assert rs.head_wait == 1 and rs.head_max == 2.0
        # windows of one: 5 beats 3, 3 loses to 9
        assert rs.zero_cycle_diag == {1: 0.5}

    def test_not_regenerative(self):
        path = generate(IID_EXP, length=50, seed=1)
        with pytest.raises(NotRegenerativeError):
            decompose_regenerative(path)
        one_mark = SamplePath(spec=LINDLEY, seed=0,
                              values=np.zeros(5), regeneration_marks=np.array([0]))
        with pytest.raises(NotRegenerativeError):
            decompose_regenerative(one_mark)

    def test_cycle_floor_needed(self):
        path = generate(LINDLEY, length=400, seed=2)
        rs = decompose_regenerative(path)
        with pytest.raises(InsufficientDataError):
            rootzen_phantom(rs)

    def unit_cycles(self, n=4000):
        # every index regenerates: mu = 1 and the phantom is the marginal itself
        values = rng_for(31, "unit-cycles").random(n)
        return decompose_regenerative(
            SamplePath(spec=LINDLEY, seed=31, values=values,
                       regeneration_marks=np.arange(n)))

    def test_unit_cycle_phantom_recovers_marginal(self):
        rs = self.unit_cycles()
        assert rs.mu_hat == 1.0
        G = rootzen_phantom(rs)
        for p in (0.2, 0.5, 0.9):
            assert float(G.quantile(p)) == pytest.approx(p, abs=0.03)
        with pytest.raises(InvalidArgumentError):
            rootzen_phantom(rs, smoothing="cubic")

    def test_cycle_tail_ratio_unit_cycles(self):
        band = cycle_tail_ratio(self.unit_cycles(), uniform(0.0, 1.0), q=0.9)
        assert 0.7 < band.ratio < 1.3
        assert band.exceedances > 200


class TestDivergenceRule:
    def test_factor_two_per_decade(self):
        assert divergence_rule([100, 1000], [1.0, 2.0])
        assert not divergence_rule([100, 1000], [1.0, 1.9])

    def test_prorated_partial_decade(self):
        # half decade needs sqrt(2) = 1.4142...
        assert divergence_rule([100, 316], [1.0, 1.42])
        assert not divergence_rule([100, 316], [1.0, 1.41])

    def test_edge_cases(self):
        assert not divergence_rule([100], [1.0])
        assert not divergence_rule([100, 1000], [0.0, 5.0])


class TestTheta:
    def test_moving_max_half(self):
        est = estimate_theta_single_sequence(MOVMAX2, GAMMA, [10_000], method="exact")
        assert est.verdict == "positive"
        assert est.theta_hat == pytest.approx(0.5, abs=0.01)

    def test_iid_is_one(self):
        est = estimate_theta_single_sequence(IID_EXP, GAMMA, [1000], method="exact")
        assert est.verdict == "positive"
        assert est.theta_hat == pytest.approx(1.0, abs=0.01)

    def test_mixture_verdict_zero(self):
        est = estimate_theta_single_sequence(MixtureSpec(), GAMMA, [100, 10_000],
                                             method="exact")
        assert est.verdict == "zero"
        assert est.theta_hat is None

    def test_monte_carlo_tracks_exact(self):
        mc = estimate_theta_single_sequence(MOVMAX2, GAMMA, [2000], R=2000,
                                            seed=29, method="monte-carlo")
        row = mc.rows[0]
        assert row.theta_lo <= 0.5 <= row.theta_hi
