import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phylodrift import InvariantViolationError
from phylodrift.renewal import (
    MomentTable,
    critical_hitting_cdf,
    first_passage_means,
    first_passage_variances,
    harmonic_deviation,
    sample_coupled_passage_births,
    sample_critical_hitting_time,
    sample_passage_births,
    solve_discounted_recursion,
)
from phylodrift.seeding import make_generator


class FakeRng:
    """Scripted uniform stream for deterministic walk tests."""

    def __init__(self, values):
        self.values = list(values)

    def random(self):
        return self.values.pop(0)


class TestSolver:
    def test_pure_geometric(self):
        forcing = np.zeros(11)
        forcing[1] = 1.0
        out = solve_discounted_recursion(2.0, forcing)
        assert np.array_equal(out[1:], 2.0 ** -np.arange(1, 11))

    def test_harmonic_forcing_matches_means_table(self):
        forcing = np.zeros(51)
        forcing[1:] = 1.0 / np.arange(1, 51)
        assert np.array_equal(
            solve_discounted_recursion(2.0, forcing), first_passage_means(2.0, 50)
        )

    def test_empty_forcing(self):
        assert solve_discounted_recursion(2.0, np.zeros(1)).tolist() == [0.0]

    def test_zero_lam_rejected(self):
        with pytest.raises(ValueError):
            solve_discounted_recursion(0.0, np.ones(4))

    @settings(max_examples=60, deadline=None)
    @given(
        lam=st.floats(min_value=0.2, max_value=8.0),
        forcing=st.lists(
            st.floats(min_value=1e-3, max_value=1e3), min_size=1, max_size=200
        ),
    )
    def test_recursion_matches_bruteforce_closed_form(self, lam, forcing):
        arr = np.concatenate(([0.0], np.asarray(forcing)))
        out = solve_discounted_recursion(lam, arr)
        n_max = len(forcing)
        for n in (1, n_max // 2 + 1, n_max):
            closed = sum(lam ** -j * arr[n + 1 - j] for j in range(n, 0, -1))
            assert math.isclose(out[n], closed, rel_tol=1e-12)


class TestMeans:
    def test_level_one_is_exact(self):
        assert first_passage_means(2.0, 1)[1] == 0.5

    def test_first_levels_lambda_two(self):
        mu = first_passage_means(2.0, 3)
        assert abs(mu[2] - 0.5) < 1e-12
        assert abs(mu[3] - 5.0 / 12.0) < 1e-12

    def test_subcritical_rejected(self):
        for lam in (0.5, 1.0):
            with pytest.raises(ValueError, match="exceed 1"):
                first_passage_means(lam, 5)

    @pytest.mark.parametrize("lam", [1.5, 2.0, 4.0])
    def test_asymptotic_rate(self, lam):
        n = 10_000
        mu = first_passage_means(lam, n)
        assert abs(n * mu[n] * (lam - 1.0) - 1.0) < 0.01
        # eventually decreasing
        tail = mu[n // 2 :]
        assert np.all(np.diff(tail) < 0)


class TestVariances:
    @pytest.mark.parametrize("lam", [1.5, 2.0, 4.0])
    def test_level_one_is_exponential_variance(self, lam):
        _, v = first_passage_variances(lam, 1)
        assert abs(v[1] - 1.0 / lam**2) < 1e-15

    def test_quarter_ratio_at_doubled_level(self):
        _, v = first_passage_variances(2.0, 2000)
        assert abs(v[2000] / v[1000] - 0.25) < 0.05 * 0.25

    def test_positive(self):
        _, v = first_passage_variances(1.2, 500)
        assert np.all(v[1:] > 0)


class TestHarmonicDeviation:
    def test_level_one_value(self):
        d = harmonic_deviation(2.0, 1)
        assert math.isclose(d[1], -0.5, rel_tol=1e-15)
        for lam in (1.5, 4.0):
            assert math.isclose(
                harmonic_deviation(lam, 1)[1], 1 / lam - 1 / (lam - 1), rel_tol=1e-12
            )

    @pytest.mark.parametrize("lam", [1.5, 2.0, 4.0])
    def test_vanishes_at_depth(self, lam):
        d = harmonic_deviation(lam, 10_000)
        assert abs(d[10_000]) < 1e-2

    def test_halving_from_some_level(self):
        d = np.abs(harmonic_deviation(2.0, 8192))
        start = 64
        levels = [start * 2**k for k in range(int(math.log2(8192 // start)) + 1)]
        for a, b in zip(levels, levels[1:]):
            assert d[b] <= d[a], f"|deviation| rose from level {a} to {b}"


class TestMomentTable:
    def test_csv_layout(self, tmp_path):
        table = MomentTable.compute(2.0, 4)
        path = tmp_path / "moments.csv"
        table.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "n,mu,v,b,ET,deviation"
        assert len(lines) == 5
        first = lines[1].split(",")
        assert first[0] == "1"
        assert float(first[1]) == 0.5
        assert float(first[2]) == 0.25

    def test_invariants_validated(self):
        table = MomentTable.compute(1.5, 64)
        assert table.mean[1] == 1 / 1.5
        assert np.all(np.diff(table.cumulative[1:]) > 0)


class TestCriticalCdf:
    def test_anchor_values(self):
        assert critical_hitting_cdf(0.0) == 0.0
        assert critical_hitting_cdf(1.0) == 0.5

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            critical_hitting_cdf(-0.1)

    def test_monotone_to_one(self):
        ts = np.linspace(0, 1e6, 1001)
        vals = critical_hitting_cdf(ts)
        assert np.all(np.diff(vals) > 0)
        assert vals[-1] > 0.999

    def test_sampler_probability_integral_transform(self, rng):
        sample = sample_critical_hitting_time(rng, size=100_000)
        u = critical_hitting_cdf(sample)
        # transformed draws must be uniform; KS against the uniform CDF
        u_sorted = np.sort(u)
        n = u_sorted.size
        ks = max(
            np.max(np.arange(1, n + 1) / n - u_sorted),
            np.max(u_sorted - np.arange(0, n) / n),
        )
        assert ks < 0.01


class TestSimulatedHittingLawOracle:
    def test_simulated_drop_times_match_master_equation(self):
        # independent oracle: integrate the absorbing master equation for the
        # exact drop-time CDF from size 2 at lam = 1, then compare the
        # event-driven simulation against it on a fixed grid
        solve_ivp = pytest.importorskip("scipy.integrate").solve_ivp
        from phylodrift.experiments import sample_hitting_times

        cap = 1200

        def rhs(_t, p):
            dp = np.zeros_like(p)
            n = np.arange(2, cap + 1, dtype=float)
            flux = n * p[1:]
            dp[1:] -= 2 * flux
            dp[0] += flux[0]
            dp[2:] += flux[:-1]
            dp[1:-1] += flux[1:]
            return dp

        p0 = np.zeros(cap)
        p0[1] = 1.0
        grid = np.concatenate([np.linspace(0.02, 2, 60), np.linspace(2.2, 40, 60)])
        sol = solve_ivp(
            rhs, (0, 40), p0, t_eval=grid, method="LSODA", rtol=1e-8, atol=1e-12
        )
        exact = sol.y[0]

        sample, capped = sample_hitting_times(
            10_000, make_generator(314), max_events=10**7
        )
        # cap-truncated samples are duration lower bounds; they only matter
        # here if they could fall inside the comparison grid
        assert capped < 20
        assert np.sort(sample)[-max(capped, 1):].min() > grid[-1]
        emp = np.searchsorted(np.sort(sample), grid, side="right") / sample.size
        assert np.max(np.abs(emp - exact)) < 0.02


class TestReflectedWalk:
    def test_level_one_always_one_birth(self, rng):
        for _ in range(25):
            s = sample_passage_births(2.0, 1, rng)
            assert s.births == 1 and s.steps == 1

    def test_first_step_up_gives_single_step(self):
        s = sample_passage_births(2.0, 5, FakeRng([0.0]))
        assert s.steps == 1 and s.births == 1

    def test_barrier_move_consumes_no_draw(self):
        # lam=2: p_up=2/3; 0.9 steps down, the barrier then forces an up move
        s = sample_passage_births(2.0, 2, FakeRng([0.9, 0.1]))
        assert s.steps == 3 and s.births == 2

    def test_requires_supercritical(self, rng):
        with pytest.raises(ValueError):
            sample_passage_births(1.0, 3, rng)
        with pytest.raises(ValueError):
            sample_passage_births(2.0, 0, rng)

    def test_mean_births_approach_free_walk_limit(self, rng):
        lam = 2.0
        n = 20_000
        births = np.array(
            [sample_passage_births(lam, 50, rng).births for _ in range(n)], float
        )
        se = births.std(ddof=1) / math.sqrt(n)
        assert abs(births.mean() - lam / (lam - 1.0)) < 3 * se

    @settings(max_examples=40, deadline=None)
    @given(
        lam=st.floats(min_value=1.1, max_value=4.0),
        level=st.integers(min_value=1, max_value=10),
        seed=st.integers(min_value=0, max_value=2**32),
    )
    def test_coupled_walks_are_ordered(self, lam, level, seed):
        pair = sample_coupled_passage_births(lam, level, make_generator(seed))
        assert pair.reflected.births <= pair.free_births
        assert pair.reflected.steps <= pair.free_steps

    def test_sample_invariants_enforced(self):
        with pytest.raises(InvariantViolationError):
            from phylodrift.renewal import ReflectedWalkSample

            ReflectedWalkSample(level=1, steps=2, births=1)
