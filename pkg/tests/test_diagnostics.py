import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from memsync import (
    FieldGrid,
    InsufficientDataError,
    NetworkState,
    NeuronFields,
    Trajectory,
    asynchronous_degree_estimate,
    check_bound,
    energy_norm_sq,
    fit_exponential_rate,
    init_random,
    l2_norm,
    l4_norm4,
    pairwise_diff_norms,
    sup_potential_sum,
)
from memsync.diagnostics import DiffRecord
from memsync.solver import StepRecord

fields = hnp.arrays(
    np.float64, (5, 5), elements=st.floats(-100, 100, allow_nan=False)
)


def two_neuron_state(u1, u2, nx=32, ny=32, dx=1.0):
    def neuron(u):
        return NeuronFields(
            FieldGrid.constant(nx, ny, dx, u),
            [FieldGrid.constant(nx, ny, dx, 0.0)],
            FieldGrid.constant(nx, ny, dx, 0.0),
        )

    return NetworkState([neuron(u1), neuron(u2)])


class TestL2Norm:
    def test_constant_field(self):
        assert l2_norm(FieldGrid.constant(32, 32, 1.0, -2.5)) == 32 * 2.5

    def test_zeros(self):
        assert l2_norm(FieldGrid.constant(8, 8, 1.0, 0.0)) == 0.0

    def test_single_cell(self):
        vals = np.zeros((3, 3))
        vals[1, 1] = 3.0
        assert l2_norm(FieldGrid(3, 3, 0.5, vals)) == 1.5

    @given(fields, st.floats(-10, 10, allow_nan=False))
    def test_homogeneity(self, vals, c):
        f = FieldGrid(5, 5, 0.7, vals)
        assert l2_norm(f.like(c * vals)) == pytest.approx(abs(c) * l2_norm(f), rel=1e-12)

    @given(fields, fields)
    def test_triangle_inequality(self, a, b):
        fa, fb = FieldGrid(5, 5, 1.3, a), FieldGrid(5, 5, 1.3, b)
        assert l2_norm(fa.like(a + b)) <= l2_norm(fa) + l2_norm(fb) + 1e-12


class TestL4Norm4:
    def test_constant_one(self):
        assert l4_norm4(FieldGrid.constant(32, 32, 1.0, 1.0)) == 1024.0

    def test_constant_two(self):
        # 16 cells x 2^4 each
        assert l4_norm4(FieldGrid.constant(4, 4, 1.0, 2.0)) == 256.0

    def test_zeros(self):
        assert l4_norm4(FieldGrid.constant(4, 4, 1.0, 0.0)) == 0.0


class TestEnergyNorm:
    def test_zero_state(self):
        st_ = two_neuron_state(0.0, 0.0)
        assert energy_norm_sq(st_) == 0.0

    def test_single_active_component(self):
        st_ = two_neuron_state(1.0, 0.0)
        assert energy_norm_sq(st_) == 1024.0

    def test_additivity_over_neurons(self):
        state = init_random(8, 8, 1.0, m=3, ell=2, amplitude=0.5, seed=8)
        per_neuron = []
        for n in state.neurons:
            parts = [l2_norm(n.u) ** 2, l2_norm(n.rho) ** 2]
            parts += [l2_norm(g) ** 2 for g in n.z]
            per_neuron.append(math.fsum(parts))
        assert energy_norm_sq(state) == pytest.approx(math.fsum(per_neuron), rel=1e-14)


class TestPairwiseDiffs:
    def test_identical_neurons_zero(self):
        state = init_random(8, 8, 1.0, m=2, ell=1, amplitude=0.3, seed=4)
        clone = NetworkState([state.neurons[0].copy(), state.neurons[0].copy()])
        recs = pairwise_diff_norms(clone)
        assert len(recs) == 1
        assert recs[0].total == 0.0

    def test_constant_offset(self):
        recs = pairwise_diff_norms(two_neuron_state(1.0, 0.0))
        r = recs[0]
        assert (r.U_norm, r.Z_norm, r.R_norm, r.total) == (32.0, 0.0, 0.0, 32.0)

    def test_record_count(self):
        state = init_random(8, 8, 1.0, m=5, ell=1, amplitude=0.1, seed=1)
        assert len(pairwise_diff_norms(state)) == 10

    def test_swap_symmetry(self):
        state = init_random(8, 8, 1.0, m=2, ell=2, amplitude=0.2, seed=6)
        swapped = NetworkState([state.neurons[1].copy(), state.neurons[0].copy()])
        a = pairwise_diff_norms(state)[0]
        b = pairwise_diff_norms(swapped)[0]
        assert (a.U_norm, a.Z_norm, a.R_norm, a.total) == (b.U_norm, b.Z_norm, b.R_norm, b.total)

    def test_pythagorean_identity(self):
        state = init_random(16, 16, 1.0, m=4, ell=2, amplitude=0.4, seed=13)
        for r in pairwise_diff_norms(state):
            lhs = r.total**2
            rhs = r.U_norm**2 + r.Z_norm**2 + r.R_norm**2
            assert lhs == pytest.approx(rhs, rel=1e-12)


class TestSupPotentialSum:
    def test_zero_state(self):
        assert sup_potential_sum(two_neuron_state(0.0, 0.0)) == 0.0

    def test_constants(self):
        assert sup_potential_sum(two_neuron_state(0.3, -0.5)) == pytest.approx(0.8, rel=1e-15)

    def test_dominated_by_max(self):
        state = init_random(8, 8, 1.0, m=4, ell=1, amplitude=0.7, seed=3)
        bound = 4 * max(np.abs(n.u.values).max() for n in state.neurons)
        assert sup_potential_sum(state) <= bound


class TestRateFit:
    def test_exact_exponential(self):
        t = np.arange(0, 5.01, 0.5)
        fit = fit_exponential_rate(t, np.exp(-2.0 * t))
        assert fit.rate == pytest.approx(2.0, abs=1e-9)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_planted_rates(self):
        t = np.linspace(0.0, 3.0, 40)
        for rate in (0.1, 1.0, 4.0, 10.0):
            fit = fit_exponential_rate(t, np.exp(-rate * t))
            assert fit.rate == pytest.approx(rate, rel=1e-8)

    def test_constant_series(self):
        t = np.linspace(0, 5, 20)
        fit = fit_exponential_rate(t, np.full(20, 3.3))
        assert fit.rate == 0.0

    def test_noisy_recovery(self):
        rng = np.random.default_rng(99)
        t = np.linspace(0, 4, 200)
        vals = np.exp(-2.0 * t) * (1.0 + 0.01 * rng.standard_normal(200))
        fit = fit_exponential_rate(t, vals)
        assert fit.rate == pytest.approx(2.0, abs=0.05)

    def test_insufficient_data(self):
        with pytest.raises(InsufficientDataError):
            fit_exponential_rate([0.0, 1.0], [1.0, 0.5], burn_in_fraction=0.0)

    def test_zero_truncates_tail(self):
        t = np.linspace(0, 9, 10)
        vals = list(np.exp(-1.0 * t[:6])) + [0.0, 5.0, 5.0, 5.0]
        fit = fit_exponential_rate(t, vals, burn_in_fraction=0.0)
        assert fit.rate == pytest.approx(1.0, rel=1e-10)

    def test_burn_in_drops_leading_transient(self):
        t = np.linspace(0, 10, 100)
        vals = np.exp(-1.0 * t) + 0.0 * t
        vals[:10] = 50.0  # transient plateau
        fit = fit_exponential_rate(t, vals, burn_in_fraction=0.1)
        assert fit.rate == pytest.approx(1.0, rel=1e-8)


def make_traj(diff_totals):
    """Trajectory with the given per-record pairwise totals (single pair)."""
    traj = Trajectory()
    for k, tot in enumerate(diff_totals):
        t = float(k)
        traj.append(
            StepRecord(
                step=k, t=t, u_norms=(0.0, 0.0), z_norms=((0.0,), (0.0,)),
                rho_norms=(0.0, 0.0), energy_sq=0.0, l4_sum=0.0, sup_sum=0.0,
                diffs=(DiffRecord(t, 0, 1, tot, 0.0, 0.0, tot),),
            )
        )
    return traj


class TestAsynchronousDegree:
    def test_identical_data_zero(self):
        assert asynchronous_degree_estimate(make_traj([0.0] * 10), 0.5) == 0.0

    def test_constant_differences(self):
        assert asynchronous_degree_estimate(make_traj([0.7] * 10), 0.3) == 0.7

    def test_tail_fraction_monotone(self):
        traj = make_traj(list(np.exp(-0.5 * np.arange(20.0))))
        small = asynchronous_degree_estimate(traj, 0.1)
        full = asynchronous_degree_estimate(traj, 1.0)
        assert small <= full


class TestCheckBound:
    def test_always_pass(self):
        bc = check_bound([(t, 5.0) for t in range(10)], 10.0, "always")
        assert bc.passed

    def test_eventually_entry_time(self):
        t = np.arange(0, 10.05, 0.1)
        bc = check_bound(list(zip(t, 20.0 * np.exp(-t))), 1.0, "eventually")
        assert bc.passed
        assert bc.entry_time == pytest.approx(3.0, abs=0.1)

    def test_eventually_fail(self):
        bc = check_bound([(float(t), 5.0) for t in range(10)], 3.0, "eventually")
        assert not bc.passed and bc.entry_time is None

    def test_always_fail_on_spike(self):
        series = [(0.0, 1.0), (1.0, 9.0), (2.0, 1.0)]
        assert not check_bound(series, 5.0, "always").passed
        # but the spike is forgiven in eventually mode
        assert check_bound(series, 5.0, "eventually").passed
