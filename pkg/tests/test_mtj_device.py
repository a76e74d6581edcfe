import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from sttdse.constants import BOLTZMANN
from sttdse.errors import DomainError
from sttdse.mtj_device import (CurrentKnobs, MtjTechParams, ReliabilityTargets, calibrate_tau,
                               critical_current, delta_for_retention, max_read_pulse,
                               read_disturb_prob, retention_failure_prob, retention_time_for_ber,
                               solve_operating_point, thermal_stability, write_error_rate,
                               write_pulse_for_wer)

# high-precision goldens, evaluated with mpmath at 50 digits
IC_GOLDEN = 2.4036439889486161e-05
PRF_60 = 9.9999352859994909e-10
PRF_19_5 = 1.0194803406518205e-08
T_RET_39 = 86593400.467290447
T_RET_12_5 = 2.6833862821625170
DELTA_3YR = 39.088433870468518
DELTA_3S_1E8 = 19.519293027620475
DELTA_3S_1E5 = 12.611532753617505
TAU_39 = 1.0924620062210624
TAU_19_5 = 1.0194803407511196
T_READ = 2.2917581201152247e-09
T_WRITE_R15 = 4.3078839731660887e-08
T_WRITE_R2 = 2.1944884973791232e-08
WER_50NS = 3.4267127967378800e-10


def params(**kw):
    base = dict(alpha=0.05, eta=1.0, m_eff_term=3.0, h_k=0.5, m_s=1e6, volume=1e-24)
    base.update(kw)
    return MtjTechParams(**base)


def rel(a, b):
    return abs(a - b) / abs(b)


class TestThermalStability:
    def test_linear_in_volume(self):
        assert thermal_stability(0.5, 1e6, 2e-24, 300) == pytest.approx(
            2 * thermal_stability(0.5, 1e6, 1e-24, 300), rel=1e-15)

    def test_inverse_in_temperature(self):
        assert thermal_stability(0.5, 1e6, 1e-24, 600) == pytest.approx(
            0.5 * thermal_stability(0.5, 1e6, 1e-24, 300), rel=1e-15)

    def test_sixty(self):
        numerator = 60 * 2 * BOLTZMANN * 300
        assert thermal_stability(numerator, 1.0, 1.0, 300) == pytest.approx(60, rel=1e-14)

    @pytest.mark.parametrize("bad", [0.0, -1.0])
    def test_rejects_non_positive(self, bad):
        with pytest.raises(DomainError):
            thermal_stability(bad, 1e6, 1e-24, 300)


class TestCriticalCurrent:
    def test_golden(self):
        assert critical_current(params(), 40, 300) == pytest.approx(IC_GOLDEN, rel=1e-12)

    def test_linear_in_delta_and_temperature(self):
        p = params()
        base = critical_current(p, 20, 300)
        assert critical_current(p, 40, 300) == pytest.approx(2 * base, rel=1e-15)
        assert critical_current(p, 20, 600) == pytest.approx(2 * base, rel=1e-15)

    def test_rejects_zero_delta(self):
        with pytest.raises(DomainError):
            critical_current(params(), 0, 300)


class TestRetention:
    def test_zero_time(self):
        assert retention_failure_prob(0, 1.0, 30) == 0.0

    def test_goldens(self):
        assert retention_failure_prob(1.142e8, 1e-9, 60) == pytest.approx(PRF_60, rel=1e-12)
        assert retention_failure_prob(3, 1.0, 19.5) == pytest.approx(PRF_19_5, rel=1e-12)

    def test_negative_time_rejected(self):
        with pytest.raises(DomainError):
            retention_failure_prob(-1, 1.0, 10)

    def test_time_for_ber_goldens(self):
        assert retention_time_for_ber(1e-9, 1.0, 39) == pytest.approx(T_RET_39, rel=1e-12)
        assert retention_time_for_ber(1e-5, 1.0, 12.5) == pytest.approx(T_RET_12_5, rel=1e-12)

    def test_three_years(self):
        years = retention_time_for_ber(1e-9, 1.0, 39) / (365.25 * 86400)
        assert 2.5 < years < 3.0

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_probability_domain(self, p):
        with pytest.raises(DomainError):
            retention_time_for_ber(p, 1.0, 10)

    def test_small_p_limit(self):
        assert retention_time_for_ber(1e-300, 1.0, 10) < 1e-290

    @pytest.mark.parametrize("t, p, golden", [
        (9.46e7, 1e-9, DELTA_3YR), (3, 1e-8, DELTA_3S_1E8), (3, 1e-5, DELTA_3S_1E5)])
    def test_delta_goldens(self, t, p, golden):
        assert delta_for_retention(t, p, 1.0) == pytest.approx(golden, rel=1e-13)

    def test_calibrate_tau_goldens(self):
        assert calibrate_tau(9.46e7, 1e-9, 39) == pytest.approx(TAU_39, rel=1e-12)
        assert calibrate_tau(3, 1e-8, 19.5) == pytest.approx(TAU_19_5, rel=1e-12)

    def test_small_argument_precision(self):
        # 1 - exp(-x) for x ~ 4e-21 must keep full precision
        golden = mpmath.mpf("4.2483542552915889953202105259198424609945022780488e-21")
        got = retention_failure_prob(1e-3, 1.0, 40)
        assert rel(got, float(golden)) < 1e-12


class TestReadDisturb:
    def test_zero_current_equals_retention(self):
        for t, d in [(1e-3, 10.0), (5.0, 25.0), (1e6, 40.0)]:
            assert read_disturb_prob(t, 1.0, d, 0.0, 1e-5) == retention_failure_prob(t, 1.0, d)

    def test_zero_pulse(self):
        assert read_disturb_prob(0, 1e-9, 27.5, 3e-6, 1e-5) == 0.0

    def test_golden_pair(self):
        assert max_read_pulse(1e-8, 1e-9, 27.5, 0.3) == pytest.approx(T_READ, rel=1e-12)
        assert read_disturb_prob(T_READ, 1e-9, 27.5, 0.3, 1.0) == pytest.approx(1e-8, rel=1e-9)

    def test_read_current_must_stay_below_ic(self):
        with pytest.raises(DomainError):
            read_disturb_prob(1e-9, 1e-9, 27.5, 1e-5, 1e-5)

    def test_consistent_with_retention_inverse(self):
        assert max_read_pulse(1e-6, 1.0, 20, 0.0) == pytest.approx(
            retention_time_for_ber(1e-6, 1.0, 20), rel=1e-15)

    @given(st.floats(5, 79), st.floats(0.01, 1))
    def test_monotone_in_delta(self, d, step):
        assert max_read_pulse(1e-8, 1e-9, d + step, 0.3) > max_read_pulse(1e-8, 1e-9, d, 0.3)


class TestWriteError:
    def test_zero_pulse(self):
        expected = -math.expm1(-math.pi ** 2 * 40 / 4)
        assert write_error_rate(0, 1e-9, 40, 1.5) == pytest.approx(expected, rel=1e-15)

    def test_long_pulse_vanishes(self):
        assert write_error_rate(1e-3, 1e-9, 40, 1.5) == 0.0
        assert write_error_rate(1e-6, 1e-9, 40, 1.5) < 1e-100

    def test_forward_golden(self):
        assert write_error_rate(50e-9, 1e-9, 30, 1.5) == pytest.approx(WER_50NS, rel=1e-12)

    def test_pulse_goldens(self):
        t15 = write_pulse_for_wer(1e-8, 1e-9, 27.5, 1.5)
        t2 = write_pulse_for_wer(1e-8, 1e-9, 27.5, 2.0)
        assert t15 == pytest.approx(T_WRITE_R15, rel=1e-12)
        assert t2 == pytest.approx(T_WRITE_R2, rel=1e-12)
        assert t2 < t15
        assert write_error_rate(t15, 1e-9, 27.5, 1.5) == pytest.approx(1e-8, rel=1e-9)

    @pytest.mark.parametrize("r", [1.0, 0.9])
    def test_overdrive_required(self, r):
        with pytest.raises(DomainError):
            write_error_rate(1e-9, 1e-9, 30, r)

    def test_target_met_at_zero_pulse(self):
        # tiny delta with large overdrive already meets a loose target
        assert write_pulse_for_wer(0.5, 1e-9, 0.01, 10.0) == 0.0

    def test_halving_delta_shortens_pulse(self):
        assert write_pulse_for_wer(1e-8, 1e-9, 15, 1.5) < write_pulse_for_wer(1e-8, 1e-9, 30, 1.5)

    @given(st.floats(0, 100e-9), st.floats(1e-12, 10e-9), st.floats(1.1, 3.0))
    def test_strictly_decreasing(self, t, dt, r):
        a = write_error_rate(t, 1e-9, 30, r)
        b = write_error_rate(t + dt, 1e-9, 30, r)
        c = write_error_rate(t, 1e-9, 30, r + 0.1)
        assert b <= a and c <= a
        if 1e-300 < a < 0.5:
            assert b < a and c < a


DELTAS = st.floats(5, 80)
PROBS = st.floats(1e-12, 1e-2)
TAUS = st.floats(1e-10, 10)


class TestRoundTrips:
    @settings(max_examples=300)
    @given(DELTAS, PROBS, TAUS)
    def test_retention(self, d, p, tau):
        t = retention_time_for_ber(p, tau, d)
        assert rel(retention_failure_prob(t, tau, d), p) < 1e-9
        assert rel(delta_for_retention(t, p, tau), d) < 1e-9
        assert rel(calibrate_tau(t, p, d), tau) < 1e-9

    @settings(max_examples=300)
    @given(DELTAS, PROBS, TAUS, st.floats(0, 0.9))
    def test_read_disturb(self, d, p, tau, ratio):
        t = max_read_pulse(p, tau, d, ratio)
        assert rel(read_disturb_prob(t, tau, d, ratio, 1.0), p) < 1e-9

    @settings(max_examples=300)
    @given(DELTAS, PROBS, TAUS, st.floats(1.05, 4))
    def test_write(self, d, p, tau, r):
        t = write_pulse_for_wer(p, tau, d, r)
        if t > 0:
            assert rel(write_error_rate(t, tau, d, r), p) < 1e-9


class TestOperatingPoint:
    def test_glb_target(self):
        op = solve_operating_point(params(tau_retention=1.0, tau_write=1e-9),
                                   ReliabilityTargets(3.0, 1e-8, 1e-8, 1e-8),
                                   CurrentKnobs(ir_over_ic=0.3, iw_over_ic=1.5))
        assert op.delta == pytest.approx(DELTA_3S_1E8, rel=1e-12)
        assert op.i_w > op.i_c > op.i_r > 0
        assert retention_failure_prob(op.t_ret, 1.0, op.delta) <= 1e-8 * (1 + 1e-9)
        assert read_disturb_prob(op.t_r, 1.0, op.delta, op.i_r, op.i_c) <= 1e-8 * (1 + 1e-9)
        assert write_error_rate(op.t_w, 1e-9, op.delta, 1.5) <= 1e-8 * (1 + 1e-9)

    def test_weight_target(self):
        op = solve_operating_point(params(), ReliabilityTargets(9.46e7, 1e-9, 1e-9, 1e-9))
        assert op.delta == pytest.approx(39.0, abs=0.5)

    def test_overdrive_knob_isolated(self):
        targets = ReliabilityTargets(3.0, 1e-8, 1e-8, 1e-8)
        low = solve_operating_point(params(), targets, CurrentKnobs(0.3, 1.5))
        high = solve_operating_point(params(), targets, CurrentKnobs(0.3, 2.0))
        assert low.delta == high.delta
        assert high.t_w < low.t_w

    def test_infeasible_probability(self):
        with pytest.raises(DomainError):
            solve_operating_point(params(), ReliabilityTargets(3.0, 1.0, 1e-8, 1e-8))

    def test_params_must_be_positive(self):
        with pytest.raises(DomainError):
            params(alpha=0.0)
