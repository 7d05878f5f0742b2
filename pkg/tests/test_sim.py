import math
import warnings

import numpy as np
import pytest

from holblock import SpecError, model2_blocking_probability, waiting_time
from holblock.sim import (
    SimConfig,
    available_backends,
    default_warmup,
    service_time_samples,
    simulate,
    simulate_model1,
    simulate_model2,
    simulate_seeds,
)

from conftest import model1, model2

BACKENDS = available_backends()


def run(spec, horizon=200_000, seed=1, trace=0, backend=None):
    return simulate(SimConfig(spec, horizon=horizon, seed=seed, trace=trace), backend)


class TestConfig:
    def test_defaults(self):
        cfg = SimConfig(model1())
        assert cfg.horizon == 1_000_000 and cfg.warmup == 10_000
        assert default_warmup(10**7) == 100_000
        assert default_warmup(10_000) == 1_000

    @pytest.mark.parametrize("kw", [dict(horizon=9_999), dict(horizon=20_000, warmup=20_000),
                                    dict(warmup=-1), dict(batches=1)])
    def test_invalid(self, kw):
        with pytest.raises(SpecError):
            SimConfig(model1(), **kw)

    def test_model_mismatch(self):
        with pytest.raises(SpecError):
            simulate_model1(SimConfig(model2(), horizon=10_000))
        with pytest.raises(SpecError):
            simulate_model2(SimConfig(model1(), horizon=10_000))


class TestReproducibility:
    @pytest.mark.parametrize("spec", [model1(p_t=0.5), model2(p_t=0.3)], ids=["I", "II"])
    def test_same_seed_identical(self, spec):
        a = run(spec, seed=5, trace=100)
        b = run(spec, seed=5, trace=100)
        assert a == b and a.trace == b.trace

    def test_different_seed_differs(self):
        assert run(model1(p_t=0.5), seed=1).mean_wait != run(model1(p_t=0.5), seed=2).mean_wait

    @pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernel not built")
    @pytest.mark.parametrize("spec", [model1(p_t=0.5), model1(p_t=0.0), model2(p_t=0.0),
                                      model2(rates=(0.3, 0.1), probs=(0.7, 0.3), p_t=0.6)])
    def test_backends_bit_identical(self, spec):
        a = run(spec, trace=500, backend="cython")
        b = run(spec, trace=500, backend="python")
        assert a.trace == b.trace
        assert {**a.__dict__, "backend": None} == {**b.__dict__, "backend": None}

    def test_parallel_seeds_match_serial(self):
        spec = model1(p_t=0.5)
        par = simulate_seeds(spec, range(1, 5), horizon=50_000, workers=4)
        ser = simulate_seeds(spec, range(1, 5), horizon=50_000)
        assert par == ser and [r.seed for r in par.runs] == [1, 2, 3, 4]


class TestStatsInvariants:
    @pytest.mark.parametrize("spec", [model1(p_t=0.2), model2(p_t=0.2)], ids=["I", "II"])
    def test_counts(self, spec):
        s = run(spec)
        assert s.departures <= s.arrivals + s.max_queue_len
        assert sum(s.service_time_histogram) == s.departures
        assert sum(s.per_class_departures) == s.departures
        assert s.mean_queue_len >= 0 and s.mean_wait >= 0

    @pytest.mark.parametrize("make", [model1, model2])
    def test_empty_system(self, make):
        s = run(make(rates=(0.0,) * (3 if make is model1 else 2)), horizon=10_000)
        assert s.departures == 0 and s.arrivals == 0
        assert s.mean_queue_len == 0 and math.isnan(s.mean_wait)
        assert s.service_pmf() == {}

    def test_vehicle_invariants(self):
        for spec in (model1(p_t=0.3), model2(p_t=0.3)):
            for v in run(spec, horizon=20_000, trace=2000).trace:
                assert v.arrival_slot < v.service_start_slot <= v.departure_slot
                assert v.wait >= 0 and v.service_time >= 1
                assert v.label == spec.arrivals.labels[v.cls]

    @pytest.mark.parametrize("spec", [model1(p_t=0.3), model2(p_t=0.3)], ids=["I", "II"])
    def test_fifo_within_class(self, spec):
        tr = run(spec, horizon=50_000, trace=5000).trace
        for c in range(spec.model.n_classes):
            deps = [(v.id, v.departure_slot) for v in tr if v.cls == c]
            deps.sort()
            assert all(a[1] < b[1] for a, b in zip(deps, deps[1:]))

    def test_model2_no_overtaking_past_the_head_lanes(self):
        # a vehicle can only start service once every earlier vehicle has
        # started service or sits in the other head lane: at most one earlier
        # vehicle may still be unserved when it starts
        tr = sorted(run(model2(rates=(0.2, 0.15), p_t=0.2), horizon=50_000, trace=5000).trace,
                    key=lambda v: v.id)
        starts = [v.service_start_slot for v in tr]
        for k, v in enumerate(tr):
            later_starting_earlier = sum(1 for s in starts[:k] if s > v.service_start_slot)
            assert later_starting_earlier <= 1


class TestModel1Dynamics:
    def test_work_conservation(self):
        tr = sorted(run(model1(p_t=0.4), horizon=50_000, trace=5000).trace, key=lambda v: v.id)
        prev_dep = -1
        for v in tr:
            elig = v.arrival_slot + 1
            assert v.service_start_slot == max(elig, prev_dep + 1)
            if v.has_comm:
                assert v.service_time == 1
            prev_dep = v.departure_slot

    def test_full_comm_point_mass(self):
        s = run(model1(p_t=1.0))
        assert s.service_pmf() == {1: 1.0}
        assert service_time_samples(SimConfig(model1(p_t=1.0), horizon=50_000)) == {1: 1.0}

    def test_service_pmf_partial_comm(self):
        pmf = run(model1(p_t=0.5), horizon=1_000_000).service_pmf()
        assert pmf[1] == pytest.approx(2 / 3, abs=0.005)
        assert pmf[2] == pytest.approx(1 / 9, abs=0.005)

    def test_point_example(self):
        s = run(model1(p_t=1.0), horizon=1_000_000)
        assert s.mean_wait == pytest.approx(0.3 / 1.4, rel=0.05)

    def test_saturation_flag(self):
        with pytest.warns(RuntimeWarning, match="saturated"):
            s = run(model1(rates=(0.2, 0.2, 0.2)), horizon=100_000)
        assert s.saturated

    def test_stable_not_flagged(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert not run(model1(p_t=0.5)).saturated


class TestModel2Dynamics:
    def test_epoch_throughput_bounds(self):
        s = run(model2(p_t=0.0), horizon=500_000)
        busy = s.epochs
        assert busy > 0
        # each busy phase passes one or two vehicles (a phase straddling the
        # warmup or horizon boundary can shift the count by one)
        assert busy - 2 <= s.departures <= 2 * busy + 2
        assert s.blocked_epochs <= busy

    def test_full_comm_unit_service(self):
        s = run(model2(p_t=1.0), horizon=1_000_000)
        assert s.service_pmf() == {1: 1.0}
        assert s.mean_wait == pytest.approx(0.3 / 1.4, rel=0.05)

    def test_single_class(self):
        s = run(model2(rates=(0.3, 0.0)), horizon=500_000)
        assert s.blocked_epochs == 0
        assert s.service_pmf() == {1: 1.0}
        assert s.per_class_departures[1] == 0

    @pytest.mark.parametrize("rates, probs", [
        ((0.6, 0.6), (0.5, 0.5)),
        ((0.9, 0.3), (0.5, 0.5)),
        ((0.5, 0.8), (0.7, 0.3)),
        ((1.0, 0.25), (0.2, 0.8)),
    ])
    def test_saturated_blocking_matches_closed_form(self, rates, probs):
        # under overload the head lanes are always refilled, and the share of
        # phases that pass a single vehicle is the closed-form blocking value
        spec = model2(rates=rates, probs=probs)
        with pytest.warns(RuntimeWarning):
            s = run(spec, horizon=400_000)
        expected = model2_blocking_probability(spec.arrivals, spec.phases)
        assert s.blocking_fraction == pytest.approx(expected, abs=0.01)

    def test_sensing_serves_the_lone_lane(self):
        # at light load most phases see a single occupied head lane; they
        # should almost never block
        s = run(model2(rates=(0.02, 0.02)), horizon=500_000)
        assert s.blocking_fraction < 0.02


@pytest.mark.parametrize("spec", [model1(p_t=0.5), model1(p_t=1.0), model2(p_t=0.0),
                                  model2(p_t=1.0), model2(rates=(0.25, 0.1), probs=(0.6, 0.4), p_t=0.5)])
def test_littles_law(spec):
    s = run(spec, horizon=1_000_000)
    lam = spec.arrivals.total_rate
    assert s.mean_queue_len == pytest.approx(lam * (s.mean_wait + s.mean_service), rel=0.05)


def test_model1_matches_analytics_on_a_grid():
    for rates, probs, p_t in [((0.05, 0.15, 0.1), (0.2, 0.5, 0.3), 0.4),
                              ((0.2, 0.05, 0.05), (0.6, 0.2, 0.2), 0.3),
                              ((0.1, 0.1, 0.1), (1 / 3,) * 3, 0.8)]:
        spec = model1(rates=rates, probs=probs, p_t=p_t)
        W = waiting_time(spec)
        assert W.rho < 0.7
        agg = simulate_seeds(spec, range(1, 4), horizon=1_000_000)
        assert agg.mean_wait == pytest.approx(W.W, rel=0.05)
        assert agg.mean_service == pytest.approx(W.E_x, rel=0.02)


def test_seed_aggregate_stats():
    agg = simulate_seeds(model1(p_t=0.5), [1, 2, 3], horizon=50_000)
    assert agg.departures == sum(r.departures for r in agg.runs)
    assert np.array_equal(agg.pooled_histogram(), np.sum([r.service_time_histogram for r in agg.runs], axis=0))
    assert agg.wait_stderr > 0
    with pytest.raises(SpecError):
        simulate_seeds(model1(), [], horizon=50_000)
