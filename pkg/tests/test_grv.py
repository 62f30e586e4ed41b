import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from grvbroker.errors import IndexOutOfEpoch, InvalidParams, OutOfRangeSum, SeriesLengthMismatch
from grvbroker.grv import (
    EpochMeasures,
    GrvParams,
    grv_bounds,
    grv_provider,
    grv_request,
    irrelevance_factor,
    measure_weight,
    pad_series,
    weight_table,
)

# reference weight column sum for C=5 (0.559353 + 0.628609 + 0.739964 + 0.875119 + 1)
TABLE3_C5_SUM = 3.803045


def P(**kw):
    return GrvParams(**kw)


class TestParams:
    @pytest.mark.parametrize("kw", [{"c": 0}, {"c": 1.5}, {"c_bp": 0}, {"x_max": 0}, {"m": 0},
                                    {"t_rerank": 0}, {"t_res": -1}, {"omega": 0}])
    def test_rejects(self, kw):
        with pytest.raises(InvalidParams):
            GrvParams(**kw)

    def test_t_measure(self):
        assert P(t_rerank=10, c_bp=5).t_measure == 2.0


class TestIrrelevance:
    def test_last_is_zero(self):
        assert irrelevance_factor(5, P(c_bp=5)) == 0.0

    def test_first_matches_closed_form(self):
        assert irrelevance_factor(1, P(c_bp=5)) == pytest.approx(math.exp(-0.08) - math.exp(-2), abs=1e-12)
        assert irrelevance_factor(1, P(c_bp=5)) == pytest.approx(0.787781, abs=1e-6)

    def test_linear_in_c(self):
        assert irrelevance_factor(1, P(c_bp=5, c=0.5)) == pytest.approx(0.393890, abs=1e-6)

    @pytest.mark.parametrize("k", [0, 6])
    def test_out_of_epoch(self, k):
        with pytest.raises(IndexOutOfEpoch):
            irrelevance_factor(k, P(c_bp=5))
        with pytest.raises(IndexOutOfEpoch):
            measure_weight(k, P(c_bp=5))


class TestMeasureWeight:
    @pytest.mark.parametrize(
        "k, c_bp, expected",
        [(1, 5, 0.559353), (3, 10, 0.588258), (20, 20, 1.0), (1, 20, 0.537728)],
    )
    def test_table3_cells(self, k, c_bp, expected):
        assert measure_weight(k, P(c_bp=c_bp)) == pytest.approx(expected, abs=1e-6)

    def test_last_weight_exactly_one(self):
        for c_bp in (1, 2, 3, 7, 13, 50):
            for x in (0.3, 1.7, 2.0, 5.5):
                assert measure_weight(c_bp, P(c_bp=c_bp, x_max=x, c=0.37)) == 1.0

    def test_recovered_parameters_fit_whole_table(self):
        # fit x_max from one cell by bisection, independent of the module's closed form
        target = 0.559353  # Func(1), C=5, c=1

        def f(x):
            return 1 / (1 + math.exp(-x * x / 50) - math.exp(-x * x / 2)) - target

        lo, hi = 1.0, 3.0
        for _ in range(100):
            mid = (lo + hi) / 2
            if f(lo) * f(mid) <= 0:
                hi = mid
            else:
                lo = mid
        assert lo == pytest.approx(2.0, abs=1e-4)


class TestGrv:
    def test_zero_series(self):
        p = P(c_bp=5)
        assert grv_provider(EpochMeasures("a", [0.0] * 5), p) == 0.0

    def test_unit_series_matches_table_sum(self):
        p = P(c_bp=5)
        assert grv_provider(EpochMeasures("a", [1.0] * 5), p) == pytest.approx(TABLE3_C5_SUM / 5, abs=1e-6)
        assert grv_provider(EpochMeasures("a", [1.0] * 5), p) == pytest.approx(0.760609, abs=1e-6)

    def test_max_series_hits_bound(self):
        p = P(m=3, omega=2.0, c_bp=10)
        got = grv_provider(EpochMeasures("a", [6.0] * 10), p)
        assert got == pytest.approx(grv_bounds(p)[1], abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(SeriesLengthMismatch):
            grv_provider(EpochMeasures("a", [1.0] * 4), P(c_bp=5))

    def test_out_of_range_value(self):
        with pytest.raises(OutOfRangeSum):
            grv_provider(EpochMeasures("a", [1.5] * 5), P(c_bp=5))

    def test_recent_measures_weigh_more(self):
        p = P(c_bp=5)
        old_good = grv_provider(EpochMeasures("a", [1, 0, 0, 0, 0]), p)
        new_good = grv_provider(EpochMeasures("a", [0, 0, 0, 0, 1]), p)
        assert new_good > old_good

    def test_request(self):
        p = P(c_bp=5)
        assert grv_request(0.0, p) == 0.0
        assert grv_request(1.0, p) == pytest.approx(0.760609, abs=1e-6)
        with pytest.raises(OutOfRangeSum):
            grv_request(1.01, p)

    def test_bounds(self):
        lo, hi = grv_bounds(P(c_bp=5))
        assert lo == 0.0 and hi == pytest.approx(0.760609, abs=1e-6)
        assert grv_bounds(P(c_bp=5, omega=2.0))[1] == pytest.approx(1.521218, abs=1e-6)

    def test_single_measure_epoch_reaches_omega(self):
        assert grv_bounds(P(c_bp=1, omega=2.0)) == (0.0, 2.0)

    def test_small_c_approaches_omega(self):
        hi = grv_bounds(P(c_bp=5, c=1e-9))[1]
        assert hi < 1.0 and hi == pytest.approx(1.0, abs=1e-8)


class TestPadding:
    def test_left_pad_with_earliest(self):
        assert pad_series([3.0, 4.0], 4) == (3.0, 3.0, 3.0, 4.0)

    def test_truncate_keeps_recent(self):
        assert pad_series([1, 2, 3, 4, 5, 6], 4) == (3, 4, 5, 6)

    def test_empty(self):
        with pytest.raises(SeriesLengthMismatch):
            pad_series([], 3)


def test_weight_table_av_diff():
    cols = weight_table([5, 10, 20])
    assert [round(c["avg_diff"], 4) for c in cols] == pytest.approx([0.0881, 0.0458, 0.0231])


params_st = st.builds(
    GrvParams,
    m=st.integers(1, 6),
    c_bp=st.integers(1, 40),
    c=st.floats(1e-3, 1.0),
    x_max=st.floats(0.1, 6.0),
    omega=st.floats(0.1, 100.0),
)


@given(params_st)
def test_weight_properties(p):
    ms = [irrelevance_factor(k, p) for k in range(1, p.c_bp + 1)]
    ws = [measure_weight(k, p) for k in range(1, p.c_bp + 1)]
    assert all(0.0 <= m <= 1.0 for m in ms)
    assert ms[-1] == 0.0
    assert all(a > b for a, b in zip(ms, ms[1:]))
    assert all(0.5 <= w <= 1.0 for w in ws)
    assert all(a < b for a, b in zip(ws, ws[1:]))
    assert ws[-1] == 1.0


@given(params_st, st.data())
def test_grv_bounds_and_linearity(p, data):
    vals = data.draw(st.lists(st.floats(0, p.max_sum), min_size=p.c_bp, max_size=p.c_bp))
    g = grv_provider(EpochMeasures("x", vals), p)
    lo, hi = grv_bounds(p)
    assert lo <= g <= hi + 1e-9
    # one measurement per epoch has weight exactly 1, so the bound is only reached there
    assert g < p.omega if p.c_bp > 1 else g <= p.omega
    # monotone: raising one entry never lowers the GRV
    k = data.draw(st.integers(0, p.c_bp - 1))
    bumped = list(vals)
    bumped[k] = p.max_sum
    assert grv_provider(EpochMeasures("x", bumped), p) >= g - 1e-12


@given(params_st, st.floats(0, 1))
def test_constant_series_equals_request(p, frac):
    s = frac * p.max_sum
    assert grv_provider(EpochMeasures("x", [s] * p.c_bp), p) == pytest.approx(grv_request(s, p), rel=1e-12, abs=1e-12)


def test_grv_linear_in_each_entry():
    rng = random.Random(3)
    p = P(m=2, c_bp=6, omega=1.5)
    for _ in range(100):
        base = [rng.uniform(0, 1.5) for _ in range(6)]
        k = rng.randrange(6)
        g = lambda v: grv_provider(EpochMeasures("x", base[:k] + [v] + base[k + 1:]), p)
        assert g(1.0) - g(0.5) == pytest.approx(g(0.5) - g(0.0), abs=1e-12)
