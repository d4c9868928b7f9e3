import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import cascade_maps as cm
from cascade_maps.errors import DomainError, ParameterError

WINDOW_END = cm.PERIOD2_WINDOW_END  # (5 + sqrt 5)/8


# ---------------------------------------------------------------- logistic


@pytest.mark.parametrize("x,expected", [(0.0, 0.0), (0.5, 1.0), (0.75, 0.75)])
def test_logistic_fixed_values(x, expected):
    assert cm.logistic(x) == expected


@pytest.mark.parametrize("x", [-0.1, 1.1, 2.0])
def test_logistic_domain_error(x):
    with pytest.raises(DomainError):
        cm.logistic(x)


# ------------------------------------------------------------ threshold map


@pytest.mark.parametrize(
    "x,c1,state,excess",
    [
        (0.5, 0.9, 0.9, 0.1),     # f(0.5) = 1 clipped
        (0.9, 0.9, 0.36, 0.0),    # below threshold (f(0.9) = 0.36)
        (0.25, 0.9, 0.75, 0.0),
    ],
)
def test_threshold_map_examples(x, c1, state, excess):
    t = cm.make_threshold(c1)
    s, e = cm.threshold_map(x, t)
    assert s == pytest.approx(state, abs=1e-15)
    assert e == pytest.approx(excess, abs=1e-15)


@given(st.floats(min_value=0.0, max_value=1.0), st.floats(min_value=0.7501, max_value=0.9999))
def test_threshold_map_conserves_logistic_image(x, c1):
    t = cm.make_threshold(c1)
    s, e = cm.threshold_map(x, t)
    assert s + e == cm.logistic(x)  # exact: clipped difference is Sterbenz-exact
    assert e >= 0.0
    assert s <= t.c1


def test_threshold_map_clips_exactly_on_critical_interval():
    t = cm.make_threshold(0.87)
    lo, hi = t.c_interval
    for x in np.linspace(lo + 1e-9, hi - 1e-9, 101):
        s, e = cm.threshold_map(float(x), t)
        assert s == t.c1
    for x in np.concatenate([np.linspace(0, lo - 1e-9, 53), np.linspace(hi + 1e-9, 1, 53)]):
        s, e = cm.threshold_map(float(x), t)
        assert e == 0.0


# ------------------------------------------------------------ make_threshold


def test_derived_constants_at_0_9():
    t = cm.make_threshold(0.9)
    assert t.c0 == pytest.approx(0.34188611699158106, abs=1e-15)
    assert t.c2 == pytest.approx(0.36, abs=1e-15)
    assert t.d1 == pytest.approx(0.7951672353008665, abs=1e-15)


def test_derived_constants_at_0_84():
    t = cm.make_threshold(0.84)
    assert t.c2 == pytest.approx(0.5376, abs=1e-15)
    assert t.c_interval[1] == pytest.approx(0.7, abs=1e-15)


def test_image_of_c1_hits_c0_at_window_end():
    t = cm.make_threshold(WINDOW_END)
    assert t.c2 == pytest.approx(t.c0, abs=1e-15)


@pytest.mark.parametrize("c1", [0.5, 0.75, 1.0, 1.2, -3.0])
def test_make_threshold_rejects_out_of_range(c1):
    with pytest.raises(ParameterError):
        cm.make_threshold(c1)


@pytest.mark.parametrize("c1", np.linspace(0.7501, 0.9999, 25).tolist())
def test_threshold_invariants(c1):
    t = cm.make_threshold(c1)
    assert t.c0 == pytest.approx(0.5 - 0.5 * math.sqrt(1.0 - c1), abs=0)
    assert 0.0 < t.c0 < 0.5
    lo, hi = t.c_interval
    # C is exactly the preimage of [c1, 1]
    assert cm.logistic(lo) == pytest.approx(c1, abs=1e-12)
    assert cm.logistic(hi) == pytest.approx(c1, abs=1e-12)
    assert t.c2 <= t.c1
    assert 2.0 / 3.0 < t.d1 < 1.0
    assert t.d1 == pytest.approx(math.acos(1.0 - 2.0 * c1) / math.pi, abs=0)


# ------------------------------------------------------------- forward orbit


def test_forward_orbit_period_two_example():
    t = cm.make_threshold(0.84)
    states, excesses = cm.forward_orbit(t, 3)
    assert states == pytest.approx([0.84, 0.5376, 0.84], abs=1e-15)
    assert excesses[0] == 0.0 and excesses[1] == 0.0
    assert excesses[2] == pytest.approx(0.15434496, abs=1e-12)


def test_forward_orbit_xi2_reaches_the_repelling_point():
    t = cm.make_threshold(cm.XI2)
    states, _ = cm.forward_orbit(t, 3)
    assert states[0] == t.c1
    assert states[1] == pytest.approx(0.25, abs=1e-15)
    assert states[2] == pytest.approx(0.75, abs=1e-15)


def test_forward_orbit_length_one():
    t = cm.make_threshold(0.8)
    states, excesses = cm.forward_orbit(t, 1)
    assert states.tolist() == [0.8] and excesses.tolist() == [0.0]
    with pytest.raises(ParameterError):
        cm.forward_orbit(t, 0)


# ------------------------------------------------------------ classify_orbit


@pytest.mark.parametrize(
    "c1,period,steps",
    [(0.84, 2, 1), (0.9, 2, 1), (0.95, 10, 9), (0.99, 4, 3)],
)
def test_classify_superstable_fixtures(c1, period, steps):
    oc = cm.classify_orbit(cm.make_threshold(c1))
    assert oc == cm.SuperStable(period=period, steps_to_c=steps)


def test_classify_orbit_at_xi2_escapes_in_floating_point():
    # In exact arithmetic the orbit of XI2 lands on the repelling point 3/4
    # and stays there forever.  In doubles f^2(XI2) is one ulp off, the gap
    # doubles each step, and the orbit enters C after 51 steps.
    oc = cm.classify_orbit(cm.make_threshold(cm.XI2))
    assert oc == cm.SuperStable(period=52, steps_to_c=51)


def test_classify_orbit_boundary_at_window_end():
    # At the right end of the period-2 window the image of c1 sits on the
    # edge of C (one ulp away): must be flagged Boundary, not classified.
    oc = cm.classify_orbit(cm.make_threshold(WINDOW_END))
    assert oc == cm.Boundary(step=1)


def test_classify_orbit_period_two_across_the_window():
    for c1 in np.linspace(0.7505, 0.9040, 61):
        oc = cm.classify_orbit(cm.make_threshold(float(c1)))
        assert isinstance(oc, cm.SuperStable) and oc.period == 2, c1


def test_classify_orbit_repeller_with_tiny_budget():
    # With a one-step budget the 0.99 orbit has not reached C yet.
    oc = cm.classify_orbit(cm.make_threshold(0.99), max_iter=1)
    assert oc == cm.Repeller(iterations_checked=1)


def test_classify_orbit_validates_arguments():
    t = cm.make_threshold(0.9)
    with pytest.raises(ParameterError):
        cm.classify_orbit(t, max_iter=0)
    with pytest.raises(ParameterError):
        cm.classify_orbit(t, boundary_tol=0.0)


# ------------------------------------------------------------ tent conjugacy


def test_tent_conjugacy_fixed_values():
    assert cm.tent_conjugacy(0.0) == 0.0
    assert cm.tent_conjugacy(1.0) == pytest.approx(1.0, abs=1e-15)
    assert cm.tent_conjugacy(0.5) == pytest.approx(0.5, abs=1e-15)
    assert cm.tent_conjugacy(0.75) == pytest.approx(2.0 / 3.0, abs=1e-15)


def test_tent_conjugacy_defect_below_1e12():
    xs = np.linspace(0.0, 1.0, 10_000)
    lhs = cm.tent_conjugacy(4.0 * xs * (1.0 - xs))
    rhs = cm.tent_map(cm.tent_conjugacy(xs))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_tent_conjugacy_roundtrip():
    us = np.linspace(0.0, 1.0, 5_001)
    back = cm.tent_conjugacy(cm.tent_conjugacy_inverse(us))
    assert np.max(np.abs(back - us)) <= 1e-12


def test_tent_map_values():
    assert cm.tent_map(0.25) == 0.5
    assert cm.tent_map(0.5) == 1.0
    assert cm.tent_map(1.0) == 0.0


def test_tent_conjugacy_domain_errors():
    with pytest.raises(DomainError):
        cm.tent_conjugacy(-0.1)
    with pytest.raises(DomainError):
        cm.tent_conjugacy_inverse(1.5)


# -------------------------------------------------------- avoidance measures


def test_avoidance_measure_tent_values():
    t = cm.make_threshold(0.9)
    assert cm.avoidance_measure_tent(t, 0) == pytest.approx(0.79517, abs=5e-5)
    t99 = cm.make_threshold(0.99)
    assert t99.d1 == pytest.approx(0.9362314391414802, abs=1e-15)
    assert cm.avoidance_measure_tent(t99, 35) == pytest.approx(t99.d1**36, rel=1e-14)


def test_avoidance_measure_tent_monotone_decay():
    t = cm.make_threshold(0.87)
    for j in range(0, 20):
        assert cm.avoidance_measure_tent(t, j + 1) == pytest.approx(
            t.d1 * cm.avoidance_measure_tent(t, j), rel=1e-14
        )
    assert cm.avoidance_measure_tent(t, 400) < 1e-20


def exact_avoiding_measure(t: cm.Threshold, jmax: int) -> list[float]:
    """Independent oracle: exact interval pullback of the C-avoiding set.

    R_j = G intersect f^{-1}(R_{j-1}) with G the complement of C; the two
    inverse branches of the logistic map pull interval endpoints back
    exactly, so the Lebesgue measure is a finite sum of interval lengths.
    """
    c0 = t.c0
    g_pieces = [(0.0, c0), (1.0 - c0, 1.0)]
    cur = list(g_pieces)
    out = [sum(b - a for a, b in cur)]
    for _ in range(jmax):
        nxt = []
        for a, b in cur:
            sa, sb = math.sqrt(1.0 - a), math.sqrt(1.0 - b)
            for lo, hi in ((0.5 - 0.5 * sa, 0.5 - 0.5 * sb), (0.5 + 0.5 * sb, 0.5 + 0.5 * sa)):
                for glo, ghi in g_pieces:
                    lo2, hi2 = max(lo, glo), min(hi, ghi)
                    if hi2 > lo2:
                        nxt.append((lo2, hi2))
        cur = sorted(nxt)
        out.append(sum(b - a for a, b in cur))
    return out


def test_estimate_avoidance_matches_exact_pullback():
    t = cm.make_threshold(0.9)
    exact = exact_avoiding_measure(t, 10)
    for j in (0, 3, 5, 10):
        frac, se = cm.estimate_avoidance(t, j, 200_000, seed=99 + j)
        assert abs(frac - exact[j]) <= 4.0 * max(se, 1e-6), (j, frac, exact[j])


def test_estimate_avoidance_j0_complement_of_c():
    t = cm.make_threshold(0.9)
    frac, se = cm.estimate_avoidance(t, 0, 400_000, seed=1)
    assert abs(frac - 2.0 * t.c0) <= 4.0 * se


def test_estimate_avoidance_decays_to_zero():
    t = cm.make_threshold(0.9)
    frac, _ = cm.estimate_avoidance(t, 40, 100_000, seed=2)
    assert frac < 1e-3


def test_estimate_avoidance_deterministic():
    t = cm.make_threshold(0.9)
    assert cm.estimate_avoidance(t, 5, 50_000, seed=7) == cm.estimate_avoidance(
        t, 5, 50_000, seed=7
    )


def test_estimate_avoidance_true_decay_rate_is_one_half():
    # The avoiding set escapes past the repelling point 3/4 where the
    # conjugated slope is 2, so the measure halves per step; the tent-value
    # d1 does not govern the decay.  (See the exact oracle above.)
    t = cm.make_threshold(0.9)
    exact = exact_avoiding_measure(t, 16)
    assert exact[16] / exact[15] == pytest.approx(0.5, abs=1e-4)


def test_estimate_avoidance_validates_arguments():
    t = cm.make_threshold(0.9)
    with pytest.raises(ParameterError):
        cm.estimate_avoidance(t, -1, 10, seed=0)
    with pytest.raises(ParameterError):
        cm.estimate_avoidance(t, 1, 0, seed=0)


# ----------------------------------------------------------------- absorption


def test_orbits_absorbed_into_a_and_never_leave():
    t = cm.make_threshold(0.9)
    rng = np.random.default_rng(5)
    x = rng.uniform(1e-9, 1.0 - 1e-9, 10_000)
    lo_a, hi_a = t.absorbing
    entered = np.zeros(x.size, dtype=bool)
    for _ in range(200):
        y = 4.0 * x * (1.0 - x)
        x = np.where(y < t.c1, y, t.c1)
        in_a = (x >= lo_a) & (x <= hi_a)
        assert not np.any(entered & ~in_a)
        entered |= in_a
    assert entered.all()
