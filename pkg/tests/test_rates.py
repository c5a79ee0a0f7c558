import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qkdrefine.information import DomainError, binary_entropy, conditional_entropy
from qkdrefine.rates import (
    EcParams,
    bb84_coarse_rate,
    bb84_refined_rate,
    ddi_coarse_rate,
    ddi_refined_rate,
    di_coarse_rate,
    di_coarse_table_gap,
    di_ipa,
    di_refined_rate,
    generic_rate,
    key_rate,
)
from qkdrefine.scenarios import Bb84Params, DdiParams, DiParams, di_bell_parameter, di_joint

from . import oracle

prob = st.floats(0.0, 1.0)
half = st.floats(0.0, 0.5)
f_values = st.floats(1.0, 2.0)


def test_generic_rate():
    assert generic_rate(1, 0, 0).rate == 1.0
    he = binary_entropy(0.05)
    assert generic_rate(1, he, he).rate == pytest.approx(1 - 2 * he, abs=1e-15)
    rb = generic_rate(1, 0.2, 0.3, EcParams(1.2))
    assert rb.rate == pytest.approx(0.46, abs=1e-15)
    assert rb.f == 1.2
    assert generic_rate(0.1, 0.5, 0.5).rate < 0
    assert generic_rate(0.1, 0.5, 0.5).positive_rate == 0.0


def test_ec_params_validation():
    with pytest.raises(DomainError):
        EcParams(0.9)
    with pytest.raises(DomainError):
        EcParams(float("nan"))
    with pytest.raises(DomainError):
        generic_rate(1, -0.1, 0)


def test_bb84_coarse_examples():
    assert bb84_coarse_rate(Bb84Params(1, 0)).rate == 1.0
    r = bb84_coarse_rate(Bb84Params(1, 0.11)).rate
    assert r == pytest.approx(1 - 2 * 0.49991595816452800, abs=1e-14)
    assert 0 < r < 2e-4
    # e_c = 0.9 * 0.01 + 0.1 / 2 = 0.059; mpmath 1 - 2 h[0.059]
    assert bb84_coarse_rate(Bb84Params(0.9, 0.01)).rate == pytest.approx(0.35307512825562936, abs=1e-14)


def test_bb84_refined_examples():
    for e in (0.0, 0.02, 0.1):
        assert bb84_refined_rate(Bb84Params(1, e)) == bb84_coarse_rate(Bb84Params(1, e))
    assert abs(bb84_refined_rate(Bb84Params(0.659, 0)).rate) < 5e-4
    # mpmath: 0.8 - h[0.1]
    assert bb84_refined_rate(Bb84Params(0.8, 0)).rate == pytest.approx(0.33100440641071878, abs=1e-14)


@settings(max_examples=300, deadline=None)
@given(prob, prob)
def test_bb84_refined_closed_form(ps, es):
    ec = ps * es + (1 - ps) / 2
    closed = ps * (1 - binary_entropy(es)) - binary_entropy(ec)
    assert bb84_refined_rate(Bb84Params(ps, es)).rate == pytest.approx(closed, abs=1e-12)


def test_ddi_delegates_to_bb84():
    for eta, es in ((1, 0), (0.7, 0.03), (0.2, 0.4)):
        b = Bb84Params(eta, es)
        d = DdiParams(eta, es)
        assert ddi_coarse_rate(d) == bb84_coarse_rate(b)
        assert ddi_refined_rate(d) == bb84_refined_rate(b)
    assert ddi_coarse_rate(DdiParams(1, 0)).rate == 1.0
    assert ddi_refined_rate(DdiParams(1, 0)).rate == 1.0


def test_ddi_rates_near_threshold_points():
    assert abs(ddi_coarse_rate(DdiParams(0.780, 0)).rate) < 5e-3
    assert abs(ddi_refined_rate(DdiParams(0.659, 0)).rate) < 5e-3
    # the 78.4% figure sits visibly above the zero crossing
    assert ddi_coarse_rate(DdiParams(0.784, 0)).rate > 0.01


def test_di_ipa_examples():
    assert di_ipa(2 * math.sqrt(2)) == 0.0
    assert di_ipa(2.0) == 1.0
    assert di_ipa(1.3) == 1.0
    assert di_ipa(-5) == 1.0
    assert di_ipa(2.4266) == pytest.approx(0.62575719808483610, abs=1e-14)


def test_di_ipa_continuous_at_two():
    assert di_ipa(2.0 + 1e-12) == pytest.approx(1.0, abs=1e-5)
    assert di_ipa(2.0 - 1e-12) == 1.0


def test_di_ipa_monotone():
    grid = [2 + i * (2 * math.sqrt(2) - 2) / 400 for i in range(401)]
    vals = [di_ipa(s) for s in grid]
    assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))


def test_di_coarse_examples():
    assert di_coarse_rate(DiParams(1, 1, 0)).rate == 1.0
    assert abs(di_coarse_rate(DiParams(0.924, 0.924, 0)).rate) <= 0.005
    expected = (binary_entropy(0.45) - binary_entropy(0.09)
                - di_ipa(2 * math.sqrt(2) * 0.81 + 2 * 0.01))
    assert di_coarse_rate(DiParams(0.9, 0.9, 0)).rate == pytest.approx(expected, abs=1e-12)
    # mpmath composition of the same formulas
    assert di_coarse_rate(DiParams(0.9, 0.9, 0)).rate == pytest.approx(-0.18615806130552583, abs=1e-13)


def test_di_refined_examples():
    assert di_refined_rate(DiParams(1, 1, 0)).rate == 1.0
    rb = di_refined_rate(DiParams(0.909, 0.909, 0))
    assert abs(rb.rate) <= 0.005
    assert rb.h_a_given_b == pytest.approx(0.29034426450085180, abs=1e-13)


@pytest.mark.parametrize("eta, es", [(0.95, 0.0), (0.93, 0.01), (0.99, 0.03), (0.6, 0.0)])
def test_di_rates_against_oracle(eta, es):
    p = DiParams.symmetric(eta, es)
    assert di_coarse_rate(p).rate == pytest.approx(float(oracle.di_rate(eta, es, False)), abs=1e-12)
    assert di_refined_rate(p).rate == pytest.approx(float(oracle.di_rate(eta, es, True)), abs=1e-12)


@pytest.mark.parametrize("eta, es", [(0.95, 0.0), (0.7, 0.05), (0.3, 0.2)])
def test_ddi_rates_against_oracle(eta, es):
    p = DdiParams(eta, es)
    assert ddi_coarse_rate(p).rate == pytest.approx(float(oracle.ddi_rate(eta, es, False)), abs=1e-12)
    assert ddi_refined_rate(p).rate == pytest.approx(float(oracle.ddi_rate(eta, es, True)), abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(prob, prob, half)
def test_di_modes_share_ipa_and_refined_wins(a, b, es):
    p = DiParams(a, b, es)
    c, r = di_coarse_rate(p), di_refined_rate(p)
    assert c.i_pa == r.i_pa
    assert c.h_a == r.h_a
    assert r.rate >= c.rate - 1e-12
    assert di_coarse_table_gap(p) >= -1e-12


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(["bb84", "ddi"]), prob, prob)
def test_refined_at_least_coarse(scheme, x, es):
    p = Bb84Params(x, es) if scheme == "bb84" else DdiParams(x, es)
    c, r = key_rate(scheme, "coarse", p), key_rate(scheme, "refined", p)
    assert r.rate >= c.rate - 1e-12
    assert r.i_pa == c.i_pa


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.001, 0.45))
def test_refined_strictly_better_with_coarse_events(x, es):
    # strict whenever some, but not all, events are coarse-grained
    for scheme, p in (("ddi", DdiParams(x, es)), ("di", DiParams.symmetric(x, es))):
        c, r = key_rate(scheme, "coarse", p), key_rate(scheme, "refined", p)
        assert r.rate > c.rate


def test_equal_when_nothing_to_refine():
    # all events kept, or none kept (refining pure noise gains nothing)
    for scheme, p in (("bb84", Bb84Params(1, 0.03)), ("ddi", DdiParams(1, 0.07)),
                      ("di", DiParams(1, 1, 0.02)), ("ddi", DdiParams(0, 0.07)),
                      ("di", DiParams(0, 0, 0.02))):
        c, r = key_rate(scheme, "coarse", p), key_rate(scheme, "refined", p)
        assert r.rate == pytest.approx(c.rate, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(["bb84", "ddi", "di"]), st.sampled_from(["coarse", "refined"]),
       prob, half, f_values, f_values)
def test_rate_affine_and_decreasing_in_f(scheme, mode, x, es, f1, f2):
    from qkdrefine.rates import make_params
    p = make_params(scheme, x, es)
    r1 = key_rate(scheme, mode, p, EcParams(f1))
    r2 = key_rate(scheme, mode, p, EcParams(f2))
    assert r2.rate - r1.rate == pytest.approx(-(f2 - f1) * r1.h_a_given_b, abs=1e-12)
    if f2 >= f1:
        assert r2.rate <= r1.rate + 1e-15


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(["bb84", "ddi", "di"]), st.sampled_from(["coarse", "refined"]), prob, half, f_values)
def test_breakdown_identity(scheme, mode, x, es, f):
    from qkdrefine.rates import make_params
    rb = key_rate(scheme, mode, make_params(scheme, x, es), EcParams(f))
    assert rb.rate == pytest.approx(rb.h_a - rb.f * rb.h_a_given_b - rb.i_pa, abs=1e-12)
    assert 0.0 <= rb.h_a <= 1.0
    assert rb.h_a_given_b >= 0.0
    assert 0.0 <= rb.i_pa <= 1.0


def test_di_coarse_gap_documents_nonuniform_alice():
    # With eta_a < 1 Alice's bit is skewed and h[e_c] overstates H(A|B^(c)).
    p = DiParams.symmetric(0.92, 0.0)
    gap = di_coarse_table_gap(p)
    assert gap > 0
    assert conditional_entropy(di_joint(p, "coarse")) == pytest.approx(
        di_coarse_rate(p).h_a_given_b - gap, abs=1e-15)
    assert di_coarse_table_gap(DiParams(1, 1, 0.05)) == pytest.approx(0.0, abs=1e-12)


def test_key_rate_dispatch_errors():
    with pytest.raises(DomainError):
        key_rate("e91", "coarse", DdiParams(1, 0))
    with pytest.raises(DomainError):
        key_rate("ddi", "fine", DdiParams(1, 0))


def test_bell_endpoint_exact():
    assert di_bell_parameter(DiParams(1, 1, 0)) == 2 * math.sqrt(2)
