import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import assume, given

from macfeas.queueing import (
    QueueingError,
    ServiceSpec,
    UnstableQueueError,
    UserDemand,
    required_rate,
    required_rate_general,
    required_rate_vector,
    sojourn_time,
)

lams = st.floats(min_value=1e-3, max_value=1e6)
taus = st.floats(min_value=1e-7, max_value=1e2)
cvs = st.floats(min_value=0.0, max_value=10.0)


def test_sojourn_empty_queue_limit():
    assert sojourn_time(ServiceSpec(1.0, 0.0), 1e-12) == pytest.approx(1.0, rel=1e-9)


def test_sojourn_hand_value():
    # 1/2 + (1/4) / (2 * 1/2)
    assert sojourn_time(ServiceSpec(2.0, 0.0), 1.0) == pytest.approx(0.75, rel=1e-15)


def test_sojourn_inverse_of_required_rate():
    assert sojourn_time(ServiceSpec(1.2540e5), 800.0) == pytest.approx(8e-6, rel=1e-3)


def test_sojourn_unstable():
    with pytest.raises(UnstableQueueError):
        sojourn_time(ServiceSpec(10.0), 10.0)
    with pytest.raises(UnstableQueueError):
        sojourn_time(ServiceSpec(10.0), 11.0)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_domain_errors(bad):
    with pytest.raises(QueueingError):
        UserDemand(bad, 1.0)
    with pytest.raises(QueueingError):
        UserDemand(1.0, bad)
    with pytest.raises(QueueingError):
        ServiceSpec(bad)
    with pytest.raises(QueueingError):
        sojourn_time(ServiceSpec(1.0), bad)


def test_negative_cv_rejected():
    with pytest.raises(QueueingError):
        ServiceSpec(1.0, -0.1)
    with pytest.raises(QueueingError):
        required_rate_general(UserDemand(1.0, 1.0), -1.0)


def test_required_rate_general_hand_value():
    # (2 + sqrt(1 + 2 + 1)) / 2
    assert required_rate_general(UserDemand(1.0, 1.0), 1.0) == pytest.approx(2.0, rel=1e-15)


def test_required_rate_general_reference_value():
    assert required_rate_general(UserDemand(919.54, 23e-6), 0.0) == pytest.approx(0.4394e5, rel=1e-3)


def test_required_rate_relaxed_bound_approaches_arrival_rate():
    lam = 37.0
    r = required_rate(UserDemand(lam, 1e9))
    assert r > lam
    assert r == pytest.approx(lam, rel=1e-6)


@pytest.mark.parametrize(
    "lam, tau, expected",
    [(642.0, 29.9e-6, 0.3377e5), (105.32, 6.83e-6, 1.4647e5), (800.0, 8e-6, 1.254e5)],
)
def test_required_rate_examples(lam, tau, expected):
    assert required_rate(UserDemand(lam, tau)) == pytest.approx(expected, rel=1e-3)


def test_required_rate_vector_reference():
    demands = [UserDemand(l, t) for l, t in zip((919.54, 642.0, 105.32), (23e-6, 29.9e-6, 6.83e-6))]
    np.testing.assert_allclose(required_rate_vector(demands), [0.4394e5, 0.3377e5, 1.4647e5], rtol=1e-3)


def test_required_rate_vector_single_and_symmetric():
    assert required_rate_vector([UserDemand(1.0, 1.0)])[0] == pytest.approx((2 + math.sqrt(2)) / 2)
    r = required_rate_vector([UserDemand(5.0, 0.1), UserDemand(5.0, 0.1)])
    assert r[0] == r[1]


def test_required_rate_vector_empty():
    with pytest.raises(QueueingError):
        required_rate_vector([])


@given(lams, taus, cvs)
def test_round_trip(lam, tau, cv):
    # R - lam ~ 1/tau cancels; relative error grows like 1e-16 * lam * tau
    assume(lam * tau <= 1e4)
    r = required_rate_general(UserDemand(lam, tau), cv)
    assert sojourn_time(ServiceSpec(r, cv), lam) == pytest.approx(tau, rel=1e-9)


@given(lams, taus, cvs, cvs)
def test_deterministic_service_needs_least_rate(lam, tau, c1, c2):
    d = UserDemand(lam, tau)
    lo, hi = sorted((c1, c2))
    assert required_rate_general(d, lo) <= required_rate_general(d, hi)
    assert required_rate(d) <= required_rate_general(d, hi)
    assert required_rate(d) == required_rate_general(d, 0.0)


@given(st.floats(min_value=1e-2, max_value=1e4), st.floats(min_value=1e-5, max_value=10.0))
def test_strictly_increasing_in_cv(lam, tau):
    d = UserDemand(lam, tau)
    assert required_rate_general(d, 0.5) < required_rate_general(d, 1.0)


@given(lams, taus)
def test_automatic_stability(lam, tau):
    assert required_rate(UserDemand(lam, tau)) > lam


@given(lams, taus, st.floats(min_value=1.01, max_value=10.0))
def test_monotone_in_demand(lam, tau, k):
    base = required_rate(UserDemand(lam, tau))
    assert required_rate(UserDemand(lam, tau * k)) < base
    assert required_rate(UserDemand(lam * k, tau)) > base
