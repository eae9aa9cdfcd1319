import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from isac_edge.errors import DimensionError, DomainError
from isac_edge.model import (classification_error, comm_sinr, db_to_linear, dbm_to_watts,
                             fit_error_model, linear_to_db, quality_gate, rate, sample_budget,
                             sensing_sinr, watts_to_dbm)
from conftest import make_cfg

finite = st.floats(-10, 10, allow_nan=False)
cplx = st.builds(complex, finite, finite)


def test_sensing_sinr_examples():
    assert sensing_sinr([1, 0], [1, 0], 1.0, 0.0) == 1.0
    assert sensing_sinr([1, 0], [0, 1], 0.5, 0.5) == 0.0
    w = [math.sqrt(0.5), math.sqrt(0.5) * 1j]
    # g^H conjugates g: [1, i] aligns with w, [1, -i] cancels it
    assert_allclose(sensing_sinr(w, [1, 1j], 1.0, 1.0), 1.0, rtol=1e-15)
    assert_allclose(sensing_sinr(w, [1, -1j], 1.0, 1.0), 0.0, atol=1e-15)


def test_comm_sinr_examples():
    assert comm_sinr([1, 0], [0, 1], [1, 0], 1.0) == 1.0
    assert comm_sinr([1, 0], [1, 0], [1, 0], 1.0) == 0.5
    assert comm_sinr([0, 0], [3, 1j], [1, 2], 1.0) == 0.0


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        sensing_sinr([1, 0], [1, 0, 0], 1.0, 0.0)
    with pytest.raises(DimensionError):
        comm_sinr([1, 0], [1], [1, 0], 1.0)


def test_rate():
    assert rate(0) == 0
    assert rate(1) == 1
    assert rate(3) == 2
    with pytest.raises(DomainError):
        rate(-0.1)


def test_sample_budget_examples():
    cfg = make_cfg(sensing_time=0.1)
    assert sample_budget(10.0, 1e9, cfg).v == 100
    b = sample_budget(1.0, 1.0, make_cfg(sensing_time=0.2))
    assert_allclose(b.comm_limit, 5.0)
    assert b.v == 5
    assert sample_budget(0.0, 10.0, cfg).v == 0


def test_classification_error():
    assert_allclose(classification_error(10, 1, 1), 0.1)
    assert classification_error(2, 2, 1) == 1.0
    assert_allclose(classification_error(100, 2.5845, 0.5317), 2.5845 * 100 ** -0.5317)
    with pytest.raises(DomainError):
        classification_error(0, 1, 1)


def test_quality_gate_boundary():
    assert quality_gate(100.0, 100.0)
    assert not quality_gate(99.9, 100.0)
    assert quality_gate(100.0, db_to_linear(1.0))


def test_db_conversions():
    assert_allclose(dbm_to_watts(-90), 1e-12, rtol=1e-12)
    assert_allclose(dbm_to_watts(30), 1.0, rtol=1e-12)
    for x in (-90.0, -70.0, 0.0, 23.7):
        assert_allclose(watts_to_dbm(dbm_to_watts(x)), x, rtol=1e-12, atol=1e-12)
        assert_allclose(linear_to_db(db_to_linear(x)), x, rtol=1e-12, atol=1e-12)


def test_fit_exact_recovery():
    v = np.array([10, 50, 100, 500, 1000])
    a, b = fit_error_model(list(zip(v, 2.0 / v)))
    assert_allclose((a, b), (2.0, 1.0), rtol=1e-9)
    a, b = fit_error_model(list(zip(v, v ** -0.5)))
    assert_allclose((a, b), (1.0, 0.5), rtol=1e-9)


def test_fit_noisy_matches_normal_equations():
    rng = np.random.default_rng(7)
    v = np.geomspace(20, 2000, 15)
    e = 2.5845 * v ** -0.5317 * np.exp(0.05 * rng.standard_normal(v.size))
    a, b = fit_error_model(list(zip(v, e)))
    # independent normal-equation solve for log E = c0 + c1 log v
    x = np.column_stack([np.ones_like(v), np.log(v)])
    c = np.linalg.solve(x.T @ x, x.T @ np.log(e))
    assert_allclose((math.log(a), -b), c, rtol=1e-10)
    assert abs(a - 2.5845) < 0.5 and abs(b - 0.5317) < 0.05


def test_fit_errors_and_warning():
    with pytest.raises(DomainError):
        fit_error_model([(10, 0.1)])
    with pytest.raises(DomainError):
        fit_error_model([(10, 0.1), (10, 0.2)])
    with pytest.warns(RuntimeWarning):
        fit_error_model([(10, 0.1), (100, 0.2)])


@given(st.lists(cplx, min_size=3, max_size=3), st.lists(cplx, min_size=3, max_size=3),
       st.lists(cplx, min_size=3, max_size=3), st.floats(0, 2 * math.pi))
def test_sinr_global_phase_invariance(w, f, h, theta):
    w, f, h = map(np.array, (w, f, h))
    rot = np.exp(1j * theta)
    assert_allclose(sensing_sinr(rot * w, rot * h, 1.0, 0.3), sensing_sinr(w, h, 1.0, 0.3),
                    rtol=1e-9, atol=1e-12)
    assert_allclose(comm_sinr(rot * f, rot * w, rot * h, 1.0), comm_sinr(f, w, h, 1.0),
                    rtol=1e-9, atol=1e-12)


@given(st.integers(1, 10_000), st.floats(0.1, 5), st.floats(0.05, 2))
def test_error_monotone(v, a, b):
    assert classification_error(v + 1, a, b) < classification_error(v, a, b)
    assert classification_error(v, a * 1.01, b) > classification_error(v, a, b)


@settings(max_examples=200)
@given(st.floats(0, 100), st.floats(0, 50), st.floats(0, 1e3), st.floats(0, 1e3))
def test_sample_budget_monotone(tau, dtau, sinr, dsinr):
    cfg = make_cfg(sensing_time=0.05)
    base = sample_budget(tau, sinr, cfg).v
    assert sample_budget(tau + dtau, sinr, cfg).v >= base
    assert sample_budget(tau, sinr + dsinr, cfg).v >= base


@given(st.floats(0.01, 10), st.floats(0.05, 2))
def test_fit_noiseless_property(a, b):
    v = np.array([1.0, 7.0, 40.0, 300.0])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fa, fb = fit_error_model(list(zip(v, a * v ** -b)))
    assert_allclose((fa, fb), (a, b), rtol=1e-9)
