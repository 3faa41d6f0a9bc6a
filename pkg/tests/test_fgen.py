import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrelent.fgen import (
    BUILTIN_NAMES,
    classify_hf,
    gf,
    hf,
    integrand_g,
    make_builtin,
    parse_spec,
    verify_representation,
)
from qrelent.quadrature import QuadratureError

SPECS = ["log", "power:0.3", "power:0.5", "scaled_power:0.5", "tsallis:0.2", "tsallis:0.7",
         "power_entropy:0.3", "power_entropy:0.5", "power_entropy:0.7"]


def power_data(spec):
    """(scale, exponent) of ``scale * (1 - x**exponent)`` written out by hand."""
    head, _, tail = spec.partition(":")
    v = float(tail)
    return {
        "power": (1.0, v),
        "scaled_power": (1.0 / (v * (1 - v)), v),
        "tsallis": (1.0 / (1 - v), 1 - v),
        "power_entropy": (1.0, 1 - v),
    }[head]


def g_exact(spec, p, q):
    # int sqrt(pq) / ((t+p)(t+q)) m(t) dt in closed form
    r = math.sqrt(p * q)
    if spec == "log":
        return r / p if p == q else r * (math.log(q) - math.log(p)) / (q - p)
    c, e = power_data(spec)
    if p == q:
        return c * e * p ** e
    return c * r * (q ** e - p ** e) / (q - p)


@pytest.mark.parametrize("spec", SPECS)
def test_f_of_one_is_zero(spec):
    assert parse_spec(spec)(1.0) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("spec", SPECS)
def test_representation_matches_closed_form(spec):
    report = verify_representation(parse_spec(spec))
    assert report.passed
    assert report.max_abs_error <= 1e-8


@pytest.mark.parametrize("p", [0.02, 0.1, 0.37, 0.5, 0.9, 0.98])
def test_log_hf_is_one(p):
    assert hf(make_builtin("neg_log"), p, method="quad") == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("spec", SPECS[1:])
@pytest.mark.parametrize("p", [0.05, 0.3, 0.5, 0.8])
def test_power_hf_closed_form(spec, p):
    c, e = power_data(spec)
    f = parse_spec(spec)
    assert hf(f, p, method="quad") == pytest.approx(c * e * p ** e, abs=1e-8)
    assert hf(f, p, method="closed") == pytest.approx(c * e * p ** e, abs=1e-14)


@pytest.mark.parametrize("spec", SPECS)
@pytest.mark.parametrize("p, q", [(0.1, 0.9), (0.25, 0.5), (0.6, 0.6), (0.01, 0.99)])
def test_gf_against_closed_form(spec, p, q):
    assert gf(parse_spec(spec), p, q) == pytest.approx(g_exact(spec, p, q), abs=1e-9)


def test_gf_symmetric_exactly():
    f = make_builtin("power_entropy", 0.5)
    assert gf(f, 0.2, 0.7) == gf(f, 0.7, 0.2)


def test_gf_diagonal_is_hf():
    f = make_builtin("tsallis", 0.4)
    assert gf(f, 0.3, 0.3) == pytest.approx(hf(f, 0.3), abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.sampled_from(SPECS))
def test_cauchy_schwarz(p, q, spec):
    f = parse_spec(spec)
    g = gf(f, p, q)
    assert g * g <= hf(f, p) * hf(f, q) + 1e-10
    assert g <= hf(f, math.sqrt(p * q)) + 1e-10


def test_integrand_kernel():
    assert integrand_g(0.0, 0.5, 0.5) == pytest.approx(2.0)
    assert integrand_g(1.0, 0.25, 1.0) == pytest.approx(0.5 / (1.25 * 2.0))


@pytest.mark.parametrize("spec, expected", [("log", "constant")] + [(s, "increasing") for s in SPECS[1:]])
def test_classify(spec, expected):
    assert classify_hf(parse_spec(spec)) == expected


def test_make_builtin_is_cached():
    assert make_builtin("power_entropy", 0.5) is parse_spec("power_entropy:0.5")
    assert make_builtin("log") is make_builtin("neg_log")


@pytest.mark.parametrize("bad", ["nope", "power", "power:1.5", "tsallis:0", "power:x", "log:0.5"])
def test_bad_specs(bad):
    with pytest.raises(ValueError):
        parse_spec(bad)


def test_builtin_names():
    assert set(BUILTIN_NAMES) == {"neg_log", "neg_power", "scaled_power", "tsallis", "power_entropy"}


@pytest.mark.parametrize("spec", SPECS)
def test_generators_decreasing_convex(spec):
    f = parse_spec(spec)
    x = np.linspace(0.05, 5.0, 200)
    y = f(x)
    assert np.all(np.diff(y) < 0)
    assert np.all(np.diff(y, 2) > -1e-12)


def test_limits_at_zero():
    assert math.isinf(make_builtin("neg_log").f_at_zero)
    assert make_builtin("tsallis", 0.5).f_at_zero == pytest.approx(2.0)
    assert make_builtin("power_entropy", 0.3).f_at_zero == 1.0


def test_hf_rejects_out_of_range():
    with pytest.raises(ValueError):
        hf(make_builtin("log"), 0.0)
    with pytest.raises(ValueError):
        hf(make_builtin("log"), 0.5, method="sideways")


def test_hf_auto_detects_wrong_closed_form():
    import dataclasses

    f = make_builtin("power_entropy", 0.5)
    broken = dataclasses.replace(f, hf_closed=lambda q: 2.0 * q ** 0.5)
    with pytest.raises(QuadratureError):
        hf(broken, 0.4)
