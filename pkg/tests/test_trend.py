"""Trend expression parsing, evaluation guards, and the sampled sup bound."""

import math

import numpy as np
import pytest

from biftrend.errors import DomainError, ExpressionError
from biftrend.trend import (
    TrendClassSpec,
    evaluate,
    parse,
    sup_bound,
    to_string,
)


@pytest.mark.parametrize(
    "text,t,want",
    [
        ("1+2*t", 3.0, 7.0),
        ("t^2", 2.0, 4.0),
        ("2^3^2", 0.0, 512.0),          # right-associative
        ("-t^2", 2.0, -4.0),            # unary minus binds looser than ^
        ("(1+t)^0.5", 3.0, 2.0),
        ("sin(t)+cos(t)", 0.0, 1.0),
        ("1/(1+t)", 1.0, 0.5),
        ("2*(t-1)", 4.0, 6.0),
        ("log(t)", math.e, 1.0),
        ("exp(-0.5*t)*sin(t)+1", 2.0, 1.3345118292392621),
    ],
)
def test_evaluate_scalar(text, t, want):
    got = evaluate(parse(text), t)
    assert isinstance(got, float)
    assert abs(got - want) < 1e-12, f"{text} at t={t}: {got!r} != {want!r}"


def test_evaluate_array_matches_scalar():
    expr = parse("exp(-t)*cos(3*t)+0.5")
    ts = np.linspace(0.0, 2.0, 17)
    vec = evaluate(expr, ts)
    assert vec.shape == ts.shape
    for t, v in zip(ts, vec):
        assert abs(v - evaluate(expr, float(t))) < 1e-15


@pytest.mark.parametrize(
    "text,offset",
    [
        ("2*+*t", 3),
        ("(t", 2),
        ("sin(t", 5),
        ("t @ 2", 2),
        ("", 0),
    ],
)
def test_parse_error_offsets(text, offset):
    with pytest.raises(ExpressionError) as err:
        parse(text)
    assert err.value.offset == offset, (
        f"parse({text!r}) reported offset {err.value.offset}, want {offset}"
    )
    assert f"offset {offset}" in str(err.value)


def test_parse_rejects_unknown_function():
    with pytest.raises(ExpressionError):
        parse("tan(t)")


def test_parse_rejects_oversized_source():
    with pytest.raises(ExpressionError):
        parse("1+" * 40_000 + "1")  # ~120 KiB


def test_parse_depth_guard():
    deep = "sin(" * 600 + "t" + ")" * 600
    with pytest.raises(ExpressionError):
        parse(deep)


@pytest.mark.parametrize(
    "text",
    ["0.5", "2*t+1", "sin(3*t)", "exp(-(t^2))", "1/(2+cos(t))", "-(t-0.5)^2"],
)
def test_to_string_round_trip(text):
    expr = parse(text)
    again = parse(to_string(expr))
    ts = np.linspace(0.0, 1.5, 11)
    a = evaluate(expr, ts)
    b = evaluate(again, ts)
    assert np.array_equal(a, b), f"round trip changed values for {text!r}"


# ---- evaluation guards ----


def test_divide_by_near_zero_raises():
    expr = parse("1/(t-1)")
    with pytest.raises(ExpressionError):
        evaluate(expr, 1.0)
    # fine away from the pole
    assert abs(evaluate(expr, 3.0) - 0.5) < 1e-15


def test_log_of_nonpositive_raises():
    with pytest.raises(ExpressionError):
        evaluate(parse("log(t)"), 0.0)
    with pytest.raises(ExpressionError):
        evaluate(parse("log(t-2)"), 1.0)


def test_fractional_power_of_negative_base_raises():
    with pytest.raises(ExpressionError):
        evaluate(parse("(t-2)^0.5"), 1.0)
    # integer powers of a negative base are fine
    assert evaluate(parse("(t-2)^2"), 1.0) == 1.0


def test_overflow_raises():
    with pytest.raises(ExpressionError):
        evaluate(parse("exp(t)*exp(t)*exp(t)"), 400.0)


# ---- sup bound ----


def test_sup_bound_constant():
    assert abs(sup_bound(parse("0.5"), 1.0) - 0.525) < 1e-12


def test_sup_bound_sine():
    got = sup_bound(parse("sin(t)"), 3.0)
    assert abs(got - 1.05) < 1e-3, f"sup|sin| * 1.05 on [0,3] should be ~1.05, got {got}"


def test_sup_bound_sign_insensitive():
    assert abs(sup_bound(parse("-2*t"), 1.0) - 2.1) < 1e-12


def test_sup_bound_rejects_small_m():
    with pytest.raises(DomainError):
        sup_bound(parse("t"), 1.0, m=100)


def test_sup_bound_rejects_bad_horizon():
    with pytest.raises(DomainError):
        sup_bound(parse("t"), 0.0)


# ---- trend class bookkeeping ----


def test_trend_class_spec_rho():
    spec = TrendClassSpec(L=2.0, k=1, gamma=0.5)
    assert spec.rho == pytest.approx(1.5)
    with pytest.raises(DomainError):
        TrendClassSpec(L=0.0, k=1, gamma=0.5)
    with pytest.raises(DomainError):
        TrendClassSpec(L=1.0, k=-1, gamma=0.5)
    with pytest.raises(DomainError):
        TrendClassSpec(L=1.0, k=1, gamma=1.5)
