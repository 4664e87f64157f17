import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from toroidal_psido.errors import InvalidWeightError, OutOfWindowError
from toroidal_psido.weights import (
    WeightFunction,
    bracket,
    constant_weight,
    lattice_difference,
    power_bracket,
    require_valid,
    tabulated_weight,
    verify_difference_estimate,
    verify_growth,
    weight_from_spec,
)


def test_eval_examples():
    assert bracket().eval(0) == 1.0
    assert bracket().eval(3) == pytest.approx(np.sqrt(10), rel=1e-15)
    assert power_bracket(2).eval(2) == pytest.approx(17 ** 0.25, rel=1e-15)


def test_nonpositive_value_is_rejected():
    w = WeightFunction(lambda k: k, 1.0, 1.0, 1.0, name="identity")
    with pytest.raises(InvalidWeightError):
        w(np.array([0.0, 1.0]))


def test_exponent_ordering_is_enforced():
    with pytest.raises(InvalidWeightError):
        WeightFunction(lambda k: 1 + 0 * k, 1.0, 0.5, 1.0)
    with pytest.raises(InvalidWeightError):
        WeightFunction(lambda k: 1 + 0 * k, 0.0, 0.0, 0.0)


def test_bracket_growth_constants_on_window():
    report = verify_growth(bracket(), 64)
    assert report.passed
    assert report.constants["C0"] == pytest.approx(1 / np.sqrt(2), rel=1e-14)
    assert report.constants["C1"] == pytest.approx(1.0, rel=1e-14)


def test_constant_weight_growth():
    report = verify_growth(constant_weight(), 64)
    assert report.passed
    assert report.constants["C0"] == report.constants["C1"] == 1.0


def test_decreasing_weight_fails_growth():
    w = WeightFunction(lambda k: 1.0 / (1.0 + np.abs(k)), 0.0, 0.0, 1.0, name="decreasing")
    report = verify_growth(w, 64)
    assert not report.passed
    assert any(o["bound"].startswith("lower") for o in report.offending)


def test_declared_constant_violation_names_the_frequency():
    w = WeightFunction(bracket().func, 1.0, 1.0, 1.0, C0=0.9, C1=1.0)
    report = verify_growth(w, 16)
    assert not report.passed
    assert report.offending[0]["k"] in (-1, 1)


@pytest.mark.parametrize("p", [1, 2, 3])
def test_power_brackets_pass_on_every_window(p):
    for K in (8, 64, 256):
        assert verify_growth(power_bracket(p), K).passed


def test_difference_estimate_bracket():
    report = verify_difference_estimate(bracket(), 2, 64)
    assert report.passed
    assert report.constants["alpha=1,gamma=0"] <= 2.0
    assert np.isfinite(report.constants["alpha=0,gamma=1"])


def test_difference_estimate_constant_weight_vanishes():
    report = verify_difference_estimate(constant_weight(), 2, 64)
    for key, value in report.constants.items():
        alpha, gamma = (int(part.split("=")[1]) for part in key.split(","))
        if alpha + gamma >= 1:
            assert value == 0.0


def test_difference_estimate_needs_alpha():
    with pytest.raises(ValueError):
        verify_difference_estimate(bracket(), 0)


@given(a=st.integers(-200, 200), length=st.integers(1, 100))
def test_differences_telescope(a, length):
    w = bracket()
    b = a + length
    total = lattice_difference(w, np.arange(a, b).astype(float), 1).sum()
    assert total == pytest.approx(w.eval(b) - w.eval(a), abs=1e-12)


def test_tabulated_weight_window():
    table = {k: float(np.sqrt(1 + k * k)) for k in range(-10, 11)}
    w = tabulated_weight(table, 1.0, 1.0, 1.0)
    assert w.eval(3) == pytest.approx(np.sqrt(10))
    with pytest.raises(OutOfWindowError):
        w(np.array([11.0]))
    assert require_valid(w) is w


def test_tabulated_weight_must_be_contiguous():
    with pytest.raises(InvalidWeightError):
        tabulated_weight({0: 1.0, 2: 2.0}, 0.0, 0.0, 1.0)


def test_require_valid_rejects_bad_declaration():
    bad = WeightFunction(lambda k: 1.0 / (1.0 + np.abs(k)), 0.0, 0.0, 1.0)
    with pytest.raises(InvalidWeightError):
        require_valid(bad)


def test_weight_from_spec():
    assert weight_from_spec(None).name == "bracket"
    assert weight_from_spec({"name": "power_bracket", "p": 2}).eval(2) == pytest.approx(17 ** 0.25)
    assert weight_from_spec("constant").eval(100) == 1.0
    with pytest.raises(InvalidWeightError):
        weight_from_spec({"name": "nope"})
