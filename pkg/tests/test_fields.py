import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qboxbloch.fields import (
    Constant, FieldProfile, Gaussian, Pulse, Rectangular, constant_field, evaluate,
)

times = st.floats(-50, 50, allow_nan=False)


@given(times)
def test_empty_profile(t):
    assert not evaluate(FieldProfile(), t).any()


@given(times)
def test_constant_term(t):
    np.testing.assert_array_equal(evaluate(constant_field([1, 0, 0]), t), [1, 0, 0])


def test_gaussian_peak_normalised():
    amp = np.array([0.3, 1j, -0.5])
    p = Pulse(amp, envelope=Gaussian(center=4.0, width=0.7))
    np.testing.assert_allclose(evaluate(FieldProfile([p]), 4.0), amp)
    assert Gaussian(0.0, 1.0)(1.0) == pytest.approx(np.exp(-0.5))


def test_carrier_convention():
    p = Pulse([1, 0, 0], carrier_frequency=2.0, phase=0.25)
    assert p(1.5)[0] == pytest.approx(np.exp(-1j * (3.0 + 0.25)))


def test_rectangular_window():
    env = Rectangular(1.0, 2.0)
    assert [env(t) for t in (0.99, 1.0, 1.5, 2.0)] == [0.0, 1.0, 1.0, 0.0]


def test_invalid_envelopes():
    with pytest.raises(ValueError):
        Gaussian(0.0, 0.0)
    with pytest.raises(ValueError):
        Rectangular(2.0, 1.0)
    with pytest.raises(ValueError):
        Pulse([1, 0])


def test_superposition():
    a = Pulse([1, 0, 0], 1.0)
    b = Pulse([0, 2, 0], 0.0, envelope=Constant())
    t = 0.4
    np.testing.assert_allclose(FieldProfile([a, b])(t), a(t) + b(t))


@settings(max_examples=50)
@given(times, st.floats(0.1, 5), st.floats(-3, 3))
def test_evaluate_is_pure(t, width, w):
    prof = FieldProfile([Pulse([1, 1j, 0], w, 0.1, Gaussian(0.0, width))])
    assert evaluate(prof, t).tobytes() == evaluate(prof, t).tobytes()
