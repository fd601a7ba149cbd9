import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtmchaos.drive import (
    GOLDEN,
    GOLDEN_CONJ,
    Angle,
    DriveSequence,
    delta_fib,
    fib_mod,
    fib_number,
    fibonacci_angle_closed_form,
    fibonacci_angles,
    fibonacci_closed_form,
    perturbed_angles,
    perturbed_angles_by_recurrence,
    regular_angles,
    wrapped_difference,
)

TWO_PI = 2 * math.pi


def _fib_loop(m):
    a, b = 0, 1
    for _ in range(m):
        a, b = b, a + b
    return a


def _circ(a, b):
    return abs(wrapped_difference(a, b))


def _shift(delta, m):
    """delta * F(m-1) reduced mod 2 pi without float rounding of the product."""
    with mpmath.workprec(256):
        two_pi = 2 * mpmath.pi
        return float(mpmath.fmod(mpmath.mpf(delta) * _fib_loop(m - 1), two_pi) % two_pi)


def test_fib_numbers():
    assert fib_number(0) == 0
    assert fib_number(1) == 1
    assert fib_number(10) == 55
    assert fib_number(19) == 4181
    assert [fib_number(m) for m in range(200)] == [_fib_loop(m) for m in range(200)]
    assert fib_number(90) == 2880067194370816120


def test_fib_number_rejections():
    with pytest.raises(ValueError):
        fib_number(-1)
    with pytest.raises(ValueError):
        fib_number(10 ** 7)
    with pytest.raises(TypeError):
        fib_number(2.5)


@pytest.mark.parametrize("modulus", [1, 2, 5, 8, 10, 97])
def test_fib_mod(modulus):
    assert [fib_mod(m, modulus) for m in range(150)] == [_fib_loop(m) % modulus for m in range(150)]


def test_golden_identities():
    with mpmath.workprec(80):
        beta = (1 + mpmath.sqrt(5)) / 2
        gamma = (1 - mpmath.sqrt(5)) / 2
        for m in range(1, 31):
            assert abs(beta ** m - (fib_number(m) * beta + fib_number(m - 1))) <= 1e-9
            assert abs(gamma ** m - (fib_number(m) * gamma + fib_number(m - 1))) <= 1e-9
    for m in range(1, 31):
        assert abs(fibonacci_closed_form(m) - fib_number(m)) <= 1e-9
        # float64 beta carries its own rounding; relative agreement is what survives
        lhs, rhs = GOLDEN ** m, fib_number(m) * GOLDEN + fib_number(m - 1)
        assert abs(lhs - rhs) <= 1e-14 * lhs
        assert abs(GOLDEN_CONJ ** m - (fib_number(m) * GOLDEN_CONJ + fib_number(m - 1))) <= 1e-9


@pytest.mark.parametrize("text,exact", [
    ("2/5 pi", (2, 5)), ("2/5pi", (2, 5)), ("2pi/5", (2, 5)), ("pi", (1, 1)),
    ("-pi/3", (-1, 3)), ("4/10 pi", (2, 5)), ("(2/5) pi", (2, 5)), ("2π/5", (2, 5)),
    ("0", (0, 1)),
])
def test_angle_parse_exact(text, exact):
    a = Angle.parse(text)
    assert a.exact == exact
    assert abs(a.approx - exact[0] / exact[1] * math.pi) <= 1e-15


def test_angle_parse_decimal_and_str():
    a = Angle.parse("0.7")
    assert a.exact is None and a.approx == 0.7
    assert str(Angle.rational(2, 5)) == "2/5 pi"
    assert Angle.parse(str(Angle.rational(-3, 7))) == Angle.rational(-3, 7)
    assert Angle.parse(repr(0.1234)).approx == 0.1234
    with pytest.raises(ValueError):
        Angle.parse("two pi")


def test_fibonacci_angles_examples():
    alphas = fibonacci_angles(Angle.rational(2, 5), 40)
    assert alphas[4].exact == (0, 1)  # alpha_5 = 5 * 2pi/5 = 2pi = 0
    assert alphas[1] == alphas[0]  # F(2) = 1
    exact = [a.exact for a in alphas]
    assert exact[:20] == exact[20:40]
    assert all(exact[:40 - k] != exact[k:40] for k in range(1, 20))


def test_fibonacci_angles_exact_against_fraction_recurrence():
    # recurrence in units of pi, reduced mod 2 with Fractions
    for p, q in [(2, 5), (1, 4), (3, 7), (-5, 12)]:
        prev, cur = Fraction(0), Fraction(p, q) % 2
        want = []
        for _ in range(300):
            want.append(cur)
            prev, cur = cur, (prev + cur) % 2
        got = [Fraction(*a.exact) for a in fibonacci_angles(Angle.rational(p, q), 300)]
        assert got == want


def test_fibonacci_angles_real_against_high_precision():
    a1 = 0.7
    got = fibonacci_angles(Angle.radians(a1), 400)
    with mpmath.workprec(600):
        for m in (1, 2, 50, 137, 400):
            want = float(mpmath.fmod(mpmath.mpf(a1) * _fib_loop(m), 2 * mpmath.pi))
            assert _circ(got[m - 1].approx, want) <= 1e-15


def test_angles_reduced_into_range():
    for a in fibonacci_angles(Angle.radians(-2.3), 100):
        assert 0.0 <= a.approx < TWO_PI
    for v in perturbed_angles(Angle.radians(5.9), -0.01, 100):
        assert 0.0 <= v < TWO_PI


@pytest.mark.parametrize("alpha1", [Angle.rational(2, 5), Angle.radians(0.7), Angle.radians(3.0)])
def test_closed_form_vs_recurrence(alpha1):
    alphas = fibonacci_angles(alpha1, 30)
    for m in range(1, 31):
        assert _circ(alphas[m - 1].approx, fibonacci_angle_closed_form(alpha1, m)) <= 1e-9


def test_perturbed_examples():
    a1 = Angle.rational(2, 5)
    np.testing.assert_array_equal(perturbed_angles(a1, 0.0, 50),
                                  [a.approx for a in fibonacci_angles(a1, 50)])
    p = perturbed_angles(a1, 0.001, 4)
    assert _circ(p[1], a1.approx + 0.001) <= 1e-15
    # F(3) = 2: alpha'_4 = alpha_4 + 2 delta, alpha_4 = 3 alpha1
    assert _circ(p[3], 6 * math.pi / 5 + 0.002) <= 1e-15


@pytest.mark.parametrize("alpha1", [Angle.rational(2, 5), Angle.radians(0.7)])
@pytest.mark.parametrize("delta", [1e-3, -0.37, 2.5])
def test_perturbed_two_routes_and_linearity(alpha1, delta):
    direct = perturbed_angles(alpha1, delta, 40)
    recur = perturbed_angles_by_recurrence(alpha1, delta, 40)
    base = [a.approx for a in fibonacci_angles(alpha1, 40)]
    for m in range(1, 41):
        assert _circ(direct[m - 1], recur[m - 1]) <= 1e-12
        assert _circ(direct[m - 1] - base[m - 1], _shift(delta, m)) <= 1e-12


def test_delta_fib():
    assert delta_fib(0.001, 0) == 0
    assert delta_fib(0.001, 1) == 0.001
    assert delta_fib(0.001, 19) == pytest.approx(4.181, abs=1e-12)


def test_regular_angles():
    a1 = Angle.radians(1.1)
    assert regular_angles("constant", a1, 0.0, 7)[6] == 1.1
    assert regular_angles("constant", a1, 0.5, 7)[6] == 1.1
    assert _circ(regular_angles("arithmetic", a1, 0.0, 3)[2], 3.3) <= 1e-15
    assert _circ(regular_angles("arithmetic", a1, 0.001, 3)[2], 3.3 - 0.002) <= 1e-15
    with pytest.raises(ValueError, match="rule"):
        regular_angles("logistic", a1, 0.0, 3)


def test_drive_sequence():
    d = DriveSequence("fibonacci", "2/5 pi")
    assert d.alpha1 == Angle.rational(2, 5)
    p = d.perturbed(1e-3)
    assert p.rule == "fibonacci_perturbed" and p.head_offset == 1e-3
    np.testing.assert_array_equal(p.angles(10), perturbed_angles(d.alpha1, 1e-3, 10))
    assert DriveSequence("arithmetic", "0.5").perturbed(0.1).rule == "arithmetic"
    with pytest.raises(ValueError):
        DriveSequence("fibonacci", "0.5", delta=0.1)
    with pytest.raises(ValueError):
        DriveSequence("chaotic", "0.5")


def test_exact_mode_deterministic():
    a = DriveSequence("fibonacci_perturbed", Angle.rational(3, 11), 1e-4).angles(500)
    b = DriveSequence("fibonacci_perturbed", Angle.rational(3, 11), 1e-4).angles(500)
    assert a.tobytes() == b.tobytes()


@settings(max_examples=50, deadline=None)
@given(st.floats(-10, 10, allow_nan=False), st.floats(-1, 1, allow_nan=False))
def test_perturbation_linearity_property(a1, delta):
    alpha1 = Angle.radians(a1)
    base = fibonacci_angles(alpha1, 40)
    pert = perturbed_angles(alpha1, delta, 40)
    for m in (1, 2, 7, 23, 40):
        assert _circ(pert[m - 1] - base[m - 1].approx, _shift(delta, m)) <= 1e-12
