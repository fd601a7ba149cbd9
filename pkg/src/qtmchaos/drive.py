"""Rotation-angle sequences driving the Turing head.

Angles are always handed out reduced into ``[0, 2*pi)``. Fibonacci angles
are never computed from powers of the golden ratio on the main path:
``alpha_m = alpha_1 * F(m)`` is reduced with integer arithmetic when
``alpha_1`` is a rational multiple of pi, and with an mpmath product at
enough precision to hold ``F(m)`` exactly otherwise.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

TWO_PI = 2.0 * math.pi
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
GOLDEN_CONJ = (1.0 - math.sqrt(5.0)) / 2.0
CLOSED_FORM_PREC = 80
FIB_MAX_INDEX = 1_000_000

RULES = ("fibonacci", "fibonacci_perturbed", "constant", "arithmetic")

_PI_RE = re.compile(r"^([+-]?\d*)(?:/(\d+))?\*?pi(?:/(\d+))?$")


@dataclass(frozen=True)
class Angle:
    """An angle in radians, optionally known exactly as ``(p/q) * pi``."""

    approx: float
    exact: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        if not math.isfinite(self.approx):
            raise ValueError(f"angle must be finite, got {self.approx}")
        if self.exact is not None:
            p, q = (int(v) for v in self.exact)
            if q == 0:
                raise ValueError("zero denominator")
            if q < 0:
                p, q = -p, -q
            g = math.gcd(p, q)
            object.__setattr__(self, "exact", (p // g, q // g))

    @classmethod
    def rational(cls, p: int, q: int = 1) -> "Angle":
        """The angle ``(p/q) * pi``."""
        frac = Fraction(p, q)
        with mpmath.workprec(80):
            approx = float(mpmath.mpf(frac.numerator) * mpmath.pi / frac.denominator)
        return cls(approx, (frac.numerator, frac.denominator))

    @classmethod
    def radians(cls, value: float) -> "Angle":
        return cls(float(value))

    @classmethod
    def parse(cls, text: Union[str, float, "Angle"]) -> "Angle":
        """Parse ``"2/5 pi"``, ``"2pi/5"``, ``"pi"``, ``"-pi/3"`` or decimal radians."""
        if isinstance(text, Angle):
            return text
        if isinstance(text, (int, float)):
            return cls.rational(0) if text == 0 else cls.radians(float(text))
        s = str(text).strip().lower().replace("π", "pi")
        s = re.sub(r"[\s()]", "", s)
        match = _PI_RE.match(s)
        if match:
            num, den1, den2 = match.groups()
            if den1 and den2:
                raise ValueError(f"cannot parse angle {text!r}")
            p = {"": 1, "+": 1, "-": -1}.get(num)
            if p is None:
                p = int(num)
            return cls.rational(p, int(den1 or den2 or 1))
        try:
            value = float(s)
        except ValueError:
            raise ValueError(f"cannot parse angle {text!r}; use 'p/q pi' or radians") from None
        return cls.rational(0) if value == 0 else cls.radians(value)

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def __float__(self) -> float:
        return self.approx

    def __str__(self) -> str:
        if self.exact is None:
            return repr(self.approx)
        p, q = self.exact
        return f"{p} pi" if q == 1 else f"{p}/{q} pi"


Term = Tuple[Union[Angle, float], int]


def wrap_sum(terms: Iterable[Term]) -> float:
    """``sum(k * a) mod 2*pi`` for (angle, integer multiplier) pairs.

    Exact angles contribute through a Fraction of pi; real ones through an
    mpmath product wide enough to keep every multiplier exactly, so the
    result is good to double precision however large the multipliers get.
    """
    frac = Fraction(0)
    reals = []
    for a, k in terms:
        k = int(k)
        if k == 0:
            continue
        if isinstance(a, Angle) and a.exact is not None:
            frac += Fraction(a.exact[0] * k, a.exact[1])
        else:
            reals.append((float(a), k))
    frac %= 2
    bits = 96 + max([abs(k).bit_length() for _, k in reals] + [0])
    with mpmath.workprec(bits):
        x = mpmath.mpf(frac.numerator) * mpmath.pi / frac.denominator
        for a, k in reals:
            x += mpmath.mpf(a) * k
        x = mpmath.fmod(x, 2 * mpmath.pi)
        if x < 0:
            x += 2 * mpmath.pi
        r = float(x)
    return 0.0 if r >= TWO_PI else r


def wrap(x: float) -> float:
    """Reduce a float into [0, 2*pi)."""
    r = math.fmod(x, TWO_PI)
    if r < 0:
        r += TWO_PI
    return 0.0 if r >= TWO_PI else r


def wrapped_difference(a: float, b: float) -> float:
    """Signed distance between two angles on the circle, in (-pi, pi]."""
    d = math.remainder(a - b, TWO_PI)
    return d


def fib_number(m: int) -> int:
    """F(m) with F(0) = 0, F(1) = 1, by fast-doubling integer recurrence."""
    if isinstance(m, bool) or int(m) != m:
        raise TypeError(f"Fibonacci index must be an integer, got {m!r}")
    m = int(m)
    if m < 0:
        raise ValueError(f"Fibonacci index must be >= 0, got {m}")
    if m > FIB_MAX_INDEX:
        raise ValueError(f"Fibonacci index {m} exceeds supported range {FIB_MAX_INDEX}")
    a, b = 0, 1  # F(k), F(k+1)
    for bit in bin(m)[2:]:
        c = a * (2 * b - a)
        d = a * a + b * b
        a, b = (d, c + d) if bit == "1" else (c, d)
    return a


def fib_mod(m: int, modulus: int) -> int:
    """F(m) mod ``modulus`` without forming F(m)."""
    a, b = 0, 1 % modulus
    for bit in bin(m)[2:]:
        c = a * (2 * b - a) % modulus
        d = (a * a + b * b) % modulus
        a, b = (d, (c + d) % modulus) if bit == "1" else (c, d)
    return a % modulus


def fibonacci_closed_form(m: int, prec: int = CLOSED_FORM_PREC) -> float:
    """(beta**m - gamma**m) / sqrt(5), evaluated with ``prec`` mantissa bits.

    Plain float64 loses about m * beta**m * 2**-53 through the rounding of
    beta alone, which is already ~2e-9 at m = 30.
    """
    with mpmath.workprec(prec):
        r5 = mpmath.sqrt(5)
        beta, gamma = (1 + r5) / 2, (1 - r5) / 2
        return float((beta ** m - gamma ** m) / r5)


def fibonacci_angles(alpha1, count: int) -> list:
    """``alpha_1 .. alpha_count`` of ``alpha_{m+1} = alpha_m + alpha_{m-1}``, ``alpha_0 = 0``.

    Returns Angles; exact ones when ``alpha1`` is a rational multiple of pi.
    """
    alpha1 = Angle.parse(alpha1)
    if count < 1:
        raise ValueError("count must be >= 1")
    out = []
    if alpha1.exact is not None:
        p, q = alpha1.exact
        mod = 2 * q
        f_prev, f = 0, 1
        for _ in range(count):
            out.append(Angle.rational((p * f) % mod, q))
            f_prev, f = f, (f_prev + f) % mod
        return out
    f_prev, f = 0, 1
    for _ in range(count):
        out.append(Angle(wrap_sum([(alpha1, f)])))
        f_prev, f = f, f_prev + f
    return out


def fibonacci_angle_closed_form(alpha1, m: int, prec: int = CLOSED_FORM_PREC) -> float:
    """alpha1 (beta**m - gamma**m)/sqrt(5) mod 2*pi. Cross-checks only, small m."""
    alpha1 = Angle.parse(alpha1)
    with mpmath.workprec(prec):
        if alpha1.exact is not None:
            a1 = mpmath.mpf(alpha1.exact[0]) * mpmath.pi / alpha1.exact[1]
        else:
            a1 = mpmath.mpf(alpha1.approx)
        r5 = mpmath.sqrt(5)
        beta, gamma = (1 + r5) / 2, (1 - r5) / 2
        two_pi = 2 * mpmath.pi
        r = mpmath.fmod(a1 * (beta ** m - gamma ** m) / r5, two_pi)
        if r < 0:
            r += two_pi
        return wrap(float(r))


def perturbed_angles(alpha1, delta: float, count: int) -> np.ndarray:
    """``alpha'_1 .. alpha'_count`` for the recurrence seeded ``(delta, alpha1)``.

    Evaluated as ``alpha1 F(m) + delta F(m-1) mod 2*pi``.
    """
    alpha1 = Angle.parse(alpha1)
    if count < 1:
        raise ValueError("count must be >= 1")
    out = np.empty(count)
    f_prev, f = 0, 1
    for i in range(count):
        out[i] = wrap_sum([(alpha1, f), (float(delta), f_prev)])
        f_prev, f = f, f_prev + f
    return out


def perturbed_angles_by_recurrence(alpha1, delta: float, count: int) -> np.ndarray:
    """Same sequence as :func:`perturbed_angles`, by literally iterating the sum.

    Runs the unreduced recurrence in mpmath wide enough for its growth and
    reduces each term at the end.
    """
    alpha1 = Angle.parse(alpha1)
    bits = 128 + int(0.7 * count)
    out = np.empty(count)
    with mpmath.workprec(bits):
        if alpha1.exact is not None:
            a1 = mpmath.mpf(alpha1.exact[0]) * mpmath.pi / alpha1.exact[1]
        else:
            a1 = mpmath.mpf(alpha1.approx)
        prev, cur = mpmath.mpf(delta), a1
        two_pi = 2 * mpmath.pi
        for i in range(count):
            r = mpmath.fmod(cur, two_pi)
            if r < 0:
                r += two_pi
            out[i] = float(r)
            prev, cur = cur, prev + cur
    out[out >= TWO_PI] = 0.0
    return out


def delta_fib(delta: float, m: int) -> float:
    """delta * F(m)."""
    return float(delta) * fib_number(m)


def regular_angles(rule: str, alpha1, delta: float, count: int) -> np.ndarray:
    """Zero-Lyapunov drives.

    ``constant``: every angle is ``alpha1``; ``delta`` does not touch the
    sequence (it only perturbs the initial head state).
    ``arithmetic``: ``m * alpha1 - (m - 1) * delta``.
    """
    alpha1 = Angle.parse(alpha1)
    if count < 1:
        raise ValueError("count must be >= 1")
    if rule == "constant":
        return np.full(count, wrap_sum([(alpha1, 1)]))
    if rule == "arithmetic":
        return np.array([wrap_sum([(alpha1, m), (float(delta), -(m - 1))])
                         for m in range(1, count + 1)])
    raise ValueError(f"unknown regular rule {rule!r}; expected 'constant' or 'arithmetic'")


@dataclass(frozen=True)
class DriveSequence:
    """A named rule producing the head rotation angles alpha_1, alpha_2, ...

    ``delta`` is the perturbation of the companion run: it seeds
    ``alpha'_0 = delta`` (the initial head rotation) for every rule, and
    additionally shifts the angles for ``fibonacci_perturbed`` and
    ``arithmetic``.
    """

    rule: str
    alpha1: Angle
    delta: float = 0.0

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown drive rule {self.rule!r}; expected one of {RULES}")
        object.__setattr__(self, "alpha1", Angle.parse(self.alpha1))
        object.__setattr__(self, "delta", float(self.delta))
        if self.rule == "fibonacci" and self.delta != 0.0:
            raise ValueError("use rule 'fibonacci_perturbed' for a nonzero delta")

    def angles(self, count: int) -> np.ndarray:
        """Float array of ``alpha_1 .. alpha_count`` (index 0 holds alpha_1)."""
        if count <= 0:
            return np.empty(0)
        if self.rule == "fibonacci":
            return np.array([a.approx for a in fibonacci_angles(self.alpha1, count)])
        if self.rule == "fibonacci_perturbed":
            return perturbed_angles(self.alpha1, self.delta, count)
        return regular_angles(self.rule, self.alpha1, self.delta, count)

    @property
    def head_offset(self) -> float:
        """Rotation ``alpha'_0`` applied to the initial head state."""
        return self.delta

    def perturbed(self, delta: float) -> "DriveSequence":
        """The companion drive for a perturbation ``delta``."""
        rule = "fibonacci_perturbed" if self.rule == "fibonacci" else self.rule
        if delta == 0.0 and rule == "fibonacci_perturbed":
            rule = "fibonacci"
        return DriveSequence(rule, self.alpha1, delta)

    def describe(self) -> str:
        return f"{self.rule}(alpha1={self.alpha1}, delta={self.delta!r})"


def as_float_angles(alphas: Sequence) -> np.ndarray:
    return np.array([float(a) for a in alphas], dtype=float)
