"""Closed-form trajectories, orbit conditions and stability multipliers.

Everything here is independent of the state-vector simulator and serves as
its oracle. Powers of the golden ratio never appear on the main path; they
are rewritten as integer Fibonacci numbers, and angle reductions go through
:func:`qtmchaos.drive.wrap_sum`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .drive import Angle, DriveSequence, fib_mod, fib_number, wrap, wrap_sum


@dataclass(frozen=True)
class CumulativeAngles:
    c_plus: float
    c_minus: float
    a_m: float
    b_m: float


@dataclass(frozen=True)
class StabilityReport:
    m: int
    delta: float
    m11: float
    m22: float
    m11_limit: int
    tape_m: float = math.nan
    tape_m_limit: float = math.nan


def _alpha(alphas, j: int) -> float:
    """alpha_j from a list holding alpha_1 at index 0; alpha_0 = 0."""
    return 0.0 if j <= 0 else float(alphas[j - 1])


def _need(alphas, m: int):
    if len(alphas) < m:
        raise ValueError(f"need alpha_1..alpha_{m}, got {len(alphas)} angles")


# -- primitives -----------------------------------------------------------

def cumulative_plus(m: int, alphas: Sequence, phi0: float = 0.0) -> float:
    """Total rotation of the ``|+>`` primitive after step 2m: phi0 + sum alpha_j."""
    if m < 0:
        raise ValueError("m must be >= 0")
    _need(alphas, m)
    return wrap(math.fsum([phi0] + [float(a) for a in alphas[:m]]))


def cumulative_minus(n: int, alphas: Sequence, phi0: float = 0.0) -> float:
    """Rotation angle of the ``|->`` primitive at step n, by the step recursion.

    Each rotation adds alpha_m; each QCNOT acts as lambda3 on the head and
    flips the sign of the angle.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    _need(alphas, (n + 1) // 2)
    c = wrap(phi0)
    for k in range(1, n + 1):
        c = wrap(c + float(alphas[(k - 1) // 2])) if k % 2 else wrap(-c)
    return c


def cumulative_minus_closed(n: int, alphas: Sequence, phi0: float = 0.0) -> float:
    """Alternating-sum closed form of :func:`cumulative_minus`."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return wrap(phi0)
    m = (n + 1) // 2
    _need(alphas, m)
    alt = math.fsum((-1) ** j * float(alphas[j - 1]) for j in range(1, m + 1))
    if n % 2 == 0:
        return wrap((-1) ** m * phi0 + (-1) ** (m - 1) * alt)
    return wrap((-1) ** (m - 1) * phi0 + (-1) ** m * alt)


def primitive_bloch(n: int, sign: str, alphas: Sequence, phi0: float = 0.0) -> Tuple[float, float]:
    """Head (lambda2, lambda3) of the entanglement-free trajectory from ``|phi0>|sign>``."""
    if sign == "+":
        c = cumulative_plus((n + 1) // 2, alphas, phi0)
    elif sign == "-":
        c = cumulative_minus(n, alphas, phi0)
    else:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    return math.sin(c), -math.cos(c)


# -- superposed head ------------------------------------------------------

def ab_direct(m: int, alphas: Sequence) -> Tuple[float, float]:
    """A_m = alpha_m + alpha_{m-2} + ..., B_m = alpha_{m-1} + alpha_{m-3} + ..."""
    _need(alphas, m)
    a = math.fsum(_alpha(alphas, j) for j in range(m, 0, -2))
    b = math.fsum(_alpha(alphas, j) for j in range(m - 1, 0, -2))
    return wrap(a), wrap(b)


def ab_fibonacci(m: int, alpha1) -> Tuple[float, float]:
    """A_m, B_m for the Fibonacci drive from Fibonacci-number sums.

    Sums of every other Fibonacci number telescope:
    A_m = alpha1 (F(m+1) - [m even]), B_m = alpha1 (F(m) - [m odd]).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    alpha1 = Angle.parse(alpha1)
    even = m % 2 == 0
    a = wrap_sum([(alpha1, fib_number(m + 1) - (1 if even else 0))])
    b = wrap_sum([(alpha1, fib_number(m) - (0 if even else 1))])
    return a, b


def cumulative_angles(m: int, alphas: Sequence) -> CumulativeAngles:
    a, b = ab_direct(m, alphas)
    return CumulativeAngles(cumulative_plus(m, alphas), cumulative_minus(2 * m, alphas), a, b)


def _superposed(a: float, b: float, parity: str) -> Tuple[float, float]:
    if parity == "even":
        return math.cos(a) * math.sin(b), -math.cos(a) * math.cos(b)
    if parity == "odd":
        return math.cos(b) * math.sin(a), -math.cos(b) * math.cos(a)
    raise ValueError(f"parity must be 'even' (n = 2m) or 'odd' (n = 2m - 1), got {parity!r}")


def head_bloch_superposed(m: int, parity: str, alpha1) -> Tuple[float, float]:
    """Head (lambda2, lambda3) from ``|0>|0>`` under the Fibonacci drive.

    ``parity='even'`` gives step n = 2m, ``'odd'`` gives n = 2m - 1.
    """
    return _superposed(*ab_fibonacci(m, alpha1), parity)


def head_bloch_at(n: int, alpha1) -> Tuple[float, float]:
    """:func:`head_bloch_superposed` indexed by step number n >= 0."""
    if n == 0:
        return 0.0, -1.0
    m = (n + 1) // 2
    return head_bloch_superposed(m, "even" if n % 2 == 0 else "odd", alpha1)


def head_bloch_from_angles(n: int, alphas: Sequence) -> Tuple[float, float]:
    """Head (lambda2, lambda3) from ``|0>|0>`` for an arbitrary angle list."""
    if n == 0:
        return 0.0, -1.0
    m = (n + 1) // 2
    a, b = ab_direct(m, alphas)
    return _superposed(a, b, "even" if n % 2 == 0 else "odd")


def head_bloch_series(alphas: Sequence, steps: int) -> np.ndarray:
    """(steps + 1, 2) head (lambda2, lambda3) from ``|0>|0>``, any angle list.

    Runs A_m = alpha_m + A_{m-2}, B_m = A_{m-1} instead of re-summing.
    """
    _need(alphas, (steps + 1) // 2)
    out = np.empty((steps + 1, 2))
    out[0] = (0.0, -1.0)
    a_prev, a = 0.0, 0.0  # A_{m-2}, A_{m-1}
    for m in range(1, (steps + 1) // 2 + 1):
        a_prev, a = a, wrap(float(alphas[m - 1]) + a_prev)
        b = a_prev
        for n, parity in ((2 * m - 1, "odd"), (2 * m, "even")):
            if n <= steps:
                out[n] = _superposed(a, b, parity)
    return out


def primitive_bloch_series(alphas: Sequence, steps: int, sign: str,
                           phi0: float = 0.0) -> np.ndarray:
    """(steps + 1, 2) head (lambda2, lambda3) of a primitive, stepwise."""
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    _need(alphas, (steps + 1) // 2)
    c = wrap(phi0)
    out = np.empty((steps + 1, 2))
    out[0] = (math.sin(c), -math.cos(c))
    for k in range(1, steps + 1):
        if k % 2:
            c = wrap(c + float(alphas[(k - 1) // 2]))
        elif sign == "-":
            c = wrap(-c)
        out[k] = (math.sin(c), -math.cos(c))
    return out


# -- periodic orbits of the head ------------------------------------------

def _require_exact(alpha1) -> Tuple[int, int]:
    alpha1 = Angle.parse(alpha1)
    if alpha1.exact is None:
        raise ValueError("periodicity needs an exact rational multiple of pi "
                         f"(e.g. '2/5 pi'), got {alpha1}")
    return alpha1.exact


def _orbit_conditions(p: int, mod: int, m: int, f_m_minus1: int, f_m_plus1: int,
                      f_m_plus2: int) -> bool:
    sign = 1 if m % 2 == 0 else -1
    plus_ok = p * (f_m_plus2 - 1) % mod == 0
    minus_ok = p * (sign - f_m_minus1) % mod == 0
    return_ok = p * (f_m_plus1 - 1) % mod == 0
    return plus_ok and minus_ok and return_ok


def periodic_orbit_check(alpha1, m: int) -> bool:
    """Whether the head orbit from ``|0>|0>`` has period 2m.

    With alpha1 = (p/q) pi all three congruences are checked mod 2q:
    alpha1 (F(m+2) - 1) = 0, alpha1 ((-1)^m - F(m-1)) = 0 and
    alpha_{m+1} = alpha1.
    """
    p, q = _require_exact(alpha1)
    if m < 1:
        raise ValueError("m must be >= 1")
    mod = 2 * q
    return _orbit_conditions(p, mod, m, fib_mod(m - 1, mod), fib_mod(m + 1, mod),
                             fib_mod(m + 2, mod))


def find_periodic_orbit(alpha1, m_max: int = 10 ** 6) -> Optional[int]:
    """Smallest m <= m_max passing :func:`periodic_orbit_check`, else None."""
    p, q = _require_exact(alpha1)
    mod = 2 * q
    f = [0, 1 % mod, 1 % mod, 2 % mod]  # F(m-1), F(m), F(m+1), F(m+2) at m = 1
    for m in range(1, m_max + 1):
        if _orbit_conditions(p, mod, m, f[0], f[2], f[3]):
            return m
        f = [f[1], f[2], f[3], (f[2] + f[3]) % mod]
    return None


# -- head stability -------------------------------------------------------

def head_stability(m: int, delta: float, alpha1=None) -> StabilityReport:
    """Multipliers of a head deviation over 2m steps around a periodic orbit.

    M11 = cos(delta F(m)) sin(delta F(m-1)) / sin(delta),
    M22 = cos(delta F(m)) cos(delta F(m-1)) / cos(delta); their delta -> 0
    limits are F(m-1) and 1. If ``alpha1`` is given (with sin(alpha1) != 0)
    the tape multiplier at the same m is filled in too.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    if delta == 0:
        raise ValueError("delta must be nonzero (the multipliers divide by sin(delta))")
    if not abs(delta) < 0.1:
        raise ValueError("|delta| must be below 0.1")
    dm = delta * fib_number(m)
    dm1 = delta * fib_number(m - 1)
    m11 = math.cos(dm) * math.sin(dm1) / math.sin(delta)
    m22 = math.cos(dm) * math.cos(dm1) / math.cos(delta)
    tape_m = tape_lim = math.nan
    if alpha1 is not None:
        tape_m, tape_lim = tape_stability(m, delta, alpha1)
    return StabilityReport(m, float(delta), m11, m22, fib_number(m - 1), tape_m, tape_lim)


# -- tape -----------------------------------------------------------------

def _tape_argument(n: int, alpha1: Angle, delta: float) -> Tuple[float, int]:
    """Phase and sign of lambda3 of the tape at step n: lambda3 = sign * cos(phase)."""
    h = n // 2
    if n % 4 in (0, 1):
        return wrap_sum([(alpha1, fib_number(h + 1) - 1), (float(delta), fib_number(h))]), -1
    return wrap_sum([(alpha1, fib_number(h + 1)), (float(delta), fib_number(h))]), 1


def tape_lambda3(n: int, alpha1, delta: float = 0.0) -> float:
    """Tape lambda3 at step n from ``|0>|0>``, head rotated by delta and drive perturbed.

    -cos(alpha'_{[n/2]+1} - alpha1) for n = 0, 1 (mod 4) and
    +cos(alpha'_{[n/2]+1}) for n = 2, 3 (mod 4), where
    alpha'_k = alpha_k + delta F(k-1).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    phase, sign = _tape_argument(n, Angle.parse(alpha1), delta)
    return sign * math.cos(phase)


def _tape_deviation(n: int, alpha1: Angle, delta: float) -> float:
    """lambda3'(n) - lambda3(n) of the tape, without cancellation.

    Uses cos(x + e) - cos(x) = -2 sin(x + e/2) sin(e/2) with e = delta F([n/2]).
    """
    h = n // 2
    f_h = fib_number(h)
    if n % 4 in (0, 1):
        sign, k = -1, fib_number(h + 1) - 1
    else:
        sign, k = 1, fib_number(h + 1)
    mid = wrap_sum([(alpha1, k), (float(delta) / 2, f_h)])
    half_eps = wrap_sum([(float(delta) / 2, f_h)])
    return -2.0 * sign * math.sin(mid) * math.sin(half_eps)


def tape_stability(m: int, delta: float, alpha1) -> Tuple[float, float]:
    """(finite-delta, delta -> 0) multiplier M of a tape deviation from step 2 to 2m + 2.

    The finite value is the ratio of :func:`tape_lambda3` deviations at
    steps 2m + 2 and 2; M_limit = F(m+1) sin(alpha_{m+2}) / sin(alpha1).
    The two describe the same quantity only for even m (period 2m = 0 mod 4);
    for odd m step 2m + 2 falls on the other branch of the tape formula.
    """
    alpha1 = Angle.parse(alpha1)
    if m < 1:
        raise ValueError("m must be >= 1")
    s1 = wrap_sum([(alpha1, 1)])
    if (alpha1.exact is not None and alpha1.exact[0] % alpha1.exact[1] == 0) or \
            abs(math.sin(s1)) < 1e-12:
        raise ValueError("tape multiplier undefined for sin(alpha1) = 0")
    if delta == 0:
        raise ValueError("delta must be nonzero")
    f_next = fib_number(m + 1)
    big = wrap_sum([(alpha1, fib_number(m + 2))])
    finite = _tape_deviation(2 * m + 2, alpha1, delta) / _tape_deviation(2, alpha1, delta)
    limit = f_next * math.sin(big) / math.sin(s1)
    return finite, limit


def _tape_residues(p: int, q: int, length: int) -> list:
    """lambda3 of the tape at steps 2h (unperturbed) as cos(s_h pi / q); returns s_h mod 2q."""
    mod = 2 * q
    out = []
    f_prev, f = 0, 1  # F(h), F(h+1)
    for h in range(length):
        r = p * f % mod  # alpha_{h+1} in units of pi/q
        out.append((r - p + q) % mod if h % 2 == 0 else r)
        f_prev, f = f, (f_prev + f) % mod
    return out


def _pisano(modulus: int) -> int:
    if modulus == 1:
        return 1
    a, b = 0, 1
    for i in range(1, 6 * modulus + 1):
        a, b = b, (a + b) % modulus
        if a == 0 and b == 1:
            return i
    raise RuntimeError("unreachable: Pisano period is at most 6 * modulus")


def tape_orbit_check(alpha1, m: int) -> bool:
    """Whether the unperturbed tape Bloch sequence from ``|0>|0>`` has period 2m.

    Decided exactly: all tape angles are integer multiples of pi/q, and
    cos(a pi/q) = cos(b pi/q) iff a = +-b (mod 2q).
    """
    p, q = _require_exact(alpha1)
    if m < 1:
        raise ValueError("m must be >= 1")
    mod = 2 * q
    span = 2 * _pisano(mod)
    s = _tape_residues(p, q, span + m)
    return all(s[h + m] in (s[h], (-s[h]) % mod) for h in range(span))


def tape_orbit_search(alpha1, m_max: int, parity: Optional[str] = None) -> Optional[int]:
    """Smallest m <= m_max with a tape orbit of period 2m, optionally only m odd/even."""
    for m in range(1, m_max + 1):
        if parity == "odd" and m % 2 == 0 or parity == "even" and m % 2 == 1:
            continue
        if tape_orbit_check(alpha1, m):
            return m
    return None


# -- head D^2 for the first steps -----------------------------------------

# D^2(n) = const + sum coef * cos(k_alpha * alpha1 + k_delta * delta)
_TABLE1 = {
    0: (1.0, [(-1.0, 0, 1)]),
    1: (1.0, [(-1.0, 0, 1)]),
    2: (0.5, [(0.25, 2, 2), (-0.5, 2, 1), (-0.5, 0, 1), (0.25, 2, 0)]),
    3: (0.25, [(-0.25, 0, 2)]),
    4: (0.25, [(-0.25, 0, 2)]),
    5: (0.5, [(-0.25, 2, 3), (-0.25, 0, 3), (0.25, 2, 2), (-0.25, 2, -1), (-0.25, 0, 1), (0.25, 2, 0)]),
    6: (0.5, [(0.25, 6, 4), (-0.25, 6, 3), (-0.25, 0, 3), (-0.25, 6, 1), (-0.25, 0, 1), (0.25, 6, 0)]),
    7: (0.5, [(-0.25, 6, 5), (-0.25, 0, 5), (0.25, 6, 4), (-0.25, 6, -1), (-0.25, 0, 1), (0.25, 6, 0)]),
    8: (0.5, [(0.25, 8, 6), (-0.25, 8, 5), (-0.25, 0, 5), (-0.25, 8, 1), (-0.25, 0, 1), (0.25, 8, 0)]),
    9: (0.5, [(-0.25, 8, 8), (-0.25, 0, 8), (0.25, 8, 6), (-0.25, 8, -2), (-0.25, 0, 2), (0.25, 8, 0)]),
    10: (0.5, [(0.25, 16, 10), (-0.25, 16, 8), (-0.25, 0, 8), (-0.25, 16, 2), (-0.25, 0, 2), (0.25, 16, 0)]),
    11: (0.5, [(-0.25, 16, 13), (-0.25, 0, 13), (0.25, 16, 10), (-0.25, 16, -3), (-0.25, 0, 3), (0.25, 16, 0)]),
    12: (0.5, [(0.25, 24, 16), (-0.25, 24, 13), (-0.25, 0, 13), (-0.25, 24, 3), (-0.25, 0, 3), (0.25, 24, 0)]),
}
TABLE1_MAX_STEP = max(_TABLE1)


def table1_d2(n: int, alpha1, delta: float) -> float:
    """Closed-form head D^2(n) for n <= 12, Fibonacci drive from ``|0>|0>``."""
    if n not in _TABLE1:
        raise ValueError(f"no closed form for step {n}; available for 0..{TABLE1_MAX_STEP}")
    a1 = float(Angle.parse(alpha1))
    const, terms = _TABLE1[n]
    return const + math.fsum(c * math.cos(ka * a1 + kd * delta) for c, ka, kd in terms)


def reference_drive(alpha1) -> DriveSequence:
    return DriveSequence("fibonacci", Angle.parse(alpha1))
