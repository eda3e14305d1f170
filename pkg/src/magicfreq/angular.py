"""Clebsch-Gordan coefficients and Wigner 3j/6j symbols for half-integer momenta.

Every coefficient is evaluated from the Racah factorial sum using exact
integer arithmetic (``math.factorial`` on Python integers, rational
bookkeeping with ``fractions.Fraction``) and a single square root at the
very end.  For the small momenta needed for alkali D lines (j <= 5) this
gives results correct to the last floating-point digit with no risk of
cancellation between large alternating terms.

Quantum numbers are passed around as :class:`HalfInt`, which stores twice
the value so that integer and half-odd-integer momenta share one exact
representation.  The Condon-Shortley phase convention is used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

__all__ = ["HalfInt", "wigner3j", "wigner6j", "clebsch_gordan", "projections"]


@dataclass(frozen=True, order=True)
class HalfInt:
    """An angular-momentum quantum number, stored as twice its value.

    ``HalfInt(3)`` is 3/2; use :meth:`of` to build one from a number or a
    string such as ``"3/2"``.
    """

    twice: int

    @classmethod
    def of(cls, value) -> "HalfInt":
        """Coerce an int, exact-half float, "p/2"-style string, or HalfInt."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a quantum number")
        if isinstance(value, int):
            return cls(2 * value)
        if isinstance(value, float):
            twice = round(2.0 * value)
            if abs(2.0 * value - twice) > 1e-9:
                raise ValueError(f"{value!r} is not an integer or half-integer")
            return cls(twice)
        if isinstance(value, str):
            text = value.strip()
            if "/" in text:
                num, _, den = text.partition("/")
                if den.strip() != "2":
                    raise ValueError(f"cannot parse half-integer from {value!r}")
                return cls(int(num))
            return cls(2 * int(text))
        raise TypeError(f"cannot interpret {type(value).__name__} as HalfInt")

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __float__(self) -> float:
        return self.twice / 2.0

    def __int__(self) -> int:
        if self.twice % 2:
            raise ValueError(f"{self} is not an integer")
        return self.twice // 2

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __abs__(self) -> "HalfInt":
        return HalfInt(abs(self.twice))

    def __add__(self, other) -> "HalfInt":
        return HalfInt(self.twice + HalfInt.of(other).twice)

    __radd__ = __add__

    def __sub__(self, other) -> "HalfInt":
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __rsub__(self, other) -> "HalfInt":
        return HalfInt(HalfInt.of(other).twice - self.twice)

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self.twice})"

    @staticmethod
    def range_inclusive(lo: "HalfInt", hi: "HalfInt") -> list["HalfInt"]:
        """All values lo, lo+1, ..., hi (integer steps)."""
        return [HalfInt(t) for t in range(lo.twice, hi.twice + 1, 2)]


def projections(j) -> list[HalfInt]:
    """The projections m = -j ... +j in integer steps."""
    j = HalfInt.of(j)
    if j.twice < 0:
        raise ValueError(f"j={j} must be non-negative")
    return [HalfInt(t) for t in range(-j.twice, j.twice + 1, 2)]


def _check_magnitude(name: str, j: HalfInt) -> None:
    if j.twice < 0:
        raise ValueError(f"{name}={j} must be a non-negative half-integer")


def _check_projection(jname: str, j: HalfInt, mname: str, m: HalfInt) -> None:
    _check_magnitude(jname, j)
    if abs(m.twice) > j.twice:
        raise ValueError(f"|{mname}|={abs(m)} exceeds {jname}={j}")
    if (j.twice - m.twice) % 2:
        raise ValueError(
            f"{mname}={m} and {jname}={j} differ by a non-integer (parity mismatch)"
        )


def _triangle_ok(ta: int, tb: int, tc: int) -> bool:
    # triangle inequality plus integer perimeter, all in twice-units
    if (ta + tb + tc) % 2:
        return False
    return ta + tb >= tc and tb + tc >= ta and tc + ta >= tb


_fact = math.factorial


def _delta_frac(ta: int, tb: int, tc: int) -> Fraction:
    return Fraction(
        _fact((ta + tb - tc) // 2)
        * _fact((ta - tb + tc) // 2)
        * _fact((-ta + tb + tc) // 2),
        _fact((ta + tb + tc) // 2 + 1),
    )


@lru_cache(maxsize=None)
def _w3j_core(tj1, tj2, tj3, tm1, tm2, tm3):
    """Sign and exact squared value of a 3j symbol, in twice-units.

    Returns ``(0, Fraction(0))`` for all selection-rule zeros.
    """
    if tm1 + tm2 + tm3 != 0:
        return 0, Fraction(0)
    if not _triangle_ok(tj1, tj2, tj3):
        return 0, Fraction(0)

    kmin = max(0, (tj2 - tj3 - tm1) // 2, (tj1 - tj3 + tm2) // 2)
    kmax = min((tj1 + tj2 - tj3) // 2, (tj1 - tm1) // 2, (tj2 + tm2) // 2)
    total = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = (
            _fact(k)
            * _fact((tj1 + tj2 - tj3) // 2 - k)
            * _fact((tj1 - tm1) // 2 - k)
            * _fact((tj2 + tm2) // 2 - k)
            * _fact((tj3 - tj2 + tm1) // 2 + k)
            * _fact((tj3 - tj1 - tm2) // 2 + k)
        )
        total += Fraction(-1 if k % 2 else 1, den)
    if total == 0:
        return 0, Fraction(0)

    prefac = _delta_frac(tj1, tj2, tj3) * (
        _fact((tj1 + tm1) // 2)
        * _fact((tj1 - tm1) // 2)
        * _fact((tj2 + tm2) // 2)
        * _fact((tj2 - tm2) // 2)
        * _fact((tj3 + tm3) // 2)
        * _fact((tj3 - tm3) // 2)
    )
    sign = 1 if total > 0 else -1
    if ((tj1 - tj2 - tm3) // 2) % 2:
        sign = -sign
    return sign, prefac * total * total


@lru_cache(maxsize=None)
def _w6j_core(tj1, tj2, tj3, tj4, tj5, tj6):
    """Sign and exact squared value of a 6j symbol, in twice-units."""
    triads = (
        (tj1, tj2, tj3),
        (tj1, tj5, tj6),
        (tj4, tj2, tj6),
        (tj4, tj5, tj3),
    )
    for ta, tb, tc in triads:
        if not _triangle_ok(ta, tb, tc):
            return 0, Fraction(0)

    s1 = (tj1 + tj2 + tj3) // 2
    s2 = (tj1 + tj5 + tj6) // 2
    s3 = (tj4 + tj2 + tj6) // 2
    s4 = (tj4 + tj5 + tj3) // 2
    t1 = (tj1 + tj2 + tj4 + tj5) // 2
    t2 = (tj2 + tj3 + tj5 + tj6) // 2
    t3 = (tj3 + tj1 + tj6 + tj4) // 2

    total = Fraction(0)
    for k in range(max(s1, s2, s3, s4), min(t1, t2, t3) + 1):
        den = (
            _fact(k - s1)
            * _fact(k - s2)
            * _fact(k - s3)
            * _fact(k - s4)
            * _fact(t1 - k)
            * _fact(t2 - k)
            * _fact(t3 - k)
        )
        total += Fraction(-_fact(k + 1) if k % 2 else _fact(k + 1), den)
    if total == 0:
        return 0, Fraction(0)

    prefac = (
        _delta_frac(tj1, tj2, tj3)
        * _delta_frac(tj1, tj5, tj6)
        * _delta_frac(tj4, tj2, tj6)
        * _delta_frac(tj4, tj5, tj3)
    )
    sign = 1 if total > 0 else -1
    return sign, prefac * total * total


def wigner3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol (j1 j2 j3; m1 m2 m3).

    Returns exactly 0.0 when the triangle condition or m1+m2+m3=0 fails;
    raises ValueError for malformed quantum numbers (negative j, |m| > j,
    or j and m differing by a non-integer).
    """
    j1, j2, j3 = HalfInt.of(j1), HalfInt.of(j2), HalfInt.of(j3)
    m1, m2, m3 = HalfInt.of(m1), HalfInt.of(m2), HalfInt.of(m3)
    _check_projection("j1", j1, "m1", m1)
    _check_projection("j2", j2, "m2", m2)
    _check_projection("j3", j3, "m3", m3)
    sign, square = _w3j_core(j1.twice, j2.twice, j3.twice, m1.twice, m2.twice, m3.twice)
    if sign == 0:
        return 0.0
    return sign * math.sqrt(square)


def wigner6j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6j symbol {j1 j2 j3; j4 j5 j6}.

    Returns exactly 0.0 when any of the four triads violates the triangle
    condition.
    """
    js = [HalfInt.of(j) for j in (j1, j2, j3, j4, j5, j6)]
    for i, j in enumerate(js, start=1):
        _check_magnitude(f"j{i}", j)
    sign, square = _w6j_core(*(j.twice for j in js))
    if sign == 0:
        return 0.0
    return sign * math.sqrt(square)


def clebsch_gordan(j1, m1, j2, m2, J, M) -> float:
    """Clebsch-Gordan coefficient <j1,m1; j2,m2 | J,M> (Condon-Shortley).

    Zero when M != m1+m2 or the triangle condition fails.
    """
    j1, m1 = HalfInt.of(j1), HalfInt.of(m1)
    j2, m2 = HalfInt.of(j2), HalfInt.of(m2)
    J, M = HalfInt.of(J), HalfInt.of(M)
    _check_projection("j1", j1, "m1", m1)
    _check_projection("j2", j2, "m2", m2)
    _check_projection("J", J, "M", M)
    if m1.twice + m2.twice != M.twice:
        return 0.0
    sign, square = _w3j_core(j1.twice, j2.twice, J.twice, m1.twice, m2.twice, -M.twice)
    if sign == 0:
        return 0.0
    if ((j1.twice - j2.twice + M.twice) // 2) % 2:
        sign = -sign
    return sign * math.sqrt((J.twice + 1) * square)
