"""Exact truncated power series in q with integer coefficients.

A :class:`TruncatedSeries` of order ``N`` knows the coefficients of
``q^0 .. q^N`` and nothing beyond.  Every binary operation returns a series
whose order is the smaller of the operand orders, so a coefficient is never
reported unless it is determined.

Substitution values are always signed powers ``±q^e`` (:class:`Monomial`),
which is all that the q-Pochhammer products and the specialized generating
functions downstream ever need.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence


class NonUnitConstantTerm(ArithmeticError):
    """Raised when inverting a series whose constant term is not +1 or -1."""


@dataclass(frozen=True)
class Monomial:
    """The value ``sign * q**exponent``."""

    sign: int
    exponent: int

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError(f"monomial sign must be +1 or -1, got {self.sign!r}")
        if not isinstance(self.exponent, int) or self.exponent < 0:
            raise ValueError(f"monomial exponent must be a nonnegative int, got {self.exponent!r}")

    def __mul__(self, other: Monomial) -> Monomial:
        return Monomial(self.sign * other.sign, self.exponent + other.exponent)

    def __neg__(self) -> Monomial:
        return Monomial(-self.sign, self.exponent)

    def shift(self, k: int) -> Monomial:
        """Multiply by ``q**k``."""
        return Monomial(self.sign, self.exponent + k)

    def __str__(self) -> str:
        sign = "-" if self.sign < 0 else ""
        if self.exponent == 0:
            return f"{sign}1"
        if self.exponent == 1:
            return f"{sign}q"
        return f"{sign}q^{self.exponent}"

    @classmethod
    def parse(cls, text: str) -> Monomial:
        """Parse ``"1"``, ``"-1"``, ``"q"``, ``"-q^3"`` and the like."""
        m = re.fullmatch(r"\s*([+-]?)\s*(?:(1)|q(?:\^(\d+))?)\s*", text)
        if m is None:
            raise ValueError(f"cannot parse monomial {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        if m.group(2):
            return cls(sign, 0)
        return cls(sign, int(m.group(3)) if m.group(3) else 1)


class _Infinity:
    """Marker for a parameter sent to infinity (only where a limit is documented)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    __str__ = __repr__


INFINITY = _Infinity()

ONE = Monomial(1, 0)


class TruncatedSeries:
    """Power series ``sum c_n q^n`` known exactly for ``0 <= n <= order``."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable[int], order: int | None = None):
        cs = [int(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("order must be >= 0")
        if len(cs) <= order:
            cs.extend([0] * (order + 1 - len(cs)))
        else:
            del cs[order + 1:]
        self.coeffs: tuple[int, ...] = tuple(cs)
        self.order: int = order

    @classmethod
    def zero(cls, order: int) -> TruncatedSeries:
        return cls((), order)

    @classmethod
    def one(cls, order: int) -> TruncatedSeries:
        return cls((1,), order)

    @classmethod
    def from_monomial(cls, m: Monomial, order: int) -> TruncatedSeries:
        cs = [0] * (order + 1)
        if m.exponent <= order:
            cs[m.exponent] = m.sign
        return cls(cs, order)

    def __getitem__(self, n: int) -> int:
        if not 0 <= n <= self.order:
            raise IndexError(f"coefficient q^{n} is outside 0..{self.order}")
        return self.coeffs[n]

    def __len__(self) -> int:
        return self.order + 1

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.order, self.coeffs))

    def __repr__(self) -> str:
        terms = []
        for n, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if n == 0 else f"{c}*q^{n}")
        body = " + ".join(terms) if terms else "0"
        return f"TruncatedSeries({body} + O(q^{self.order + 1}))"

    def truncate(self, order: int) -> TruncatedSeries:
        if order > self.order:
            raise ValueError(f"cannot extend a series of order {self.order} to {order}")
        return TruncatedSeries(self.coeffs, order)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def first_nonzero(self) -> int | None:
        for n, c in enumerate(self.coeffs):
            if c:
                return n
        return None

    # arithmetic

    def __add__(self, other) -> TruncatedSeries:
        if isinstance(other, int):
            other = TruncatedSeries((other,), self.order)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other) -> TruncatedSeries:
        if isinstance(other, int):
            other = TruncatedSeries((other,), self.order)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return add(self, -other)

    def __rsub__(self, other) -> TruncatedSeries:
        return (-self) + other

    def __mul__(self, other) -> TruncatedSeries:
        if isinstance(other, int):
            return TruncatedSeries([other * c for c in self.coeffs], self.order)
        if isinstance(other, Monomial):
            return shift_scale(self, other)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other) -> TruncatedSeries:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return mul(self, invert(other))

    # O(N) updates for binomial factors; used on hot paths instead of mul/invert

    def times_one_minus(self, m: Monomial) -> TruncatedSeries:
        """Return ``self * (1 - m)``."""
        cs = list(self.coeffs)
        e, s = m.exponent, m.sign
        for n in range(self.order, e - 1, -1):
            cs[n] -= s * cs[n - e]
        return TruncatedSeries(cs, self.order)

    def over_one_minus(self, m: Monomial) -> TruncatedSeries:
        """Return ``self / (1 - m)``; ``m`` must have positive exponent."""
        if m.exponent == 0:
            raise NonUnitConstantTerm(f"1 - ({m}) has constant term {1 - m.sign}")
        cs = list(self.coeffs)
        e, s = m.exponent, m.sign
        for n in range(e, self.order + 1):
            cs[n] += s * cs[n - e]
        return TruncatedSeries(cs, self.order)

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict | str) -> TruncatedSeries:
        if isinstance(obj, str):
            obj = json.loads(obj)
        coeffs = [int(c) for c in obj["coeffs"]]
        order = int(obj["order"])
        if len(coeffs) != order + 1:
            raise ValueError(f"expected {order + 1} coefficients, got {len(coeffs)}")
        return cls(coeffs, order)


def add(s: TruncatedSeries, t: TruncatedSeries) -> TruncatedSeries:
    order = min(s.order, t.order)
    return TruncatedSeries([s.coeffs[n] + t.coeffs[n] for n in range(order + 1)], order)


def mul(s: TruncatedSeries, t: TruncatedSeries) -> TruncatedSeries:
    order = min(s.order, t.order)
    a, b = s.coeffs, t.coeffs
    out = [0] * (order + 1)
    for i in range(order + 1):
        ai = a[i]
        if not ai:
            continue
        for j in range(order + 1 - i):
            bj = b[j]
            if bj:
                out[i + j] += ai * bj
    return TruncatedSeries(out, order)


def shift_scale(s: TruncatedSeries, m: Monomial) -> TruncatedSeries:
    """Multiply ``s`` by the monomial ``m``."""
    e = m.exponent
    out = [0] * (s.order + 1)
    for n in range(e, s.order + 1):
        out[n] = m.sign * s.coeffs[n - e]
    return TruncatedSeries(out, s.order)


def invert(s: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse; the constant term must be a unit of the integers."""
    c0 = s.coeffs[0]
    if c0 not in (1, -1):
        raise NonUnitConstantTerm(f"constant term {c0} is not invertible over the integers")
    a = s.coeffs
    out = [0] * (s.order + 1)
    out[0] = c0
    for n in range(1, s.order + 1):
        acc = 0
        for k in range(1, n + 1):
            if a[k]:
                acc += a[k] * out[n - k]
        # c0 is its own inverse
        out[n] = -c0 * acc
    return TruncatedSeries(out, s.order)


def poch_finite(a: Monomial, step: int, n: int, order: int) -> TruncatedSeries:
    """``prod_{j<n} (1 - a q^{j*step})`` to order ``order``."""
    if step < 1:
        raise ValueError("step must be positive")
    result = TruncatedSeries.one(order)
    for j in range(n):
        m = a.shift(j * step)
        if m.exponent > order:
            break
        result = result.times_one_minus(m)
    return result


def poch_inf(a: Monomial, step: int, order: int) -> TruncatedSeries:
    """``prod_{j>=0} (1 - a q^{j*step})``; factors beyond ``q^order`` are exactly 1."""
    if step < 1:
        raise ValueError("step must be positive")
    n_factors = max(0, (order - a.exponent) // step + 1)
    return poch_finite(a, step, n_factors, order)


def eval_real(s: TruncatedSeries | Sequence[int], q: float) -> tuple[float, float]:
    """Evaluate at real ``0 < q < 1``.

    Returns ``(value, last_term)`` where ``last_term`` is the magnitude of the
    highest-order nonzero term, a cheap convergence heuristic.
    """
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    coeffs = s.coeffs if isinstance(s, TruncatedSeries) else tuple(s)
    terms = []
    last = 0.0
    log_q = math.log(q)
    for n, c in enumerate(coeffs):
        if c:
            # c may exceed float range only together with a tiny q**n
            mag = math.exp(math.log(abs(c)) + n * log_q)
            t = math.copysign(mag, c)
            terms.append(t)
            last = mag
    return math.fsum(terms), last
