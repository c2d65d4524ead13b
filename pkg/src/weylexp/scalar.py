"""Exact coefficient rings: Python ints and the golden integers Z[tau].

``tau = (1 + sqrt(5)) / 2`` satisfies ``tau**2 = tau + 1``.  Elements of
``Z[tau]`` are stored as integer pairs ``(a, b)`` meaning ``a + b*tau``.
"""
from __future__ import annotations

import math
from typing import Union


def gcd_int(a: int, b: int) -> int:
    """Nonnegative gcd, with ``gcd_int(0, 0) == 0``."""
    return math.gcd(a, b)


def _sign_real(p: int, q: int) -> int:
    """Exact sign of ``p + q*tau`` under the real embedding."""
    # p + q*tau = (2p + q + q*sqrt5) / 2
    u, v = 2 * p + q, q
    if u >= 0 and v >= 0:
        return 0 if (u == 0 and v == 0) else 1
    if u <= 0 and v <= 0:
        return -1
    # opposite signs: compare u^2 with 5 v^2
    if u > 0:
        return 1 if u * u > 5 * v * v else -1
    return 1 if 5 * v * v > u * u else -1


def _round_div(p: int, n: int) -> int:
    """Nearest integer to p/n (ties rounded up)."""
    if n < 0:
        p, n = -p, -n
    return (2 * p + n) // (2 * n)


class GoldenInt:
    """An element ``a + b*tau`` of the ring of golden integers."""

    __slots__ = ("a", "b")

    def __init__(self, a: int = 0, b: int = 0):
        self.a = int(a)
        self.b = int(b)

    @classmethod
    def coerce(cls, x: "Scalar") -> "GoldenInt":
        if isinstance(x, GoldenInt):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        raise TypeError(f"cannot coerce {type(x).__name__} to GoldenInt")

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, int):
            return GoldenInt(self.a + other, self.b)
        if isinstance(other, GoldenInt):
            return GoldenInt(self.a + other.a, self.b + other.b)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return GoldenInt(-self.a, -self.b)

    def __sub__(self, other):
        if isinstance(other, (int, GoldenInt)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return GoldenInt(self.a * other, self.b * other)
        if isinstance(other, GoldenInt):
            a, b, c, d = self.a, self.b, other.a, other.b
            return GoldenInt(a * c + b * d, a * d + b * c + b * d)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.unit_inverse() ** (-k)
        result, base = GoldenInt(1, 0), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "GoldenInt":
        """Galois conjugate, tau -> 1 - tau."""
        return GoldenInt(self.a + self.b, -self.b)

    def norm(self) -> int:
        return self.a * self.a + self.a * self.b - self.b * self.b

    def is_unit(self) -> bool:
        return abs(self.norm()) == 1

    def unit_inverse(self) -> "GoldenInt":
        n = self.norm()
        if abs(n) != 1:
            raise ZeroDivisionError(f"{self} is not a unit")
        return self.conj() * n

    def sign(self) -> int:
        """Sign under the real embedding tau -> (1+sqrt5)/2."""
        return _sign_real(self.a, self.b)

    def __float__(self) -> float:
        return self.a + self.b * (1 + math.sqrt(5)) / 2

    def divmod(self, other: "Scalar") -> tuple["GoldenInt", "GoldenInt"]:
        """Euclidean division: ``self = q*other + r`` with ``|N(r)| < |N(other)|``."""
        other = GoldenInt.coerce(other)
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Z[tau]")
        num = self * other.conj()
        q = GoldenInt(_round_div(num.a, n), _round_div(num.b, n))
        r = self - q * other
        assert abs(r.norm()) < abs(n), "Euclidean remainder too large"
        return q, r

    def exact_div(self, other: "Scalar") -> "GoldenInt":
        q, r = self.divmod(other)
        if r:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def divides(self, other: "Scalar") -> bool:
        if not self:
            return not other
        return not GoldenInt.coerce(other).divmod(self)[1]

    # comparison / hashing ----------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int):
            return self.b == 0 and self.a == other
        if isinstance(other, GoldenInt):
            return self.a == other.a and self.b == other.b
        return NotImplemented

    def __hash__(self):
        return hash(self.a) if self.b == 0 else hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a or self.b)

    def sort_key(self) -> tuple[int, int]:
        return (self.a, self.b)

    def __repr__(self):
        return f"GoldenInt({self.a}, {self.b})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*tau"
        return f"{self.a}{self.b:+d}*tau"


Scalar = Union[int, GoldenInt]

TAU = GoldenInt(0, 1)
SQRT5 = GoldenInt(-1, 2)  # 2*tau - 1


def simplify(x: Scalar) -> Scalar:
    """Collapse a golden integer with zero tau-part to a plain int."""
    if isinstance(x, GoldenInt) and x.b == 0:
        return x.a
    return x


def scalar_key(x: Scalar):
    """Sort key usable for both rings (ints sort as (x, 0))."""
    return (x, 0) if isinstance(x, int) else x.sort_key()


def canonical_associate(x: Scalar) -> GoldenInt:
    """The associate ``y = +-tau**k * x`` with ``y > 0`` and ``1 <= y/sqrt|N(y)| < tau``.

    Units map to 1; ``2 + tau`` and ``-(2*tau - 1)`` both map to ``2*tau - 1``.
    """
    y = GoldenInt.coerce(x)
    if not y:
        raise ValueError("canonical associate of zero")
    if y.sign() < 0:
        y = -y
    n = abs(y.norm())
    tau_inv = GoldenInt(-1, 1)
    tau_sq = GoldenInt(1, 1)
    # y > 0 throughout, so y >= sqrt(n) iff y^2 >= n
    while (y * y - n).sign() < 0:
        y = y * TAU
    while (y * y - tau_sq * n).sign() >= 0:
        y = y * tau_inv
    return y


def gcd_golden(x: Scalar, y: Scalar) -> GoldenInt:
    """Euclidean gcd in Z[tau], returned as its canonical associate."""
    x, y = GoldenInt.coerce(x), GoldenInt.coerce(y)
    if not x and not y:
        raise ValueError("gcd of zero ring elements")
    while y:
        x, y = y, x.divmod(y)[1]
    return canonical_associate(x)


def gcd_scalars(values) -> Scalar:
    """gcd of an iterable of scalars, in whichever ring they live."""
    values = list(values)
    if any(isinstance(v, GoldenInt) and v.b for v in values):
        nonzero = [v for v in values if v]
        if not nonzero:
            raise ValueError("gcd of zero ring elements")
        g = GoldenInt.coerce(nonzero[0])
        for v in nonzero[1:]:
            g = gcd_golden(g, v)
        return canonical_associate(g)
    g = 0
    for v in values:
        g = math.gcd(g, int(v.a) if isinstance(v, GoldenInt) else v)
    return g


def is_associate(x: Scalar, y: Scalar) -> bool:
    if not x or not y:
        return not x and not y
    return canonical_associate(x) == canonical_associate(y)


def exact_div_scalar(x: Scalar, k: int) -> Scalar:
    """Divide a scalar by a nonzero integer, raising if the quotient is not integral."""
    if isinstance(x, GoldenInt):
        if x.a % k or x.b % k:
            raise ArithmeticError(f"{k} does not divide {x}")
        return GoldenInt(x.a // k, x.b // k)
    if x % k:
        raise ArithmeticError(f"{k} does not divide {x}")
    return x // k


def parse_scalar(text: str) -> Scalar:
    """Inverse of ``str`` for both rings: ``'7'``, ``'-3*tau'``, ``'2+1*tau'``."""
    text = text.strip().replace(" ", "")
    if "tau" not in text:
        return int(text)
    if text.endswith("*tau"):
        body = text[: -len("*tau")]
    elif text.endswith("tau"):
        body = text[: -len("tau")] + "1"
    else:
        raise ValueError(f"bad golden integer {text!r}")
    # split off the constant part at the last sign that is not leading
    for idx in range(len(body) - 1, 0, -1):
        if body[idx] in "+-":
            return GoldenInt(int(body[:idx]), int(body[idx:]))
    return GoldenInt(0, int(body))
