"""Extended rationals: {-inf} | Q | {+inf} with a total order.

All equilibrium machinery runs on exact values; infinities appear in
requirements and thresholds.  Arithmetic that would form inf - inf raises,
since the underlying theory never forms it.
"""

from fractions import Fraction

__all__ = ["PINF", "NINF", "Ext", "ext", "parse_rational", "format_rational",
           "parse_ext", "format_ext"]


class _Infinity:
    """Signed infinity singleton; compares against Fraction/int/_Infinity."""

    __slots__ = ("sign",)

    def __init__(self, sign):
        self.sign = sign

    def __repr__(self):
        return "+inf" if self.sign > 0 else "-inf"

    def __eq__(self, other):
        return isinstance(other, _Infinity) and other.sign == self.sign

    def __hash__(self):
        return hash(("inf", self.sign))

    def __lt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign < other.sign
        return self.sign < 0

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        if isinstance(other, _Infinity):
            return self.sign > other.sign
        return self.sign > 0

    def __ge__(self, other):
        return self == other or self > other

    def __neg__(self):
        return NINF if self.sign > 0 else PINF

    def __add__(self, other):
        if isinstance(other, _Infinity) and other.sign != self.sign:
            raise ArithmeticError("inf - inf is not formed")
        return self

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, _Infinity) else -other)

    def __rsub__(self, other):
        return -self + other


PINF = _Infinity(1)
NINF = _Infinity(-1)

#: An extended rational is a Fraction, or one of the two module-level
#: infinity singletons.  "Ext" exists for documentation and isinstance use.
Ext = (Fraction, _Infinity)


def ext(x):
    """Coerce int/str/Fraction to an extended rational."""
    if isinstance(x, _Infinity) or isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return parse_ext(x)
    return Fraction(x)


def is_finite(x):
    return not isinstance(x, _Infinity)


def parse_rational(text):
    """Parse a "p/q" or integer string into a Fraction; q > 0 and gcd = 1
    are required by the file format."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        p, q = int(num), int(den)
        if q <= 0:
            raise ValueError(f"rational {text!r}: denominator must be positive")
        f = Fraction(p, q)
        if f.numerator != p or f.denominator != q:
            raise ValueError(f"rational {text!r}: not in lowest terms")
        return f
    return Fraction(int(text))


def format_rational(f):
    f = Fraction(f)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def parse_ext(text):
    text = text.strip()
    if text in ("+inf", "inf"):
        return PINF
    if text == "-inf":
        return NINF
    return parse_rational(text)


def format_ext(x):
    if isinstance(x, _Infinity):
        return "+inf" if x.sign > 0 else "-inf"
    return format_rational(x)
