"""Exact arithmetic in the function field used for symbolic verification.

Elements live in

    Q[k, r, 1/r, s, cos, sin, pr, pf] / (s^2 - (1 - k r^2), sin^2 + cos^2 - 1)

localized at w = 1 - k r^2.  Every element is stored as a numerator
(a finite sum of monomials with exact rational coefficients) over a
denominator ``r^a * w^b``.  Because s and sin satisfy monic quadratic
relations, monomials with s-degree and sin-degree in {0, 1} form a basis, so
the normal form below is unique and equality is a structural comparison.
"""

from __future__ import annotations

import math
import re
from collections import defaultdict
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Mapping, Tuple

# (kappa, r, s, cos, sin, pr, pf) exponents
Key = Tuple[int, int, int, int, int, int, int]
Terms = Dict[Key, Fraction]

GENERATORS = ("k", "r", "s", "cos", "sin", "pr", "pf")
_K, _R, _S, _C, _SN, _PR, _PF = range(7)


def _bump(key: Key, **delta: int) -> Key:
    k = list(key)
    for name, d in delta.items():
        k[GENERATORS.index(name)] += d
    return tuple(k)  # type: ignore[return-value]


def _add_into(acc: Terms, key: Key, c) -> None:
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def _reduce_relations(terms: Mapping[Key, Fraction]) -> Terms:
    """Apply s^2 -> 1 - k r^2 and sin^2 -> 1 - cos^2 until both degrees are <= 1."""
    out: Terms = {}
    stack = list(terms.items())
    while stack:
        key, c = stack.pop()
        if not c:
            continue
        if key[_S] >= 2:
            base = _bump(key, s=-2)
            stack.append((base, c))
            stack.append((_bump(base, k=1, r=2), -c))
        elif key[_SN] >= 2:
            base = _bump(key, sin=-2)
            stack.append((base, c))
            stack.append((_bump(base, cos=2), -c))
        else:
            _add_into(out, key, c)
    return out


def _mul_terms(a: Mapping[Key, Fraction], b: Mapping[Key, Fraction]) -> Terms:
    out: Terms = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            _add_into(out, tuple(x + y for x, y in zip(ka, kb)), ca * cb)
    return out


def _times_w(terms: Mapping[Key, Fraction], n: int = 1) -> Terms:
    out = dict(terms)
    for _ in range(n):
        nxt: Terms = {}
        for key, c in out.items():
            _add_into(nxt, key, c)
            _add_into(nxt, _bump(key, k=1, r=2), -c)
        out = nxt
    return out


def _try_divide_w(terms: Mapping[Key, Fraction]):
    """Exact division of a Laurent numerator by (1 - k r^2), or None.

    Writing k^i r^j = r^(j-2i) u^i with u = k r^2, each class of monomials that
    agree in everything but i is a polynomial P(u); w divides the numerator iff
    P(1) = 0 for every class.
    """
    classes: Dict[tuple, Dict[int, Fraction]] = defaultdict(dict)
    for key, c in terms.items():
        i, j = key[_K], key[_R]
        classes[(j - 2 * i,) + key[2:]][i] = c
    out: Terms = {}
    for cls, poly in classes.items():
        if sum(poly.values()) != 0:
            return None
        # P(u) = (1 - u) Q(u)  =>  q_i = sum_{t <= i} p_t
        acc = Fraction(0)
        for i in range(max(poly)):
            acc += poly.get(i, 0)
            if acc:
                out[(i, cls[0] + 2 * i) + cls[1:]] = acc
    return out


def _canonical(terms: Mapping[Key, Fraction], rpow: int, wpow: int):
    """Return (terms, a, b) in normal form for numerator/(r^rpow * w^wpow)."""
    if wpow < 0:
        terms = _times_w(terms, -wpow)
        wpow = 0
    red = _reduce_relations(terms)
    if not red:
        return {}, 0, 0
    lau = {_bump(k, r=-rpow): c for k, c in red.items()}
    while wpow > 0:
        q = _try_divide_w(lau)
        if q is None:
            break
        lau, wpow = q, wpow - 1
    a = max(0, -min(k[_R] for k in lau))
    num = {_bump(k, r=a): Fraction(c) for k, c in lau.items()}
    return num, a, wpow


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"exact rational required, got {type(x).__name__}")


class RingElement:
    """Immutable element ``numerator / (r^a (1 - k r^2)^b)`` in normal form."""

    __slots__ = ("_terms", "_a", "_b", "_hash")

    def __init__(self, terms: Mapping[Key, object] | None = None, a: int = 0, b: int = 0):
        raw = {tuple(k): _as_fraction(c) for k, c in (terms or {}).items()}
        for key in raw:
            if len(key) != 7:
                raise ValueError(f"monomial key must have 7 exponents, got {key}")
            if min(key[_K], key[_S], key[_C], key[_SN], key[_PR], key[_PF]) < 0:
                raise ValueError(f"only the r exponent may be negative: {key}")
        if a < 0 or b < 0:
            raise ValueError("denominator exponents must be non-negative")
        self._terms, self._a, self._b = _canonical(raw, a, b)
        self._hash = None

    # -- construction -----------------------------------------------------
    @classmethod
    def _from_canonical(cls, terms: Terms, a: int, b: int) -> "RingElement":
        obj = cls.__new__(cls)
        obj._terms, obj._a, obj._b, obj._hash = terms, a, b, None
        return obj

    @classmethod
    def _from_laurent(cls, terms: Mapping[Key, Fraction], b: int) -> "RingElement":
        return cls._from_canonical(*_canonical(terms, 0, b))

    @classmethod
    def const(cls, c) -> "RingElement":
        return cls({(0,) * 7: c})

    @classmethod
    def gen(cls, name: str, power: int = 1) -> "RingElement":
        key = [0] * 7
        key[GENERATORS.index(name)] = power
        if name == "r" and power < 0:
            key[_R] = 0
            return cls({tuple(key): 1}, a=-power)
        return cls({tuple(key): 1})

    # -- structure --------------------------------------------------------
    @property
    def terms(self) -> Dict[Key, Fraction]:
        return dict(self._terms)

    @property
    def denominator(self) -> Tuple[int, int]:
        """Exponents (a, b) of r^a (1 - k r^2)^b."""
        return self._a, self._b

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def _laurent(self) -> Terms:
        if not self._a:
            return self._terms
        return {_bump(k, r=-self._a): c for k, c in self._terms.items()}

    def _common(self, other: "RingElement"):
        b = max(self._b, other._b)
        return (_times_w(self._laurent(), b - self._b),
                _times_w(other._laurent(), b - other._b), b)

    # -- arithmetic -------------------------------------------------------
    @staticmethod
    def _coerce(x) -> "RingElement":
        if isinstance(x, RingElement):
            return x
        return RingElement.const(_as_fraction(x))

    def __add__(self, other) -> "RingElement":
        other = self._coerce(other)
        x, y, b = self._common(other)
        out = dict(x)
        for key, c in y.items():
            _add_into(out, key, c)
        return RingElement._from_laurent(out, b)

    __radd__ = __add__

    def __neg__(self) -> "RingElement":
        return RingElement._from_canonical({k: -c for k, c in self._terms.items()}, self._a, self._b)

    def __sub__(self, other) -> "RingElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RingElement":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RingElement":
        other = self._coerce(other)
        if not self._terms or not other._terms:
            return ZERO
        prod = _mul_terms(self._laurent(), other._laurent())
        return RingElement._from_laurent(prod, self._b + other._b)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RingElement":
        if not isinstance(n, int):
            raise TypeError("integer exponent required")
        if n < 0:
            return self.inverse() ** (-n)
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> "RingElement":
        """Inverse of a unit ``c r^j s^e w^m``; anything else raises ValueError."""
        num, m = self._laurent(), -self._b
        while True:
            q = _try_divide_w(num)
            if q is None:
                break
            num, m = q, m + 1
        if len(num) != 1:
            raise ValueError(f"{self.dump()} is not a unit of this ring")
        (key, c), = num.items()
        if any(key[i] for i in (_K, _C, _SN, _PR, _PF)):
            raise ValueError(f"{self.dump()} is not a unit of this ring")
        j, e = key[_R], key[_S]
        # 1/s = s/w
        inv = {(0, -j, e, 0, 0, 0, 0): 1 / c}
        return RingElement._from_laurent(inv, m + e)

    def __truediv__(self, other) -> "RingElement":
        if isinstance(other, RingElement):
            return self * other.inverse()
        return self * RingElement.const(1 / _as_fraction(other))

    def __rtruediv__(self, other) -> "RingElement":
        return self._coerce(other) * self.inverse()

    # -- comparison -------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, RingElement):
            try:
                other = self._coerce(other)
            except TypeError:
                return NotImplemented
        return (self._a, self._b) == (other._a, other._b) and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._a, self._b, frozenset(self._terms.items())))
        return self._hash

    # -- substitution and evaluation --------------------------------------
    def at_kappa_zero(self) -> "RingElement":
        """Substitute k = 0 (so s = 1 and w = 1)."""
        out: Terms = {}
        for key, c in self._terms.items():
            if key[_K] == 0:
                _add_into(out, (0, key[_R], 0) + key[3:], c)
        return RingElement(out, a=self._a)

    def evaluate(self, kappa: float, r: float, phi: float = 0.0, pr: float = 0.0, pf: float = 0.0) -> float:
        """Floating-point value at a point of the chart (s taken as the positive root)."""
        w = 1.0 - kappa * r * r
        if w <= 0.0:
            raise ValueError("1 - k r^2 must be positive")
        vals = (kappa, r, math.sqrt(w), math.cos(phi), math.sin(phi), pr, pf)
        total = 0.0
        for key, c in self._terms.items():
            term = float(c)
            for v, e in zip(vals, key):
                if e:
                    term *= v ** e
            total += term
        return total / (r ** self._a * w ** self._b)

    # -- text format ------------------------------------------------------
    def dump(self) -> str:
        """Fixed text form used by golden tests.

        ``(c*k^i*r^j*s^e*cos^k*sin^d*pr^l*pf^m + ...) / r^a*(1-k*r^2)^b`` with
        monomials sorted by exponent tuple.
        """
        if not self._terms:
            return "(0) / r^0*(1-k*r^2)^0"
        parts = []
        for key in sorted(self._terms):
            i, j, e, k, d, l, m = key
            parts.append(f"{self._terms[key]}*k^{i}*r^{j}*s^{e}*cos^{k}*sin^{d}*pr^{l}*pf^{m}")
        return f"({' + '.join(parts)}) / r^{self._a}*(1-k*r^2)^{self._b}"

    _MONO = re.compile(
        r"^(-?\d+(?:/\d+)?)\*k\^(\d+)\*r\^(-?\d+)\*s\^(\d+)\*cos\^(\d+)\*sin\^(\d+)\*pr\^(\d+)\*pf\^(\d+)$"
    )
    _DEN = re.compile(r"^r\^(\d+)\*\(1-k\*r\^2\)\^(\d+)$")

    @classmethod
    def from_dump(cls, text: str) -> "RingElement":
        num, _, den = text.strip().rpartition(" / ")
        mden = cls._DEN.match(den)
        if not (num.startswith("(") and num.endswith(")")) or mden is None:
            raise ValueError(f"malformed dump: {text!r}")
        body = num[1:-1]
        terms: Dict[Key, Fraction] = {}
        if body != "0":
            for part in body.split(" + "):
                m = cls._MONO.match(part)
                if m is None:
                    raise ValueError(f"malformed monomial: {part!r}")
                key = tuple(int(g) for g in m.groups()[1:])
                _add_into(terms, key, Fraction(m.group(1)))
        return cls(terms, a=int(mden.group(1)), b=int(mden.group(2)))

    def __repr__(self) -> str:
        return f"RingElement({self.dump()!r})"


def canonicalize(terms: Mapping[Key, object] | Iterable[Tuple[Key, object]], a: int = 0, b: int = 0) -> RingElement:
    """Normal form of a raw monomial sum over r^a (1 - k r^2)^b.

    Raw input may carry s- or sin-degrees above one and negative r exponents;
    repeated keys are summed.
    """
    if not isinstance(terms, Mapping):
        acc: Dict[Key, Fraction] = {}
        for key, c in terms:
            _add_into(acc, tuple(key), _as_fraction(c))
        terms = acc
    return RingElement(terms, a=a, b=b)


ZERO = RingElement()
ONE = RingElement.const(1)

K = RingElement.gen("k")
R = RingElement.gen("r")
S = RingElement.gen("s")
COS = RingElement.gen("cos")
SIN = RingElement.gen("sin")
PR = RingElement.gen("pr")
PF = RingElement.gen("pf")
W = ONE - K * R * R
