"""Polynomials in x_1..x_N over the parameter ring, and rational functions in x
whose denominators are products of linear factors x_i - c x_j.

Variable indices are 0-based in this module; text rendering uses x1..xN.
"""

from __future__ import annotations

from itertools import permutations
from typing import Iterable, Mapping

from .scalars import ONE, ParamLaurent, ParamScalar, Q, is_scalar, qt, rat


class NonPolynomialResult(ArithmeticError):
    """An exact division by a linear factor left a nonzero remainder."""


def _coerce(c):
    if isinstance(c, (ParamLaurent, ParamScalar)):
        return c
    return ParamLaurent.coerce(c)


class XPoly:
    """Sparse polynomial: exponent tuple -> ParamLaurent (or ParamScalar)."""

    __slots__ = ("N", "_d")

    def __init__(self, N: int, terms: Mapping[tuple, object] | None = None):
        self.N = N
        self._d: dict = {}
        if terms:
            for e, c in terms.items():
                if len(e) != N:
                    raise ValueError("exponent vector has wrong length")
                c = _coerce(c)
                if c:
                    prev = self._d.get(e)
                    v = c if prev is None else prev + c
                    if v:
                        self._d[e] = v
                    else:
                        del self._d[e]

    @classmethod
    def _raw(cls, N: int, d: dict) -> "XPoly":
        obj = cls.__new__(cls)
        obj.N = N
        obj._d = d
        return obj

    @classmethod
    def const(cls, N: int, c=1) -> "XPoly":
        return cls(N, {(0,) * N: c})

    @classmethod
    def var(cls, N: int, i: int) -> "XPoly":
        e = [0] * N
        e[i] = 1
        return cls._raw(N, {tuple(e): ONE})

    @classmethod
    def monomial(cls, N: int, exps: Iterable[int], coeff=1) -> "XPoly":
        return cls(N, {tuple(exps): coeff})

    @classmethod
    def power_sum(cls, N: int, k: int) -> "XPoly":
        if k == 0:
            return cls.const(N, N)
        d = {}
        for i in range(N):
            e = [0] * N
            e[i] = k
            d[tuple(e)] = ONE
        return cls._raw(N, d)

    @classmethod
    def monomial_symmetric(cls, N: int, mu: Iterable[int]) -> "XPoly":
        mu = [p for p in mu if p]
        if len(mu) > N:
            return cls(N)
        padded = tuple(mu) + (0,) * (N - len(mu))
        return cls._raw(N, {e: ONE for e in set(permutations(padded))})

    # inspection -----------------------------------------------------------
    def __bool__(self):
        return bool(self._d)

    def is_zero(self) -> bool:
        return not self._d

    def __len__(self):
        return len(self._d)

    def items(self):
        return sorted(self._d.items())

    def coeff(self, exps) -> object:
        return self._d.get(tuple(exps), ParamLaurent())

    def degree(self) -> int:
        return max((sum(e) for e in self._d), default=0)

    def is_symmetric(self) -> bool:
        # symmetric iff coefficients agree along each orbit
        for e, c in self._d.items():
            for e2 in set(permutations(e)):
                if self._d.get(e2) != c:
                    return False
        return True

    def is_symmetric_in(self, idx: Iterable[int]) -> bool:
        idx = list(idx)
        for e, c in self._d.items():
            for perm in set(permutations([e[i] for i in idx])):
                e2 = list(e)
                for i, v in zip(idx, perm):
                    e2[i] = v
                if self._d.get(tuple(e2)) != c:
                    return False
        return True

    # arithmetic -----------------------------------------------------------
    def _check(self, other):
        if other.N != self.N:
            raise ValueError("polynomials live in different numbers of variables")

    def __add__(self, other):
        if not isinstance(other, XPoly):
            if is_scalar(other):
                other = XPoly.const(self.N, other)
            else:
                return NotImplemented
        self._check(other)
        d = dict(self._d)
        for e, c in other._d.items():
            prev = d.get(e)
            v = c if prev is None else prev + c
            if v:
                d[e] = v
            else:
                d.pop(e, None)
        return XPoly._raw(self.N, d)

    __radd__ = __add__

    def __neg__(self):
        return XPoly._raw(self.N, {e: -c for e, c in self._d.items()})

    def __sub__(self, other):
        if not isinstance(other, XPoly):
            if is_scalar(other):
                other = XPoly.const(self.N, other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, XPoly):
            self._check(other)
            acc: dict = {}
            for e1, c1 in self._d.items():
                for e2, c2 in other._d.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    v = c1 * c2
                    prev = acc.get(e)
                    acc[e] = v if prev is None else prev + v
            return XPoly._raw(self.N, {e: c for e, c in acc.items() if c})
        if is_scalar(other):
            c = _coerce(other)
            if not c:
                return XPoly(self.N)
            return XPoly._raw(self.N, {e: v * c for e, v in self._d.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = XPoly.const(self.N)
        for _ in range(k):
            out = out * self
        return out

    def map_coeffs(self, fn) -> "XPoly":
        d = {}
        for e, c in self._d.items():
            v = fn(c)
            if v:
                d[e] = v
        return XPoly._raw(self.N, d)

    def mul_monomial(self, exps, coeff=None) -> "XPoly":
        d = {}
        for e, c in self._d.items():
            d[tuple(a + b for a, b in zip(e, exps))] = c if coeff is None else c * coeff
        return XPoly._raw(self.N, d)

    def permute(self, perm: tuple[int, ...]) -> "XPoly":
        """x_i -> x_{perm[i]}, the action of a permutation on polynomials."""
        if all(p == i for i, p in enumerate(perm)):
            return self
        d = {}
        for e, c in self._d.items():
            b = [0] * self.N
            for i, a in enumerate(e):
                b[perm[i]] = a
            d[tuple(b)] = c
        return XPoly._raw(self.N, d)

    def shift(self, m: tuple[int, ...]) -> "XPoly":
        """gamma^m: x_i -> q^{-m_i} x_i."""
        if not any(m):
            return self
        d = {}
        for e, c in self._d.items():
            s = sum(a * b for a, b in zip(e, m))
            d[e] = c.shift(q=-s) if s and isinstance(c, ParamLaurent) else (c * Q ** (-s) if s else c)
        return XPoly._raw(self.N, d)

    def mul_linear(self, i: int, j: int, c) -> "XPoly":
        """Multiply by (x_i - c x_j)."""
        acc: dict = {}
        for e, v in self._d.items():
            ei = list(e)
            ei[i] += 1
            ei = tuple(ei)
            ej = list(e)
            ej[j] += 1
            ej = tuple(ej)
            prev = acc.get(ei)
            acc[ei] = v if prev is None else prev + v
            w = -(c * v)
            prev = acc.get(ej)
            acc[ej] = w if prev is None else prev + w
        return XPoly._raw(self.N, {e: v for e, v in acc.items() if v})

    def div_linear(self, i: int, j: int, c) -> "XPoly":
        """Exact quotient by (x_i - c x_j) via synthetic division in x_i."""
        buckets: dict[int, dict] = {}
        for e, v in self._d.items():
            buckets.setdefault(e[i], {})[e] = v
        quot: dict = {}
        top = max(buckets, default=-1)
        for deg in range(top, 0, -1):
            layer = buckets.pop(deg, None)
            if not layer:
                continue
            lower = buckets.setdefault(deg - 1, {})
            for e, v in layer.items():
                base = list(e)
                base[i] -= 1
                qe = tuple(base)
                quot[qe] = v
                base[j] += 1
                le = tuple(base)
                w = c * v
                prev = lower.get(le)
                nv = w if prev is None else prev + w
                if nv:
                    lower[le] = nv
                else:
                    lower.pop(le, None)
        if any(buckets.get(0, {}).values()):
            raise NonPolynomialResult(f"x{i + 1} - ({c})*x{j + 1} does not divide the polynomial")
        return XPoly._raw(self.N, quot)

    # comparison and output ------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, XPoly):
            if other.N != self.N:
                return False
            if self._d.keys() != other._d.keys():
                return False
            return all(self._d[e] == other._d[e] for e in self._d)
        if is_scalar(other):
            return self == XPoly.const(self.N, other) if other else not self._d
        return NotImplemented

    __hash__ = None

    def to_json(self) -> list:
        out = []
        for e, c in self.items():
            if isinstance(c, ParamLaurent):
                for rec in c.to_json():
                    out.append({"x": list(e), **rec})
            else:
                out.append({"x": list(e), "coeff": c.to_json()})
        return out

    @classmethod
    def from_json(cls, N: int, data: list) -> "XPoly":
        acc: dict = {}
        for r in data:
            e = tuple(r["x"])
            if isinstance(r["coeff"], dict):
                c = ParamScalar.from_json(r["coeff"])
            else:
                c = ParamLaurent.from_terms({(r["q"], r["t"], r["w"]): rat(r["coeff"])})
            acc[e] = acc[e] + c if e in acc else c
        return cls(N, acc)

    def __str__(self):
        if not self._d:
            return "0"
        parts = []
        for e, c in sorted(self._d.items(), key=lambda r: (-sum(r[0]), tuple(-a for a in r[0]))):
            mono = "*".join(f"x{i + 1}" if a == 1 else f"x{i + 1}^{a}" for i, a in enumerate(e) if a)
            cs = str(c)
            if not mono:
                parts.append(f"({cs})")
            elif cs == "1":
                parts.append(mono)
            else:
                parts.append(f"({cs})*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"XPoly({self})"


# -- rational functions with linear-factor denominators ---------------------

Factor = tuple  # (i, j, a, b): x_i - q^a t^b x_j with i < j


def _canon_factor(i: int, j: int, a: int, b: int):
    """Return (factor, unit) with (x_i - c x_j) = unit * factor and factor canonical."""
    if i == j:
        raise ValueError("degenerate factor")
    if i < j:
        return (i, j, a, b), ONE
    # x_i - c x_j = -c (x_j - c^{-1} x_i)
    return (j, i, -a, -b), -qt(a, b)


def _factor_poly(N: int, f: Factor) -> XPoly:
    i, j, a, b = f
    return XPoly.const(N).mul_linear(i, j, qt(a, b))


class XRational:
    """num / prod(factors^mult) with canonical linear factors x_i - q^a t^b x_j."""

    __slots__ = ("num", "den")

    def __init__(self, num: XPoly, den: Mapping[Factor, int] | None = None):
        self.num = num
        self.den = {f: m for f, m in (den or {}).items() if m}

    @property
    def N(self):
        return self.num.N

    @classmethod
    def poly(cls, p: XPoly) -> "XRational":
        return cls(p)

    @classmethod
    def const(cls, N: int, c=1) -> "XRational":
        return cls(XPoly.const(N, c))

    @classmethod
    def linear_ratio(cls, N: int, num: XPoly, i: int, j: int, a: int = 0, b: int = 0):
        """num / (x_i - q^a t^b x_j)."""
        f, unit = _canon_factor(i, j, a, b)
        if unit != 1:
            num = num * unit.inverse_monomial()
        return cls(num, {f: 1})

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_polynomial(self) -> bool:
        return not self.den

    def den_poly(self) -> XPoly:
        out = XPoly.const(self.N)
        for (i, j, a, b), m in self.den.items():
            for _ in range(m):
                out = out.mul_linear(i, j, qt(a, b))
        return out

    def reduce(self) -> "XRational":
        """Cancel denominator factors that divide the numerator."""
        if not self.num:
            return XRational(self.num)
        num = self.num
        den = dict(self.den)
        for f in list(den):
            i, j, a, b = f
            c = qt(a, b)
            while den.get(f):
                try:
                    num = num.div_linear(i, j, c)
                except NonPolynomialResult:
                    break
                den[f] -= 1
        return XRational(num, den)

    def _lift(self, den: Mapping[Factor, int]) -> XPoly:
        """Numerator over a denominator that is a multiple of ours."""
        num = self.num
        for f, m in den.items():
            i, j, a, b = f
            c = qt(a, b)
            for _ in range(m - self.den.get(f, 0)):
                num = num.mul_linear(i, j, c)
        return num

    @staticmethod
    def lcm(dens: Iterable[Mapping[Factor, int]]) -> dict:
        out: dict = {}
        for d in dens:
            for f, m in d.items():
                if m > out.get(f, 0):
                    out[f] = m
        return out

    def __add__(self, other):
        if not isinstance(other, XRational):
            if isinstance(other, XPoly):
                other = XRational(other)
            elif is_scalar(other):
                other = XRational.const(self.N, other)
            else:
                return NotImplemented
        if self.den == other.den:
            return XRational(self.num + other.num, self.den)
        den = XRational.lcm([self.den, other.den])
        return XRational(self._lift(den) + other._lift(den), den)

    __radd__ = __add__

    def __neg__(self):
        return XRational(-self.num, self.den)

    def __sub__(self, other):
        if not isinstance(other, XRational):
            if isinstance(other, XPoly):
                other = XRational(other)
            elif is_scalar(other):
                other = XRational.const(self.N, other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, XRational):
            den = dict(self.den)
            for f, m in other.den.items():
                den[f] = den.get(f, 0) + m
            return XRational(self.num * other.num, den)
        if isinstance(other, XPoly):
            return XRational(self.num * other, self.den)
        if is_scalar(other):
            return XRational(self.num * other, self.den)
        return NotImplemented

    __rmul__ = __mul__

    def permute(self, perm: tuple[int, ...]) -> "XRational":
        if all(p == i for i, p in enumerate(perm)):
            return self
        num = self.num.permute(perm)
        den: dict = {}
        unit = ONE
        for (i, j, a, b), m in self.den.items():
            f, u = _canon_factor(perm[i], perm[j], a, b)
            den[f] = den.get(f, 0) + m
            if u != 1:
                unit = unit * u ** m
        if unit != 1:
            num = num * unit.inverse_monomial()
        return XRational(num, den)

    def shift(self, m: tuple[int, ...]) -> "XRational":
        """gamma^m applied to the function: x_i -> q^{-m_i} x_i."""
        if not any(m):
            return self
        num = self.num.shift(m)
        den: dict = {}
        qpow = 0
        for (i, j, a, b), mult in self.den.items():
            # q^{-m_i} x_i - c q^{-m_j} x_j = q^{-m_i} (x_i - c q^{m_i - m_j} x_j)
            f = (i, j, a + m[i] - m[j], b)
            den[f] = den.get(f, 0) + mult
            qpow += m[i] * mult
        if qpow:
            num = num * qt(qpow)
        return XRational(num, den)

    def __eq__(self, other):
        if isinstance(other, XPoly):
            other = XRational(other)
        elif is_scalar(other):
            other = XRational.const(self.N, other)
        if not isinstance(other, XRational):
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        den = XRational.lcm([self.den, other.den])
        return self._lift(den) == other._lift(den)

    __hash__ = None

    def as_poly(self) -> XPoly:
        r = self.reduce()
        if r.den:
            raise NonPolynomialResult("rational function is not a polynomial")
        return r.num

    def __str__(self):
        if not self.den:
            return str(self.num)
        dens = "*".join(
            (f"(x{i + 1} - {qt(a, b)}*x{j + 1})" if (a, b) != (0, 0) else f"(x{i + 1} - x{j + 1})")
            + (f"^{m}" if m > 1 else "")
            for (i, j, a, b), m in sorted(self.den.items())
        )
        return f"[{self.num}] / {dens}"

    def __repr__(self):
        return f"XRational({self})"
