"""Exact scalars: big rationals, Laurent polynomials in q, t, w and their fractions.

Monomials q^a t^b w^c are packed into a single int so that multiplying two
monomials is one integer addition.  The packing is monotone for the
lexicographic order on (a, b, c), so ``max(keys)`` is the lex-leading term.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _mpq = Fraction

BigRat = type(_mpq(0))

try:  # native multivariate products for large operands
    import flint as _flint
    from flint.utils.flint_exceptions import DomainError as _DomainError
    _CTX = _flint.fmpq_mpoly_ctx.get(("q", "t", "w"), "lex")
except ImportError:  # pragma: no cover
    _flint = None

# below this many term pairs the plain double loop wins
NATIVE_MUL_THRESHOLD = 4096

_BITS = 21
_OFF = 1 << (_BITS - 1)
_MASK = (1 << _BITS) - 1
ZERO_KEY = (_OFF << (2 * _BITS)) | (_OFF << _BITS) | _OFF
Q_KEY = ZERO_KEY + (1 << (2 * _BITS))
T_KEY = ZERO_KEY + (1 << _BITS)
W_KEY = ZERO_KEY + 1


def rat(x) -> BigRat:
    """Coerce ints, strings like '3/4', Fractions and mpq to a BigRat."""
    if isinstance(x, BigRat):
        return x
    if isinstance(x, str):
        return _mpq(Fraction(x))
    if isinstance(x, Fraction):
        return _mpq(x.numerator, x.denominator)
    return _mpq(x)


def rat_str(x) -> str:
    x = rat(x)
    return f"{x.numerator}/{x.denominator}"


def rat_plain(x) -> str:
    """Render without a denominator when it is 1."""
    x = rat(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def pack(eq: int, et: int = 0, ew: int = 0) -> int:
    if max(abs(eq), abs(et), abs(ew)) >= _OFF:
        raise OverflowError("exponent out of range")
    return ((eq + _OFF) << (2 * _BITS)) | ((et + _OFF) << _BITS) | (ew + _OFF)


def unpack(key: int) -> tuple[int, int, int]:
    return ((key >> (2 * _BITS)) - _OFF, ((key >> _BITS) & _MASK) - _OFF, (key & _MASK) - _OFF)


# -- raw dict kernels -------------------------------------------------------
# These operate on {packed key: BigRat} and are shared by the hot loops in
# the operator modules.

def d_add_into(acc: dict, d: Mapping, scale=None, shift: int = 0) -> None:
    """acc += scale * monomial(shift) * d, in place (shift is a packed offset)."""
    get = acc.get
    if scale is None:
        for k, c in d.items():
            k += shift
            v = get(k, 0) + c
            if v:
                acc[k] = v
            else:
                acc.pop(k, None)
    else:
        for k, c in d.items():
            k += shift
            v = get(k, 0) + scale * c
            if v:
                acc[k] = v
            else:
                acc.pop(k, None)


def _to_native(d: Mapping, base: tuple[int, int, int]):
    bq, bt, bw = base
    fq = _flint.fmpq
    return _CTX.from_dict({
        (((k >> (2 * _BITS)) - _OFF) - bq, (((k >> _BITS) & _MASK) - _OFF) - bt, ((k & _MASK) - _OFF) - bw):
        fq(int(c.numerator), int(c.denominator))
        for k, c in d.items()})


def _min_exponents(d: Mapping) -> tuple[int, int, int]:
    ks = [unpack(k) for k in d]
    return tuple(min(e[i] for e in ks) for i in range(3))


def _native_mul(a: Mapping, b: Mapping) -> dict:
    ma, mb = _min_exponents(a), _min_exponents(b)
    prod = _to_native(a, ma) * _to_native(b, mb)
    sq, st, sw = (ma[i] + mb[i] for i in range(3))
    return {pack(int(e[0]) + sq, int(e[1]) + st, int(e[2]) + sw): _mpq(int(c.p), int(c.q))
            for e, c in prod.to_dict().items()}


def d_mul(a: Mapping, b: Mapping) -> dict:
    if _flint is not None and len(a) * len(b) >= NATIVE_MUL_THRESHOLD:
        return _native_mul(a, b)
    if len(a) > len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    for ka, ca in a.items():
        off = ka - ZERO_KEY
        for kb, cb in b.items():
            k = kb + off
            out[k] = get(k, 0) + ca * cb
    return {k: v for k, v in out.items() if v}


def d_mul_into(acc: dict, a: Mapping, b: Mapping) -> None:
    """acc += a*b without materialising the product."""
    get = acc.get
    if _flint is not None and len(a) * len(b) >= NATIVE_MUL_THRESHOLD:
        for k, c in _native_mul(a, b).items():
            acc[k] = get(k, 0) + c
        return
    for ka, ca in a.items():
        off = ka - ZERO_KEY
        for kb, cb in b.items():
            k = kb + off
            acc[k] = get(k, 0) + ca * cb


def _native_combine(a, b, sign: int):
    """a + sign*b with both operands in native form, aligned on a common base."""
    (pa, ba), (pb, bb) = a._native(), b._native()
    base = tuple(min(x, y) for x, y in zip(ba, bb))
    if ba != base:
        pa = pa * _CTX.from_dict({tuple(x - y for x, y in zip(ba, base)): 1})
    if bb != base:
        pb = pb * _CTX.from_dict({tuple(x - y for x, y in zip(bb, base)): 1})
    return ParamLaurent._from_native(pa + pb if sign > 0 else pa - pb, base)


def d_prune(acc: dict) -> dict:
    return {k: v for k, v in acc.items() if v}


class ParamLaurent:
    """Sparse Laurent polynomial in q, t, w with exact rational coefficients.

    Large values may live in a native multivariate form (a polynomial plus an
    exponent base) and are converted to the packed dict only when read.
    """

    __slots__ = ("_dd", "_nat", "_h")

    def __init__(self, terms: Mapping[int, BigRat] | None = None):
        # trusted constructor: packed keys, nonzero BigRat values
        self._dd = dict(terms) if terms else {}
        self._nat = None
        self._h = None

    @property
    def _d(self) -> dict:
        if self._dd is None:
            poly, (bq, bt, bw) = self._nat
            self._dd = {pack(int(e[0]) + bq, int(e[1]) + bt, int(e[2]) + bw): _mpq(int(c.p), int(c.q))
                        for e, c in poly.to_dict().items()}
        return self._dd

    def _native(self):
        if self._nat is None:
            base = _min_exponents(self._dd) if self._dd else (0, 0, 0)
            self._nat = (_to_native(self._dd, base), base)
        return self._nat

    def _big(self) -> bool:
        return self._nat is not None or len(self._dd) >= 64

    # construction ---------------------------------------------------------
    @classmethod
    def _raw(cls, d: dict) -> "ParamLaurent":
        obj = cls.__new__(cls)
        obj._dd = d
        obj._nat = None
        obj._h = None
        return obj

    @classmethod
    def _from_native(cls, poly, base) -> "ParamLaurent":
        obj = cls.__new__(cls)
        obj._dd = {} if poly.is_zero() else None
        obj._nat = (poly, base)
        obj._h = None
        return obj

    @classmethod
    def from_terms(cls, terms: Mapping[tuple[int, int, int], object] | Iterable) -> "ParamLaurent":
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for (eq, et, ew), c in items:
            k = pack(eq, et, ew)
            acc[k] = acc.get(k, 0) + rat(c)
        return cls._raw(d_prune(acc))

    @classmethod
    def monomial(cls, q: int = 0, t: int = 0, w: int = 0, coeff=1) -> "ParamLaurent":
        c = rat(coeff)
        return cls._raw({pack(q, t, w): c} if c else {})

    @classmethod
    def const(cls, c) -> "ParamLaurent":
        c = rat(c)
        return cls._raw({ZERO_KEY: c} if c else {})

    @staticmethod
    def coerce(x) -> "ParamLaurent":
        if isinstance(x, ParamLaurent):
            return x
        if isinstance(x, (int, BigRat, Fraction)):
            return ParamLaurent.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to ParamLaurent")

    # inspection -----------------------------------------------------------
    def __bool__(self):
        if self._dd is None:
            return not self._nat[0].is_zero()
        return bool(self._dd)

    def __len__(self):
        if self._dd is None:
            return len(self._nat[0])
        return len(self._dd)

    def terms(self) -> list[tuple[tuple[int, int, int], BigRat]]:
        """Terms sorted by exponent vector (q, t, w)."""
        return [(unpack(k), self._d[k]) for k in sorted(self._d)]

    def is_monomial(self) -> bool:
        return len(self._d) == 1

    def is_constant(self) -> bool:
        return not self._d or (len(self._d) == 1 and ZERO_KEY in self._d)

    def constant_value(self) -> BigRat:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self._d.get(ZERO_KEY, rat(0))

    def coeff(self, q: int = 0, t: int = 0, w: int = 0) -> BigRat:
        return self._d.get(pack(q, t, w), rat(0))

    def degree_range(self, var: str) -> tuple[int, int]:
        idx = "qtw".index(var)
        exps = [unpack(k)[idx] for k in self._d]
        if not exps:
            return (0, 0)
        return (min(exps), max(exps))

    def has_w(self) -> bool:
        return any((k & _MASK) != _OFF for k in self._d)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, ParamLaurent):
            if isinstance(other, (int, BigRat, Fraction)):
                other = ParamLaurent.const(other)
            else:
                return NotImplemented
        if not other:
            return self
        if not self:
            return other
        if _flint is not None and (self._nat is not None or other._nat is not None):
            return _native_combine(self, other, 1)
        d = dict(self._d)
        d_add_into(d, other._d)
        return ParamLaurent._raw(d)

    __radd__ = __add__

    def __neg__(self):
        if self._dd is None:
            poly, base = self._nat
            return ParamLaurent._from_native(-poly, base)
        return ParamLaurent._raw({k: -c for k, c in self._d.items()})

    def __sub__(self, other):
        if not isinstance(other, ParamLaurent):
            if isinstance(other, (int, BigRat, Fraction)):
                other = ParamLaurent.const(other)
            else:
                return NotImplemented
        if _flint is not None and (self._nat is not None or other._nat is not None):
            return _native_combine(self, other, -1)
        d = dict(self._d)
        d_add_into(d, other._d, scale=-1)
        return ParamLaurent._raw(d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ParamLaurent):
            if _flint is not None and (self._nat is not None or other._nat is not None
                                       or len(self) * len(other) >= NATIVE_MUL_THRESHOLD):
                if not self or not other:
                    return ParamLaurent()
                (pa, ba), (pb, bb) = self._native(), other._native()
                return ParamLaurent._from_native(pa * pb, tuple(x + y for x, y in zip(ba, bb)))
            return ParamLaurent._raw(d_mul(self._d, other._d))
        if isinstance(other, (int, BigRat, Fraction)):
            c = rat(other)
            if not c:
                return ParamLaurent()
            if self._dd is None:
                poly, base = self._nat
                return ParamLaurent._from_native(poly * _flint.fmpq(int(c.numerator), int(c.denominator)), base)
            return ParamLaurent._raw({k: v * c for k, v in self._d.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse_monomial() ** (-e)
        out = ParamLaurent.const(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def shift(self, q: int = 0, t: int = 0, w: int = 0) -> "ParamLaurent":
        """Multiply by the monomial q^q t^t w^w."""
        off = pack(q, t, w) - ZERO_KEY
        return ParamLaurent._raw({k + off: c for k, c in self._d.items()})

    def inverse_monomial(self) -> "ParamLaurent":
        if len(self._d) != 1:
            raise ZeroDivisionError("only monomials are units in the Laurent ring")
        (k, c), = self._d.items()
        return ParamLaurent._raw({2 * ZERO_KEY - k: 1 / c})

    def __truediv__(self, other):
        if isinstance(other, (int, BigRat, Fraction)):
            return self * (1 / rat(other))
        if isinstance(other, ParamLaurent):
            if other.is_monomial():
                return self * other.inverse_monomial()
            return NotImplemented
        return NotImplemented

    def divexact(self, other: "ParamLaurent") -> "ParamLaurent":
        """Exact quotient self/other in the Laurent ring; ValueError if it does not exist."""
        q = self.try_divexact(other)
        if q is None:
            raise ValueError("division is not exact")
        return q

    def try_divexact(self, other: "ParamLaurent") -> "ParamLaurent | None":
        if _flint is not None and self and other and (self._big() or other._big()):
            (pa, ba), (pb, bb) = self._native(), other._native()
            for attempt in (0, 1):
                try:
                    return ParamLaurent._from_native(pa / pb, tuple(x - y for x, y in zip(ba, bb)))
                except _DomainError:
                    if attempt:
                        # other has no monomial content now, so no Laurent quotient exists
                        return None
                # strip the monomial content of the divisor and retry once
                bb = _min_exponents(other._d)
                pb = _to_native(other._d, bb)
        q = _divexact(self._d, other._d)
        return None if q is None else ParamLaurent._raw(q)

    # substitutions --------------------------------------------------------
    def subs_exponents(self, fn) -> "ParamLaurent":
        """Apply an exponent map (eq, et, ew) -> (eq', et', ew') termwise."""
        acc: dict = {}
        for k, c in self._d.items():
            k2 = pack(*fn(*unpack(k)))
            acc[k2] = acc.get(k2, 0) + c
        return ParamLaurent._raw(d_prune(acc))

    def dilate(self, m: int) -> "ParamLaurent":
        """A^{[m]}: q -> q^m, t -> t^m."""
        if m == 1:
            return self
        return self.subs_exponents(lambda a, b, c: (m * a, m * b, c))

    def subs_w_tpower(self, n: int) -> "ParamLaurent":
        """w -> t^n."""
        return self.subs_exponents(lambda a, b, c: (a, b + n * c, 0))

    def subs_t_to_q(self) -> "ParamLaurent":
        return self.subs_exponents(lambda a, b, c: (a + b, 0, c))

    def evaluate(self, q, t, w=1) -> BigRat:
        q, t, w = rat(q), rat(t), rat(w)
        total = rat(0)
        for (a, b, c), coef in self.terms():
            total += coef * q ** a * t ** b * w ** c
        return total

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, ParamLaurent):
            return self._d == other._d
        if isinstance(other, (int, BigRat, Fraction)):
            return self._d == ParamLaurent.const(other)._d
        return NotImplemented

    def __hash__(self):
        if self._h is None:
            self._h = hash(frozenset(self._d.items()))
        return self._h

    # serialization --------------------------------------------------------
    def to_json(self) -> list:
        return [{"q": a, "t": b, "w": c, "coeff": rat_str(v)} for (a, b, c), v in self.terms()]

    @classmethod
    def from_json(cls, data: list) -> "ParamLaurent":
        return cls.from_terms([((r["q"], r["t"], r["w"]), rat(r["coeff"])) for r in data])

    def __str__(self):
        if not self._d:
            return "0"
        parts = []
        for (a, b, c), v in reversed(self.terms()):
            mono = "*".join(
                f"{name}" if e == 1 else f"{name}^{e}"
                for name, e in (("q", a), ("t", b), ("w", c)) if e
            )
            sign = "-" if v < 0 else "+"
            mag = abs(v)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{rat_plain(mag)}*{mono}"
            else:
                body = rat_plain(mag)
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"ParamLaurent({self})"


def _divexact(a: Mapping, b: Mapping) -> dict | None:
    """Lex-leading-term division in the Laurent ring; None if inexact."""
    if not b:
        raise ZeroDivisionError("division by zero")
    if not a:
        return {}
    if len(b) == 1:
        (kb, cb), = b.items()
        off = ZERO_KEY - kb
        inv = 1 / cb
        return {k + off: c * inv for k, c in a.items()}
    lt_b = max(b)
    cb = b[lt_b]
    # lex order on Laurent monomials is not well founded, so bound each
    # exponent separately: the Newton polytope of a product is the sum
    ea = [unpack(k) for k in a]
    eb = [unpack(k) for k in b]
    lo = [min(e[i] for e in ea) - min(e[i] for e in eb) for i in range(3)]
    hi = [max(e[i] for e in ea) - max(e[i] for e in eb) for i in range(3)]
    if any(l > h for l, h in zip(lo, hi)):
        return None
    rem = dict(a)
    quot: dict = {}
    while rem:
        lt = max(rem)
        qk = lt - lt_b + ZERO_KEY
        e = unpack(qk)
        if any(not lo[i] <= e[i] <= hi[i] for i in range(3)):
            return None
        c = rem[lt] / cb
        quot[qk] = c
        d_add_into(rem, b, scale=-c, shift=qk - ZERO_KEY)
    return quot


def _as_sympy(p: ParamLaurent, q, t, w):
    import sympy

    lo = [min((e[i] for e, _ in p.terms()), default=0) for i in range(3)]
    expr = 0
    for (a, b, c), v in p.terms():
        expr += sympy.Rational(int(v.numerator), int(v.denominator)) * q ** (a - lo[0]) * t ** (b - lo[1]) * w ** (c - lo[2])
    return expr


def laurent_gcd(a: ParamLaurent, b: ParamLaurent) -> ParamLaurent:
    """Polynomial gcd of a and b (up to units and monomials)."""
    if _flint is not None:
        (pa, _), (pb, _) = a._native(), b._native()
        g = pa.gcd(pb)
        return ParamLaurent._from_native(g, (0, 0, 0))
    import sympy

    q, t, w = sympy.symbols("q t w")
    g = sympy.gcd(_as_sympy(a, q, t, w), _as_sympy(b, q, t, w))
    poly = sympy.Poly(g, q, t, w)
    return ParamLaurent.from_terms(
        {m: rat(Fraction(int(c.p), int(c.q))) for m, c in poly.terms()}
    )


# fixed sample point for hashing fractions compatibly with cross-multiplied equality
_HASH_POINT = (rat(Fraction(3, 7)), rat(Fraction(5, 11)), rat(Fraction(13, 17)))


class ParamScalar:
    """Rational function num/den in q, t, w.

    Normalisation only strips monomial content (the lex-leading term of the
    denominator becomes 1); equality is decided by cross-multiplication.
    ``reduced()`` performs a full gcd reduction on request.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = ParamLaurent.coerce(num)
        den = ParamLaurent.const(1) if den is None else ParamLaurent.coerce(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if den.is_monomial():
            num = num * den.inverse_monomial()
            den = ParamLaurent.const(1)
        else:
            lt = max(den._d)
            unit = ParamLaurent._raw({2 * ZERO_KEY - lt: 1 / den._d[lt]})
            num = num * unit
            den = den * unit
        self.num = num
        self.den = den

    @staticmethod
    def coerce(x) -> "ParamScalar":
        if isinstance(x, ParamScalar):
            return x
        return ParamScalar(ParamLaurent.coerce(x))

    def is_laurent(self) -> bool:
        return self.den == 1

    def as_laurent(self) -> ParamLaurent:
        if self.den == 1:
            return self.num
        q = self.num.try_divexact(self.den)
        if q is None:
            raise ValueError("not a Laurent polynomial")
        return q

    def reduced(self) -> "ParamScalar":
        if self.den == 1 or not self.num:
            return ParamScalar(self.num, self.den)
        q = self.num.try_divexact(self.den)
        if q is not None:
            return ParamScalar(q)
        g = laurent_gcd(self.num, self.den)
        if g.is_monomial():
            return self
        return ParamScalar(self.num.divexact(g), self.den.divexact(g))

    def __bool__(self):
        return bool(self.num)

    def __add__(self, other):
        if not isinstance(other, ParamScalar):
            try:
                other = ParamScalar.coerce(other)
            except TypeError:
                return NotImplemented
        if self.den == other.den:
            return ParamScalar(self.num + other.num, self.den)
        return ParamScalar(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return ParamScalar(-self.num, self.den)

    def __sub__(self, other):
        if not isinstance(other, ParamScalar):
            try:
                other = ParamScalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ParamScalar):
            try:
                other = ParamScalar.coerce(other)
            except TypeError:
                return NotImplemented
        return ParamScalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, ParamScalar):
            try:
                other = ParamScalar.coerce(other)
            except TypeError:
                return NotImplemented
        if not other.num:
            raise ZeroDivisionError("division by zero")
        return ParamScalar(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return ParamScalar.coerce(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return ParamScalar(self.den, self.num) ** (-e)
        return ParamScalar(self.num ** e, self.den ** e)

    def __eq__(self, other):
        if not isinstance(other, ParamScalar):
            try:
                other = ParamScalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        d = self.den.evaluate(*_HASH_POINT)
        if not d:
            return 0
        return hash(self.num.evaluate(*_HASH_POINT) / d)

    def dilate(self, m: int) -> "ParamScalar":
        return ParamScalar(self.num.dilate(m), self.den.dilate(m))

    def subs_w_tpower(self, n: int) -> "ParamScalar":
        return ParamScalar(self.num.subs_w_tpower(n), self.den.subs_w_tpower(n))

    def subs_t_to_q(self) -> "ParamScalar":
        return ParamScalar(self.num.subs_t_to_q(), self.den.subs_t_to_q())

    def has_w(self) -> bool:
        """True unless the fraction is provably w-free after reduction."""
        r = self.reduced()
        return r.num.has_w() or r.den.has_w()

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "ParamScalar":
        return cls(ParamLaurent.from_json(data["num"]), ParamLaurent.from_json(data["den"]))

    def __str__(self):
        if self.den == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"ParamScalar({self})"


def scalar_to_json(x):
    """Serialize a ParamLaurent or ParamScalar uniformly as {"num", "den"}."""
    if isinstance(x, ParamScalar):
        return x.to_json()
    x = ParamLaurent.coerce(x)
    return {"num": x.to_json(), "den": ParamLaurent.const(1).to_json()}


def is_scalar(x) -> bool:
    return isinstance(x, (ParamLaurent, ParamScalar, int, BigRat, Fraction))


ONE = ParamLaurent.const(1)
ZERO = ParamLaurent()
Q = ParamLaurent.monomial(q=1)
T = ParamLaurent.monomial(t=1)
W = ParamLaurent.monomial(w=1)


def qt(q: int = 0, t: int = 0, w: int = 0, coeff=1) -> ParamLaurent:
    """Shorthand for the monomial coeff * q^q t^t w^w."""
    return ParamLaurent.monomial(q, t, w, coeff)
