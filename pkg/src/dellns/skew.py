"""Normal-ordered operators  sum  f(x) * gamma^m * pi  on polynomials in N variables.

Each term keeps its coefficient on the left, the multiplicative shift
gamma^m (x_i -> q^{-m_i} x_i) in the middle and the permutation on the right.
Composition moves shifts and permutations through coefficients using
gamma_i x_j = q^{-delta_ij} x_j gamma_i, pi x_i = x_{pi(i)} pi and
pi gamma_i = gamma_{pi(i)} pi.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .scalars import qt
from .xpoly import NonPolynomialResult, XPoly, XRational

Key = tuple  # (shift, perm)


def identity_perm(N: int) -> tuple[int, ...]:
    return tuple(range(N))


def compose_perm(p1, p2) -> tuple[int, ...]:
    """(p1 o p2)(i) = p1[p2[i]]."""
    return tuple(p1[i] for i in p2)


def inverse_perm(p) -> tuple[int, ...]:
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v] = i
    return tuple(inv)


def transposition(N: int, i: int, j: int) -> tuple[int, ...]:
    p = list(range(N))
    p[i], p[j] = p[j], p[i]
    return tuple(p)


def _move_shift(perm, m) -> tuple[int, ...]:
    """pi gamma^m pi^{-1} = gamma^{m'} with m'[pi(i)] = m[i]."""
    out = [0] * len(m)
    for i, v in enumerate(m):
        out[perm[i]] = v
    return tuple(out)


class SkewOp:
    __slots__ = ("N", "terms")

    def __init__(self, N: int, terms: Mapping[Key, XRational] | None = None):
        self.N = N
        self.terms: dict[Key, XRational] = {}
        if terms:
            for key, c in terms.items():
                self._accumulate(key, c)

    def _accumulate(self, key, c: XRational):
        prev = self.terms.get(key)
        v = c if prev is None else prev + c
        if v.is_zero():
            self.terms.pop(key, None)
        else:
            self.terms[key] = v

    # constructors ---------------------------------------------------------
    @classmethod
    def identity(cls, N: int) -> "SkewOp":
        return cls(N, {((0,) * N, identity_perm(N)): XRational.const(N)})

    @classmethod
    def zero(cls, N: int) -> "SkewOp":
        return cls(N)

    @classmethod
    def gamma(cls, N: int, i: int, n: int = 1) -> "SkewOp":
        m = [0] * N
        m[i] = n
        return cls(N, {(tuple(m), identity_perm(N)): XRational.const(N)})

    @classmethod
    def shift_op(cls, N: int, m: Iterable[int]) -> "SkewOp":
        return cls(N, {(tuple(m), identity_perm(N)): XRational.const(N)})

    @classmethod
    def perm_op(cls, N: int, perm: tuple[int, ...]) -> "SkewOp":
        return cls(N, {((0,) * N, tuple(perm)): XRational.const(N)})

    @classmethod
    def swap(cls, N: int, i: int, j: int) -> "SkewOp":
        return cls.perm_op(N, transposition(N, i, j))

    @classmethod
    def mult(cls, f) -> "SkewOp":
        if isinstance(f, XPoly):
            f = XRational(f)
        return cls(f.N, {((0,) * f.N, identity_perm(f.N)): f})

    # algebra --------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_identity(self) -> bool:
        if len(self.terms) != 1:
            return False
        (m, p), c = next(iter(self.terms.items()))
        return not any(m) and p == identity_perm(self.N) and c == 1

    def __add__(self, other):
        if not isinstance(other, SkewOp):
            return NotImplemented
        out = SkewOp(self.N)
        out.terms = dict(self.terms)
        for key, c in other.terms.items():
            out._accumulate(key, c)
        return out

    def __neg__(self):
        out = SkewOp(self.N)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "SkewOp":
        """Left multiplication by a parameter scalar or x-rational function."""
        out = SkewOp(self.N)
        if isinstance(c, XPoly):
            c = XRational(c)
        for key, v in self.terms.items():
            w = c * v if isinstance(c, XRational) else v * c
            if not w.is_zero():
                out.terms[key] = w
        return out

    def __mul__(self, other):
        if isinstance(other, SkewOp):
            return self.compose(other)
        return SkewOp(self.N, {k: v * other for k, v in self.terms.items()})

    def __rmul__(self, other):
        return self.scale(other)

    def compose(self, other: "SkewOp") -> "SkewOp":
        """self o other, re-normalised."""
        out = SkewOp(self.N)
        for (m1, p1), c1 in self.terms.items():
            for (m2, p2), c2 in other.terms.items():
                c = c1 * c2.permute(p1).shift(m1)
                m = tuple(a + b for a, b in zip(m1, _move_shift(p1, m2)))
                out._accumulate((m, compose_perm(p1, p2)), c)
        for key in list(out.terms):
            out.terms[key] = out.terms[key].reduce()
        return out

    def conjugate(self, perm: tuple[int, ...]) -> "SkewOp":
        """pi A pi^{-1}."""
        P = SkewOp.perm_op(self.N, perm)
        Pinv = SkewOp.perm_op(self.N, inverse_perm(perm))
        return P.compose(self).compose(Pinv)

    def restrict_symmetric(self) -> "SkewOp":
        """Drop permutations, valid on polynomials symmetric in all variables."""
        out = SkewOp(self.N)
        ident = identity_perm(self.N)
        for (m, _), c in self.terms.items():
            out._accumulate((m, ident), c)
        for key in list(out.terms):
            out.terms[key] = out.terms[key].reduce()
        return out

    def reduce(self) -> "SkewOp":
        out = SkewOp(self.N)
        out.terms = {k: c.reduce() for k, c in self.terms.items()}
        return out

    def __eq__(self, other):
        if not isinstance(other, SkewOp):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        for k in keys:
            a, b = self.terms.get(k), other.terms.get(k)
            if a is None:
                if not b.is_zero():
                    return False
            elif b is None:
                if not a.is_zero():
                    return False
            elif not a == b:
                return False
        return True

    __hash__ = None

    # action ---------------------------------------------------------------
    def apply_rational(self, f: XPoly) -> XRational:
        """Act on a polynomial, keeping the result over a common denominator."""
        pieces = []
        for (m, p), c in self.terms.items():
            g = f.permute(p).shift(m)
            if g:
                pieces.append((c.num * g, c.den))
        if not pieces:
            return XRational(XPoly(self.N))
        den = XRational.lcm(d for _, d in pieces)
        total = XPoly(self.N)
        for num, d in pieces:
            total = total + XRational(num, d)._lift(den)
        return XRational(total, den)

    def apply(self, f: XPoly) -> XPoly:
        """Act on a polynomial; the sum is divided exactly by the common
        denominator (NonPolynomialResult if that fails)."""
        r = self.apply_rational(f)
        total = r.num
        for (i, j, a, b), mult in r.den.items():
            c = qt(a, b)
            for _ in range(mult):
                total = total.div_linear(i, j, c)
        return total

    def __call__(self, f: XPoly) -> XPoly:
        return self.apply(f)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (m, p), c in sorted(self.terms.items()):
            tag = []
            if any(m):
                tag.append("gamma^" + str(list(m)))
            if p != identity_perm(self.N):
                tag.append("perm" + str([v + 1 for v in p]))
            parts.append(f"{{{c}}}" + ("*" + "*".join(tag) if tag else ""))
        return " + ".join(parts)

    def __repr__(self):
        return f"SkewOp({self})"


__all__ = ["SkewOp", "NonPolynomialResult", "compose_perm", "inverse_perm", "transposition"]
