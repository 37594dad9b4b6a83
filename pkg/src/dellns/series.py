"""Bigraded truncated series in omega (degree 0..K) and u (a Laurent window)."""

from __future__ import annotations

import math
import operator
from typing import Callable, Iterator

from .scalars import ONE, ParamLaurent, W, is_scalar, scalar_to_json


def ptheta_weights(K: int) -> list[tuple[int, int, int]]:
    """All (n, (n^2-n)/2, (-1)^n) with (n^2-n)/2 <= K, sorted by omega degree then n."""
    if K < 0:
        raise ValueError("omega order must be non-negative")
    top = (1 + math.isqrt(1 + 8 * K)) // 2
    out = []
    for n in range(1 - top, top + 1):
        k = (n * n - n) // 2
        if k <= K:
            out.append((n, k, -1 if n % 2 else 1))
    out.sort(key=lambda r: (r[1], r[0]))
    return out


def n_max(K: int) -> int:
    return max(abs(n) for n, _, _ in ptheta_weights(K))


def default_window(K: int, factors: int = 1) -> tuple[int, int]:
    m = factors * n_max(K)
    return (-m, m)


def _is_zero(c) -> bool:
    if isinstance(c, int):
        return c == 0
    z = getattr(c, "is_zero", None)
    if z is not None:
        return z() if callable(z) else bool(z)
    return not c


class OmegaUSeries:
    """Sum over (k, n) of omega^k u^n c_{k,n} with 0 <= k <= K and lo <= n <= hi.

    Truncation damage is tracked per omega layer: ``_ex[k] = m`` means the
    layer-k coefficients with u-exponent <= m are exact while higher ones may
    be polluted by dropped terms; a missing entry means the layer is exact.
    ``exact_through`` is the minimum over layers (None when all are exact).
    """

    __slots__ = ("K", "lo", "hi", "_c", "_ex")

    def __init__(self, K: int, lo: int, hi: int, coeffs=None, exact_through=None, exact=None):
        if K < 0:
            raise ValueError("omega order must be non-negative")
        if lo > hi:
            raise ValueError("empty u-window")
        self.K, self.lo, self.hi = K, lo, hi
        self._c: dict[tuple[int, int], object] = {}
        self._ex: dict[int, int] = {}
        if exact_through is not None:
            self._ex = {k: exact_through for k in range(K + 1)}
        for k, m in (exact or {}).items():
            if k <= K and m is not None:
                self._limit(k, m)
        if coeffs:
            for (k, n), c in coeffs.items():
                if 0 <= k <= K and lo <= n <= hi and not _is_zero(c):
                    self._c[(k, n)] = c
                elif n > hi and k <= K and not _is_zero(c):
                    self._note_dropped(k)

    def _limit(self, k: int, m: int):
        prev = self._ex.get(k)
        if prev is None or m < prev:
            self._ex[k] = m

    def _note_dropped(self, k: int | None = None):
        for kk in (range(self.K + 1) if k is None else (k,)):
            self._limit(kk, self.hi)

    @property
    def exact_through(self) -> int | None:
        return min(self._ex.values()) if self._ex else None

    def layer_exact(self, k: int) -> int | None:
        return self._ex.get(k)

    # construction ---------------------------------------------------------
    @classmethod
    def constant(cls, c, K: int, lo: int, hi: int) -> "OmegaUSeries":
        return cls(K, lo, hi, {(0, 0): c})

    @classmethod
    def ptheta(cls, coeff_of_n: Callable[[int], object], K: int, lo: int | None = None,
               hi: int | None = None) -> "OmegaUSeries":
        """Sum_n omega^{(n^2-n)/2} (-u)^n A^{[n]} with A^{[n]} = coeff_of_n(n)."""
        ws = ptheta_weights(K)
        lo = min(n for n, _, _ in ws) if lo is None else lo
        hi = max(n for n, _, _ in ws) if hi is None else hi
        out = cls(K, lo, hi)
        for n, k, sign in ws:
            c = coeff_of_n(n)
            if lo <= n <= hi and not _is_zero(c):
                out._c[(k, n)] = c if sign > 0 else -c
            elif n > hi and not _is_zero(c):
                out._note_dropped(k)
        return out

    # access ---------------------------------------------------------------
    def __getitem__(self, kn):
        return self._c.get(kn, 0)

    def get(self, k: int, n: int, default=0):
        return self._c.get((k, n), default)

    def items(self) -> Iterator:
        return iter(sorted(self._c.items()))

    def keys(self):
        return sorted(self._c)

    def layer(self, k: int) -> dict[int, object]:
        return {n: c for (kk, n), c in self._c.items() if kk == k}

    def min_u(self, k: int | None = None) -> int | None:
        ns = [n for (kk, n) in self._c if k is None or kk == k]
        return min(ns) if ns else None

    def is_zero(self) -> bool:
        return not self._c

    def valid_hi(self, k: int | None = None) -> int:
        e = self.exact_through if k is None else self._ex.get(k)
        return self.hi if e is None else min(self.hi, e)

    def _blank(self, K=None, lo=None, hi=None, exact=None):
        return OmegaUSeries(self.K if K is None else K, self.lo if lo is None else lo,
                            self.hi if hi is None else hi, exact=exact)

    # arithmetic -----------------------------------------------------------
    def _combine_meta(self, other):
        K = min(self.K, other.K)
        lo, hi = min(self.lo, other.lo), min(self.hi, other.hi)
        ex = dict(self._ex)
        for k, m in other._ex.items():
            ex[k] = m if k not in ex else min(ex[k], m)
        return K, lo, hi, ex

    def __add__(self, other):
        if not isinstance(other, OmegaUSeries):
            other = OmegaUSeries.constant(other, self.K, self.lo, self.hi)
        K, lo, hi, ex = self._combine_meta(other)
        out = OmegaUSeries(K, lo, hi, exact=ex)
        for src in (self, other):
            for kn, c in src._c.items():
                k, n = kn
                if k > K or n < lo:
                    continue
                if n > hi:
                    out._note_dropped(k)
                    continue
                prev = out._c.get(kn)
                v = c if prev is None else prev + c
                if _is_zero(v):
                    out._c.pop(kn, None)
                else:
                    out._c[kn] = v
        return out

    __radd__ = __add__

    def __neg__(self):
        out = self._blank(exact=self._ex)
        out._c = {kn: -c for kn, c in self._c.items()}
        return out

    def __sub__(self, other):
        if not isinstance(other, OmegaUSeries):
            other = OmegaUSeries.constant(other, self.K, self.lo, self.hi)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def mul(self, other: "OmegaUSeries", product: Callable = operator.mul,
            lo: int | None = None, hi: int | None = None) -> "OmegaUSeries":
        """Cauchy product with a custom coefficient product (e.g. operator composition)."""
        K, lo0, hi0, _ = self._combine_meta(other)
        lo = lo0 if lo is None else lo
        hi = hi0 if hi is None else hi
        # layer k of the product reads layer a of self against layer k - a of other
        ex = {}
        mins_a = {a: self.min_u(a) for a in range(K + 1)}
        mins_b = {b: other.min_u(b) for b in range(K + 1)}
        for k in range(K + 1):
            for a in range(k + 1):
                b = k - a
                ea, eb = self._ex.get(a), other._ex.get(b)
                if eb is not None and mins_a[a] is not None:
                    ex[k] = min(ex.get(k, eb + mins_a[a]), eb + mins_a[a])
                if ea is not None and mins_b[b] is not None:
                    ex[k] = min(ex.get(k, ea + mins_b[b]), ea + mins_b[b])
        out = OmegaUSeries(K, lo, hi, exact=ex)
        acc: dict = {}
        dropped = set()
        for (ka, na), ca in self._c.items():
            for (kb, nb), cb in other._c.items():
                k = ka + kb
                if k > K:
                    continue
                n = na + nb
                if n > hi:
                    dropped.add(k)
                    continue
                if n < lo:
                    continue
                v = product(ca, cb)
                prev = acc.get((k, n))
                acc[(k, n)] = v if prev is None else prev + v
        for kn, v in acc.items():
            if not _is_zero(v):
                out._c[kn] = v
        for k in dropped:
            out._note_dropped(k)
        return out

    def __mul__(self, other):
        if isinstance(other, OmegaUSeries):
            return self.mul(other)
        if is_scalar(other):
            return self.map(lambda c: c * other)
        return NotImplemented

    def __rmul__(self, other):
        if is_scalar(other):
            return self.map(lambda c: other * c)
        return NotImplemented

    def map(self, fn: Callable) -> "OmegaUSeries":
        out = self._blank(exact=self._ex)
        for kn, c in self._c.items():
            v = fn(c)
            if not _is_zero(v):
                out._c[kn] = v
        return out

    def map_items(self, fn: Callable) -> "OmegaUSeries":
        """fn(k, n, c) -> new coefficient."""
        out = self._blank(exact=self._ex)
        for (k, n), c in self._c.items():
            v = fn(k, n, c)
            if not _is_zero(v):
                out._c[(k, n)] = v
        return out

    def subs_u(self, c: ParamLaurent) -> "OmegaUSeries":
        """u -> c*u for a monomial c: coefficient (k, n) is multiplied by c^n."""
        return self.map_items(lambda k, n, x: x * (c ** n))

    def shift_u(self, m: int) -> "OmegaUSeries":
        out = OmegaUSeries(self.K, self.lo, self.hi, exact={k: e + m for k, e in self._ex.items()})
        for (k, n), c in self._c.items():
            if n + m > self.hi:
                out._note_dropped(k)
            elif n + m >= self.lo:
                out._c[(k, n + m)] = c
        return out

    def truncate(self, K: int | None = None, lo: int | None = None, hi: int | None = None):
        K = self.K if K is None else K
        lo = self.lo if lo is None else lo
        hi = self.hi if hi is None else hi
        out = OmegaUSeries(K, lo, hi, exact=self._ex)
        for (k, n), c in self._c.items():
            if k <= K and lo <= n <= hi:
                out._c[(k, n)] = c
            elif k <= K and n > hi:
                out._note_dropped(k)
        return out

    # comparison -----------------------------------------------------------
    def diff_layers(self, other: "OmegaUSeries", hi: int | None = None,
                    eq: Callable = operator.eq) -> list[tuple[int, int]]:
        """Layers (k, n) on the common trustworthy range where the two series differ."""
        K = min(self.K, other.K)
        lo = max(self.lo, other.lo)
        bad = []
        for k in range(K + 1):
            top = min(self.valid_hi(k), other.valid_hi(k))
            if hi is not None:
                top = min(top, hi)
            for n in range(lo, top + 1):
                a, b = self._c.get((k, n)), other._c.get((k, n))
                if a is None and b is None:
                    continue
                if a is None:
                    if not _is_zero(b):
                        bad.append((k, n))
                elif b is None:
                    if not _is_zero(a):
                        bad.append((k, n))
                elif not eq(a, b):
                    bad.append((k, n))
        return bad

    def __eq__(self, other):
        if not isinstance(other, OmegaUSeries):
            return NotImplemented
        return not self.diff_layers(other)

    __hash__ = None

    def to_json(self, value_to_json: Callable = scalar_to_json) -> list:
        return [{"omega": k, "u": n, "value": value_to_json(c)} for (k, n), c in self.items()]

    @classmethod
    def from_json(cls, data: list, K: int, lo: int, hi: int, value_from_json: Callable):
        return cls(K, lo, hi, {(r["omega"], r["u"]): value_from_json(r["value"]) for r in data})

    def __repr__(self):
        body = ", ".join(f"w^{k}u^{n}: {c}" for (k, n), c in self.items())
        return f"OmegaUSeries(K={self.K}, [{self.lo},{self.hi}], {{{body}}})"


def theta_scalar(arg: str, K: int, lo: int | None = None, hi: int | None = None) -> OmegaUSeries:
    """theta_omega(u) or theta_omega(u w) truncated at omega order K."""
    if arg == "u":
        return OmegaUSeries.ptheta(lambda n: ONE, K, lo, hi)
    if arg in ("uw", "u*w"):
        return OmegaUSeries.ptheta(lambda n: W ** n, K, lo, hi)
    raise ValueError(f"unsupported theta argument {arg!r}")


def _neg_depth(s: OmegaUSeries) -> int:
    """Largest drop in u-exponent per unit of omega degree among the k >= 1 layers."""
    d = 0
    for (k, n) in s._c:
        if k >= 1 and n < 0:
            d = max(d, -(n // k))
    return d


def series_solve(s: OmegaUSeries, f: OmegaUSeries, apply: Callable = operator.mul,
                 lo: int | None = None, hi: int | None = None) -> OmegaUSeries:
    """Solve s * r = f for r layer by layer, given s_{0,0} acts as the identity.

    ``apply(op, vec)`` is the coefficient action and
    r_{k,n} = f_{k,n} - sum_{(a,b) != (0,0)} apply(s_{a,b}, r_{k-a,n-b}).
    Lower omega layers are solved past ``hi`` far enough that negative
    u-powers in higher layers never read an unsolved coefficient.
    """
    if s.min_u(0) != 0:
        raise ZeroDivisionError("omega^0 layer must start at u^0 with a unit")
    K = min(s.K, f.K)
    lo = f.lo if lo is None else lo
    hi = f.hi if hi is None else hi
    d = _neg_depth(s)
    rest = sorted(((kn, c) for kn, c in s._c.items() if kn != (0, 0)), key=lambda r: r[0])
    fmin = f.min_u()
    fmin = 0 if fmin is None else fmin
    r: dict = {}
    for k in range(K + 1):
        top = hi + (K - k) * d
        for n in range(min(lo, fmin - k * d), top + 1):
            acc = f._c.get((k, n))
            for (a, b), c in rest:
                if a > k:
                    break
                prev = r.get((k - a, n - b))
                if prev is None:
                    continue
                v = apply(c, prev)
                acc = -v if acc is None else acc - v
            if acc is not None and not _is_zero(acc):
                r[(k, n)] = acc
    # r_{k,n} reads f_{k,n}, s_{a,b} against r_{k-a,n-b} (support of r_j
    # starts at or above fmin - j d), and r_{k-a, n-b} with b >= min_u(s_a)
    ex: dict[int, int] = {}
    smin = {a: s.min_u(a) for a in range(K + 1)}
    for k in range(K + 1):
        lim = []
        if f.layer_exact(k) is not None:
            lim.append(f.layer_exact(k))
        for a in range(k + 1):
            if smin[a] is None:
                continue
            if s.layer_exact(a) is not None:
                lim.append(s.layer_exact(a) + fmin - (k - a) * d)
            if a >= 1 and (k - a) in ex:
                lim.append(ex[k - a] + smin[a])
        if lim:
            ex[k] = min(lim)
    out = OmegaUSeries(K, lo, hi, exact=ex)
    for (k, n), c in r.items():
        if lo <= n <= hi:
            out._c[(k, n)] = c
        elif n > hi:
            out._note_dropped(k)
    return out


def series_invert(s: OmegaUSeries, window: tuple[int, int] | None = None,
                  one=None, product: Callable = operator.mul) -> OmegaUSeries:
    """Two-sided inverse of s within the truncation.

    The omega^0 layer must be u^m times a series whose constant term is a
    scalar unit or the identity (pass ``one`` and ``product`` for operator rings).
    """
    lo, hi = window if window is not None else (s.lo, s.hi)
    m = s.min_u(0)
    if m is None:
        raise ZeroDivisionError("omega^0 layer vanishes; series is not invertible")
    if m:
        s = _shift_any(s, -m)
    one = ONE if one is None else one
    c00 = s.get(0, 0)
    scale = None
    if is_scalar(c00) and not c00 == 1:
        if isinstance(c00, ParamLaurent):
            if not c00.is_monomial():
                raise ZeroDivisionError("constant term is not a unit")
            scale = c00.inverse_monomial()
        else:
            scale = 1 / c00
        s = s.map(lambda c: scale * c)
    rhs = OmegaUSeries(s.K, lo + m, hi + m, {(0, 0): one})
    r = series_solve(s, rhs, product, lo=lo + m, hi=hi + m)
    if scale is not None:
        r = r.map(lambda c: c * scale)
    if m:
        r = _shift_any(r, -m)
    return r


def _shift_any(s: OmegaUSeries, m: int) -> OmegaUSeries:
    """Multiply by u^m, moving the window along."""
    out = OmegaUSeries(s.K, s.lo + m, s.hi + m,
                       exact={k: e + m for k, e in s._ex.items()})
    out._c = {(k, n + m): c for (k, n), c in s._c.items()}
    return out
