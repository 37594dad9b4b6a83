"""Symmetric functions in the power-sum basis.

Elements of Lambda are finite maps partition -> scalar.  The module supplies
the p_n / p_n^perp calculus, the vertex-operator coefficients Q_n^{[m]} and
Q*_n^{[m]}, the projections to finitely many variables and Macdonald
polynomials (for eigenvalue tests).
"""

from __future__ import annotations

import re
import threading
from collections import Counter
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Mapping

from .reports import Report
from .scalars import ParamLaurent, ParamScalar, is_scalar, qt, rat, scalar_to_json
from .xpoly import XPoly

Partition = tuple


# -- partitions -------------------------------------------------------------

@lru_cache(maxsize=None)
def partitions(n: int) -> tuple[Partition, ...]:
    """Partitions of n in reverse lexicographic order, (n) first and (1^n) last."""
    out = []

    def rec(rest, maxpart, prefix):
        if rest == 0:
            out.append(tuple(prefix))
            return
        for p in range(min(rest, maxpart), 0, -1):
            prefix.append(p)
            rec(rest - p, p, prefix)
            prefix.pop()

    rec(n, n, [])
    return tuple(out)


def partitions_upto(n: int) -> list[Partition]:
    return [lam for d in range(n + 1) for lam in partitions(d)]


def canon(parts: Iterable[int]) -> Partition:
    parts = tuple(sorted((int(p) for p in parts), reverse=True))
    if any(p <= 0 for p in parts):
        raise ValueError("partition parts must be positive")
    return parts


def weight(lam: Partition) -> int:
    return sum(lam)


@lru_cache(maxsize=None)
def z_lambda(lam: Partition) -> int:
    """k_lambda = prod_k k^{m_k} m_k!, the norm of p_lambda."""
    out = 1
    for k, m in Counter(lam).items():
        out *= k ** m * factorial(m)
    return out


def dominates(lam: Partition, mu: Partition) -> bool:
    if weight(lam) != weight(mu):
        return False
    a = b = 0
    for i in range(max(len(lam), len(mu))):
        a += lam[i] if i < len(lam) else 0
        b += mu[i] if i < len(mu) else 0
        if a < b:
            return False
    return True


def remove_parts(lam: Partition, mu: Partition) -> Partition | None:
    c = Counter(lam)
    c.subtract(Counter(mu))
    if any(v < 0 for v in c.values()):
        return None
    return canon(k for k, v in c.items() for _ in range(v))


def merge_parts(lam: Partition, mu: Partition) -> Partition:
    return tuple(sorted(lam + mu, reverse=True))


def partition_str(lam: Partition) -> str:
    return "p[" + ",".join(str(p) for p in lam) + "]"


_PART = re.compile(r"^\s*p\[\s*([0-9,\s]*)\]\s*$")


def parse_partition(text: str) -> Partition:
    """'p[2,1]' -> (2, 1); 'p[]' is the empty partition."""
    m = _PART.match(text)
    if not m:
        raise ValueError(f"cannot parse partition {text!r}")
    body = m.group(1).strip()
    return canon(int(s) for s in body.split(",") if s.strip()) if body else ()


# -- SymFunc ----------------------------------------------------------------

def _zero(c) -> bool:
    return not c


class SymFunc:
    """Element of Lambda in the power-sum basis."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Partition, object] | None = None):
        self.terms: dict = {}
        for lam, c in (terms or {}).items():
            if not _zero(c):
                self.terms[tuple(lam)] = c

    @classmethod
    def p(cls, lam: Iterable[int] = (), coeff=1) -> "SymFunc":
        return cls({canon(lam): ParamLaurent.coerce(coeff) if isinstance(coeff, int) else coeff})

    @classmethod
    def one(cls) -> "SymFunc":
        return cls.p(())

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: (weight(kv[0]), tuple(-p for p in kv[0])))

    def coeff(self, lam) -> object:
        return self.terms.get(tuple(lam), 0)

    def weights(self) -> set[int]:
        return {weight(lam) for lam in self.terms}

    def is_homogeneous(self, d: int | None = None) -> bool:
        w = self.weights()
        return len(w) <= 1 and (d is None or not w or w == {d})

    def _accumulate(self, lam, c):
        prev = self.terms.get(lam)
        v = c if prev is None else prev + c
        if _zero(v):
            self.terms.pop(lam, None)
        else:
            self.terms[lam] = v

    def __add__(self, other):
        if not isinstance(other, SymFunc):
            return NotImplemented
        out = SymFunc()
        out.terms = dict(self.terms)
        for lam, c in other.terms.items():
            out._accumulate(lam, c)
        return out

    def __neg__(self):
        out = SymFunc()
        out.terms = {lam: -c for lam, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "SymFunc":
        return SymFunc({lam: v * c for lam, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, SymFunc):
            out = SymFunc()
            for la, a in self.terms.items():
                for mu, b in other.terms.items():
                    out._accumulate(merge_parts(la, mu), a * b)
            return out
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def map_coeffs(self, fn) -> "SymFunc":
        return SymFunc({lam: fn(c) for lam, c in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, SymFunc):
            return NotImplemented
        for lam in set(self.terms) | set(other.terms):
            a, b = self.terms.get(lam, 0), other.terms.get(lam, 0)
            if not (a - b == 0 if not isinstance(a, int) else b == a):
                return False
        return True

    __hash__ = None

    def has_w(self) -> bool:
        return any(getattr(c, "has_w", lambda: False)() for c in self.terms.values())

    def to_json(self) -> dict:
        return {"basis": "power-sum",
                "terms": [{"partition": list(lam), "coeff": scalar_to_json(c)} for lam, c in self.items()]}

    @classmethod
    def from_json(cls, data: dict) -> "SymFunc":
        from .scalars import ParamScalar as PS
        out = cls()
        for rec in data["terms"]:
            c = rec["coeff"]
            val = PS.from_json(c) if isinstance(c, dict) else ParamLaurent.from_json(c)
            out._accumulate(tuple(rec["partition"]), val)
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*{partition_str(lam)}" for lam, c in self.items())

    def __repr__(self):
        return f"SymFunc({self})"


# -- p_n and p_n^perp -------------------------------------------------------

def p_mul(n: int, f: SymFunc) -> SymFunc:
    if n < 1:
        raise ValueError("n >= 1 required")
    out = SymFunc()
    for lam, c in f.terms.items():
        out._accumulate(merge_parts(lam, (n,)), c)
    return out


def p_perp(n: int, f: SymFunc) -> SymFunc:
    """n d/dp_n in the power-sum basis."""
    if n < 1:
        raise ValueError("n >= 1 required")
    out = SymFunc()
    for lam, c in f.terms.items():
        k = lam.count(n)
        if k:
            rest = list(lam)
            rest.remove(n)
            out._accumulate(tuple(rest), c * (n * k))
    return out


def hall_inner(f: SymFunc, g: SymFunc):
    """<p_lambda, p_mu> = k_lambda delta."""
    acc = ParamLaurent()
    for lam, a in f.terms.items():
        b = g.terms.get(lam)
        if b is not None:
            acc = a * b * z_lambda(lam) + acc
    return acc


def qt_norm(lam: Partition) -> ParamScalar:
    """k_lambda prod_i (1 - q^{lambda_i}) / (1 - t^{lambda_i})."""
    num, den = ParamLaurent.const(z_lambda(lam)), ParamLaurent.const(1)
    for p in lam:
        num = num * (1 - qt(p))
        den = den * (1 - qt(0, p))
    return ParamScalar(num, den)


def qt_inner(f: SymFunc, g: SymFunc) -> ParamScalar:
    acc = ParamScalar(0)
    for lam, a in f.terms.items():
        b = g.terms.get(lam)
        if b is not None:
            acc = acc + qt_norm(lam) * a * b
    return acc


# -- Q families -------------------------------------------------------------

_Q_LOCK = threading.Lock()
_Q_CACHE: dict[tuple[int, int], SymFunc] = {}


def q_coeff(n: int, m: int = 1) -> SymFunc:
    """Coefficient of v^n in exp(sum_k (1 - t^{mk})/k p_k v^k)."""
    if n < 0:
        return SymFunc()
    key = (n, m)
    with _Q_LOCK:
        hit = _Q_CACHE.get(key)
    if hit is not None:
        return hit
    out = SymFunc()
    if n == 0:
        out = SymFunc.one()
    elif m != 0:
        for mu in partitions(n):
            c = ParamLaurent.const(rat(1) / z_lambda(mu))
            for p in mu:
                c = c * (1 - qt(0, m * p))
            out._accumulate(mu, c)
    with _Q_LOCK:
        _Q_CACHE[key] = out
    return out


def q_coeff_series(n_max: int, m: int = 1) -> list[SymFunc]:
    """Q_0 .. Q_{n_max} read off H(v)/H(t^m v) by multiplying truncated series."""
    h = [SymFunc.one()] + [SymFunc({mu: ParamLaurent.const(rat(1) / z_lambda(mu)) for mu in partitions(k)})
                           for k in range(1, n_max + 1)]
    # 1/H(t^m v) = exp(-sum p_k t^{mk} v^k / k), so its coefficients are (-1)^{l(mu)} t^{m|mu|}/z_mu
    hinv = [SymFunc({mu: ParamLaurent.const(rat((-1) ** len(mu)) / z_lambda(mu)) * qt(0, m * k)
                     for mu in partitions(k)}) for k in range(n_max + 1)]
    out = []
    for n in range(n_max + 1):
        acc = SymFunc()
        for k in range(n + 1):
            acc = acc + h[k] * hinv[n - k]
        out.append(acc)
    return out


def _submultisets(lam: Partition, n: int):
    """Sub-multisets mu of lam with |mu| = n, with the multiplicity weight prod_k C(m_k(lam), m_k(mu))."""
    counts = sorted(Counter(lam).items(), reverse=True)

    def rec(idx, rest, chosen):
        if rest == 0:
            yield tuple(chosen)
            return
        if idx == len(counts):
            return
        part, avail = counts[idx]
        for j in range(min(avail, rest // part), -1, -1):
            yield from rec(idx + 1, rest - j * part, chosen + [(part, j, avail)])

    for chosen in rec(0, n, []):
        yield chosen


def qstar_apply(n: int, m: int, f: SymFunc) -> SymFunc:
    """Q*_n^{[m]} f: coefficient of v^n in exp(sum_k (1 - q^{mk})/k p_k^perp v^k)."""
    if n < 0:
        return SymFunc()
    if n == 0:
        return f
    if m == 0:
        return SymFunc()
    out = SymFunc()
    for lam, c in f.terms.items():
        if weight(lam) < n:
            continue
        for chosen in _submultisets(lam, n):
            coeff = ParamLaurent.const(1)
            rest = Counter(lam)
            for part, j, avail in chosen:
                if j:
                    coeff = coeff * comb(avail, j) * (1 - qt(m * part)) ** j
                    rest[part] -= j
            out._accumulate(canon(k for k, v in rest.items() for _ in range(v)), c * coeff)
    return out


def qstar_q_commutator_check(m: int, n: int, s: int, r: int, degree: int, verbose=False) -> Report:
    """[Q*_m^{[s]}, Q_n^{[r]}] against the closed commutator formula on every p_lambda up to degree."""
    report = Report("appendixD", {"m": m, "n": n, "s": s, "r": r, "degree": degree})
    pref = (1 - qt(s)) * (1 - qt(0, r))
    qtsr = qt(s, r)
    for lam in partitions_upto(degree):
        f = SymFunc.p(lam)
        lhs = qstar_apply(m, s, q_coeff(n, r) * f) - q_coeff(n, r) * qstar_apply(m, s, f)
        rhs = SymFunc()
        top = min(m, n)
        for i in range(1, top + 1):
            for j in range(0, top - i + 1):
                term = q_coeff(n - i - j, r) * qstar_apply(m - i - j, s, f)
                rhs = rhs + term.scale(pref * qtsr ** j)
        report.add({"m": m, "n": n, "s": s, "r": r, "p": list(lam)}, None, lhs == rhs, lhs, rhs, verbose)
    return report


# -- projections ------------------------------------------------------------

@lru_cache(maxsize=None)
def _power_sum(N: int, k: int) -> XPoly:
    return XPoly.power_sum(N, k)


@lru_cache(maxsize=None)
def _p_lambda(N: int, lam: Partition) -> XPoly:
    out = XPoly.const(N)
    for k in lam:
        out = out * _power_sum(N, k)
    return out


def pi_n(f: SymFunc, N: int) -> XPoly:
    out = XPoly(N)
    for lam, c in f.terms.items():
        out = out + _p_lambda(N, lam) * c
    return out


def pi_n1(e: "VElement", N: int) -> XPoly:
    """v -> x_1, p_n -> x_1^n + ... + x_N^n."""
    out = XPoly(N)
    for a, f in e.parts.items():
        out = out + pi_n(f, N).mul_monomial((a,) + (0,) * (N - 1))
    return out


def tau_n(e: SymFunc, N: int) -> XPoly:
    """w -> t^N on coefficients, then p_n -> power sums."""
    return pi_n(e.map_coeffs(lambda c: c.subs_w_tpower(N)), N)


class VElement:
    """Element of Lambda[v]: v-degree -> SymFunc."""

    __slots__ = ("parts",)

    def __init__(self, parts: Mapping[int, SymFunc] | None = None):
        self.parts = {a: f for a, f in (parts or {}).items() if not f.is_zero()}

    @classmethod
    def monomial(cls, a: int, lam: Partition = (), coeff=1) -> "VElement":
        return cls({a: SymFunc.p(lam, coeff)})

    @classmethod
    def head(cls, f: SymFunc) -> "VElement":
        return cls({0: f})

    def is_zero(self):
        return not self.parts

    def __add__(self, other):
        parts = dict(self.parts)
        for a, f in other.parts.items():
            parts[a] = parts[a] + f if a in parts else f
        return VElement(parts)

    def __neg__(self):
        return VElement({a: -f for a, f in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return VElement({a: f.scale(c) for a, f in self.parts.items()})

    def head_part(self) -> SymFunc:
        return self.parts.get(0, SymFunc())

    def tail_part(self) -> "VElement":
        return VElement({a: f for a, f in self.parts.items() if a > 0})

    def items(self):
        for a in sorted(self.parts):
            for lam, c in self.parts[a].items():
                yield (a, lam), c

    def __eq__(self, other):
        if not isinstance(other, VElement):
            return NotImplemented
        return all(self.parts.get(a, SymFunc()) == other.parts.get(a, SymFunc())
                   for a in set(self.parts) | set(other.parts))

    __hash__ = None

    def __str__(self):
        if not self.parts:
            return "0"
        return " + ".join(f"v^{a}*[{f}]" for a, f in sorted(self.parts.items()))


# -- monomial basis, Macdonald and Schur functions ---------------------------

@lru_cache(maxsize=None)
def _p_to_m(n: int) -> dict:
    """Coefficient of m_lambda in p_mu, read off the monomial x^lambda of p_mu in n variables."""
    table = {}
    for mu in partitions(n):
        poly = _p_lambda(n, mu)
        for lam in partitions(n):
            e = tuple(lam) + (0,) * (n - len(lam))
            c = poly.coeff(e)
            table[(mu, lam)] = c.constant_value() if isinstance(c, ParamLaurent) else rat(c)
    return table


@lru_cache(maxsize=None)
def monomial_to_p(lam: Partition) -> SymFunc:
    """m_lambda in the power-sum basis, by inverting the (triangular) p -> m transition."""
    n = weight(lam)
    parts = partitions(n)
    table = _p_to_m(n)
    # p_mu = sum_{nu >= mu} L[mu, nu] m_nu; solve for m from the most dominant down
    m_in_p: dict[Partition, dict] = {}
    for nu in parts:
        # L[nu, nu] m_nu = p_nu - sum_{rho > nu} L[nu, rho] m_rho
        vec = {nu: rat(1)}
        for rho in parts:
            if rho == nu:
                break
            c = table[(nu, rho)]
            if c:
                for k, v in m_in_p[rho].items():
                    vec[k] = vec.get(k, 0) - c * v
        diag = table[(nu, nu)]
        m_in_p[nu] = {k: v / diag for k, v in vec.items() if v}
    return SymFunc({k: ParamLaurent.const(v) for k, v in m_in_p[lam].items()})


def _coerce_scalar(c):
    return c if isinstance(c, ParamScalar) else ParamScalar.coerce(c)


@lru_cache(maxsize=None)
def macdonald_poly(lam: Partition) -> SymFunc:
    """Macdonald P_lambda: Gram-Schmidt of m_mu (from (1^n) upwards) under the q,t inner product,
    monic in m_lambda."""
    lam = canon(lam)
    n = weight(lam)
    order = list(reversed(partitions(n)))      # least dominant first
    done: dict[Partition, tuple[SymFunc, ParamScalar]] = {}
    for mu in order:
        f = monomial_to_p(mu).map_coeffs(_coerce_scalar)
        for nu, (g, norm) in done.items():
            if dominates(mu, nu):
                c = (qt_inner(monomial_to_p(mu), g) / norm).reduced()
                f = f - g.scale(c)
        f = f.map_coeffs(lambda c: c.reduced())
        if mu == lam:
            return f
        done[mu] = (f, qt_inner(f, f).reduced())
    raise AssertionError("unreachable")


def h_p(n: int) -> SymFunc:
    if n < 0:
        return SymFunc()
    return SymFunc({mu: ParamLaurent.const(rat(1) / z_lambda(mu)) for mu in partitions(n)}) if n else SymFunc.one()


def schur(lam: Partition) -> SymFunc:
    """Jacobi-Trudi det[h_{lambda_i - i + j}] by cofactor expansion."""
    lam = canon(lam)
    k = len(lam)
    if k == 0:
        return SymFunc.one()

    def det(rows, cols):
        if not rows:
            return SymFunc.one()
        i = rows[0]
        acc = SymFunc()
        for pos, j in enumerate(cols):
            entry = h_p(lam[i] - i + j)
            if entry.is_zero():
                continue
            minor = det(rows[1:], cols[:pos] + cols[pos + 1:])
            term = entry * minor
            acc = acc + (term if pos % 2 == 0 else -term)
        return acc

    return det(list(range(k)), list(range(k)))


__all__ = [
    "Partition", "partitions", "partitions_upto", "z_lambda", "SymFunc", "VElement", "p_mul", "p_perp",
    "hall_inner", "qt_inner", "q_coeff", "qstar_apply", "qstar_q_commutator_check", "pi_n", "pi_n1",
    "tau_n", "monomial_to_p", "macdonald_poly", "schur", "parse_partition",
]
