"""Finite-N operators on Q(q,t)[x_1..x_N]: R-operators, Dell-Cherednik operators,
covariant Z_i / U_i, the generating function D_N(u), I_N(u) and the matrix
resolvent, together with verifiers for the finite-N identities.

Public functions take 1-based variable indices, matching x1..xN.
"""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import permutations, product
from typing import Callable, Iterable, Sequence

from .reports import Report
from .scalars import ONE, T, ParamLaurent, qt
from .series import OmegaUSeries, default_window, n_max, ptheta_weights, series_solve
from .skew import SkewOp, identity_perm, transposition
from .xpoly import NonPolynomialResult, XPoly, XRational


def _check_pair(N: int, i: int, j: int):
    if not (1 <= i <= N and 1 <= j <= N):
        raise IndexError(f"indices ({i}, {j}) out of range for N={N}")
    if i == j:
        raise ValueError("R-operator needs distinct indices")


def _check_index(N: int, i: int):
    if not 1 <= i <= N:
        raise IndexError(f"index {i} out of range for N={N}")


# -- coefficients -----------------------------------------------------------

def a_coeff(N: int, i: int, j: int, n: int) -> XRational:
    """A_ij^{[n]} = (x_i - t^n x_j) / (x_i - x_j), 0-based indices."""
    num = XPoly.const(N).mul_linear(i, j, qt(0, n))
    return XRational.linear_ratio(N, num, i, j).reduce()


def b_coeff(N: int, i: int, j: int, n: int) -> XRational:
    """B_ij^{[n]} = (t^n - 1) x_j / (x_i - x_j), 0-based indices."""
    num = XPoly.var(N, j) * (qt(0, n) - 1)
    return XRational.linear_ratio(N, num, i, j)


def _prod_a(N: int, i: int, others: Iterable[int], n: int) -> XRational:
    out = XRational.const(N)
    for k in others:
        out = out * a_coeff(N, i, k, n)
    return out


# -- R-operators ------------------------------------------------------------

def r_op(N: int, i: int, j: int, n: int = 1) -> SkewOp:
    """R_ij(t^n) = A_ij + B_ij sigma_ij."""
    _check_pair(N, i, j)
    i0, j0 = i - 1, j - 1
    return SkewOp(N, {
        ((0,) * N, identity_perm(N)): a_coeff(N, i0, j0, n),
        ((0,) * N, transposition(N, i0, j0)): b_coeff(N, i0, j0, n),
    })


def twisted_inverse(op: SkewOp, i: int, j: int) -> SkewOp:
    """Inverse of a + b sigma_ij by solving the sigma-twisted 2x2 system.

    With Delta = a sigma(a) - b sigma(b) (sigma-invariant) the inverse is
    sigma(a)/Delta - (b/Delta) sigma.  Delta must reduce to a unit.
    """
    N = op.N
    ident, sw = identity_perm(N), transposition(N, i - 1, j - 1)
    zero = (0,) * N
    for (m, p) in op.terms:
        if any(m) or p not in (ident, sw):
            raise ValueError("operator is not of the form a + b*sigma_ij")
    a = op.terms.get((zero, ident), XRational(XPoly(N)))
    b = op.terms.get((zero, sw), XRational(XPoly(N)))
    delta = (a * a.permute(sw) - b * b.permute(sw)).reduce()
    if delta.den or len(delta.num) != 1 or any(next(iter(delta.num._d))):
        raise ZeroDivisionError("twisted system is singular in the linear-factor class")
    c = next(iter(delta.num._d.values()))
    if not isinstance(c, ParamLaurent) or not c.is_monomial():
        raise ZeroDivisionError("determinant is not a unit")
    inv = c.inverse_monomial()
    return SkewOp(N, {
        (zero, ident): (a.permute(sw) * inv).reduce(),
        (zero, sw): (b * (-inv)).reduce(),
    })


def r_op_inverse(N: int, i: int, j: int, n: int = 1) -> SkewOp:
    _check_pair(N, i, j)
    return twisted_inverse(r_op(N, i, j, n), i, j)


# -- Dell-Cherednik operators ----------------------------------------------

def cherednik_factors(N: int, i: int, n: int, offset: int = 0) -> tuple[ParamLaurent, list[SkewOp]]:
    """Scalar and ordered factors of C_i^{[n]}; the rightmost factor acts first.

    ``offset`` = k builds the operator of the subsystem x_{k+1}..x_N.
    """
    _check_index(N, i)
    if i <= offset:
        raise IndexError("index inside the frozen variables")
    factors = [r_op(N, i, j, n) for j in range(i + 1, N + 1)]
    factors.append(SkewOp.gamma(N, i - 1, n))
    factors += [r_op_inverse(N, j, i, n) for j in range(offset + 1, i)]
    return qt(0, n * (i - 1 - offset)), factors


@lru_cache(maxsize=None)
def cherednik_term(N: int, i: int, n: int, offset: int = 0) -> SkewOp:
    scalar, factors = cherednik_factors(N, i, n, offset)
    out = SkewOp.identity(N)
    for f in factors:
        out = out.compose(f)
    return out * scalar


def dell_cherednik(N: int, i: int, K: int, offset: int = 0, lo=None, hi=None) -> OmegaUSeries:
    """P-theta(u C_i) as a series of normal-ordered operators."""
    return OmegaUSeries.ptheta(lambda n: cherednik_term(N, i, n, offset), K, lo, hi)


class FactorChain:
    """An operator kept as scalar * F_1 ... F_r and applied factor by factor."""

    def __init__(self, scalar, factors: Sequence[SkewOp]):
        self.scalar = scalar
        self.factors = list(factors)

    def apply(self, f: XPoly) -> XPoly:
        for op in reversed(self.factors):
            f = op.apply(f)
        return f * self.scalar

    def __neg__(self):
        return FactorChain(-self.scalar, self.factors)

    def is_zero(self):
        return not self.scalar


def dell_cherednik_chain(N: int, i: int, K: int, offset: int = 0, lo=None, hi=None) -> OmegaUSeries:
    """Same series as dell_cherednik, with unexpanded factor chains as coefficients."""
    return OmegaUSeries.ptheta(lambda n: FactorChain(*cherednik_factors(N, i, n, offset)), K, lo, hi)


# -- covariant operators ----------------------------------------------------

@lru_cache(maxsize=None)
def z_op(N: int, i: int, n: int) -> SkewOp:
    """Z_i^{[n]} = prod_{k!=i} A_ik gamma_i^n + sum_{j!=i} B_ij prod_{k!=i,j} A_jk gamma_j^n sigma_ij."""
    _check_index(N, i)
    i0 = i - 1
    terms = {}
    shift_i = tuple(n if k == i0 else 0 for k in range(N))
    terms[(shift_i, identity_perm(N))] = _prod_a(N, i0, [k for k in range(N) if k != i0], n)
    for j0 in range(N):
        if j0 == i0:
            continue
        coeff = b_coeff(N, i0, j0, n) * _prod_a(N, j0, [k for k in range(N) if k not in (i0, j0)], n)
        shift_j = tuple(n if k == j0 else 0 for k in range(N))
        terms[(shift_j, transposition(N, i0, j0))] = coeff
    return SkewOp(N, terms).reduce()


@lru_cache(maxsize=None)
def u_op(N: int, i: int, n: int) -> SkewOp:
    """U_i^{[n]} = (t^n - 1) prod_{j!=i} A_ij gamma_i^n."""
    _check_index(N, i)
    i0 = i - 1
    coeff = _prod_a(N, i0, [k for k in range(N) if k != i0], n) * (qt(0, n) - 1)
    shift_i = tuple(n if k == i0 else 0 for k in range(N))
    return SkewOp(N, {(shift_i, identity_perm(N)): coeff}).reduce()


@lru_cache(maxsize=None)
def v1_op(N: int, n: int) -> SkewOp:
    """V_1^{[n]} = (t^n - 1) sum_i prod_{l!=i} A_il sigma_1i."""
    terms = {}
    for i0 in range(N):
        coeff = _prod_a(N, i0, [k for k in range(N) if k != i0], n) * (qt(0, n) - 1)
        perm = transposition(N, 0, i0) if i0 else identity_perm(N)
        terms[((0,) * N, perm)] = coeff
    return SkewOp(N, terms).reduce()


@lru_cache(maxsize=None)
def z_matrix_entry(N: int, i: int, j: int, n: int) -> SkewOp:
    """Entry (i, j) of the operator matrix: prod A_il gamma_i^n on the diagonal,
    B_ij prod_{l!=i,j} A_jl gamma_j^n off it."""
    i0, j0 = i - 1, j - 1
    if i0 == j0:
        coeff = _prod_a(N, i0, [k for k in range(N) if k != i0], n)
    else:
        coeff = b_coeff(N, i0, j0, n) * _prod_a(N, j0, [k for k in range(N) if k not in (i0, j0)], n)
    shift = tuple(n if k == j0 else 0 for k in range(N))
    return SkewOp(N, {(shift, identity_perm(N)): coeff}).reduce()


# -- generating functions ---------------------------------------------------

def multi_indices(N: int, K: int) -> list[tuple[tuple[int, ...], int]]:
    """All n-vectors with total omega-cost sum (n_i^2 - n_i)/2 <= K, with that cost."""
    weights = [(n, k) for n, k, _ in ptheta_weights(K)]
    out = []

    def rec(prefix, cost):
        if len(prefix) == N:
            out.append((tuple(prefix), cost))
            return
        for n, k in weights:
            if cost + k <= K:
                rec(prefix + [n], cost + k)

    rec([], 0)
    return out


@lru_cache(maxsize=None)
def _dn_term(N: int, nvec: tuple[int, ...]) -> XRational:
    num = XPoly.const(N)
    tpow = 0
    vand = {}
    for i in range(N):
        for j in range(i + 1, N):
            # t^{n_j} x_i - t^{n_i} x_j = t^{n_j} (x_i - t^{n_i - n_j} x_j)
            tpow += nvec[j]
            num = num.mul_linear(i, j, qt(0, nvec[i] - nvec[j]))
            vand[(i, j, 0, 0)] = 1
    sign = -1 if sum(nvec) % 2 else 1
    return XRational(num * qt(0, tpow, 0, sign), vand).reduce()


def d_n_generating(N: int, K: int, lo: int | None = None, hi: int | None = None) -> OmegaUSeries:
    """D_N(u) = sum over n-vectors of omega^cost (-u)^{|n|} prod_{i<j}(...)/(x_i - x_j) gamma^n."""
    idx = multi_indices(N, K)
    lo = min(sum(v) for v, _ in idx) if lo is None else lo
    hi = max(sum(v) for v, _ in idx) if hi is None else hi
    layers: dict = {}
    for nvec, cost in idx:
        s = sum(nvec)
        if not lo <= s <= hi:
            continue
        op = layers.setdefault((cost, s), SkewOp(N))
        op._accumulate((nvec, identity_perm(N)), _dn_term(N, nvec))
    out = OmegaUSeries(K, lo, hi)
    for kn, op in layers.items():
        if not op.is_zero():
            out._c[kn] = op
    return out


def macdonald_determinant(N: int) -> OmegaUSeries:
    """det[x_i^{N-j}(1 - u t^{j-1} gamma_i)] / det[x_i^{N-j}] expanded row by row (omega^0 only)."""
    vand = {(i, j, 0, 0): 1 for i in range(N) for j in range(i + 1, N)}
    layers: dict[int, SkewOp] = {}
    for perm in permutations(range(N)):
        sign = _perm_sign(perm)
        # row i picks column perm[i]: x_i^{N-1-perm[i]} (1 - u t^{perm[i]} gamma_i)
        for subset in product((0, 1), repeat=N):
            exps = tuple(N - 1 - perm[i] for i in range(N))
            tpow = sum(perm[i] for i in range(N) if subset[i])
            k = sum(subset)
            c = qt(0, tpow, 0, sign * (-1) ** k)
            op = layers.setdefault(k, SkewOp(N))
            op._accumulate((tuple(subset), identity_perm(N)), XRational(XPoly.monomial(N, exps, c), vand))
    out = OmegaUSeries(0, 0, N)
    for k, op in layers.items():
        op = op.reduce()
        if not op.is_zero():
            out._c[(0, k)] = op
    return out


def _perm_sign(perm) -> int:
    sign, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# -- applying operator series ----------------------------------------------

def _apply(op, f):
    return op.apply(f)


def _apply_rational(op, f):
    return op.apply_rational(f)


def apply(op, f: XPoly):
    """Apply a SkewOp (returns XPoly) or a series of operators (returns a series)."""
    if isinstance(op, OmegaUSeries):
        return op.map(lambda c: c.apply(f))
    return op.apply(f)


def as_series(f, K: int, lo: int, hi: int) -> OmegaUSeries:
    return OmegaUSeries(K, lo, hi, {(0, 0): f})


def apply_to_series(ops: OmegaUSeries, fs: OmegaUSeries, lo: int | None = None,
                    hi: int | None = None) -> OmegaUSeries:
    return ops.mul(fs, product=_apply, lo=lo, hi=hi)


def solve_with(ops: OmegaUSeries, fs: OmegaUSeries, lo: int, hi: int) -> OmegaUSeries:
    """ops^{-1} fs for an operator series whose omega^0 u^0 term is the identity."""
    c00 = ops.get(0, 0)
    if not (getattr(c00, "is_identity", lambda: False)()):
        raise ZeroDivisionError("leading term is not the identity")
    return series_solve(ops, fs, _apply, lo=lo, hi=hi)


class INGenerating:
    """I_N(u) = D_N(ut) D_N(u)^{-1}, applied to symmetric polynomials."""

    def __init__(self, N: int, K: int, window: tuple[int, int] | None = None, determinant=None):
        self.N, self.K = N, K
        self.lo, self.hi = window if window is not None else default_window(K, N)
        self.D = determinant if determinant is not None else d_n_generating(N, K)
        if self.D.K < K:
            raise ValueError("determinant series truncated below the requested omega order")
        self.Dt = self.D.map_items(lambda k, n, op: op * (T ** n) if n else op)
        self._pad = max(0, -(self.D.min_u() or 0)) * (K + 1) + n_max(K)

    def apply(self, f: XPoly) -> OmegaUSeries:
        lo, hi = self.lo, self.hi
        r = solve_with(self.D, as_series(f, self.K, lo - self._pad, hi + self._pad),
                       lo - self._pad, hi + self._pad)
        out = apply_to_series(self.Dt, r, lo=lo, hi=hi)
        if out.valid_hi() < hi:
            raise ArithmeticError("u-window too narrow for an exact result")
        return out


def i_n_generating(N: int, K: int, window: tuple[int, int] | None = None) -> INGenerating:
    return INGenerating(N, K, window)


# -- verification -----------------------------------------------------------

def partitions_upto(degree: int, max_len: int | None = None) -> list[tuple[int, ...]]:
    out = []

    def rec(n, maxpart, prefix):
        if n == 0:
            out.append(tuple(prefix))
            return
        for p in range(min(n, maxpart), 0, -1):
            rec(n - p, p, prefix + [p])

    for d in range(degree + 1):
        rec(d, d, [])
    if max_len is not None:
        out = [p for p in out if len(p) <= max_len]
    return out


def symmetric_basis(N: int, degree: int) -> list[tuple[tuple[int, ...], XPoly]]:
    return [(mu, XPoly.monomial_symmetric(N, mu)) for mu in partitions_upto(degree, N)]


def compare_series(report: Report, label, lhs: OmegaUSeries, rhs: OmegaUSeries, verbose=False):
    bad = set(lhs.diff_layers(rhs))
    top = min(lhs.valid_hi(), rhs.valid_hi())
    keys = sorted({kn for kn in lhs.keys() + rhs.keys() if kn[1] <= top and kn[1] >= max(lhs.lo, rhs.lo)})
    if not keys:
        report.add(label, None, True)
    for kn in keys:
        ok = kn not in bad
        report.add(label, kn, ok, lhs.get(*kn), rhs.get(*kn), verbose)


def ptheta_product(N: int, K: int, symbolic: bool = True, offset: int = 0, scale_t: int = 0,
                   indices: Iterable[int] | None = None, lo=None, hi=None):
    """Ordered product P-theta(u C_{first}) ... P-theta(u C_N) as a series of SkewOps."""
    indices = list(range(offset + 1, N + 1)) if indices is None else list(indices)
    lo0, hi0 = default_window(K, len(indices))
    lo = lo0 if lo is None else lo
    hi = hi0 if hi is None else hi
    out = OmegaUSeries.constant(SkewOp.identity(N), K, lo, hi)
    for i in indices:
        s = dell_cherednik(N, i, K, offset)
        if scale_t:
            s = s.map_items(lambda k, n, op: op * (T ** (scale_t * n)) if n else op)
        out = out.mul(s, product=lambda a, b: a.compose(b), lo=lo, hi=hi)
    return out


def verify_theorem5(N: int, K: int = 1, degree: int = 3, path: str = "both", verbose=False) -> Report:
    """D_N(u) = P-theta(u C_1) ... P-theta(u C_N) on symmetric polynomials."""
    report = Report("theorem5", {"N": N, "K": K, "degree": degree, "path": path})
    lo, hi = default_window(K, N)
    D = d_n_generating(N, K, lo, hi)
    sym = ptheta_product(N, K).map(lambda op: op.restrict_symmetric()) if path in ("symbolic", "both") else None
    chains = [dell_cherednik_chain(N, i, K, lo=lo, hi=hi) for i in range(1, N + 1)]
    for mu, f in symmetric_basis(N, degree):
        lhs = apply(D, f)
        if sym is not None:
            compare_series(report, {"m": list(mu), "path": "symbolic"}, lhs, apply(sym, f), verbose)
        if path in ("apply", "both"):
            rhs = as_series(f, K, lo, hi)
            for s in reversed(chains):
                rhs = apply_to_series(s, rhs, lo, hi)
            compare_series(report, {"m": list(mu), "path": "apply"}, lhs, rhs, verbose)
    return report


def _z_series(N: int, i: int, K: int):
    return OmegaUSeries.ptheta(lambda n: z_op(N, i, n), K)


def _u_series(N: int, i: int, K: int):
    return OmegaUSeries.ptheta(lambda n: u_op(N, i, n), K)


def theorem6_rhs(N: int, K: int, f: XPoly, lo: int, hi: int) -> OmegaUSeries:
    """1 + sum_i P-theta(u U_i) P-theta(u Z_i)^{-1} applied to f."""
    pad = n_max(K) * (K + 1)
    # single summands are rational; only the sum over i is polynomial
    total = as_series(XRational(f), K, lo, hi)
    for i in range(1, N + 1):
        r = solve_with(_z_series(N, i, K), as_series(f, K, lo - pad, hi + pad), lo - pad, hi + pad)
        total = total + _u_series(N, i, K).mul(r, product=_apply_rational, lo=lo, hi=hi)
    return total.map(XRational.as_poly)


def verify_theorem6(N: int, K: int = 1, degree: int = 3, window=None, verbose=False) -> Report:
    lo, hi = window if window is not None else default_window(K, N)
    report = Report("theorem6", {"N": N, "K": K, "degree": degree, "window": [lo, hi]})
    gen = INGenerating(N, K, (lo, hi))
    for mu, f in symmetric_basis(N, degree):
        compare_series(report, {"m": list(mu)}, gen.apply(f), theorem6_rhs(N, K, f, lo, hi), verbose)
    return report


class XVector:
    """Column of polynomials, the carrier of the matrix resolvent."""

    __slots__ = ("items",)

    def __init__(self, items: Sequence[XPoly]):
        self.items = tuple(items)

    def __add__(self, other):
        return XVector([a + b for a, b in zip(self.items, other.items)])

    def __sub__(self, other):
        return XVector([a - b for a, b in zip(self.items, other.items)])

    def __neg__(self):
        return XVector([-a for a in self.items])

    def is_zero(self):
        return all(a.is_zero() for a in self.items)

    def __eq__(self, other):
        return all(a == b for a, b in zip(self.items, other.items))


class OpMatrix:
    """N x N matrix of SkewOps acting on XVectors."""

    def __init__(self, rows: list[list[SkewOp]]):
        self.rows = rows

    def apply(self, v: XVector) -> XVector:
        N = len(self.rows)
        out = []
        for i in range(N):
            acc = XRational(XPoly(v.items[0].N))
            for j in range(N):
                op = self.rows[i][j]
                if op is not None and not op.is_zero():
                    acc = acc + op.apply_rational(v.items[j])
            out.append(acc.as_poly())
        return XVector(out)

    def __neg__(self):
        return OpMatrix([[None if op is None else -op for op in row] for row in self.rows])

    def is_zero(self):
        return all(op is None or op.is_zero() for row in self.rows for op in row)

    def is_identity(self):
        N = len(self.rows)
        for i in range(N):
            for j in range(N):
                op = self.rows[i][j]
                if i == j:
                    if op is None or not op.is_identity():
                        return False
                elif op is not None and not op.is_zero():
                    return False
        return True


def z_matrix(N: int, n: int) -> OpMatrix:
    return OpMatrix([[z_matrix_entry(N, i, j, n) for j in range(1, N + 1)] for i in range(1, N + 1)])


def resolvent_rhs(N: int, K: int, f: XPoly, lo: int, hi: int) -> OmegaUSeries:
    """1 + P-theta(u U) P-theta(u Zmat)^{-1} E applied to f."""
    pad = n_max(K) * (K + 1)
    Zs = OmegaUSeries.ptheta(lambda n: z_matrix(N, n), K)
    E = as_series(XVector([f] * N), K, lo - pad, hi + pad)
    r = series_solve(Zs, E, _apply, lo=lo - pad, hi=hi + pad)
    total = as_series(XRational(f), K, lo, hi)
    for i in range(1, N + 1):
        comp = r.map(lambda v, i=i: v.items[i - 1])
        total = total + _u_series(N, i, K).mul(comp, product=_apply_rational, lo=lo, hi=hi)
    return total.map(XRational.as_poly)


def verify_resolvent(N: int, K: int = 1, degree: int = 2, window=None, verbose=False) -> Report:
    lo, hi = window if window is not None else default_window(K, N)
    report = Report("resolvent", {"N": N, "K": K, "degree": degree, "window": [lo, hi]})
    gen = INGenerating(N, K, (lo, hi))
    for mu, f in symmetric_basis(N, degree):
        compare_series(report, {"m": list(mu)}, gen.apply(f), resolvent_rhs(N, K, f, lo, hi), verbose)
    return report


def column_identity(N: int, n: int, f: XPoly) -> bool:
    """Zmat applied to (sigma_1j f)_j equals (sigma_1i Z_1 f)_i for f symmetric in x_2..x_N."""
    vec = XVector([f.permute(transposition(N, 0, j)) if j else f for j in range(N)])
    lhs = z_matrix(N, n).apply(vec)
    z1f = z_op(N, 1, n).apply(f)
    rhs = XVector([z1f.permute(transposition(N, 0, i)) if i else z1f for i in range(N)])
    return lhs == rhs


def verify_gl2(K: int = 2, verbose=False) -> Report:
    """N=2: P-theta(u C_1) P-theta(u C_2) restricted to symmetric functions equals
    the double sum of D_2(u) coefficient by coefficient (as operators, not only on inputs)."""
    report = Report("gl2", {"N": 2, "K": K})
    prod_op = ptheta_product(2, K).map(lambda op: op.restrict_symmetric())
    D = d_n_generating(2, K, prod_op.lo, prod_op.hi)
    for kn in sorted(set(prod_op.keys()) | set(D.keys())):
        a, b = prod_op.get(*kn, None), D.get(*kn, None)
        ok = a is not None and b is not None and a == b
        report.add({"layer": list(kn)}, kn, ok, a, b, verbose)
    return report


# -- rational identities ----------------------------------------------------

def _ratio(N, i, j, ci, cj, di=0, dj=0) -> XRational:
    """(t^ci x_i - t^cj x_j) / (t^di x_i - t^dj x_j) with 0-based indices."""
    num = XPoly.const(N).mul_linear(i, j, qt(0, cj - ci)) * qt(0, ci)
    # t^di x_i - t^dj x_j = t^di (x_i - t^{dj-di} x_j)
    return XRational.linear_ratio(N, num * qt(0, -di), i, j, 0, dj - di)


def identity_c1_sides(N: int, nvec: Sequence[int]) -> tuple[XRational, XRational]:
    n = list(nvec)
    total = sum(n)
    lhs = XRational.const(N)
    for l in range(1, N):
        lhs = lhs * _ratio(N, 0, l, n[l], n[0])
    first = XRational.const(N, qt(0, -n[0]))
    for l in range(1, N):
        first = first * _ratio(N, 0, l, 0, n[0])
    acc = first
    for j in range(1, N):
        term = XRational.linear_ratio(N, XPoly.var(N, j) * (qt(0, n[j]) - 1) * qt(0, -n[j]), 0, j)
        for l in range(1, N):
            if l == j:
                continue
            term = term * _ratio(N, j, l, 0, n[j], n[l], n[j]) * _ratio(N, 0, l, n[l], n[0])
        acc = acc + term
    return lhs.reduce(), (acc * qt(0, total)).reduce()


def identity_c2_sides(N: int, nvec: Sequence[int]) -> tuple[XRational, XRational]:
    n = list(nvec)
    total = sum(n)
    T_all = qt(0, total)
    lhs = XRational.const(N, T_all - 1)
    for l in range(1, N):
        lhs = lhs * _ratio(N, 0, l, n[l], n[0])
    first = XRational.const(N, (1 - qt(0, -n[0])) * T_all)
    for l in range(1, N):
        first = first * _ratio(N, 0, l, 0, n[0])
    acc = first
    for j in range(1, N):
        term = XRational.const(N, (1 - qt(0, -n[j])) * T_all) * _ratio(N, j, 0, 0, n[j])
        for l in range(1, N):
            if l == j:
                continue
            term = term * _ratio(N, 0, l, n[l], n[0]) * _ratio(N, j, l, 0, n[j], n[l], n[j])
        acc = acc + term
    return lhs.reduce(), acc.reduce()


def sample_vectors(N: int, count: int, seed: int, lo: int = -2, hi: int = 3) -> list[tuple[int, ...]]:
    rng = random.Random(seed * 1000 + N)
    out = [tuple([0] * N)]
    while len(out) < count:
        out.append(tuple(rng.randint(lo, hi) for _ in range(N)))
    return out


def _verify_identity(name: str, sides: Callable, N: int, samples=None, seed: int = 0,
                     count: int = 20, verbose=False) -> Report:
    samples = sample_vectors(N, count, seed) if samples is None else [tuple(s) for s in samples]
    report = Report(name, {"N": N, "seed": seed, "count": len(samples)})
    for nvec in samples:
        lhs, rhs = sides(N, nvec)
        report.add({"n": list(nvec)}, None, lhs == rhs, lhs, rhs, verbose)
    return report


def verify_identity_C1(N: int, samples=None, seed: int = 0, count: int = 20, verbose=False) -> Report:
    return _verify_identity("identityC1", identity_c1_sides, N, samples, seed, count, verbose)


def verify_identity_C2(N: int, samples=None, seed: int = 0, count: int = 20, verbose=False) -> Report:
    return _verify_identity("identityC2", identity_c2_sides, N, samples, seed, count, verbose)


# -- lemmas and probes ------------------------------------------------------

def lemma_2_2(N: int, k: int, K: int, degree: int) -> Report:
    """prod_{i>k} P-theta(u C_i) = prod_{i>k} P-theta(u t^k C_i^{(k)}) on symmetric polynomials."""
    report = Report("lemma2.2", {"N": N, "k": k, "K": K, "degree": degree})
    lhs_op = ptheta_product(N, K, indices=range(k + 1, N + 1))
    rhs_op = ptheta_product(N, K, offset=k, scale_t=k)
    for mu, f in symmetric_basis(N, degree):
        compare_series(report, {"m": list(mu)}, apply(lhs_op, f), apply(rhs_op, f))
    return report


def partially_symmetric_basis(N: int, degree: int) -> list[tuple[tuple, XPoly]]:
    """x_1^a m_mu(x_2..x_N), a basis of polynomials symmetric in x_2..x_N."""
    out = []
    for a in range(degree + 1):
        for mu in partitions_upto(degree - a, N - 1):
            m = XPoly.monomial_symmetric(N - 1, mu)
            f = XPoly(N, {(a,) + e: c for e, c in m._d.items()})
            out.append(((a, mu), f))
    return out


def lemma_2_3(N: int, K: int, degree: int) -> Report:
    """P-theta(u C_1) = P-theta(u Z_1) on polynomials symmetric in x_2..x_N."""
    report = Report("lemma2.3", {"N": N, "K": K, "degree": degree})
    C = dell_cherednik(N, 1, K)
    Z = _z_series(N, 1, K)
    for (a, mu), f in partially_symmetric_basis(N, degree):
        compare_series(report, {"a": a, "m": list(mu)}, apply(C, f), apply(Z, f))
    return report


def squarefree_commutativity_probe(N: int, K: int = 1, extra=True) -> Report:
    """[P-theta(u C_i), P-theta(u C_j)] on square-free monomials (expected zero) and,
    for contrast, on x_1^2 (where the operators are expected not to commute)."""
    report = Report("squarefree-probe", {"N": N, "K": K})
    lo, hi = default_window(K, 2)
    series = {i: dell_cherednik(N, i, K) for i in range(1, N + 1)}
    monos = [(e, True) for e in product((0, 1), repeat=N)]
    if extra:
        monos.append((tuple([2] + [0] * (N - 1)), False))
    for i in range(1, N + 1):
        for j in range(i + 1, N + 1):
            for e, squarefree in monos:
                f = as_series(XPoly.monomial(N, e), K, lo, hi)
                ab = apply_to_series(series[i], apply_to_series(series[j], f, lo, hi), lo, hi)
                ba = apply_to_series(series[j], apply_to_series(series[i], f, lo, hi), lo, hi)
                comm = ab - ba
                vanishes = comm.is_zero()
                label = {"i": i, "j": j, "x": list(e), "squarefree": squarefree, "commutes": vanishes}
                report.add(label, None, vanishes if squarefree else True,
                           None if vanishes else str(comm), None)
    return report


__all__ = [
    "NonPolynomialResult", "r_op", "r_op_inverse", "dell_cherednik", "z_op", "u_op", "v1_op",
    "d_n_generating", "macdonald_determinant", "i_n_generating", "apply", "verify_theorem5",
    "verify_theorem6", "verify_resolvent", "verify_identity_C1", "verify_identity_C2",
    "squarefree_commutativity_probe", "verify_gl2",
]
