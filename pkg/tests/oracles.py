"""Independent reference computations in sympy.

Nothing here touches the package's own arithmetic: expressions are built from
the defining formulas and compared after converting package values to sympy.
"""

from __future__ import annotations

import itertools

import sympy

q, t, w, u = sympy.symbols("q t w u")
P = sympy.symbols("p1:8")  # power sums p1..p7


def laurent(x) -> sympy.Expr:
    """ParamLaurent or ParamScalar or rational -> sympy."""
    if hasattr(x, "num") and hasattr(x, "den"):
        return laurent(x.num) / laurent(x.den)
    if hasattr(x, "terms") and callable(x.terms):
        return sum((sympy.Rational(int(c.numerator), int(c.denominator)) * q**a * t**b * w**e
                    for (a, b, e), c in x.terms()), sympy.Integer(0))
    return sympy.Rational(str(x))


def symfunc(f) -> sympy.Expr:
    return sum((laurent(c) * sympy.Mul(*[P[k - 1] for k in lam]) for lam, c in f.items()),
               sympy.Integer(0))


def xpoly(f, xs) -> sympy.Expr:
    return sum((laurent(c) * sympy.Mul(*[x**a for x, a in zip(xs, e)]) for e, c in f.items()),
               sympy.Integer(0))


def same(a, b) -> bool:
    return sympy.simplify(sympy.together(a - b)) == 0


# -- power-sum calculus -----------------------------------------------------

def q_series(m: int, order: int, v=sympy.Symbol("v")) -> list[sympy.Expr]:
    """[v^n] exp(sum_k (1 - t^{mk})/k p_k v^k), n = 0..order."""
    expo = sum((1 - t**(m * k)) / k * P[k - 1] * v**k for k in range(1, order + 1))
    ser = sympy.series(sympy.exp(expo), v, 0, order + 1).removeO()
    return [sympy.expand(ser.coeff(v, n)) for n in range(order + 1)]


def qstar_apply(n: int, m: int, f: sympy.Expr, order: int) -> sympy.Expr:
    """[v^n] exp(sum_k (1 - q^{mk})/k * (k d/dp_k) v^k) applied to f."""
    # expand the exponential as a sum over multisets of operator factors
    v = sympy.Symbol("v")
    d = [sympy.Symbol(f"d{k}") for k in range(1, order + 1)]
    expo = sum((1 - q**(m * k)) * d[k - 1] * v**k for k in range(1, order + 1))
    ser = sympy.expand(sympy.series(sympy.exp(expo), v, 0, order + 1).removeO().coeff(v, n))
    out = sympy.Integer(0)
    for term in sympy.Add.make_args(ser):
        coeff, g = term, f
        for k in range(1, order + 1):
            e = sympy.degree(term, d[k - 1]) if term.has(d[k - 1]) else 0
            coeff = coeff.subs(d[k - 1], 1)
            for _ in range(e):
                g = sympy.diff(g, P[k - 1])
        out += coeff * g
    return sympy.expand(out)


def j0(f: sympy.Expr, order: int, m: int = 1) -> sympy.Expr:
    """sum_{n>=1} q^{-mn} Q_n^{[m]} Q*_n^{[m]} f."""
    Q = q_series(m, order)
    return sympy.expand(sum(q**(-m * n) * Q[n] * qstar_apply(n, m, f, order) for n in range(1, order + 1)))


# -- finite N -------------------------------------------------------------------

def gamma_shift(f: sympy.Expr, xs, nvec) -> sympy.Expr:
    return f.subs({x: q**(-n) * x for x, n in zip(xs, nvec)}, simultaneous=True)


def dn_coefficient(N: int, f: sympy.Expr, xs, K: int) -> dict:
    """D_N(u) f from the explicit multi-sum, as {(omega, u): expr}."""
    out: dict = {}
    rng = range(-3, 5)
    for nvec in itertools.product(rng, repeat=N):
        cost = sum((n * n - n) // 2 for n in nvec)
        if cost > K:
            continue
        c = sympy.Integer(-1) ** sum(nvec)
        for i in range(N):
            for j in range(i + 1, N):
                c *= (t**nvec[j] * xs[i] - t**nvec[i] * xs[j]) / (xs[i] - xs[j])
        key = (cost, sum(nvec))
        out[key] = out.get(key, 0) + c * gamma_shift(f, xs, nvec)
    return {k: sympy.factor(sympy.together(v)) for k, v in out.items()}


def gram_schmidt_macdonald(lam, n: int):
    """Macdonald polynomial by Gram-Schmidt on monomial symmetric functions (weight n)."""
    from sympy.utilities.iterables import partitions as sp_parts

    parts = [tuple(sorted(sum(([k] * v for k, v in p.items()), []), reverse=True))
             for p in sp_parts(n)]
    xs = sympy.symbols(f"y1:{n + 1}")

    def msym(mu):
        mu = list(mu) + [0] * (n - len(mu))
        return sum(sympy.Mul(*[x**a for x, a in zip(xs, perm)]) for perm in set(itertools.permutations(mu)))

    def to_p(expr):
        # solve expr = sum c_nu p_nu in n variables (faithful at weight n)
        cs = sympy.symbols(f"c0:{len(parts)}")
        pn = [sympy.Mul(*[sum(x**k for x in xs) for k in nu]) for nu in parts]
        eq = sympy.Poly(sympy.expand(expr - sum(c * b for c, b in zip(cs, pn))), *xs).coeffs()
        sol = sympy.solve(eq, cs, dict=True)[0]
        return sum(sol[c] * sympy.Mul(*[P[k - 1] for k in nu]) for c, nu in zip(cs, parts))

    def inner(f, g):
        f, g = sympy.expand(f), sympy.expand(g)
        total = 0
        for nu in parts:
            mono = sympy.Mul(*[P[k - 1] for k in nu])
            a = sympy.Poly(f, *P[:n]).coeff_monomial(mono)
            b = sympy.Poly(g, *P[:n]).coeff_monomial(mono)
            if a != 0 and b != 0:
                z = sympy.Integer(1)
                for k in set(nu):
                    z *= k**nu.count(k) * sympy.factorial(nu.count(k))
                for k in nu:
                    z *= (1 - q**k) / (1 - t**k)
                total += a * b * z
        return sympy.together(total)

    def dominated(a, b):  # b <= a in dominance
        sa = sb = 0
        for i in range(max(len(a), len(b))):
            sa += a[i] if i < len(a) else 0
            sb += b[i] if i < len(b) else 0
            if sb > sa:
                return False
        return True

    order = sorted([mu for mu in parts if dominated(lam, mu)], key=lambda m: m, reverse=False)
    # lower partitions first, then Gram-Schmidt upward
    done = []
    for mu in order:
        g = to_p(msym(mu))
        for h in done:
            g = g - inner(g, h) / inner(h, h) * h
        done.append(sympy.together(sympy.expand(g)))
    return sympy.factor(done[-1])
