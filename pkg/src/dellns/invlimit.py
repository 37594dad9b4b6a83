"""The N -> infinity construction on Lambda[v] = Lambda + v Lambda[v].

Vectors are VElements.  Operators are OpPrograms: words and sums over a few
primitive generators, evaluated column by column on the basis v^a p_lambda.
Everything here preserves the total grading a + |lambda|, so an operator is
a family of finite matrices (Blocks) over Laurent polynomials in q, t, w,
one per grading.  Series in omega and u carry Blocks as coefficients.
"""

from __future__ import annotations

import operator
from functools import lru_cache
from typing import Callable, Iterable

from .finite import apply as fapply, compare_series, i_n_generating, macdonald_determinant, v1_op, z_op
from .reports import Report
from .scalars import ONE, ParamLaurent, ParamScalar, is_scalar, qt, scalar_to_json
from .series import OmegaUSeries, n_max, series_invert, series_solve, theta_scalar
from .skew import SkewOp
from .symfunc import (SymFunc, VElement, canon, macdonald_poly, merge_parts, partition_str,
                      partitions, partitions_upto, pi_n, pi_n1, q_coeff, qstar_apply, tau_n, weight)
from .xpoly import XPoly

Key = tuple  # (v-degree, partition)
HEAD, TAIL, FULL = "head", "tail", "full"


def grading(key: Key) -> int:
    return key[0] + weight(key[1])


def _in_space(key: Key, space: str) -> bool:
    if space == FULL:
        return True
    return (key[0] == 0) == (space == HEAD)


@lru_cache(maxsize=None)
def basis(G: int, space: str = FULL) -> tuple[Key, ...]:
    """v^a p_lambda with a + |lambda| = G; heads first, then tails by v-degree."""
    if G < 0:
        return ()
    heads = tuple((0, lam) for lam in partitions(G)) if space in (HEAD, FULL) else ()
    tails = tuple((a, lam) for a in range(1, G + 1) for lam in partitions(G - a)) if space in (TAIL, FULL) else ()
    return heads + tails


def _acc(out: dict, key, c) -> None:
    prev = out.get(key)
    v = c if prev is None else prev + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def to_vec(e: VElement) -> dict:
    return {key: ParamLaurent.coerce(c) if isinstance(c, int) else c for key, c in e.items()}


def from_vec(vec: dict) -> VElement:
    parts: dict[int, dict] = {}
    for (a, lam), c in vec.items():
        parts.setdefault(a, {})[lam] = c
    return VElement({a: SymFunc(d) for a, d in parts.items()})


# -- blocks -----------------------------------------------------------------

class Block:
    """Matrix of a grading-preserving operator on one graded piece, stored by columns.

    cols[src_key] is the image of that basis vector as {dst_key: coefficient};
    a missing column is a zero column.
    """

    __slots__ = ("cols",)

    def __init__(self, cols: dict | None = None):
        self.cols = {k: c for k, c in (cols or {}).items() if c}

    @classmethod
    def identity(cls, keys: Iterable[Key]) -> "Block":
        return cls({k: {k: ONE} for k in keys})

    def is_zero(self) -> bool:
        return not self.cols

    def __add__(self, other):
        if not isinstance(other, Block):
            return NotImplemented
        out = {k: dict(c) for k, c in self.cols.items()}
        for k, col in other.cols.items():
            tgt = out.setdefault(k, {})
            for i, v in col.items():
                _acc(tgt, i, v)
        return Block(out)

    def __neg__(self):
        return Block({k: {i: -v for i, v in c.items()} for k, c in self.cols.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Block":
        if not c:
            return Block()
        out = {}
        for k, col in self.cols.items():
            new = {}
            for i, v in col.items():
                _acc(new, i, v * c)
            out[k] = new
        return Block(out)

    def __matmul__(self, other: "Block") -> "Block":
        """self o other."""
        out = {}
        for k, col in other.cols.items():
            new: dict = {}
            for j, c in col.items():
                img = self.cols.get(j)
                if img:
                    for i, d in img.items():
                        _acc(new, i, d * c)
            out[k] = new
        return Block(out)

    def __mul__(self, other):
        if isinstance(other, Block):
            return self @ other
        if is_scalar(other):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if is_scalar(other):
            return self.scale(other)
        return NotImplemented

    def apply_vec(self, vec: dict) -> dict:
        out: dict = {}
        for key, c in vec.items():
            img = self.cols.get(key)
            if img:
                for i, d in img.items():
                    _acc(out, i, d * c)
        return out

    def apply(self, e: VElement) -> VElement:
        return from_vec(self.apply_vec(to_vec(e)))

    def entry(self, row: Key, col: Key):
        return self.cols.get(col, {}).get(row, ParamLaurent())

    def restrict(self, src: str = FULL, dst: str = FULL) -> "Block":
        return Block({k: {i: v for i, v in c.items() if _in_space(i, dst)}
                      for k, c in self.cols.items() if _in_space(k, src)})

    def commutator(self, other: "Block") -> "Block":
        return self @ other - other @ self

    def has_w(self) -> bool:
        return any(v.has_w() for c in self.cols.values() for v in c.values())

    def __eq__(self, other):
        if not isinstance(other, Block):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def to_dense(self, rows: Iterable[Key], cols: Iterable[Key]) -> list[list]:
        rows = list(rows)
        return [[self.entry(r, c) for c in cols] for r in rows]

    def to_json(self, G: int, space: str = HEAD) -> dict:
        keys = basis(G, space)
        if space == HEAD:
            labels = [list(lam) for _, lam in keys]
        else:
            labels = [{"v": a, "p": list(lam)} for a, lam in keys]
        return {"weight": G, "basis": labels,
                "matrix": [[scalar_to_json(x) for x in row] for row in self.to_dense(keys, keys)]}

    def __repr__(self):
        return f"Block({len(self.cols)} columns)"


def _block_product(a, b):
    return a @ b


def _block_apply(a: Block, e: VElement) -> VElement:
    return a.apply(e)


def _scalar_times(c, x):
    return x.scale(c)


# -- operator programs ------------------------------------------------------

class OpProgram:
    """Linear operator on Lambda[v] described by a word or sum over primitives.

    kind is one of 'prim' (column function), 'word' (composition, rightmost
    factor acts first), 'sum' (scalar-weighted sum) and 'series' (sum over
    j >= 0 of term(j), truncated at j <= input grading, which is where every
    lowering factor used here starts to vanish).
    """

    __slots__ = ("name", "kind", "shift", "src", "dst", "_fn", "parts", "_cols", "_blocks", "_terms")

    def __init__(self, name: str, kind: str, shift: int = 0, src: str = FULL, dst: str = FULL,
                 fn: Callable | None = None, parts: tuple = ()):
        self.name, self.kind, self.shift = name, kind, shift
        self.src, self.dst = src, dst
        self._fn, self.parts = fn, parts
        self._cols: dict = {}
        self._blocks: dict = {}
        self._terms: dict = {}

    def __repr__(self):
        return f"OpProgram({self.name})"

    def _term(self, j: int) -> "OpProgram":
        hit = self._terms.get(j)
        if hit is None:
            hit = self._terms[j] = self._fn(j)
        return hit

    def column(self, key: Key) -> dict:
        hit = self._cols.get(key)
        if hit is not None:
            return hit
        if not _in_space(key, self.src):
            col: dict = {}
        elif self.kind == "prim":
            col = self._fn(key)
        elif self.kind == "word":
            col = {key: ONE}
            for p in reversed(self.parts):
                col = p.apply_vec(col)
        elif self.kind == "sum":
            col = {}
            for c, p in self.parts:
                for k, v in p.column(key).items():
                    _acc(col, k, v * c)
        elif self.kind == "series":
            col = {}
            for j in range(grading(key) + 1):
                for k, v in self._term(j).column(key).items():
                    _acc(col, k, v)
        else:
            raise ValueError(f"unknown program kind {self.kind!r}")
        col = {k: v for k, v in col.items() if _in_space(k, self.dst)}
        self._cols[key] = col
        return col

    def apply_vec(self, vec: dict) -> dict:
        out: dict = {}
        for key, c in vec.items():
            for k, v in self.column(key).items():
                _acc(out, k, v * c)
        return out

    def apply(self, e: VElement) -> VElement:
        return from_vec(self.apply_vec(to_vec(e)))

    def block(self, G: int) -> Block:
        hit = self._blocks.get(G)
        if hit is None:
            hit = self._blocks[G] = Block({k: self.column(k) for k in basis(G, self.src)})
        return hit

    def __matmul__(self, other: "OpProgram") -> "OpProgram":
        return word(self, other)

    def __add__(self, other: "OpProgram") -> "OpProgram":
        return op_sum([(ONE, self), (ONE, other)])

    def __sub__(self, other: "OpProgram") -> "OpProgram":
        return op_sum([(ONE, self), (-ONE, other)])

    def __rmul__(self, c):
        if is_scalar(c):
            return op_sum([(ParamLaurent.coerce(c), self)])
        return NotImplemented


def word(*parts: OpProgram, name: str | None = None) -> OpProgram:
    return OpProgram(name or " ".join(p.name for p in parts), "word", sum(p.shift for p in parts),
                     parts[-1].src, parts[0].dst, parts=tuple(parts))


def op_sum(terms, name: str | None = None) -> OpProgram:
    terms = tuple((ParamLaurent.coerce(c), p) for c, p in terms)
    shifts = {p.shift for _, p in terms}
    if len(shifts) > 1:
        raise ValueError("summands shift the grading differently")
    return OpProgram(name or " + ".join(p.name for _, p in terms), "sum", shifts.pop(),
                     terms[0][1].src, terms[0][1].dst, parts=terms)


def graded_series(term: Callable[[int], OpProgram], name: str, shift: int = 0) -> OpProgram:
    return OpProgram(name, "series", shift, fn=term)


def prim(name: str, fn: Callable[[Key], dict], shift: int = 0, src: str = FULL, dst: str = FULL) -> OpProgram:
    return OpProgram(name, "prim", shift, src, dst, fn=fn)


@lru_cache(maxsize=None)
def _qmul_terms(n: int, m: int, lam) -> tuple:
    return tuple((merge_parts(lam, mu), c) for mu, c in q_coeff(n, m).terms.items())


@lru_cache(maxsize=None)
def _qstar_terms(n: int, m: int, lam) -> tuple:
    return tuple(qstar_apply(n, m, SymFunc.p(lam)).terms.items())


@lru_cache(maxsize=None)
def identity() -> OpProgram:
    return prim("1", lambda key: {key: ONE})


@lru_cache(maxsize=None)
def q_mul(n: int, m: int = 1) -> OpProgram:
    """Multiplication by Q_n^{[m]}."""
    return prim(f"Q_{n}[{m}]", lambda key: {(key[0], mu): c for mu, c in _qmul_terms(n, m, key[1])}, n)


@lru_cache(maxsize=None)
def qstar(n: int, m: int = 1) -> OpProgram:
    """Q*_n^{[m]} acting on the Lambda factor."""
    return prim(f"Q*_{n}[{m}]", lambda key: {(key[0], mu): c for mu, c in _qstar_terms(n, m, key[1])}, -n)


@lru_cache(maxsize=None)
def v_mul(k: int = 1) -> OpProgram:
    return prim(f"v^{k}", lambda key: {(key[0] + k, key[1]): ONE}, k)


@lru_cache(maxsize=None)
def v_circ(k: int = 1) -> OpProgram:
    """(v°)^k: v^a -> v^{a-k}, zero when a < k."""
    return prim(f"v°^{k}", lambda key: {(key[0] - k, key[1]): ONE} if key[0] >= k else {}, -k)


@lru_cache(maxsize=None)
def xi(k: int = 1) -> OpProgram:
    """v -> q^{-1} v, to the power k."""
    return prim(f"xi^{k}", lambda key: {key: qt(-k * key[0])})


@lru_cache(maxsize=None)
def eta(k: int = 1) -> OpProgram:
    """v -> t v, to the power k."""
    return prim(f"eta^{k}", lambda key: {key: qt(0, k * key[0])})


@lru_cache(maxsize=None)
def projection(space: str) -> OpProgram:
    return prim(f"proj_{space}", lambda key: {key: ONE}, dst=space)


# -- gamma, W, Z, V -----------------------------------------------------------

@lru_cache(maxsize=None)
def gamma_n(n: int) -> OpProgram:
    """xi^n Q*^{[n]}(v) with Q*^{[n]}(v) = sum_j v^j Q*_j^{[n]}."""
    body = graded_series(lambda j: word(v_mul(j), qstar(j, n)), f"Q*[{n}](v)")
    return word(xi(n), body, name=f"gamma[{n}]")


@lru_cache(maxsize=None)
def w_n(n: int) -> OpProgram:
    """eta^n Q^{[n]}(v°) with Q^{[n]}(v°) = sum_k Q_k^{[n]} (v°)^k."""
    body = graded_series(lambda k: word(q_mul(k, n), v_circ(k)), f"Q[{n}](v°)")
    return word(eta(n), body, name=f"W[{n}]")


@lru_cache(maxsize=None)
def z_n(n: int) -> OpProgram:
    return word(w_n(n), gamma_n(n), name=f"Z[{n}]")


@lru_cache(maxsize=None)
def gamma_hom(n: int) -> OpProgram:
    """gamma^{[n]} as the ring homomorphism p_k -> p_k + (q^{-nk} - 1) v^k, v -> q^{-n} v."""

    def col(key):
        a, lam = key
        vec = {(a, ()): qt(-n * a)}
        for k in lam:
            c_k = qt(-n * k) - 1
            new: dict = {}
            for (b, mu), c in vec.items():
                _acc(new, (b, canon(mu + (k,))), c)
                if c_k:
                    _acc(new, (b + k, mu), c * c_k)
            vec = new
        return vec

    return prim(f"gamma_hom[{n}]", col)


@lru_cache(maxsize=None)
def v_inverse_limit(n: int) -> OpProgram:
    """Lambda-linear map Lambda[v] -> Lambda[w]: v^0 -> w^n - 1, v^m -> -Q_m^{[n]}."""

    def col(key):
        a, lam = key
        if a == 0:
            c = _w_power(n) - 1
            return {(0, lam): c} if c else {}
        return {(0, mu): -c for mu, c in _qmul_terms(a, n, lam)}

    return prim(f"V[{n}]", col, dst=HEAD)


# -- blocks of gamma and W relative to Lambda + v Lambda[v] ------------------

@lru_cache(maxsize=None)
def alpha_n(n: int) -> OpProgram:
    """alpha^{[n]} v^a f = sum_j q^{-n(a+j)} v^{a+j} Q*_j^{[n]} f on the tail."""

    def col(key):
        a, lam = key
        out: dict = {}
        for j in range(weight(lam) + 1):
            for mu, c in _qstar_terms(j, n, lam):
                _acc(out, (a + j, mu), c * qt(-n * (a + j)))
        return out

    return prim(f"alpha[{n}]", col, src=TAIL, dst=TAIL)


@lru_cache(maxsize=None)
def beta_n(n: int) -> OpProgram:
    """beta^{[n]} f = sum_{k>=1} q^{-kn} v^k Q*_k^{[n]} f, head to tail."""

    def col(key):
        _, lam = key
        out: dict = {}
        for k in range(1, weight(lam) + 1):
            for mu, c in _qstar_terms(k, n, lam):
                _acc(out, (k, mu), c * qt(-k * n))
        return out

    return prim(f"beta[{n}]", col, src=HEAD, dst=TAIL)


@lru_cache(maxsize=None)
def x_n(n: int) -> OpProgram:
    """X^{[n]} v^a f = sum_{j<a} t^{n(a-j)} v^{a-j} Q_j^{[n]} f on the tail."""

    def col(key):
        a, lam = key
        out: dict = {}
        for j in range(a):
            for mu, c in _qmul_terms(j, n, lam):
                _acc(out, (a - j, mu), c * qt(0, n * (a - j)))
        return out

    return prim(f"X[{n}]", col, src=TAIL, dst=TAIL)


@lru_cache(maxsize=None)
def y_n(n: int) -> OpProgram:
    """Y^{[n]} v^a f = Q_a^{[n]} f, tail to head."""
    return prim(f"Y[{n}]", lambda key: {(0, mu): c for mu, c in _qmul_terms(key[0], n, key[1])},
                src=TAIL, dst=HEAD)


@lru_cache(maxsize=None)
def pair_block(name: str, n: int, G: int) -> Block:
    """Y beta, Y alpha, X alpha or X beta at index n on grading G."""
    left = {"Y": y_n, "X": x_n}[name[0]](n)
    right = {"B": beta_n, "A": alpha_n}[name[1]](n)
    return left.block(G) @ right.block(G)


def _ptheta(fn: Callable[[int], Block], K: int, lo: int, hi: int) -> OmegaUSeries:
    return OmegaUSeries.ptheta(fn, K, lo, hi)


# -- the generating function and its pieces --------------------------------

def _theta_identity(G: int, K: int, lo: int, hi: int) -> OmegaUSeries:
    one = Block.identity(basis(G, HEAD))
    return _ptheta(lambda n: one, K, lo, hi)


def schur_complement(G: int, K: int, lo: int, hi: int) -> OmegaUSeries:
    """theta(u) + Ptheta(uY beta) - Ptheta(uY alpha) Ptheta(uX alpha)^{-1} Ptheta(uX beta) on heads."""
    B = _theta_identity(G, K, lo, hi) + _ptheta(lambda n: pair_block("YB", n, G), K, lo, hi)
    tails = basis(G, TAIL)
    if tails:
        pxa = _ptheta(lambda n: pair_block("XA", n, G), K, lo, hi)
        inv = series_invert(pxa, (lo, hi), one=Block.identity(tails), product=_block_product)
        right = inv.mul(_ptheta(lambda n: pair_block("XB", n, G), K, lo, hi), _block_product)
        B = B - _ptheta(lambda n: pair_block("YA", n, G), K, lo, hi).mul(right, _block_product)
    return B


def _padded(build: Callable[[int, int], OmegaUSeries], lo: int, hi: int, K: int) -> OmegaUSeries:
    """Evaluate on a wider window until the requested one is exact, then cut."""
    below = K * n_max(K)
    pad = below + 2
    for _ in range(6):
        s = build(lo - below, hi + pad)
        if s.valid_hi() >= hi:
            return s.truncate(lo=lo, hi=hi)
        pad *= 2
    raise ArithmeticError("could not reach an exact window")


@lru_cache(maxsize=None)
def mathcal_i(G: int, K: int = 1, lo: int = -3, hi: int = 4) -> OmegaUSeries:
    """Normalized generating function theta(u) B^{-1} on the weight-G piece of Lambda."""
    heads = basis(G, HEAD)

    def build(a, b):
        B = schur_complement(G, K, a, b)
        inv = series_invert(B, (a, b), one=Block.identity(heads), product=_block_product)
        return OmegaUSeries.ptheta(lambda n: ONE, K, a, b).mul(inv, _scalar_times)

    return _padded(build, lo, hi, K)


@lru_cache(maxsize=None)
def _xa_power(G: int, n: int) -> Block:
    if n == 0:
        return Block.identity(basis(G, TAIL))
    return pair_block("XA", 1, G) @ _xa_power(G, n - 1)


@lru_cache(maxsize=None)
def _ax_power(G: int, n: int) -> Block:
    if n == 0:
        return Block.identity(basis(G, TAIL))
    return alpha_n(1).block(G) @ x_n(1).block(G) @ _ax_power(G, n - 1)


@lru_cache(maxsize=None)
def j_coeff(n: int, G: int) -> Block:
    """J_n = Y^{[1]} (alpha^{[1]} X^{[1]})^n beta^{[1]} on weight G."""
    return y_n(1).block(G) @ _ax_power(G, n) @ beta_n(1).block(G)


def j_series(G: int, hi: int = 4) -> OmegaUSeries:
    """J(u) = Y^{[1]} (1 - u alpha^{[1]} X^{[1]})^{-1} beta^{[1]} through u^hi."""
    return OmegaUSeries(0, 0, hi, {(0, n): j_coeff(n, G) for n in range(hi + 1)})


def _u_series(coeffs: dict, lo: int, hi: int) -> OmegaUSeries:
    """u-series from {u-exponent: coefficient}."""
    return OmegaUSeries(0, lo, hi, {(0, n): c for n, c in coeffs.items()})


def k_series(G: int, hi: int = 3, path: str = "layer") -> OmegaUSeries:
    """K(u): the omega^1 layer of the Schur complement, or the five-summand assembly."""
    lo = -1
    if path == "layer":
        B = _padded(lambda a, b: schur_complement(G, 1, a, b), lo, hi, 1)
        return _u_series(B.layer(1), lo, hi)
    if path != "formula":
        raise ValueError("path is 'layer' or 'formula'")
    top = hi + 4
    H = Block.identity(basis(G, HEAD))
    R = _u_series({n: _xa_power(G, n) for n in range(top + 1)}, 0, top)

    def mono(n, blk):
        return _u_series({n: blk}, lo - 4, top)

    def pair_diff(name):
        # u^2 A^{[2]} - u^{-1} A^{[-1]}
        return mono(2, pair_block(name, 2, G)) + mono(-1, -pair_block(name, -1, G))

    def m(*xs):
        out = xs[0]
        for x in xs[1:]:
            out = out.mul(x, _block_product, lo=lo - 4, hi=top)
        return out

    out = mono(2, H) + mono(-1, -H) + pair_diff("YB")
    if basis(G, TAIL):
        ya1 = mono(1, pair_block("YA", 1, G))
        xb1 = mono(0, pair_block("XB", 1, G))
        out = out + m(ya1, R, pair_diff("XA"), R, xb1).shift_u(1)
        out = out + m(pair_diff("YA"), R, xb1).shift_u(1)
        out = out + m(ya1, R, pair_diff("XB"))
    return out.truncate(lo=lo, hi=hi)


# -- Hamiltonians ----------------------------------------------------------

def hamiltonian(n: int, G: int) -> tuple[Block, Block]:
    """(omega^0, omega^1) parts of the u^n coefficient of the normalized generating function."""
    s = mathcal_i(G, 1, min(-1, n), max(1, n))
    return s.get(0, n, Block()), s.get(1, n, Block())


def hamiltonian_closed(n: int, G: int, j1: str = "derived", alt: bool = False) -> tuple[Block, Block]:
    """Closed first-order forms of the u^{-1}, u^0, u^1 Hamiltonians.

    For n = -1 the generating function gives -(1 + K_{-1}) = Y^{[-1]} beta^{[-1]};
    ``alt=True`` returns the shorter -K_{-1}, which differs by the identity.

    For n = 1 the J_1 term of (1 + 2J_0 + J_0^2 + J_1) enters with a plus sign
    (``j1='derived'``, what expanding the generating function gives);
    ``j1='minus'`` flips that sign and ``j1='square'`` also puts J_1^2 inside
    the K_{-1} brackets.  Both variants fail against the generating function.
    """
    H = Block.identity(basis(G, HEAD))
    J0, J1 = j_coeff(0, G), j_coeff(1, G)
    Km1, K0, K1 = (k_explicit_block(k, G) for k in (-1, 0, 1))
    if n == -1:
        return Block(), (-Km1 if alt else -(H + Km1))
    if n == 0:
        return H, -(H + J0 + K0 + Km1 + J0 @ Km1 + Km1 @ J0)
    if n != 1:
        raise ValueError("closed forms exist for n in {-1, 0, 1}")
    sign = {"derived": 1, "minus": -1, "square": -1}[j1]
    inner = J1 @ J1 if j1 == "square" else J1
    P = J0.scale(2) + J0 @ J0 + (inner if sign > 0 else -inner)
    const = H + J0.scale(2) + J0 @ J0 + (J1 if sign > 0 else -J1)
    body = (K1 + Km1 + Km1 @ P + P @ Km1 + J0 @ Km1 @ J0 + K0 + J0 @ K0 + K0 @ J0 + const)
    return J0, -body


# -- K_n two ways ------------------------------------------------------------

@lru_cache(maxsize=None)
def k_explicit_block(n: int, G: int) -> Block:
    """K_{-1}, K_0, K_1 as compositions of the blocks alpha, beta, X, Y."""
    H = Block.identity(basis(G, HEAD))

    def chain(*names_idx):
        ops = {"Y": y_n, "X": x_n, "A": alpha_n, "B": beta_n}
        out = None
        for name, k in names_idx:
            blk = ops[name](k).block(G)
            out = blk if out is None else out @ blk
        return out

    if n == -1:
        return -(H + chain(("Y", -1), ("B", -1)))
    if n == 0:
        return -(chain(("Y", 1), ("A", 1), ("X", -1), ("B", -1))
                 + chain(("Y", -1), ("A", -1), ("X", 1), ("B", 1)))
    if n == 1:
        return -(chain(("Y", 1), ("A", 1), ("X", -1), ("A", -1), ("X", 1), ("B", 1))
                 + chain(("Y", 1), ("A", 1), ("X", 1), ("A", 1), ("X", -1), ("B", -1))
                 + chain(("Y", -1), ("A", -1), ("X", 1), ("A", 1), ("X", 1), ("B", 1)))
    raise ValueError("n must be -1, 0 or 1")


def _qs(n: int, m: int, f: SymFunc) -> SymFunc:
    return qstar_apply(n, m, f)


def _qm(n: int, m: int, f: SymFunc) -> SymFunc:
    return q_coeff(n, m) * f if n >= 0 else SymFunc()


def k_modes(n: int, f: SymFunc, alt: bool = False) -> SymFunc:
    """K_n f from the explicit mode sums over Q and Q*.

    ``alt=True`` uses the alternative index range l <= n-j+i and the
    exponent q^{n-l+k} in the third K_1 family; ``alt='range'`` or
    ``alt='exponent'`` switches on only one of the two.  The default is
    the range and exponents that follow from the block definitions.
    """
    d = max((weight(lam) for lam in f.terms), default=0)
    if n == -1:
        out = f
        for a in range(1, d + 1):
            out = out + _qm(a, -1, _qs(a, -1, f)).scale(qt(a))
        return -out
    if n == 0:
        out = SymFunc()
        for a in range(1, d + 1):
            for (s, r, coef) in ((1, -1, lambda a, j, i: qt(j - i, j - a)),
                                 (-1, 1, lambda a, j, i: qt(i - j, a - j))):
                g1 = _qs(a, r, f)
                if g1.is_zero():
                    continue
                for j in range(a):
                    g2 = _qm(j, r, g1)
                    for i in range(d + 1):
                        g3 = _qs(i, s, g2)
                        if g3.is_zero():
                            continue
                        out = out + _qm(a - j + i, s, g3).scale(coef(a, j, i))
        return -out
    if n != 1:
        raise ValueError("n must be -1, 0 or 1")
    # families (outer, middle, inner) twist indices and their scalar weights
    fams = [
        ((1, -1, 1), lambda a, j, i, l, k: qt(-a + l - k, l - i)),
        ((1, 1, -1), lambda a, j, i, l, k: qt(-a + l - k + 2 * j - 2 * i, i - l)),
        ((-1, 1, 1), (lambda a, j, i, l, k: qt(a - l + k, i - l + 2 * a - 2 * j))
         if alt in (True, "exponent")
         else (lambda a, j, i, l, k: qt(-a - l + k, i - l + 2 * a - 2 * j))),
    ]
    extra = 1 if alt in (True, "range") else 0
    out = SymFunc()
    for (s1, s2, s3), coef in fams:
        for a in range(1, d + 1):
            g1 = _qs(a, s3, f)
            if g1.is_zero():
                continue
            for j in range(a):
                g2 = _qm(j, s3, g1)
                for i in range(d + 1):
                    g3 = _qs(i, s2, g2)
                    if g3.is_zero():
                        continue
                    for l in range(a - j + i + extra):
                        g4 = _qm(l, s2, g3)
                        for k in range(d + 1):
                            g5 = _qs(k, s1, g4)
                            if g5.is_zero():
                                continue
                            out = out + _qm(a - j + i - l + k, s1, g5).scale(coef(a, j, i, l, k))
    return -out


def j0_modes(f: SymFunc, m: int = 1) -> SymFunc:
    """J_0^{[m]} f = sum_{n>=1} q^{-mn} Q_n^{[m]} Q*_n^{[m]} f."""
    d = max((weight(lam) for lam in f.terms), default=0)
    out = SymFunc()
    for a in range(1, d + 1):
        out = out + _qm(a, m, _qs(a, m, f)).scale(qt(-m * a))
    return out


def block_of(fn: Callable[[SymFunc], SymFunc], G: int) -> Block:
    cols = {}
    for key in basis(G, HEAD):
        img = fn(SymFunc.p(key[1]))
        cols[key] = {(0, lam): c for lam, c in img.terms.items()}
    return Block(cols)


def k_explicit(n: int, degree: int, path: str = "blocks", alt: bool = False) -> dict[int, Block]:
    """K_n on every weight up to degree, by block composition or by mode sums."""
    if path == "blocks":
        return {G: k_explicit_block(n, G) for G in range(degree + 1)}
    if path == "modes":
        return {G: block_of(lambda f: k_modes(n, f, alt), G) for G in range(degree + 1)}
    raise ValueError("path is 'blocks' or 'modes'")


def verify_k_dual(degree: int = 5, alt: bool = False, verbose=False) -> Report:
    """K_{-1}, K_0, K_1: block composition against the explicit mode sums on each p_lambda."""
    report = Report("k-dual", {"degree": degree, "alt": alt})
    for n in (-1, 0, 1):
        for G in range(degree + 1):
            a = k_explicit_block(n, G)
            b = block_of(lambda f: k_modes(n, f, alt), G)
            for key in basis(G, HEAD):
                x, y = a.cols.get(key, {}), b.cols.get(key, {})
                ok = Block({key: x}) == Block({key: y})
                report.add({"K": n, "p": list(key[1])}, None, ok, x or None, y or None, verbose)
    return report


def verify_hamiltonians(degree: int = 3, j1: str = "derived", alt: bool = False) -> Report:
    """u^{-1}, u^0, u^1 coefficients of the generating function against their closed forms."""
    report = Report("hamiltonians", {"degree": degree, "j1": j1, "alt": alt})
    for G in range(degree + 1):
        for n in (-1, 0, 1):
            gen = hamiltonian(n, G)
            closed = hamiltonian_closed(n, G, j1, alt)
            for k in (0, 1):
                report.add({"n": n, "G": G}, (k, n), gen[k] == closed[k])
    return report


# -- the unnormalized I(u) through Z and V gamma -----------------------------

def i_direct(f: SymFunc, K: int = 1, lo: int = -2, hi: int = 3) -> OmegaUSeries:
    """I(u) f = f + Ptheta(u V gamma) Ptheta(u Z)^{-1} delta f, coefficients in Lambda[w].

    f must be homogeneous.  Returns a series of VElements supported in v^0.
    """
    ws = {weight(lam) for lam in f.terms}
    if len(ws) > 1:
        raise ValueError("input must be homogeneous")
    G = ws.pop() if ws else 0

    def build(a, b):
        pz = _ptheta(lambda n: z_n(n).block(G), K, a, b)
        rhs = OmegaUSeries(K, a, b, {(0, 0): VElement.head(f)})
        r = series_solve(pz, rhs, _block_apply, lo=a, hi=b)
        pvg = _ptheta(lambda n: (v_inverse_limit(n) @ gamma_n(n)).block(G), K, a, b)
        return pvg.mul(r, _block_apply) + OmegaUSeries(K, a, b, {(0, 0): VElement.head(f)})

    return _padded(build, lo, hi, K)


def normalized_direct(f: SymFunc, K: int = 1, lo: int = -2, hi: int = 3) -> OmegaUSeries:
    """theta(u)/theta(uw) I(u) f, still with w kept symbolic."""

    def build(a, b):
        I = i_direct(f, K, a, b)
        ratio = OmegaUSeries.ptheta(lambda n: ONE, K, a, b).mul(
            series_invert(OmegaUSeries.ptheta(lambda n: _w_power(n), K, a, b), (a, b)), lo=a, hi=b)
        return ratio.mul(I, _scalar_times)

    return _padded(build, lo, hi, K)


def _w_power(n: int) -> ParamLaurent:
    return ParamLaurent.monomial(w=n)


def apply_series(s: OmegaUSeries, f: SymFunc) -> OmegaUSeries:
    e = VElement.head(f)
    return s.map(lambda blk: blk.apply(e))


# -- verification suites -----------------------------------------------------

def _vlabel(key: Key) -> dict:
    return {"v": key[0], "p": list(key[1])}


def verify_blocks(max_grading: int = 5, ns: Iterable[int] = (-2, -1, 0, 1, 2), verbose=False) -> Report:
    """Gradings, the two constructions of gamma, and the 2x2 block forms of gamma, W, Z, V."""
    report = Report("blocks", {"max_grading": max_grading, "n": list(ns)})
    for n in ns:
        g, gh, w, z = gamma_n(n), gamma_hom(n), w_n(n), z_n(n)
        for G in range(max_grading + 1):
            H = basis(G, HEAD)
            for prog in (g, w, z, alpha_n(n), beta_n(n), x_n(n), y_n(n), v_inverse_limit(n)):
                ok = all(grading(k) == G for key in basis(G, prog.src) for k in prog.column(key))
                report.add({"n": n, "G": G, "op": prog.name}, "grading", ok)
            gb, ghb, wb, zb = g.block(G), gh.block(G), w.block(G), z.block(G)
            report.add({"n": n, "G": G}, "gamma word = gamma homomorphism", gb == ghb, gb, ghb, verbose)
            report.add({"n": n, "G": G}, "gamma head->head = 1",
                       gb.restrict(HEAD, HEAD) == Block.identity(H))
            report.add({"n": n, "G": G}, "gamma tail->head = 0", gb.restrict(TAIL, HEAD).is_zero())
            report.add({"n": n, "G": G}, "beta", gb.restrict(HEAD, TAIL) == beta_n(n).block(G))
            report.add({"n": n, "G": G}, "alpha", gb.restrict(TAIL, TAIL) == alpha_n(n).block(G))
            report.add({"n": n, "G": G}, "W head->head = 1", wb.restrict(HEAD, HEAD) == Block.identity(H))
            report.add({"n": n, "G": G}, "W head->tail = 0", wb.restrict(HEAD, TAIL).is_zero())
            report.add({"n": n, "G": G}, "Y", wb.restrict(TAIL, HEAD) == y_n(n).block(G))
            report.add({"n": n, "G": G}, "X", wb.restrict(TAIL, TAIL) == x_n(n).block(G))
            # Z from the block product [[1, Y], [0, X]] [[1, 0], [beta, alpha]]
            Y, X, A, B = (op(n).block(G) for op in (y_n, x_n, alpha_n, beta_n))
            assembled = Block.identity(H) + Y @ B + Y @ A + X @ B + X @ A
            report.add({"n": n, "G": G}, "Z = W gamma (blocks)", zb == assembled, zb, assembled, verbose)
            V = v_inverse_limit(n).block(G)
            report.add({"n": n, "G": G}, "V tail = -Y", V.restrict(TAIL, HEAD) == -Y)
            wn = _w_power(n) - 1
            report.add({"n": n, "G": G}, "V head = w^n - 1", V.restrict(HEAD, HEAD) == Block.identity(H).scale(wn))
    return report


def ptheta_z_assembly(G: int, K: int = 1, lo: int = -2, hi: int = 3) -> Report:
    """Ptheta(uZ) on the full piece against its 2x2 block form, layer by layer."""
    report = Report("ptheta-assembly", {"G": G, "K": K})
    pz = _ptheta(lambda n: z_n(n).block(G), K, lo, hi)
    H = Block.identity(basis(G, HEAD))
    parts = {
        "11": _ptheta(lambda n: H, K, lo, hi) + _ptheta(lambda n: pair_block("YB", n, G), K, lo, hi),
        "12": _ptheta(lambda n: pair_block("YA", n, G), K, lo, hi),
        "21": _ptheta(lambda n: pair_block("XB", n, G), K, lo, hi),
        "22": _ptheta(lambda n: pair_block("XA", n, G), K, lo, hi),
    }
    spaces = {"1": HEAD, "2": TAIL}
    for name, s in parts.items():
        dst, src = spaces[name[0]], spaces[name[1]]
        direct = pz.map(lambda b: b.restrict(src, dst))
        for k in range(K + 1):
            for n in range(lo, hi + 1):
                a, b = direct.get(k, n, Block()), s.get(k, n, Block())
                report.add({"G": G, "block": name}, (k, n), a == b)
    return report


def _finite_w1(N: int, n: int) -> SkewOp:
    """W_1^{[n]} = Z_1^{[n]} gamma_1^{-n}."""
    return z_op(N, 1, n).compose(SkewOp.gamma(N, 0, -n))


def verify_diagrams(ns: Iterable[int] = (-2, -1, 0, 1, 2), degree: int = 4, N: int = 3, verbose=False) -> Report:
    """pi^(1) gamma = gamma_1 pi^(1), the same for W and Z, and tau V = V_1 pi^(1)."""
    report = Report("diagrams", {"n": list(ns), "degree": degree, "N": N})
    for n in ns:
        fin = {"gamma": SkewOp.gamma(N, 0, n), "W": _finite_w1(N, n), "Z": z_op(N, 1, n)}
        inf = {"gamma": gamma_n(n), "W": w_n(n), "Z": z_n(n)}
        for G in range(degree + 1):
            for key in basis(G):
                e = VElement.monomial(*key)
                down = pi_n1(e, N)
                for name in ("gamma", "W", "Z"):
                    lhs = pi_n1(inf[name].apply(e), N)
                    rhs = fapply(fin[name], down)
                    report.add({"n": n, "op": name, **_vlabel(key)}, None, lhs == rhs, lhs, rhs, verbose)
                lhs = tau_n(v_inverse_limit(n).apply(e).head_part(), N)
                rhs = fapply(v1_op(N, n), down)
                report.add({"n": n, "op": "V", **_vlabel(key)}, None, lhs == rhs, lhs, rhs, verbose)
    return report


def verify_stability(N: int, K: int = 1, degree: int = 4, window: tuple[int, int] = (-2, 3),
                     verbose=False) -> Report:
    """tau_N I(u) p_lambda against I_N(u) pi_N p_lambda, per (omega, u) layer."""
    lo, hi = window
    report = Report("stability", {"N": N, "K": K, "degree": degree, "window": [lo, hi]})
    IN = i_n_generating(N, K, (lo, hi))
    for lam in partitions_upto(degree):
        f = SymFunc.p(lam)
        lhs = i_direct(f, K, lo, hi).map(lambda e: tau_n(e.head_part(), N))
        rhs = IN.apply(pi_n(f, N))
        compare_series(report, {"p": list(lam)}, lhs, rhs, verbose)
    # the trivial eigenfunction: theta(u t^N) / theta(u)
    num = OmegaUSeries.ptheta(lambda n: qt(0, N * n), K, lo - 4, hi + 4)
    ev = num.mul(series_invert(theta_scalar("u", K, lo - 4, hi + 4), (lo - 4, hi + 4)), lo=lo, hi=hi)
    one = i_direct(SymFunc.one(), K, lo, hi).map(lambda e: tau_n(e.head_part(), N))
    compare_series(report, {"p": [], "eigenvalue": True}, one, ev.map(lambda c: XPoly.const(N, c)), verbose)
    return report


def verify_w_independence(K: int = 1, window: tuple[int, int] = (-3, 4), degree: int = 4,
                          verbose=False) -> Report:
    """theta(u)/theta(uw) I(u) p_lambda has w-free coefficients and equals the block formula."""
    lo, hi = window
    report = Report("w-independence", {"K": K, "window": [lo, hi], "degree": degree})
    for lam in partitions_upto(degree):
        f = SymFunc.p(lam)
        s = normalized_direct(f, K, lo, hi)
        free = all(not c.has_w() for _, e in s.items() for _, c in e.items())
        report.add({"p": list(lam)}, "w-free", free)
        blocks = apply_series(mathcal_i(weight(lam), K, lo, hi), f)
        bad = s.diff_layers(blocks)
        report.add({"p": list(lam)}, "matches block formula", not bad, bad or None, None, verbose)
    return report


def verify_commutativity(degree: int = 5, K: int = 1, mathcal_degree: int = 4, verbose=False) -> Report:
    """[J_0, K_0] = 0, [J_0^{[1]}, J_0^{[-1]}] = 0 and [I_0, I_1] = O(omega^2) on every p_lambda."""
    report = Report("commutativity", {"degree": degree, "K": K, "mathcal_degree": mathcal_degree})
    for G in range(degree + 1):
        J0, K0 = j_coeff(0, G), k_explicit_block(0, G)
        Jm = pair_block("YB", -1, G)
        c1, c2 = J0.commutator(K0), J0.commutator(Jm)
        for key in basis(G, HEAD):
            lam = list(key[1])
            report.add({"suite": "J0,K0", "p": lam}, None, not c1.cols.get(key), c1.cols.get(key), None, verbose)
            report.add({"suite": "J0[1],J0[-1]", "p": lam}, None, not c2.cols.get(key))
    for G in range(mathcal_degree + 1):
        a0, a1 = hamiltonian(0, G)
        b0, b1 = hamiltonian(1, G)
        l0 = a0.commutator(b0)
        l1 = a0.commutator(b1) + a1.commutator(b0)
        for key in basis(G, HEAD):
            lam = list(key[1])
            report.add({"suite": "I0,I1", "p": lam}, "omega^0", not l0.cols.get(key))
            report.add({"suite": "I0,I1", "p": lam}, "omega^1", not l1.cols.get(key))
    return report


# -- omega = 0 eigenvalues ---------------------------------------------------

def _geometric(c: ParamLaurent, hi: int) -> OmegaUSeries:
    """1 / (1 - c u) through u^hi."""
    return OmegaUSeries(0, 0, hi, {(0, n): c ** n for n in range(hi + 1)})


def _linear(c: ParamLaurent, hi: int) -> OmegaUSeries:
    """1 - c u."""
    return OmegaUSeries(0, 0, hi, {(0, 0): ONE, (0, 1): -c})


def eigenvalue_omega0(lam, hi: int, cutoff: int | None = None) -> OmegaUSeries:
    """(1 - u)/(1 - u t^M) prod_{i<=M} (1 - u q^{-l_i} t^i)/(1 - u q^{-l_i} t^{i-1}) through u^hi.

    For M >= l(lam) the factors with l_i = 0 telescope against the
    normalization, so the result does not depend on M.
    """
    M = len(lam) + 2 if cutoff is None else cutoff
    parts = list(lam) + [0] * (M - len(lam))
    out = _linear(ONE, hi).mul(_geometric(qt(0, M), hi))
    for i, l in enumerate(parts, start=1):
        out = out.mul(_linear(qt(-l, i), hi)).mul(_geometric(qt(-l, i - 1), hi))
    return out


def _clear_denominators(f: SymFunc) -> SymFunc:
    dens = []
    for c in f.terms.values():
        if isinstance(c, ParamScalar) and not c.den == 1 and not any(c.den == d for d in dens):
            dens.append(c.den)
    common = ONE
    for d in dens:
        common = common * d
    out = {}
    for lam, c in f.terms.items():
        c = ParamScalar.coerce(c) * common
        out[lam] = c.as_laurent()
    return SymFunc(out)


def _finite_eigenvalue(N: int, f: SymFunc, hi: int) -> OmegaUSeries | None:
    """(1 - u)/(1 - u t^N) D_N(ut)/D_N(u) read off the determinant action on pi_N f."""
    x = pi_n(f, N)
    if x.is_zero():
        return None
    ref_exp, ref_c = next(iter(sorted(x.items())))
    d = {}
    for (_, k), op in macdonald_determinant(N).items():
        y = op.apply(x)
        c = ParamScalar(y.coeff(ref_exp), ref_c) if y.coeff(ref_exp) else ParamScalar(0)
        if not (x.map_coeffs(lambda v: v * c.num) == y.map_coeffs(lambda v: v * c.den)):
            raise ArithmeticError("not an eigenfunction of the finite operator")
        d[k] = c
    du = OmegaUSeries(0, 0, hi, {(0, k): c for k, c in d.items()})
    dut = OmegaUSeries(0, 0, hi, {(0, k): c * qt(0, k) for k, c in d.items()})
    ratio = dut.mul(series_invert(du, (0, hi)))
    return _linear(ONE, hi).mul(ratio).mul(series_invert(_linear(qt(0, N), hi), (0, hi)))


def verify_eigen_omega0(degree: int = 4, hi: int = 4, oracle_N: int = 4, verbose=False) -> Report:
    """Zeroth-order checks: closed form (1-u)(1-u-uJ)^{-1} and Macdonald eigenvalues."""
    report = Report("eigen-omega0", {"degree": degree, "window": [0, hi], "N": oracle_N})
    for G in range(degree + 1):
        s = mathcal_i(G, 0, 0, hi)
        H = Block.identity(basis(G, HEAD))
        D = OmegaUSeries(0, 0, hi, {(0, 0): H, (0, 1): -H}) - j_series(G, hi).shift_u(1)
        closed = OmegaUSeries(0, 0, hi, {(0, 0): ONE, (0, 1): -ONE}).mul(
            series_invert(D, (0, hi), one=H, product=_block_product), _scalar_times)
        report.add({"G": G}, "(1-u)(1-u-uJ)^-1", not s.diff_layers(closed))
        for lam in partitions(G):
            M = _clear_denominators(macdonald_poly(lam))
            act = apply_series(s, M)
            ev = eigenvalue_omega0(lam, hi)
            ev_more = eigenvalue_omega0(lam, hi, len(lam) + 4)
            report.add({"p": list(lam)}, "telescoping cutoff", not ev.diff_layers(ev_more))
            expected = ev.map(lambda c: VElement.head(M.scale(c)))
            bad = act.diff_layers(expected)
            report.add({"p": list(lam)}, "eigenvalue", not bad, bad or None, None, verbose)
            if len(lam) <= oracle_N:
                fin = _finite_eigenvalue(oracle_N, M, hi)
                ok = fin is not None and not ev.diff_layers(fin)
                report.add({"p": list(lam)}, f"finite N={oracle_N}", ok)
    return report


def operator_table(op: str, G: int) -> Block:
    """Named head-space operators used by the command line."""
    table = {
        "J0": lambda: j_coeff(0, G),
        "J1": lambda: j_coeff(1, G),
        "K-1": lambda: k_explicit_block(-1, G),
        "K0": lambda: k_explicit_block(0, G),
        "K1": lambda: k_explicit_block(1, G),
    }
    if op not in table:
        raise KeyError(op)
    return table[op]()


__all__ = [
    "Block", "OpProgram", "alpha_n", "apply_series", "basis", "beta_n", "block_of", "eigenvalue_omega0",
    "eta", "gamma_hom", "gamma_n", "grading", "hamiltonian", "hamiltonian_closed", "i_direct", "identity",
    "j0_modes", "j_coeff", "j_series", "k_explicit", "k_explicit_block", "k_modes", "k_series",
    "mathcal_i", "normalized_direct", "operator_table", "pair_block", "partition_str", "projection",
    "ptheta_z_assembly", "q_mul", "qstar", "schur_complement", "v_circ", "v_inverse_limit", "v_mul",
    "verify_blocks", "verify_commutativity", "verify_diagrams", "verify_eigen_omega0",
    "verify_hamiltonians", "verify_k_dual", "verify_stability", "verify_w_independence", "w_n", "word",
    "x_n", "xi", "y_n", "z_n",
]
