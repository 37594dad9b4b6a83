import pytest
import sympy

from dellns import invlimit as il
from dellns.invlimit import Block, basis, grading
from dellns.scalars import ParamLaurent, qt
from dellns.symfunc import SymFunc, VElement, macdonald_poly, partitions

from oracles import P, j0, laurent, q, same, symfunc, t

v = sympy.Symbol("v")


def vsym(e: VElement):
    return sum((laurent(c) * v**a * sympy.Mul(*[P[k - 1] for k in lam]) for (a, lam), c in e.items()),
               sympy.Integer(0))


def test_basis_and_grading():
    assert basis(0) == ((0, ()),)
    assert basis(2, "head") == ((0, (2,)), (0, (1, 1)))
    assert basis(2, "tail") == ((1, (1,)), (2, ()))
    assert all(grading(k) == 4 for k in basis(4))
    assert len(basis(3)) == sum(len(partitions(3 - a)) for a in range(4))
    assert basis(-1) == ()


@pytest.mark.parametrize("n", [-2, -1, 1, 2])
def test_gamma_is_the_shift_homomorphism(n):
    sub = {P[k - 1]: P[k - 1] + (q**(-n * k) - 1) * v**k for k in range(1, 6)}
    sub[v] = q**(-n) * v
    for G in range(4):
        for key in basis(G):
            e = VElement.monomial(*key)
            ref = vsym(e).subs(sub, simultaneous=True)
            assert same(vsym(il.gamma_n(n).apply(e)), ref), key
            assert same(vsym(il.gamma_hom(n).apply(e)), ref), key


def test_block_forms():
    assert il.verify_blocks(max_grading=3, ns=(-1, 1, 2)).passed


def test_v_on_heads_and_tails():
    V = il.v_inverse_limit(2)
    assert V.apply(VElement.monomial(0, (1,))) == VElement.head(SymFunc.p((1,), qt(0, 0, 2) - 1))
    # v^2 -> -Q_2^{[2]}
    img = V.apply(VElement.monomial(2, ()))
    assert img == VElement.head(-il.q_coeff(2, 2))


@pytest.mark.parametrize("lam", [(1,), (2,), (1, 1), (3,), (2, 1), (1, 1, 1), (2, 2)])
def test_j0_matches_oracle(lam):
    G = sum(lam)
    f = SymFunc.p(lam)
    got = il.j_coeff(0, G).apply(VElement.head(f)).head_part()
    ref = j0(symfunc(f), G)
    assert same(symfunc(got), ref)
    assert same(symfunc(il.j0_modes(f)), ref)


def test_j0_on_p1():
    got = il.j_coeff(0, 1).apply(VElement.head(SymFunc.p((1,)))).head_part()
    assert same(symfunc(got), -(1 - t) * (1 - 1 / q) * P[0])


def test_minus_k_minus_one_is_y_beta():
    for G in range(5):
        lhs = -il.k_explicit_block(-1, G)
        rhs = Block.identity(basis(G, "head")) + il.pair_block("YB", -1, G)
        assert lhs == rhs


def test_k_operators_two_ways():
    assert il.verify_k_dual(degree=4).passed


@pytest.mark.parametrize("variant", [True, "range", "exponent"])
def test_alternative_k1_index_conventions_disagree(variant):
    rep = il.verify_k_dual(degree=3, alt=variant)
    assert not rep.passed
    # K_{-1} and K_0 are unaffected by the K_1 variants
    assert all(c.ok for c in rep.cases if c.input["K"] != 1)


def test_hamiltonians_closed_forms():
    assert il.verify_hamiltonians(degree=3).passed
    assert not il.verify_hamiltonians(degree=2, j1="minus").passed
    assert not il.verify_hamiltonians(degree=2, j1="square").passed
    assert not il.verify_hamiltonians(degree=2, alt=True).passed


def test_hamiltonian_u0_leading_term_is_identity():
    for G in range(4):
        h0, _ = il.hamiltonian(0, G)
        assert h0 == Block.identity(basis(G, "head"))
        assert il.hamiltonian(-1, G)[0].is_zero()


def test_ptheta_z_assembly():
    assert il.ptheta_z_assembly(2).passed


def test_diagrams_small():
    assert il.verify_diagrams(ns=(-1, 1), degree=3, N=2).passed


def test_stability_small():
    assert il.verify_stability(2, K=0, degree=3).passed
    assert il.verify_stability(2, K=1, degree=2).passed


def test_w_independence_small():
    assert il.verify_w_independence(K=1, degree=2).passed


def test_commutativity_small():
    assert il.verify_commutativity(degree=4, K=1, mathcal_degree=3).passed


def test_eigenvalues_at_omega_zero():
    assert il.verify_eigen_omega0(degree=3, hi=3, oracle_N=3).passed


@pytest.mark.parametrize("lam", [(1,), (2,), (1, 1), (2, 1), (3,)])
def test_macdonald_eigenvalue_of_j0(lam):
    # at omega = 0, I(u) = (1 - u)(1 - u - uJ)^{-1}, so J_0 acts on P_lambda by
    # -1 - [u^1] of (1 - u)/E(u) with E the eigenvalue of I(u)
    uu = sympy.Symbol("u")
    M = len(lam) + 1
    parts = list(lam) + [0] * (M - len(lam))
    E = (1 - uu) / (1 - uu * t**M)
    for i, l in enumerate(parts, 1):
        E *= (1 - uu * q**(-l) * t**i) / (1 - uu * q**(-l) * t**(i - 1))
    expected = -1 - sympy.series((1 - uu) / E, uu, 0, 2).removeO().coeff(uu, 1)
    Mp = macdonald_poly(lam)
    img = il.j_coeff(0, sum(lam)).apply(VElement.head(Mp)).head_part()
    for mu, c in Mp.items():
        assert sympy.cancel(laurent(img.coeff(mu)) - expected * laurent(c)) == 0


def test_operator_table():
    assert il.operator_table("J0", 2) == il.j_coeff(0, 2)
    with pytest.raises(KeyError):
        il.operator_table("J9", 2)


def test_block_json_shape():
    data = il.j_coeff(0, 2).to_json(2)
    assert data["weight"] == 2 and data["basis"] == [[2], [1, 1]]
    assert len(data["matrix"]) == 2 and all(len(row) == 2 for row in data["matrix"])


def test_block_forms_through_grading_six():
    assert il.verify_blocks(max_grading=6, ns=(-2, -1, 0, 1, 2)).passed


@pytest.mark.parametrize("G", range(5))
def test_j0_and_k0_preserve_weight(G):
    for blk in (il.j_coeff(0, G), il.k_explicit_block(0, G)):
        for key, col in blk.cols.items():
            assert all(r[0] == 0 and sum(r[1]) == G for r in col)
