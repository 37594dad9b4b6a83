"""Acceptance criteria, one test each, at exact (zero) tolerance.

Every test records a one-line verdict that is printed at the end of the
pytest run; ``python3 tests/test_acceptance.py`` prints the same lines
without pytest.
"""

import json
import sys
import time
from pathlib import Path

import pytest
import sympy

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

from dellns import finite, invlimit  # noqa: E402
from dellns.symfunc import SymFunc, VElement, qstar_q_commutator_check  # noqa: E402

from oracles import symfunc  # noqa: E402

pytestmark = pytest.mark.slow

VERDICTS: dict[int, str] = {}


def _merge(reports):
    cases = [c for r in reports for c in r.cases]
    bad = [c for c in cases if not c.ok]
    return not bad, f"{len(cases) - len(bad)}/{len(cases)} cases"


def _record(num, title, ok, detail, elapsed, limit=None):
    slow = limit is not None and elapsed > limit
    status = "PASS" if ok and not slow else "FAIL"
    extra = f", over the {limit:.0f}s budget" if slow else ""
    VERDICTS[num] = f"criterion {num:2d} {status}  {title}: {detail} ({elapsed:.1f}s{extra})"
    return ok and not slow


def _run(num, title, limit, jobs):
    start = time.perf_counter()
    ok, detail = _merge([job() for job in jobs])
    return _record(num, title, ok, detail, time.perf_counter() - start, limit)


# -- criterion 1: reference actions of J0 and K0 ---------------------------------

def _head_action(block_fn, lam):
    G = sum(lam)
    return block_fn(G).apply(VElement.head(SymFunc.p(lam))).head_part()


def reference_comparison():
    data = json.loads((HERE / "data" / "reference_actions.json").read_text())
    syms = {s: sympy.Symbol(s) for s in data["symbols"]}
    ops = {"J0": lambda G: invlimit.j_coeff(0, G), "K0": lambda G: invlimit.k_explicit_block(0, G)}
    rows = []
    for name, case in data["cases"].items():
        ref = sympy.sympify(case["expr"], locals=syms)
        got = symfunc(_head_action(ops[case["op"]], tuple(case["input"])))
        same = sympy.simplify(got - ref) == 0
        negated = sympy.simplify(got + ref) == 0
        rows.append((name, same, negated))
    return rows


def criterion_1():
    start = time.perf_counter()
    rows = reference_comparison()
    ok = all(r[1] for r in rows)
    matched = [r[0] for r in rows if r[1]]
    neg = [r[0] for r in rows if r[2]]
    other = [r[0] for r in rows if not r[1] and not r[2]]
    detail = (f"{len(matched)}/{len(rows)} reference actions match; "
              f"equal up to sign: {', '.join(neg) or 'none'}; otherwise different: {', '.join(other) or 'none'}")
    return _record(1, "reference actions of J0, K0", ok, detail, time.perf_counter() - start, 10)


def criterion_2():
    return _run(2, "[J0,K0], [J0[1],J0[-1]], [I0,I1] commute", 600,
                [lambda: invlimit.verify_commutativity(5, 1, 4)])


def criterion_3():
    return _run(3, "D_N(u) = product of Ptheta(u C_i), N=2,3, K=1", 600,
                [lambda N=N: finite.verify_theorem5(N, 1, 3) for N in (2, 3)])


def criterion_4():
    jobs = [lambda N=N: finite.verify_theorem6(N, 1, 3) for N in (2, 3)]
    jobs += [lambda N=N: finite.verify_resolvent(N, 1, 3) for N in (2, 3)]
    return _run(4, "both forms of I_N(u), N=2,3, K=1", 900, jobs)


def criterion_5():
    return _run(5, "stability tau_N I = I_N pi_N, N=2,3, K=0,1", 900,
                [lambda N=N, K=K: invlimit.verify_stability(N, K, 4, (-2, 3)) for N in (2, 3) for K in (0, 1)])


def criterion_6():
    return _run(6, "w-independence of the normalized I(u), K=1", None,
                [lambda: invlimit.verify_w_independence(1, (-3, 4), 4)])


def criterion_7():
    jobs = [lambda N=N, fn=fn: fn(N, seed=0, count=20)
            for fn in (finite.verify_identity_C1, finite.verify_identity_C2) for N in (2, 3, 4, 5)]
    return _run(7, "rational identities C1, C2, N=2..5", 300, jobs)


def criterion_8():
    jobs = [lambda m=m, n=n, s=s, r=r: qstar_q_commutator_check(m, n, s, r, 5)
            for m in range(5) for n in range(5) for s in (-1, 1, 2) for r in (-1, 1, 2)]
    return _run(8, "[Q*_m, Q_n] commutator formula", 300, jobs)


def criterion_9():
    return _run(9, "omega=0 closed form and Macdonald eigenvalues", 600,
                [lambda: invlimit.verify_eigen_omega0(4, 4, 4)])


def criterion_10():
    return _run(10, "K_n by block composition = mode sums", None, [lambda: invlimit.verify_k_dual(5)])


def criterion_11():
    return _run(11, "GL(2) product = double sum, K<=2", None,
                [lambda K=K: finite.verify_gl2(K) for K in (0, 1, 2)])


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 12)])
def test_criterion(criterion):
    ok = criterion()
    num = CRITERIA.index(criterion) + 1
    assert ok, VERDICTS[num]


def main() -> int:
    results = [c() for c in CRITERIA]
    for i in range(1, len(CRITERIA) + 1):
        print(VERDICTS[i])
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
