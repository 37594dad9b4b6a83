"""Command line: run verification suites, act with operators, dump operator tables.

    dellns verify --suite commutativity --max-degree 5
    dellns act --op J0 --input "p[1]"
    dellns act --op DN --n 2 --omega-order 0 --input "x1+x2"
    dellns dump --op K0 --weight 2

Exit codes: 0 when every case passes, 1 on a verification failure, 2 on a
usage error.  DELLNS_THREADS caps the number of worker threads; reports are
assembled in submission order, so output does not depend on scheduling.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from . import finite, invlimit
from .reports import Report, merge
from .scalars import ParamLaurent, rat, scalar_to_json
from .series import OmegaUSeries, default_window
from .symfunc import SymFunc, parse_partition, qstar_q_commutator_check, weight
from .xpoly import XPoly

SUITES = (
    "theorem5", "theorem6", "resolvent", "identityC1", "identityC2", "diagrams", "stability",
    "w-independence", "commutativity", "eigen-omega0", "appendixD", "squarefree-probe",
    "k-dual", "gl2", "hamiltonians", "all",
)
HEAD_OPS = ("J0", "J1", "K-1", "K0", "K1")
HAMILTONIANS = {"I-1": -1, "I0": 0, "I1": 1}
X_OPS = ("DN", "IN", "Ci", "Zi", "Ui")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    suite: str | None = None
    n: int | None = None
    omega_order: int | None = None
    max_degree: int | None = None
    u_min: int | None = None
    u_max: int | None = None
    seed: int = 0
    fmt: str = "text"
    out: str | None = None
    extra: dict = field(default_factory=dict)

    def pick(self, name: str, default):
        v = getattr(self, name)
        return default if v is None else v

    def window(self, default: tuple[int, int]) -> tuple[int, int]:
        lo, hi = self.pick("u_min", default[0]), self.pick("u_max", default[1])
        if lo > hi:
            raise UsageError("empty u-window")
        return lo, hi

    def validate(self):
        if self.omega_order is not None and self.omega_order < 0:
            raise UsageError("--omega-order must be >= 0")
        if self.max_degree is not None and self.max_degree < 0:
            raise UsageError("--max-degree must be >= 0")
        if self.n is not None and self.n < 1:
            raise UsageError("--n must be >= 1")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("DELLNS_THREADS", "1")))
    except ValueError:
        return 1


def run_jobs(jobs: list[Callable[[], Report]]) -> list[Report]:
    """Run independent suite pieces, returning results in submission order."""
    n = _threads()
    if n == 1 or len(jobs) < 2:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=n) as pool:
        futures = [pool.submit(job) for job in jobs]
        return [f.result() for f in futures]


# -- suites -----------------------------------------------------------------

def _suite_jobs(name: str, cfg: RunConfig) -> tuple[list[Callable[[], Report]], dict]:
    K = cfg.pick("omega_order", 1)
    if name == "theorem5":
        N, d = cfg.pick("n", 2), cfg.pick("max_degree", 3)
        return [lambda: finite.verify_theorem5(N, K, d)], {"N": N, "K": K, "degree": d}
    if name == "theorem6":
        N, d = cfg.pick("n", 2), cfg.pick("max_degree", 3)
        w = cfg.window(default_window(K, N))
        return [lambda: finite.verify_theorem6(N, K, d, w)], {"N": N, "K": K, "degree": d, "window": list(w)}
    if name == "resolvent":
        N, d = cfg.pick("n", 2), cfg.pick("max_degree", 2)
        w = cfg.window(default_window(K, N))
        return [lambda: finite.verify_resolvent(N, K, d, w)], {"N": N, "K": K, "degree": d, "window": list(w)}
    if name in ("identityC1", "identityC2"):
        N = cfg.pick("n", 4)
        fn = finite.verify_identity_C1 if name == "identityC1" else finite.verify_identity_C2
        return [lambda: fn(N, seed=cfg.seed)], {"N": N, "seed": cfg.seed}
    if name == "diagrams":
        N, d = cfg.pick("n", 3), cfg.pick("max_degree", 4)
        return [lambda: invlimit.verify_diagrams(range(-2, 3), d, N)], {"N": N, "degree": d}
    if name == "stability":
        d, w = cfg.pick("max_degree", 4), cfg.window((-2, 3))
        Ns = [cfg.n] if cfg.n is not None else [2, 3]
        Ks = [cfg.omega_order] if cfg.omega_order is not None else [0, 1]
        jobs = [(lambda N=N, k=k: invlimit.verify_stability(N, k, d, w)) for N in Ns for k in Ks]
        return jobs, {"N": Ns, "K": Ks, "degree": d, "window": list(w)}
    if name == "w-independence":
        d, w = cfg.pick("max_degree", 4), cfg.window((-3, 4))
        return [lambda: invlimit.verify_w_independence(K, w, d)], {"K": K, "degree": d, "window": list(w)}
    if name == "commutativity":
        d = cfg.pick("max_degree", 5)
        return [lambda: invlimit.verify_commutativity(d, K, min(d, 4))], {"K": K, "degree": d}
    if name == "eigen-omega0":
        d, hi, N = cfg.pick("max_degree", 4), cfg.pick("u_max", 4), cfg.pick("n", 4)
        return [lambda: invlimit.verify_eigen_omega0(d, hi, N)], {"degree": d, "u_max": hi, "N": N}
    if name == "appendixD":
        d = cfg.pick("max_degree", 5)
        jobs = [(lambda m=m, n=n, s=s, r=r: qstar_q_commutator_check(m, n, s, r, d))
                for m in range(5) for n in range(5) for s in (-1, 1, 2) for r in (-1, 1, 2)]
        return jobs, {"degree": d, "m,n": "0..4", "s,r": [-1, 1, 2]}
    if name == "squarefree-probe":
        N = cfg.pick("n", 3)
        return [lambda: finite.squarefree_commutativity_probe(N, K)], {"N": N, "K": K}
    if name == "k-dual":
        d = cfg.pick("max_degree", 5)
        return [lambda: invlimit.verify_k_dual(d)], {"degree": d}
    if name == "gl2":
        K2 = cfg.pick("omega_order", 2)
        return [lambda: finite.verify_gl2(K2)], {"K": K2}
    if name == "hamiltonians":
        d = cfg.pick("max_degree", 3)
        return [lambda: invlimit.verify_hamiltonians(d)], {"degree": d}
    raise UsageError(f"unknown suite {name!r}")


def _acceptance_jobs(cfg: RunConfig) -> tuple[list[Callable[[], Report]], dict]:
    """The default acceptance configuration, suite by suite."""
    jobs: list = []
    K = 1
    jobs += [lambda: invlimit.verify_commutativity(5, K, 4)]
    jobs += [(lambda N=N: finite.verify_theorem5(N, K, 3)) for N in (2, 3)]
    jobs += [(lambda N=N: finite.verify_theorem6(N, K, 3)) for N in (2, 3)]
    jobs += [(lambda N=N: finite.verify_resolvent(N, K, 3)) for N in (2, 3)]
    jobs += [(lambda N=N, k=k: invlimit.verify_stability(N, k, 4, (-2, 3))) for N in (2, 3) for k in (0, 1)]
    jobs += [lambda: invlimit.verify_w_independence(K, (-3, 4), 4)]
    jobs += [(lambda N=N, fn=fn: fn(N, seed=cfg.seed, count=20))
             for fn in (finite.verify_identity_C1, finite.verify_identity_C2) for N in (2, 3, 4, 5)]
    jobs += [(lambda m=m, n=n, s=s, r=r: qstar_q_commutator_check(m, n, s, r, 5))
             for m in range(5) for n in range(5) for s in (-1, 1, 2) for r in (-1, 1, 2)]
    jobs += [lambda: invlimit.verify_eigen_omega0(4, 4, 4)]
    jobs += [lambda: invlimit.verify_k_dual(5)]
    jobs += [(lambda k=k: finite.verify_gl2(k)) for k in (0, 1, 2)]
    jobs += [lambda: invlimit.verify_diagrams(range(-2, 3), 4, 3)]
    return jobs, {"K": K, "seed": cfg.seed}


def cmd_verify(cfg: RunConfig) -> tuple[int, Report]:
    if cfg.suite not in SUITES:
        raise UsageError(f"unknown suite {cfg.suite!r}; choose from {', '.join(SUITES)}")
    jobs, params = _acceptance_jobs(cfg) if cfg.suite == "all" else _suite_jobs(cfg.suite, cfg)
    reports = run_jobs(jobs)
    report = reports[0] if len(reports) == 1 else merge(cfg.suite, reports, params)
    return (0 if report.passed else 1), report


# -- act ----------------------------------------------------------------------

def parse_symfunc(text: str) -> SymFunc:
    """'p[2,1]', or a sum of such terms with optional rational factors: '2*p[2] - p[1,1]'."""
    out = SymFunc()
    body = text.replace(" ", "")
    if not body:
        raise UsageError("empty input")
    # split on top-level + and - that start a new term
    terms, cur = [], ""
    for ch in body:
        if ch in "+-" and cur and not cur.endswith(("*", "[", ",")):
            terms.append(cur)
            cur = ch
        else:
            cur += ch
    terms.append(cur)
    for term in terms:
        sign = -1 if term.startswith("-") else 1
        term = term.lstrip("+-")
        coeff, _, part = term.rpartition("*")
        try:
            c = rat(coeff) if coeff else rat(1)
            lam = parse_partition(part)
        except (ValueError, ZeroDivisionError) as e:
            raise UsageError(f"cannot parse {text!r}: {e}") from None
        out = out + SymFunc.p(lam).scale(c * sign)
    return out


def parse_xpoly(text: str, N: int) -> XPoly:
    """Polynomial in x1..xN with coefficients polynomial in q, t: 'x1^2*x2 + 3*x1'."""
    import sympy

    xs = sympy.symbols(" ".join(f"x{i}" for i in range(1, N + 1)), seq=True)
    q, t = sympy.symbols("q t")
    names = {str(s): s for s in (*xs, q, t)}
    try:
        expr = sympy.sympify(text.replace("^", "**"), locals=names)
        poly = sympy.Poly(sympy.expand(expr), *xs, q, t)
    except (sympy.SympifyError, sympy.PolynomialError, TypeError) as e:
        raise UsageError(f"cannot parse {text!r} as a polynomial in x1..x{N}: {e}") from None
    extra = expr.free_symbols - set(names.values())
    if extra:
        raise UsageError(f"unknown symbols in input: {sorted(map(str, extra))}")
    acc: dict = {}
    for exps, c in poly.terms():
        if not c.is_Rational:
            raise UsageError("coefficients must be rational")
        e, (a, b) = tuple(exps[:N]), exps[N:]
        term = ParamLaurent.monomial(a, b, 0, rat(f"{c.p}/{c.q}"))
        acc[e] = acc[e] + term if e in acc else term
    return XPoly(N, acc)


def _head_input(text: str) -> SymFunc:
    if "x" in text:
        raise UsageError("this operator acts on symmetric functions; give input as p[...]")
    return parse_symfunc(text)


def _block_action(block_of_weight: Callable[[int], "invlimit.Block"], f: SymFunc) -> SymFunc:
    out = SymFunc()
    by_weight: dict[int, SymFunc] = {}
    for lam, c in f.items():
        by_weight.setdefault(weight(lam), SymFunc())
        by_weight[weight(lam)] = by_weight[weight(lam)] + SymFunc.p(lam).scale(c)
    for G, g in sorted(by_weight.items()):
        img = block_of_weight(G).apply(invlimit.VElement.head(g))
        out = out + img.head_part()
    return out


def act(cfg: RunConfig, op: str, text: str):
    """Returns ('symfunc', SymFunc) or ('series', OmegaUSeries of SymFunc / XPoly)."""
    if op in HEAD_OPS:
        f = _head_input(text)
        return "symfunc", _block_action(lambda G: invlimit.operator_table(op, G), f)
    if op in HAMILTONIANS:
        f = _head_input(text)
        n = HAMILTONIANS[op]
        layers = {k: _block_action(lambda G: invlimit.hamiltonian(n, G)[k], f) for k in (0, 1)}
        return "series", OmegaUSeries(1, n, n, {(k, n): g for k, g in layers.items()})
    if op in X_OPS:
        N, K = cfg.pick("n", 2), cfg.pick("omega_order", 1)
        f = parse_xpoly(text, N)
        i = cfg.extra.get("index", 1)
        if not 1 <= i <= N:
            raise UsageError(f"--index must lie in 1..{N}")
        if op == "IN":
            return "series", finite.i_n_generating(N, K, cfg.window(default_window(K, N))).apply(f)
        if op == "DN":
            series = finite.d_n_generating(N, K)
        elif op == "Ci":
            series = finite.dell_cherednik(N, i, K)
        elif op == "Zi":
            series = OmegaUSeries.ptheta(lambda n: finite.z_op(N, i, n), K)
        else:
            series = OmegaUSeries.ptheta(lambda n: finite.u_op(N, i, n), K)
        out = finite.apply(series, f)
        if cfg.u_min is not None or cfg.u_max is not None:
            lo, hi = cfg.window((out.lo, out.hi))
            out = out.truncate(lo=lo, hi=hi)
        return "series", out
    raise UsageError(f"unknown operator {op!r}")


def _value_json(v):
    if isinstance(v, (SymFunc, XPoly)):
        return v.to_json()
    return scalar_to_json(v)


def render_action(kind: str, value, fmt: str) -> str:
    if fmt == "json":
        if kind == "symfunc":
            return json.dumps(value.to_json(), indent=2)
        return json.dumps({"layers": value.to_json(_value_json)}, indent=2)
    if kind == "symfunc":
        return str(value)
    lines = [f"omega^{k} u^{n}: {c}" for (k, n), c in value.items()]
    return "\n".join(lines) if lines else "0"


# -- dump ---------------------------------------------------------------------

def dump(op: str, G: int) -> dict:
    if G < 0 or G > 6:
        raise UsageError("--weight must lie in 0..6")
    if op in HEAD_OPS:
        return invlimit.operator_table(op, G).to_json(G)
    if op in HAMILTONIANS:
        n = HAMILTONIANS[op]
        blocks = invlimit.hamiltonian(n, G)
        return {"weight": G, "u": n,
                "layers": [{"omega": k, **blocks[k].to_json(G)} for k in (0, 1)]}
    raise UsageError(f"cannot dump {op!r}; choose from {', '.join(HEAD_OPS + tuple(HAMILTONIANS))}")


# -- argument handling ----------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int, help="number of variables N (finite-N suites and operators)")
    p.add_argument("--omega-order", type=int, help="omega truncation order K")
    p.add_argument("--max-degree", type=int, help="largest input degree")
    p.add_argument("--u-min", type=int, help="lower end of the u-window")
    p.add_argument("--u-max", type=int, help="upper end of the u-window")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled index vectors")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", help="write the output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dellns", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True)
    _common(v)
    a = sub.add_parser("act", help="apply an operator to an input")
    a.add_argument("--op", required=True)
    a.add_argument("--input", required=True)
    a.add_argument("--index", type=int, default=1, help="i for Ci, Zi, Ui")
    _common(a)
    d = sub.add_parser("dump", help="p-basis matrix of an operator on one weight")
    d.add_argument("--op", required=True)
    d.add_argument("--weight", type=int, required=True)
    _common(d)
    return parser


def _config(ns) -> RunConfig:
    cfg = RunConfig(
        suite=getattr(ns, "suite", None), n=ns.n, omega_order=ns.omega_order,
        max_degree=ns.max_degree, u_min=ns.u_min, u_max=ns.u_max, seed=ns.seed,
        fmt=ns.format, out=ns.out, extra={"index": getattr(ns, "index", 1)},
    )
    cfg.validate()
    return cfg


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:  # argparse reports usage errors with status 2
        return int(e.code or 0)
    try:
        cfg = _config(ns)
        if ns.command == "verify":
            code, report = cmd_verify(cfg)
            _emit(report.dumps() if cfg.fmt == "json" else report.text(), cfg.out)
            return code
        if ns.command == "act":
            kind, value = act(cfg, ns.op, ns.input)
            _emit(render_action(kind, value, cfg.fmt), cfg.out)
            return 0
        table = dump(ns.op, ns.weight)
        _emit(json.dumps(table, indent=2) if cfg.fmt == "json" else _table_text(table), cfg.out)
        return 0
    except UsageError as e:
        sys.stderr.write(f"dellns: error: {e}\n")
        return 2


def _table_text(table: dict) -> str:
    def mat(t):
        rows = [" | ".join(_cell(c) for c in row) for row in t["matrix"]]
        return "\n".join(rows) if rows else "(empty)"

    if "layers" in table:
        return "\n".join(f"omega^{L['omega']}: basis {L['basis']}\n{mat(L)}" for L in table["layers"])
    return f"weight {table['weight']} basis {table['basis']}\n{mat(table)}"


def _cell(c) -> str:
    if isinstance(c, dict):
        return f"({_laurent_text(c['num'])})/({_laurent_text(c['den'])})"
    return _laurent_text(c)


def _laurent_text(recs) -> str:
    if not recs:
        return "0"
    return str(ParamLaurent.from_json(recs))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
