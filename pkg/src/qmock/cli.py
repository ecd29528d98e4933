"""Command-line front end: ``qmock verify|enumerate|series|prob``.

Every command builds a list of case records (plain dicts), then renders the
same records as text, JSON or TSV.  Exit codes: 0 all cases pass, 1 some case
failed, 2 bad arguments, 3 an internal tolerance could not be reached.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from . import mocktheta as mt
from . import partitions as pt
from .probability import (
    MCConfig,
    ProbabilityParams,
    ToleranceNotReached,
    ZeroConditioningEvent,
    check_theorem31_part1,
    check_theorem31_part2,
    g2_real,
    mc_estimate,
)
from .qseries import Monomial

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_TOLERANCE = 0, 1, 2, 3

DEFAULT_DS = (3, 4, 5, 7)
DEFAULT_QS = (0.2, 0.5, 0.8)
G2BOUND_QS = tuple(k / 10 for k in range(1, 10))
VERIFY_TARGETS = ("schur", "main1", "cor1", "main2", "parity", "fqdiff", "phi32",
                  "prob1", "prob2", "g2bound")
SERIES_EXPRS = ("B", "C", "g2", "g3", "parityB", "parityC")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    sub: str
    grid: list[pt.FamilyParams]
    order: int = 40
    n: int | None = None
    enum_order: int | None = None
    qs: tuple[float, ...] | None = None
    tolerance: float = 1e-8
    mc: MCConfig = field(default_factory=MCConfig)
    fmt: str = "text"
    output: str | None = None
    list_members: bool = False

    @property
    def q_list(self) -> tuple[float, ...]:
        return self.qs or DEFAULT_QS


# ---------------------------------------------------------------------------
# verification suites, one case per (d, r) or (d, r, q)

def _first_mismatch(a, b) -> int | None:
    return next((n for n, (u, v) in enumerate(zip(a, b)) if u != v), None)


def _base(target: str, p: pt.FamilyParams, **extra) -> dict:
    return {"target": target, "d": p.d, "r": p.r, **extra}


def _case_schur(p, cfg):
    n = cfg.enum_order or cfg.order
    n_matrix = min(n, 30)
    b = pt.family_counts("schur-b", p, n)
    e = pt.family_counts("schur-e", p, n)
    ineq = sorted(lam.parts for lam in pt.enumerate_schur_B(p, n_matrix))
    matrix = sorted(lam.parts for lam in pt.enumerate_schur_B(p, n_matrix, rule="matrix"))
    c = pt.family_counts("schur-c", p, n)
    c_oracle = mt.schur_C_via_g3(p, n).coeffs
    e_oracle = mt.schur_E_product(p, n).coeffs
    ok = b == e == list(e_oracle) and ineq == matrix and c == list(c_oracle)
    return _base("schur", p, n=n, pass_=ok, count_b=b[n], count_e=e[n], count_c=c[n],
                 matrix_rule_agrees=ineq == matrix,
                 first_mismatch=_first_mismatch(b, e) if b != e else _first_mismatch(c, c_oracle))


def _case_main1(p, cfg):
    rep = mt.identity_report("main1", mt.f_recurrence(Monomial(1, 0), p, cfg.order),
                             mt.closed_B(p, cfg.order))
    qd = mt.verify_qdiff(Monomial(1, 0), p, cfg.order)
    return _base("main1", p, order=cfg.order, pass_=rep.passed and qd.passed,
                 first_nonzero_residual_index=rep.residual.first_nonzero(),
                 qdiff_pass=qd.passed)


def _case_cor1(p, cfg):
    n = cfg.n if cfg.n is not None else cfg.order
    b = pt.family_counts("obar-b", p, n)
    e = pt.family_counts("obar-e", p, n)
    oracle = list(mt.closed_B(p, n).coeffs)
    return _base("cor1", p, n=n, pass_=b == e == oracle, obar_b=b[n], obar_e=e[n],
                 closed_b=oracle[n], first_mismatch=_first_mismatch(b, oracle) if b != oracle
                 else _first_mismatch(e, oracle))


def _case_main2(p, cfg):
    n = cfg.enum_order or min(30, cfg.order)
    counts = pt.family_counts("obar-c", p, n)
    oracle = list(mt.closed_C(p, n).coeffs)
    rep = mt.identity_report("main2", mt.f_recurrence(Monomial(1, p.d), p, cfg.order),
                             mt.closed_C(p, cfg.order))
    return _base("main2", p, n=n, order=cfg.order, pass_=counts == oracle and rep.passed,
                 count_c=counts[n], closed_c=oracle[n],
                 first_mismatch=_first_mismatch(counts, oracle),
                 first_nonzero_residual_index=rep.residual.first_nonzero())


def _case_parity(p, cfg):
    n = cfg.enum_order or min(25, cfg.order)
    sb = pt.signed_family_counts("obar-b", p, n)
    sc = pt.signed_family_counts("obar-c", p, n)
    ob = list(mt.closed_parity_B(p, n).coeffs)
    oc = list(mt.closed_parity_C(p, n).coeffs)
    return _base("parity", p, n=n, pass_=sb == ob and sc == oc, signed_b=sb[n], signed_c=sc[n],
                 b_first_mismatch=_first_mismatch(sb, ob), c_first_mismatch=_first_mismatch(sc, oc))


def _fqdiff_xs(p):
    return (Monomial(1, 0), Monomial(1, p.d), Monomial(-1, 0), Monomial(-1, p.d))


def _case_fqdiff(p, cfg):
    y = Monomial(1, p.r)
    failures = []
    for x in _fqdiff_xs(p):
        s = mt.F_sum_form(x, y, cfg.order, p.d)
        prod = mt.F_product_form(x, y, cfg.order, p.d)
        f = mt.f_recurrence(x, p, cfg.order)
        if not (s == prod == f and mt.verify_qdiff(x, p, cfg.order).passed):
            failures.append(str(x))
    return _base("fqdiff", p, order=cfg.order, pass_=not failures,
                 xs=",".join(str(x) for x in _fqdiff_xs(p)), failed_xs=",".join(failures))


def _case_phi32(p, cfg):
    y = Monomial(1, p.r)
    reps = [mt.phi32_specialised_case(x, y, cfg.order, p.d) for x in _fqdiff_xs(p) if x.exponent > 0]
    seed = cfg.mc.seed * 1000 + p.d * 10 + p.r
    rng = random.Random(seed)
    reps += [mt.phi32_check(*mt.random_phi32_args(rng, p.d), cfg.order, p.d) for _ in range(5)]
    bad = [r for r in reps if not r.passed]
    return _base("phi32", p, order=cfg.order, pass_=not bad, cases=len(reps), random_seed=seed,
                 first_nonzero_residual_index=bad[0].residual.first_nonzero() if bad else None)


def _prob_params(p, q, cfg) -> ProbabilityParams:
    return ProbabilityParams(p.d, p.r, q, identity_tolerance=cfg.tolerance, mc=cfg.mc)


def _case_prob(part: int):
    def run(key, cfg):
        p, q = key
        rep = (check_theorem31_part1 if part == 1 else check_theorem31_part2)(_prob_params(p, q, cfg))
        err = rep.abs_err_part1 if part == 1 else rep.abs_err_part2
        gap = rep.extra["pipeline_gap"]
        return _base(f"prob{part}", p, q=q, pass_=err < cfg.tolerance and gap < cfg.tolerance,
                     value=rep.cond_w_given_x if part == 1 else rep.cond_part2, g2=rep.g2,
                     abs_err=err, pipeline_gap=gap)
    return run


def _case_g2bound(key, cfg):
    p, q = key
    g = g2_real(_prob_params(p, q, cfg))
    return _base("g2bound", p, q=q, pass_=0 < g < 1, g2=g)


# target -> (case function, whether it runs over q as well)
SUITES: dict[str, tuple[Callable, bool]] = {
    "schur": (_case_schur, False),
    "main1": (_case_main1, False),
    "cor1": (_case_cor1, False),
    "main2": (_case_main2, False),
    "parity": (_case_parity, False),
    "fqdiff": (_case_fqdiff, False),
    "phi32": (_case_phi32, False),
    "prob1": (_case_prob(1), True),
    "prob2": (_case_prob(2), True),
    "g2bound": (_case_g2bound, True),
}


def _workers() -> int:
    env = os.environ.get("QMOCK_THREADS")
    return max(1, int(env)) if env else (os.cpu_count() or 1)


def _run_grid(fn, keys, cfg) -> list[dict]:
    # pool.map keeps submission order, and keys are submitted sorted
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        return list(pool.map(lambda k: fn(k, cfg), keys))


def _finish(case: dict) -> dict:
    case["pass"] = case.pop("pass_")
    return case


def cmd_verify(cfg: RunConfig) -> list[dict]:
    targets = VERIFY_TARGETS if cfg.sub == "all" else (cfg.sub,)
    cases = []
    for t in targets:
        fn, over_q = SUITES[t]
        if over_q:
            qs = cfg.qs or (G2BOUND_QS if t == "g2bound" else DEFAULT_QS)
            keys = [(p, q) for p in cfg.grid for q in qs]
        else:
            keys = list(cfg.grid)
        cases += [_finish(c) for c in _run_grid(fn, keys, cfg)]
    return cases


_ORACLES = {
    "obar-b": mt.closed_B,
    "obar-e": mt.closed_B,
    "obar-c": mt.closed_C,
    "schur-b": mt.schur_E_product,
    "schur-e": mt.schur_E_product,
    "schur-c": mt.schur_C_via_g3,
}


def cmd_enumerate(cfg: RunConfig) -> list[dict]:
    n = cfg.n if cfg.n is not None else 15
    cases = []
    for p in cfg.grid:
        members = pt.list_family(cfg.sub, p, n)
        oracle = _ORACLES[cfg.sub](p, n)[n]
        case = _base("enumerate", p, family=cfg.sub, n=n, count=len(members), oracle=oracle,
                     pass_=len(members) == oracle)
        if cfg.list_members:
            case["members"] = [str(lam) for lam in members]
        cases.append(_finish(case))
    return cases


def _series(expr: str, p: pt.FamilyParams, order: int):
    if expr == "B":
        return mt.closed_B(p, order)
    if expr == "C":
        return mt.closed_C(p, order)
    if expr == "g2":
        return mt.g2_series(Monomial(-1, p.r), p.d, order)
    if expr == "g3":
        return mt.g3_series(Monomial(-1, p.r), p.d, order)
    if expr == "parityB":
        return mt.closed_parity_B(p, order)
    return mt.closed_parity_C(p, order)


def cmd_series(cfg: RunConfig) -> list[dict]:
    return [_finish(_base("series", p, expr=cfg.sub, pass_=True,
                          series=_series(cfg.sub, p, cfg.order).to_json()))
            for p in cfg.grid]


def cmd_prob(cfg: RunConfig) -> list[dict]:
    cases = []
    for p in cfg.grid:
        for q in cfg.q_list:
            params = _prob_params(p, q, cfg)
            rep = mc_estimate(params) if cfg.sub == "mc" else check_theorem31_part1(params)
            d = rep.to_dict()
            d["target"] = f"prob-{cfg.sub}"
            cases.append(d)
    return cases


COMMANDS = {"verify": cmd_verify, "enumerate": cmd_enumerate, "series": cmd_series, "prob": cmd_prob}


# ---------------------------------------------------------------------------
# rendering

def _scalar(v) -> str:
    # json.dumps gives repr for floats, so text and JSON show the same digits
    return v if isinstance(v, str) else json.dumps(v)


def _flatten(obj: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in obj.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def render_text(cfg: RunConfig, cases: list[dict]) -> str:
    lines = []
    for c in cases:
        if cfg.command == "series":
            lines.append(f"# {c['expr']} d={c['d']} r={c['r']} order={c['series']['order']}")
            lines += [f"{n} {v}" for n, v in enumerate(c["series"]["coeffs"])]
            continue
        members = c.get("members")
        flat = _flatten({k: v for k, v in c.items() if k not in ("pass", "members")})
        verdict = "PASS" if c["pass"] else "FAIL"
        lines.append(verdict + " " + " ".join(f"{k}={_scalar(v)}" for k, v in flat.items()))
        if members is not None:
            lines += [f"  {m}" for m in members] or ["  ()"]
    if cfg.command != "series":
        failed = sum(not c["pass"] for c in cases)
        lines.append(f"{len(cases) - failed}/{len(cases)} cases passed")
    return "\n".join(lines) + "\n"


def render_json(cfg: RunConfig, cases: list[dict]) -> str:
    doc = {
        "command": cfg.command,
        "subcommand": cfg.sub,
        "config": {
            "order": cfg.order, "n": cfg.n, "enum_order": cfg.enum_order,
            "q": list(cfg.qs) if cfg.qs else None, "tolerance": cfg.tolerance,
            "samples": cfg.mc.samples, "seed": cfg.mc.seed, "horizon": cfg.mc.horizon,
        },
        "cases": cases,
        "pass": all(c["pass"] for c in cases),
    }
    return json.dumps(doc, indent=2) + "\n"


def render_tsv(cfg: RunConfig, cases: list[dict]) -> str:
    rows = []
    for c in cases:
        row = _flatten({k: v for k, v in c.items() if k != "series"})
        if "series" in c:
            for n, v in enumerate(c["series"]["coeffs"]):
                rows.append({**row, "n": n, "coeff": v})
        else:
            rows.append(row)
    header: list[str] = []
    for row in rows:
        header += [k for k in row if k not in header]

    def cell(v):
        if isinstance(v, list):
            return ",".join(map(str, v))
        return "" if v is None else _scalar(v)

    lines = ["\t".join(header)]
    lines += ["\t".join(cell(row.get(k)) for k in header) for row in rows]
    return "\n".join(lines) + "\n"


RENDERERS = {"text": render_text, "json": render_json, "tsv": render_tsv}


# ---------------------------------------------------------------------------
# argument handling

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--d", type=int, help="modulus d >= 3 (default: 3, 4, 5, 7)")
    sp.add_argument("--r", type=int, help="residue 1 <= r < d/2 (default: all valid)")
    sp.add_argument("--order", type=int, default=40, help="series truncation order")
    sp.add_argument("--n", type=int, help="partition size for enumeration counts")
    sp.add_argument("--enum-order", type=int, help="largest n checked by enumeration")
    sp.add_argument("--q", type=float, nargs="+", help="real q values in (0, 1)")
    sp.add_argument("--tolerance", type=float, default=1e-8)
    sp.add_argument("--samples", type=int, default=MCConfig.samples)
    sp.add_argument("--seed", type=int, default=MCConfig.seed)
    sp.add_argument("--horizon", type=int, help="Monte Carlo horizon J (default: from tail bound)")
    sp.add_argument("--format", choices=tuple(RENDERERS), default="text")
    sp.add_argument("--output", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qmock", description="Verify overpartition and mock theta identities.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run an identity suite over the parameter grid")
    v.add_argument("target", choices=VERIFY_TARGETS + ("all",))
    _common(v)

    e = sub.add_parser("enumerate", help="count or list members of a partition family")
    e.add_argument("--family", required=True, choices=pt.FAMILIES)
    e.add_argument("--list", action="store_true", dest="list_members")
    _common(e)

    s = sub.add_parser("series", help="dump coefficients of a generating function")
    s.add_argument("--expr", required=True, choices=SERIES_EXPRS)
    _common(s)

    pr = sub.add_parser("prob", help="probabilistic checks of g2 at real q")
    pr.add_argument("mode", choices=("exact", "mc"))
    _common(pr)
    return parser


def _grid(d: int | None, r: int | None) -> list[pt.FamilyParams]:
    if d is None:
        grid = pt.valid_params(DEFAULT_DS)
        return [p for p in grid if r is None or p.r == r]
    if r is None:
        return pt.valid_params((d,)) or [pt.FamilyParams(d, 1)]
    return [pt.FamilyParams(d, r)]


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    try:
        grid = _grid(args.d, args.r)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not grid:
        raise UsageError("no valid (d, r) pair matches the given options")
    if args.order < 0 or (args.n is not None and args.n < 0):
        raise UsageError("--order and --n must be nonnegative")
    if args.enum_order is not None and args.enum_order < 0:
        raise UsageError("--enum-order must be nonnegative")
    for q in args.q or ():
        if not 0 < q < 1:
            raise UsageError(f"q must lie in (0, 1), got {q}")
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    if args.horizon is not None and any(args.horizon < 4 * p.d for p in grid):
        raise UsageError("--horizon must be at least 4d")
    if not args.tolerance > 0:
        raise UsageError("--tolerance must be positive")
    sub = {"verify": "target", "enumerate": "family", "series": "expr", "prob": "mode"}[args.command]
    return RunConfig(
        command=args.command, sub=getattr(args, sub), grid=grid, order=args.order, n=args.n,
        enum_order=args.enum_order, qs=tuple(args.q) if args.q else None,
        tolerance=args.tolerance,
        mc=MCConfig(samples=args.samples, seed=args.seed, horizon=args.horizon),
        fmt=args.format, output=args.output,
        list_members=getattr(args, "list_members", False),
    )


def run(cfg: RunConfig) -> tuple[int, str]:
    cases = COMMANDS[cfg.command](cfg)
    text = RENDERERS[cfg.fmt](cfg, cases)
    return (EXIT_OK if all(c["pass"] for c in cases) else EXIT_FAIL), text


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"qmock: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        code, text = run(cfg)
    except mt.BadSpecialization as exc:
        print(f"qmock: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ToleranceNotReached, ZeroConditioningEvent) as exc:
        print(f"qmock: tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
