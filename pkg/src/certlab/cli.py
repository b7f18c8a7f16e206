"""Command-line driver.  Every subcommand prints TSV to stdout.

Exit codes: 0 success, 2 a verification failed, 1 usage error.
"""
from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

import numpy as np

from . import designs, fraccert, measures, polyalg, quantumsim, separations, verifiers
from .funcore import FunctionError, SymmetricFunction, format_bits, parse_bits, parse_function

OK, USAGE, FAILED = 0, 1, 2

ALL_MEASURES = ("C0", "C1", "C", "bs0", "bs1", "bs", "FC0", "FC1", "FC", "D", "deg", "ndeg")
DEFAULT_MEASURES = "C0,C1,C,bs0,bs1,bs,FC0,FC1,FC"
POINT_MEASURES = ("C", "bs", "FC")


class UsageError(Exception):
    pass


class VerificationFailed(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def _emit(out, header, rows):
    out.write("\t".join(header) + "\n")
    for r in rows:
        out.write("\t".join(_fmt(v) for v in r) + "\n")


def _load_fn(spec):
    if spec is None:
        raise UsageError("--fn is required")
    text = open(spec).read() if os.path.isfile(spec) else spec
    return parse_function(text)


def _need_seed(args):
    if args.seed is None:
        raise UsageError(f"'{args.cmd}' is randomized and needs --seed")
    return args.seed


def _measure_list(text, allowed):
    names = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in names if m not in allowed]
    if bad or not names:
        raise UsageError(f"unknown measure(s) {bad}; choose from {','.join(allowed)}")
    return names


# ---------------------------------------------------------------------------
# analyze


def _global_measures(f, names):
    vals = {}
    if {"C0", "C1", "C"} & set(names):
        vals["C0"], vals["C1"], vals["C"] = measures.certificate_complexity_max(f)
    if {"bs0", "bs1", "bs"} & set(names):
        vals["bs0"], vals["bs1"], vals["bs"] = measures.block_sensitivity_max(f)
    if {"FC0", "FC1", "FC"} & set(names):
        vals["FC0"], vals["FC1"], vals["FC"] = fraccert.fc_max(f)
    if "D" in names:
        vals["D"] = measures.decision_tree_complexity(f)
    if "deg" in names:
        vals["deg"] = polyalg.degree(f)
    if "ndeg" in names:
        r = polyalg.ndeg(f)
        if r.witness is not None and not polyalg.verify_nondeterministic(r.witness, f, r.degree):
            raise VerificationFailed("ndeg witness does not check")
        vals["ndeg"] = r.degree
    return [vals[m] for m in names]


def _point_measures(f, x, names):
    row = []
    for m in names:
        if m == "C":
            size, cert = measures.certificate_complexity(f, x)
            if not measures.is_certificate(f, x, cert.positions):
                raise VerificationFailed("certificate witness does not check")
            row.append(size)
        elif m == "bs":
            count, blocks = measures.block_sensitivity(f, x)
            for b in blocks.blocks:
                if not measures.is_sensitive(f, x, sum(1 << (i - 1) for i in b)):
                    raise VerificationFailed("block witness does not check")
            row.append(count)
        else:
            lp = fraccert.build_cert_lp(f, x)
            primal, dual = fraccert.solve_primal(lp), fraccert.solve_dual(lp)
            try:
                primal.check(lp)
                dual.check(lp)
            except AssertionError as exc:
                raise VerificationFailed(f"LP certificate: {exc}") from None
            if primal.value != dual.value:
                raise VerificationFailed("primal and dual optima differ")
            row.append(primal.value)
    return row


def cmd_analyze(args, out):
    f = _load_fn(args.fn)
    if args.input is not None:
        if not f.is_boolean:
            raise UsageError("--input takes a bit string; this function is not Boolean")
        names = _measure_list(args.measures or "C,bs,FC", POINT_MEASURES)
        x = parse_bits(args.input)
        if len(args.input) != f.n:
            raise UsageError(f"--input needs {f.n} bits")
        _emit(out, ["input", "value"] + names, [[args.input, f(x)] + _point_measures(f, x, names)])
        return OK
    names = _measure_list(args.measures or DEFAULT_MEASURES, ALL_MEASURES)
    _emit(out, ["fn", "n"] + names, [[f.ctor() or "tt", f.n] + _global_measures(f, names)])
    return OK


# ---------------------------------------------------------------------------
# search


def cmd_search(args, out):
    if args.what == "window":
        main, other = separations.window_search(args.nmax)
        rows = main if not args.all else main + other
        header = ["n", "a", "b", "C0", "C1", "bs0", "bs1", "growth", "exponent",
                  "bs_exponent", "rc_growth", "proven", "tight", "converged"]
        if args.top:
            rows = rows[:args.top]
        _emit(out, header, [[r.n, r.a, r.b, r.c0, r.c1, r.bs0, r.bs1, r.ratio, r.exponent,
                             r.bs_exponent, r.rc_growth, r.proven, r.tight, r.converged]
                            for r in rows])
        return OK
    seed = _need_seed(args)
    f = separations.uniform_measure_search(args.budget, seed)
    if f is None:
        _emit(out, ["found"], [["no"]])
        return FAILED
    _, _, fc = fraccert.fc_max(f)
    _emit(out, ["found", "tt", "FC"], [["yes", "".join(map(str, f.table())), fc]])
    return OK


# ---------------------------------------------------------------------------
# simulate


def _inputs(f, args, rng):
    if args.input is not None:
        return [parse_bits(args.input)] * args.trials
    return [int(v) for v in rng.integers(0, 1 << f.n, size=args.trials)]


def cmd_simulate(args, out):
    seed = _need_seed(args)
    rng = np.random.default_rng(seed)
    if args.what == "r0":
        f = _load_fn(args.fn)
        errors, queries, lines = 0, [], []
        for y in _inputs(f, args, rng):
            r = verifiers.zero_error_eval(f, y, rng=rng, transcript=args.out is not None)
            errors += r.value != f(y)
            queries.append(r.queries)
            lines += [f"# y={format_bits(y, f.n)}"] + r.transcript
        if args.out:
            with open(args.out, "w") as fh:
                fh.write("\n".join(lines) + "\n")
        _emit(out, ["trials", "errors", "mean_queries", "max_queries"],
              [[args.trials, errors, float(np.mean(queries)), max(queries)]])
        return FAILED if errors else OK
    if args.what == "shrink":
        f = _load_fn(args.fn)
        p = polyalg.mobius_transform(f)
        counts = polyalg.shrink_batch(p, args.trials, rng_seed=seed)
        bound = polyalg.shrink_bound(f.n, p.degree)
        within = float(np.mean(counts <= bound))
        _emit(out, ["runs", "bound", "mean_iterations", "within_bound"],
              [[args.trials, bound, float(np.mean(counts)), within]])
        return OK
    # rotation: synthetic branch states
    worst_x, worst_y, bad = 1.0, 0.0, 0
    for _ in range(args.trials):
        sx, sy = quantumsim.random_branch_pair(rng, args.branches, args.eps0, args.eps1)
        r = quantumsim.exactify_rotation(sx, sy, args.eps0, args.eps1)
        worst_x, worst_y = min(worst_x, r.accept_x), max(worst_y, r.accept_y)
        bad += abs(r.accept_x - 1) > 1e-12 or r.accept_y > r.bound
    _emit(out, ["trials", "min_accept_x", "max_accept_y", "bound", "violations"],
          [[args.trials, worst_x, worst_y, 2 * (args.eps0 + args.eps1), bad]])
    return FAILED if bad else OK


# ---------------------------------------------------------------------------
# grover


def cmd_grover(args, out):
    if args.what == "uniform":
        inst = quantumsim.uniform_instance(args.N, args.M)
        k = args.k if args.k is not None else quantumsim.grover_iteration_budget(args.N, args.M)
    else:
        f = _load_fn(args.fn)
        if args.input is None or args.target is None:
            raise UsageError("weighted grover needs --input X and --target Y")
        x, y = parse_bits(args.input), parse_bits(args.target)
        if f(x) == f(y):
            raise UsageError("X and Y must have different values")
        lam = fraccert.solve_primal(fraccert.build_cert_lp(f, x)).lam
        inst = quantumsim.weighted_instance(lam, x, y, args.N)
        if inst.M == 0:
            raise VerificationFailed("no marked basis state")
        k = args.k if args.k is not None else quantumsim.grover_iteration_budget(inst.N, inst.M)
    curve = quantumsim.grover_curve(inst, k)
    rows = [[i, float(p), quantumsim.closed_form(inst.N, inst.M, i)] for i, p in enumerate(curve)]
    _emit(out, ["k", "success", "closed_form"], rows)
    return OK


# ---------------------------------------------------------------------------
# design


def cmd_design(args, out):
    if args.what == "build":
        seed = _need_seed(args)
        d = designs.build_design(args.n, args.gamma, args.m, seed=seed)
        check = designs.verify_design(d)
        if args.out:
            designs.write_design(d, args.out)
        else:
            out.write(designs.format_design(d))
            return OK if check else FAILED
    else:
        if not args.file:
            raise UsageError("design check needs a design file")
        d = designs.read_design(args.file)
        check = designs.verify_design(d)
    _emit(out, ["u", "gamma", "n", "m", "bound", "max_intersection", "ok"],
          [[d.u, d.gamma, d.n, d.m, d.bound, check.max_intersection, check.ok]])
    return OK if check else FAILED


# ---------------------------------------------------------------------------
# poly


def cmd_poly(args, out):
    f = _load_fn(args.fn)
    p = polyalg.mobius_transform(f)
    r = polyalg.ndeg(f)
    ok = r.witness is None or polyalg.verify_nondeterministic(r.witness, f, r.degree)
    _emit(out, ["deg", "ndeg", "monomials", "polynomial", "ndeg_witness"],
          [[p.degree, r.degree, len(p.monomials), str(p),
            str(r.witness) if r.witness is not None else "-"]])
    return OK if ok else FAILED


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args, out):
    if args.what == "uniform":
        # default to the shipped 6-bit table
        f = separations.h1() if args.fn is None else _load_fn(args.fn)
        res = separations.uniform_measure_check(f)
        row = [bool(res), "-" if res.witness is None else format_bits(res.witness, 6),
               res.c if res.c is not None else "-", res.bs if res.bs is not None else "-"]
        _emit(out, ["ok", "witness", "C", "bs"], [row])
        return OK if res else FAILED
    if args.what == "certificate":
        f = _load_fn(args.fn)
        if args.input is None or args.positions is None:
            raise UsageError("verify certificate needs --input and --positions")
        pos = [int(v) for v in args.positions.split(",") if v]
        ok = measures.is_certificate(f, parse_bits(args.input), pos)
        _emit(out, ["ok", "size"], [[ok, len(pos)]])
        return OK if ok else FAILED
    if args.what == "minimax":
        f = _load_fn(args.fn)
        if not isinstance(f, SymmetricFunction):
            raise UsageError("minimax needs a symmetric base function")
        table = verifiers.G1_CHILD_TABLE if args.table == "g1" else None
        r = verifiers.child_hit_minimax(f, table)
        _emit(out, ["value", "worst_K", "optimal_value"],
              [[r.value, r.worst[0] if r.worst else "-", r.optimal_value]])
        return OK
    # recurrence
    spec = separations.G1_SPEC
    g = separations.growth_constant(spec)
    e = separations.separation_exponents(spec)
    ok = g.converged and abs(g.ratio - separations.closed_form_g1()) < 1e-6
    _emit(out, ["growth", "closed_form", "rc_vs_c", "c_vs_qc", "converged"],
          [[g.ratio, separations.closed_form_g1(), e.rc_vs_c, e.c_vs_qc, g.converged]])
    return OK if ok else FAILED


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--fn", help="function text or a file holding it")
    common.add_argument("--input", help="input bit string, position 1 first")
    common.add_argument("--measures", help="comma-separated measure names")
    common.add_argument("--seed", type=int, help="RNG seed (required for randomized commands)")
    common.add_argument("--trials", type=int, default=1000)
    common.add_argument("--out", help="output path")

    p = _Parser(prog="certlab", description="Query-complexity measures and verifiers.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    sub.add_parser("analyze", parents=[common], help="measures of a function or one input")

    s = sub.add_parser("search", parents=[common], help="window or uniform-measure search")
    s.add_argument("what", choices=["window", "uniform"])
    s.add_argument("--nmax", type=int, default=32)
    s.add_argument("--top", type=int, default=0, help="print only the first rows")
    s.add_argument("--all", action="store_true", help="append windows with unequal bs")
    s.add_argument("--budget", type=int, default=20000)

    s = sub.add_parser("simulate", parents=[common], help="randomized simulations")
    s.add_argument("what", choices=["r0", "shrink", "rotation"])
    s.add_argument("--branches", type=int, default=8)
    s.add_argument("--eps0", type=float, default=0.1)
    s.add_argument("--eps1", type=float, default=0.1)

    s = sub.add_parser("grover", parents=[common], help="Grover statevector runs")
    s.add_argument("what", choices=["uniform", "weighted"])
    s.add_argument("--N", type=int)
    s.add_argument("--M", type=int, default=1)
    s.add_argument("--k", type=int)
    s.add_argument("--target", help="bit string Y with f(Y) != f(X)")

    s = sub.add_parser("design", parents=[common], help="build or check set designs")
    s.add_argument("what", choices=["build", "check"])
    s.add_argument("file", nargs="?")
    s.add_argument("--n", type=int, default=12)
    s.add_argument("--gamma", type=float, default=3.0)
    s.add_argument("--m", type=int, default=16)

    sub.add_parser("poly", parents=[common], help="Mobius polynomial and ndeg")

    s = sub.add_parser("verify", parents=[common], help="check a claim")
    s.add_argument("what", choices=["uniform", "certificate", "minimax", "recurrence"])
    s.add_argument("--positions", help="comma-separated 1-based positions")
    s.add_argument("--table", choices=["g1", "optimal"], default="optimal")
    return p


COMMANDS = {"analyze": cmd_analyze, "search": cmd_search, "simulate": cmd_simulate,
            "grover": cmd_grover, "design": cmd_design, "poly": cmd_poly, "verify": cmd_verify}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.cmd == "grover" and args.what == "uniform" and args.N is None:
            raise UsageError("grover uniform needs --N")
        if args.trials < 1:
            raise UsageError("--trials must be positive")
        return COMMANDS[args.cmd](args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except (FunctionError, designs.DesignError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
