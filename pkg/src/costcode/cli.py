"""Command-line front end: batch computations over cost and distribution files.

Reports are key=value lines, one metric per line, so runs are machine-checkable
and byte-identical for identical inputs and seeds.  Sequence subcommands can
render aligned columns with --table.  Exit codes: 0 success, 1 validation or
parse error, 2 infeasible instance or no exact method available.
"""

from __future__ import annotations

import argparse
import math
import sys
from random import Random

from .bounds import (
    bound_report,
    cost_rate_relation_check,
    second_order_sequence,
)
from .costs import (
    CostFunction,
    parse_cost_file,
    random_regular_cost,
    solve_cost_capacity,
    uniform_cost,
    validate_regularity,
)
from .errors import (
    CostcodeError,
    ExactnessUnavailableError,
    InfeasibleError,
    SupportBlowupError,
)
from .oracle import check_sandwich
from .sfe import (
    block_token,
    build_code,
    decode,
    dump_codebook,
    encode,
    transcode,
    word_digits,
)
from .smooth import (
    appendix_report,
    g_delta_exact,
    g_delta_greedy,
    h_delta_exact,
    h_delta_greedy,
    rate_sequence,
)
from .sources import (
    Distribution,
    IidSource,
    block_distribution,
    entropy,
    parse_distribution_file,
    varentropy,
)

_EXIT_INFEASIBLE = (ExactnessUnavailableError, SupportBlowupError, InfeasibleError)


def _fmt(x: float) -> str:
    return repr(float(x))


def _load_cost(path: str, tol: float = 1e-9) -> CostFunction:
    cf = parse_cost_file(path)
    solve_cost_capacity(cf, tol=tol)
    return cf


def _load_dist(path: str) -> Distribution:
    return parse_distribution_file(path)


def _block_dist(d: Distribution, n: int) -> Distribution:
    if n == 1:
        return d
    return block_distribution(IidSource(d), n)


def _parse_block(text: str, n: int):
    if n == 1:
        return text
    parts = text.split(",")
    if len(parts) != n:
        raise SystemExit(f"error: block needs {n} comma-separated letters, got {text!r}")
    return tuple(parts)


def _emit(key: str, value) -> None:
    if isinstance(value, float):
        print(f"{key}={_fmt(value)}")
    else:
        print(f"{key}={value}")


def _cmd_alpha(args) -> int:
    cf = _load_cost(args.cost, args.tol)
    _emit("alpha_c", cf.alpha_c)
    _emit("c_min", cf.c_min)
    _emit("c_max", cf.c_max)
    _emit("K", cf.K)
    return 0


def _cmd_validate_cost(args) -> int:
    cf = parse_cost_file(args.cost)
    report = validate_regularity(cf, args.tol)
    for ctx, root in sorted(report.roots.items()):
        name = "".join(str(s) for s in ctx) or "-"
        _emit(f"root[{name}]", root)
    _emit("spread", report.spread)
    _emit("regular", "true" if report.regular else "false")
    return 0


def _cmd_entropy(args) -> int:
    d = _load_dist(args.dist)
    h = entropy(d)
    v = varentropy(d)
    if args.bits:
        f = math.log2(d.base_K)
        h *= f
        v *= f * f
    _emit("entropy", h)
    _emit("varentropy", v)
    _emit("support_size", len(d))
    return 0


def _cmd_smooth(args) -> int:
    d = _load_dist(args.dist)
    if args.method == "greedy":
        res = (h_delta_greedy if args.quantity == "H" else g_delta_greedy)(d, args.delta)
    else:
        exact = h_delta_exact if args.quantity == "H" else g_delta_exact
        res = exact(d, args.delta, args.method)
    value = res.value
    if args.bits:
        value *= math.log2(d.base_K)
    _emit("value", value)
    _emit("set_mass", res.set_mass)
    _emit("set_size", len(res.achieving_set))
    _emit("method", res.method)
    return 0


def _cmd_rate_seq(args) -> int:
    d = _load_dist(args.dist)
    cf = _load_cost(args.cost) if args.cost else None
    records = rate_sequence(IidSource(d), cf, args.delta, args.n_max)
    if args.table:
        cols = ["n", "h_value", "g_value", "h_rate", "g_rate"]
        if cf is not None:
            cols += ["h_cost_rate", "g_cost_rate"]
        print("\t".join(cols))
        for r in records:
            row = [str(r.n), _fmt(r.h_value), _fmt(r.g_value), _fmt(r.h_rate), _fmt(r.g_rate)]
            if cf is not None:
                row += [_fmt(r.h_cost_rate), _fmt(r.g_cost_rate)]
            print("\t".join(row))
        return 0
    for r in records:
        parts = [
            f"n={r.n}",
            f"h_value={_fmt(r.h_value)}",
            f"g_value={_fmt(r.g_value)}",
            f"h_rate={_fmt(r.h_rate)}",
            f"g_rate={_fmt(r.g_rate)}",
        ]
        if cf is not None:
            parts.append(f"h_cost_rate={_fmt(r.h_cost_rate)}")
            parts.append(f"g_cost_rate={_fmt(r.g_cost_rate)}")
        print(" ".join(parts))
    return 0


def _cmd_bounds(args) -> int:
    d = _load_dist(args.dist)
    cf = _load_cost(args.cost)
    rep = bound_report(IidSource(d), cf, args.epsilon, args.n, args.gamma)
    factor = math.log2(cf.K) if args.bits else 1.0
    _emit("n", rep.n)
    _emit("epsilon", rep.epsilon)
    _emit("gamma", rep.gamma)
    _emit("alpha_c", rep.alpha_c)
    _emit("g_value", rep.g_value * factor)
    _emit("h_value", rep.h_value * factor)
    _emit("converse", rep.converse * factor)
    _emit("achievability", rep.achievability * factor)
    if rep.first_order is not None:
        _emit("first_order", rep.first_order * factor)
    if rep.second_order_L is not None:
        _emit("second_order_L", rep.second_order_L * factor)
    return 0


def _build_from_args(args):
    d = _block_dist(_load_dist(args.dist), args.n)
    cf = _load_cost(args.cost)
    cb = build_code(d, cf, epsilon=args.epsilon, strategy=args.strategy)
    return d, cf, cb


def _cmd_build_code(args) -> int:
    _, _, cb = _build_from_args(args)
    sys.stdout.write(dump_codebook(cb))
    return 0


def _cmd_encode(args) -> int:
    d, _, cb = _build_from_args(args)
    x = _parse_block(args.block, args.n)
    _emit("word", word_digits(encode(cb, x)))
    return 0


def _cmd_decode(args) -> int:
    _, _, cb = _build_from_args(args)
    word = tuple(int(ch) for ch in args.word)
    _emit("block", block_token(decode(cb, word)))
    return 0


def _cmd_transcode(args) -> int:
    _, _, cb = _build_from_args(args)
    cf2 = _load_cost(args.to_cost)
    cb2 = transcode(cb, cf2)
    sys.stdout.write(dump_codebook(cb2))
    return 0


def _cmd_second_order(args) -> int:
    d = _load_dist(args.dist)
    cf = _load_cost(args.cost)
    records = second_order_sequence(IidSource(d), cf, args.epsilon, args.n_max)
    if args.table:
        print("\t".join(["n", "h_value", "deviation"]))
        for r in records:
            print("\t".join([str(r.n), _fmt(r.h_value), _fmt(r.deviation)]))
        return 0
    for r in records:
        print(f"n={r.n} h_value={_fmt(r.h_value)} deviation={_fmt(r.deviation)}")
    return 0


def _cmd_relation_check(args) -> int:
    d = _load_dist(args.dist)
    cf1 = _load_cost(args.cost)
    cf2 = _load_cost(args.to_cost)
    src = IidSource(d)
    r1 = bound_report(src, cf1, args.epsilon, args.n, args.gamma)
    r2 = bound_report(src, cf2, args.epsilon, args.n, args.gamma)
    check = cost_rate_relation_check(r1, r2)
    _emit("first_order_diff", check.first_order_diff)
    _emit("second_order_diff", check.second_order_diff)
    _emit("ok", "true" if check.ok else "false")
    return 0


def _cmd_sandwich_test(args) -> int:
    rng = Random(args.seed)
    violations = 0
    for trial in range(args.trials):
        m = rng.randint(2, 6)
        raw = [0.05 + rng.random() for _ in range(m)]
        total = sum(raw)
        K = rng.choice([2, 3])
        d = Distribution(
            support=tuple(f"s{i}" for i in range(m)),
            probs=tuple(r / total for r in raw),
            base_K=K,
        )
        if rng.random() < 0.3:
            cf = uniform_cost(K)
        else:
            cf = random_regular_cost(rng, K, depth=rng.choice([0, 0, 1]))
        solve_cost_capacity(cf)
        eps = rng.choice([0.0, 0.1, 0.3])
        rep = check_sandwich(d, cf, eps, gamma=args.gamma)
        ok = "true" if rep.ok else "false"
        print(
            f"trial={trial} K={K} m={m} epsilon={_fmt(eps)} ok={ok} "
            f"converse={_fmt(rep.converse)} oracle={_fmt(rep.oracle)} "
            f"constructed={_fmt(rep.constructed)} achievability={_fmt(rep.achievability)}"
        )
        if not rep.ok:
            violations += 1
    _emit("trials", args.trials)
    _emit("violations", violations)
    return 0 if violations == 0 else 1


def _cmd_appendix_report(args) -> int:
    d = _load_dist(args.dist)
    rep = appendix_report(IidSource(d), args.delta, args.n_max)
    _emit("delta", rep.delta)
    _emit("entropy", rep.entropy_single)
    _emit("target", rep.target)
    if args.table:
        print("\t".join(["n", "h_rate", "g_rate"]))
        for r in rep.records:
            print("\t".join([str(r.n), _fmt(r.h_rate), _fmt(r.g_rate)]))
        return 0
    for r in rep.records:
        print(f"n={r.n} h_rate={_fmt(r.h_rate)} g_rate={_fmt(r.g_rate)}")
    return 0


def _add_common_code_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dist", required=True)
    p.add_argument("--cost", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--strategy", choices=["greedy_drop", "g_optimal"], default="greedy_drop")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="costcode", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("alpha", help="solve the cost capacity of a cost file")
    p.add_argument("--cost", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(fn=_cmd_alpha)

    p = sub.add_parser("validate-cost", help="per-context capacity roots and regularity")
    p.add_argument("--cost", required=True)
    p.add_argument("--tol", type=float, default=1e-7)
    p.set_defaults(fn=_cmd_validate_cost)

    p = sub.add_parser("entropy", help="entropy and varentropy of a distribution file")
    p.add_argument("--dist", required=True)
    p.add_argument("--bits", action="store_true")
    p.set_defaults(fn=_cmd_entropy)

    p = sub.add_parser("smooth", help="smooth entropy of a distribution")
    p.add_argument("--dist", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--quantity", choices=["G", "H"], required=True)
    p.add_argument("--method", choices=["auto", "brute", "bnb", "greedy"], default="auto")
    p.add_argument("--bits", action="store_true")
    p.set_defaults(fn=_cmd_smooth)

    p = sub.add_parser("rate-seq", help="exact smooth-entropy rates for n = 1..n_max")
    p.add_argument("--dist", required=True)
    p.add_argument("--cost")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--table", action="store_true")
    p.set_defaults(fn=_cmd_rate_seq)

    p = sub.add_parser("bounds", help="finite-length converse and achievability bounds")
    p.add_argument("--dist", required=True)
    p.add_argument("--cost", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--gamma", type=float, default=0.01)
    p.add_argument("--bits", action="store_true")
    p.set_defaults(fn=_cmd_bounds)

    p = sub.add_parser("build-code", help="build a codebook and dump it")
    _add_common_code_flags(p)
    p.set_defaults(fn=_cmd_build_code)

    p = sub.add_parser("encode", help="encode one block with a freshly built codebook")
    _add_common_code_flags(p)
    p.add_argument("--block", required=True)
    p.set_defaults(fn=_cmd_encode)

    p = sub.add_parser("decode", help="decode one codeword with a freshly built codebook")
    _add_common_code_flags(p)
    p.add_argument("--word", required=True)
    p.set_defaults(fn=_cmd_decode)

    p = sub.add_parser("transcode", help="rebuild a codebook under another cost function")
    _add_common_code_flags(p)
    p.add_argument("--to-cost", required=True)
    p.set_defaults(fn=_cmd_transcode)

    p = sub.add_parser("second-order", help="normalized deviations from the first-order rate")
    p.add_argument("--dist", required=True)
    p.add_argument("--cost", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--table", action="store_true")
    p.set_defaults(fn=_cmd_second_order)

    p = sub.add_parser("relation-check", help="capacity-scaled rate identities across two costs")
    p.add_argument("--dist", required=True)
    p.add_argument("--cost", required=True)
    p.add_argument("--to-cost", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--gamma", type=float, default=0.01)
    p.set_defaults(fn=_cmd_relation_check)

    p = sub.add_parser("sandwich-test", help="randomized bound/oracle/construction ordering checks")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--gamma", type=float, default=0.01)
    p.set_defaults(fn=_cmd_sandwich_test)

    p = sub.add_parser("appendix-report", help="finite-n rates next to the (1-delta)H limit")
    p.add_argument("--dist", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--table", action="store_true")
    p.set_defaults(fn=_cmd_appendix_report)

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except _EXIT_INFEASIBLE as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CostcodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
