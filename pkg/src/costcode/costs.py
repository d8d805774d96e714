"""Context-dependent symbol costs over a K-ary code alphabet.

A cost table assigns every (context, symbol) pair a positive cost, where the
context is the tail of previously emitted code symbols (up to a fixed depth;
depth 0 means additive, memoryless costs).  A table is regular when the
capacity equation

    sum_y K**(-alpha * cost(y | ctx)) = 1

has the same root alpha for every context.  That root, the cost capacity,
turns costs into probability-like weights q(word) = K**(-alpha * cost(word))
which sum to one over the words of each fixed length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from random import Random
from typing import Sequence

from .errors import InvalidInputError, NonRegularCostError, ParseError

Context = tuple[int, ...]
Word = tuple[int, ...]

DEFAULT_SOLVER_TOL = 1e-9
DEFAULT_REGULARITY_TOL = 1e-7


def log_base(x: float, K: int) -> float:
    """Logarithm of x in base K (exact log2 path when K == 2)."""
    if K == 2:
        return math.log2(x)
    return math.log2(x) / math.log2(K)


def all_contexts(K: int, depth: int) -> list[Context]:
    """Every context of length 0..depth, shortest first, lexicographic within a length."""
    out: list[Context] = []
    for d in range(depth + 1):
        out.extend(product(range(1, K + 1), repeat=d))
    return out


@dataclass
class CostFunction:
    """Cost table plus the solved capacity; immutable once alpha_c is cached."""

    K: int
    context_depth: int
    table: dict[Context, tuple[float, ...]]
    c_min: float = field(init=False)
    c_max: float = field(init=False)
    alpha_c: float | None = None

    def __post_init__(self):
        if self.K < 2:
            raise InvalidInputError(f"code alphabet size must be >= 2, got {self.K}")
        if self.context_depth < 0:
            raise InvalidInputError("context depth must be >= 0")
        expected = all_contexts(self.K, self.context_depth)
        missing = [c for c in expected if c not in self.table]
        if missing:
            raise InvalidInputError(f"cost table missing context {missing[0]!r}")
        entries: list[float] = []
        for ctx, row in self.table.items():
            if len(ctx) > self.context_depth:
                raise InvalidInputError(f"context {ctx!r} longer than depth {self.context_depth}")
            if len(row) != self.K:
                raise InvalidInputError(f"context {ctx!r} defines {len(row)} costs, need {self.K}")
            for c in row:
                if not (c > 0.0 and math.isfinite(c)):
                    raise InvalidInputError(f"cost {c!r} at context {ctx!r} not positive finite")
                entries.append(c)
        self.c_min = min(entries)
        self.c_max = max(entries)
        self._child_weights: dict[Context, tuple[float, ...]] = {}

    def context_of(self, prefix: Sequence[int]) -> Context:
        """Truncate a word prefix to the table's context depth."""
        if self.context_depth == 0:
            return ()
        return tuple(prefix[-self.context_depth:])

    def symbol_cost(self, symbol: int, context: Sequence[int]) -> float:
        if not 1 <= symbol <= self.K:
            raise InvalidInputError(f"symbol {symbol} out of range 1..{self.K}")
        return self.table[self.context_of(context)][symbol - 1]

    def require_alpha(self) -> float:
        if self.alpha_c is None:
            raise InvalidInputError("cost capacity not solved yet; call solve_cost_capacity first")
        return self.alpha_c

    def child_weights(self, context: Sequence[int]) -> tuple[float, ...]:
        """Per-symbol weights K**(-alpha*cost(a|ctx)); cached per context after solve."""
        alpha = self.require_alpha()
        ctx = self.context_of(context)
        cached = self._child_weights.get(ctx)
        if cached is None:
            row = self.table[ctx]
            cached = tuple(self.K ** (-alpha * c) for c in row)
            self._child_weights[ctx] = cached
        return cached


def uniform_cost(K: int, depth: int = 0) -> CostFunction:
    """All per-symbol costs equal to one; word cost is then just word length."""
    table = {ctx: tuple(1.0 for _ in range(K)) for ctx in all_contexts(K, depth)}
    return CostFunction(K=K, context_depth=depth, table=table)


def memoryless_cost(costs: Sequence[float], K: int | None = None) -> CostFunction:
    """Depth-0 cost function from one cost per code symbol."""
    if K is None:
        K = len(costs)
    if len(costs) != K:
        raise InvalidInputError(f"need {K} costs, got {len(costs)}")
    return CostFunction(K=K, context_depth=0, table={(): tuple(float(c) for c in costs)})


def golden_cost() -> CostFunction:
    """The binary cost pair c(1)=1, c(2)=2 whose capacity involves the golden ratio."""
    return memoryless_cost([1.0, 2.0])


def cost_of_word(cf: CostFunction, word: Sequence[int]) -> float:
    """Sum of per-symbol costs along the word, each conditioned on its truncated prefix."""
    if len(word) == 0:
        raise InvalidInputError("word must be non-empty")
    total = 0.0
    for k, sym in enumerate(word):
        total += cf.symbol_cost(sym, word[:k])
    return total


def _capacity_gap(cf: CostFunction, ctx: Context, alpha: float) -> float:
    """sum_y K**(-alpha*cost(y|ctx)) - 1; strictly decreasing in alpha."""
    return math.fsum(cf.K ** (-alpha * c) for c in cf.table[ctx]) - 1.0


def _solve_context_root(cf: CostFunction, ctx: Context) -> float:
    # Bracket: gap(~0) = K-1 > 0, and at 2/c_min each term is <= K**-2, so the
    # sum is <= 1/K < 1.  Bisect down to adjacent floats.
    lo = 1e-12
    hi = 2.0 / cf.c_min
    if _capacity_gap(cf, ctx, lo) <= 0.0:
        raise NonRegularCostError(f"capacity equation has no positive root at context {ctx!r}")
    while _capacity_gap(cf, ctx, hi) >= 0.0:
        hi *= 2.0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _capacity_gap(cf, ctx, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    # one Newton polish per endpoint often lands the exactly-representable root
    candidates = {lo, hi}
    ln_k = math.log(cf.K)
    for a in (lo, hi):
        slope = -ln_k * math.fsum(c * cf.K ** (-a * c) for c in cf.table[ctx])
        if slope != 0.0:
            candidates.add(a - _capacity_gap(cf, ctx, a) / slope)
    return min(candidates, key=lambda a: (abs(_capacity_gap(cf, ctx, a)), -a))


@dataclass
class RegularityReport:
    roots: dict[Context, float]
    spread: float
    regular: bool


def validate_regularity(cf: CostFunction, tol: float = DEFAULT_REGULARITY_TOL) -> RegularityReport:
    """Solve the capacity root for every context and compare the spread against tol."""
    roots = {ctx: _solve_context_root(cf, ctx) for ctx in all_contexts(cf.K, cf.context_depth)}
    values = list(roots.values())
    spread = max(values) - min(values)
    return RegularityReport(roots=roots, spread=spread, regular=spread <= tol)


def solve_cost_capacity(
    cf: CostFunction,
    tol: float = DEFAULT_SOLVER_TOL,
    regularity_tol: float = DEFAULT_REGULARITY_TOL,
) -> float:
    """Solve the capacity equation and cache the root on the cost function.

    Bisection runs until the bracket collapses to adjacent floats, so the
    returned root is accurate to machine resolution; `tol` only gates the
    final residual check.  All contexts are solved and a spread beyond
    `regularity_tol` raises NonRegularCostError: the capacity is only
    well-defined when every context shares the root.
    """
    if tol <= 0.0:
        raise InvalidInputError("solver tolerance must be positive")
    report = validate_regularity(cf, regularity_tol)
    if not report.regular:
        raise NonRegularCostError(
            f"per-context roots differ by {report.spread:.3e} > {regularity_tol:.3e}"
        )
    first_ctx = all_contexts(cf.K, cf.context_depth)[0]
    alpha = report.roots[first_ctx]
    if abs(_capacity_gap(cf, first_ctx, alpha)) > tol:
        raise NonRegularCostError("bisection failed to meet the requested tolerance")
    cf.alpha_c = alpha
    return alpha


def q_weight(cf: CostFunction, word: Sequence[int]) -> float:
    """Probability-like weight K**(-alpha_c * cost(word)); sums to 1 over each word length."""
    alpha = cf.require_alpha()
    return cf.K ** (-alpha * cost_of_word(cf, word))


def random_regular_cost(rng: Random, K: int, depth: int, alpha_target: float | None = None) -> CostFunction:
    """Random regular cost table: each context row is -log_K(u)/alpha for a random
    probability vector u, so every row shares the root alpha_target by construction.
    Row entries are floored away from zero to keep cost ratios moderate."""
    if alpha_target is None:
        alpha_target = 0.7 + rng.random()
    table: dict[Context, tuple[float, ...]] = {}
    for ctx in all_contexts(K, depth):
        raw = [0.15 + rng.random() for _ in range(K)]
        total = sum(raw)
        u = [r / total for r in raw]
        table[ctx] = tuple(-log_base(ui, K) / alpha_target for ui in u)
    return CostFunction(K=K, context_depth=depth, table=table)


def parse_cost_file(path: str) -> CostFunction:
    """Read a cost table: header `K <int> depth <int>`, then `<context|-> <symbol> <cost>` lines."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    header_seen = False
    K = depth = 0
    rows: dict[Context, dict[int, float]] = {}
    for line_no, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.split()
        if not header_seen:
            if len(parts) != 4 or parts[0] != "K" or parts[2] != "depth":
                raise ParseError(path, line_no, "expected header `K <int> depth <int>`")
            try:
                K = int(parts[1])
                depth = int(parts[3])
            except ValueError:
                raise ParseError(path, line_no, "header values must be integers") from None
            header_seen = True
            continue
        if len(parts) != 3:
            raise ParseError(path, line_no, "expected `<context|-> <symbol> <cost>`")
        ctx_text, sym_text, cost_text = parts
        if ctx_text == "-":
            ctx: Context = ()
        else:
            try:
                ctx = tuple(int(ch) for ch in ctx_text)
            except ValueError:
                raise ParseError(path, line_no, f"bad context {ctx_text!r}") from None
            if any(not 1 <= s <= K for s in ctx):
                raise ParseError(path, line_no, f"context symbol out of range in {ctx_text!r}")
        try:
            sym = int(sym_text)
            cost = float(cost_text)
        except ValueError:
            raise ParseError(path, line_no, "symbol must be int and cost float") from None
        if not 1 <= sym <= K:
            raise ParseError(path, line_no, f"symbol {sym} out of range 1..{K}")
        rows.setdefault(ctx, {})[sym] = cost
    if not header_seen:
        raise ParseError(path, 1, "missing header line")
    table: dict[Context, tuple[float, ...]] = {}
    for ctx, row in rows.items():
        if sorted(row) != list(range(1, K + 1)):
            raise ParseError(path, 1, f"context {ctx or '-'} does not define all {K} symbols")
        table[ctx] = tuple(row[s] for s in range(1, K + 1))
    try:
        return CostFunction(K=K, context_depth=depth, table=table)
    except InvalidInputError as exc:
        raise ParseError(path, 1, str(exc)) from None
