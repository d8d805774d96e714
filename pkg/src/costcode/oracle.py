"""Exhaustive reference implementations for small instances.

The oracle searches raw prefix codes (no flag symbol, no reserved escape):
for every dominant set within the error budget it finds the cheapest
prefix-free word assignment under a per-word cost budget by recursively
partitioning the members among the K subtrees of the code tree.  Non-members
share one word, either a fresh one (modeled as an extra pseudo-member whose
probability is the complement mass) or a reused member word (modeled by
boosting the heaviest member's weight); the cheaper scenario wins.  The
global minimum average cost rate sandwiches the analytic bounds and the
constructed codes in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .bounds import achievability_bound, converse_bound
from .costs import Context, CostFunction, Word, cost_of_word, log_base
from .errors import InfeasibleError, InvalidInputError
from .sfe import average_cost_rate, build_code
from .sources import Distribution, Symbol

ORACLE_SUPPORT_LIMIT = 8


@dataclass
class OracleResult:
    optimal_cost_rate: float
    optimal_dominant: tuple[Symbol, ...]
    optimal_words: dict[Symbol, Word]
    escape_word: Word | None
    escape_cost: float | None
    achieved_error: float
    nodes_explored: int


def default_cost_budget(d: Distribution, cf: CostFunction) -> float:
    """Budget safely above the per-word cost of the interval construction, so the
    true optimum lies inside the searched space."""
    alpha = cf.require_alpha()
    p_min = min(d.probs)
    return (log_base(1.0 / p_min, cf.K) + log_base(2.0, cf.K)) / alpha + 3.0 * cf.c_max


def _feasible_dominant_sets(d: Distribution, epsilon: float) -> list[tuple[int, ...]]:
    m = len(d)
    out = []
    for mask in range(1, 1 << m):
        excluded = [d.probs[i] for i in range(m) if not mask >> i & 1]
        if math.fsum(excluded) <= epsilon:
            out.append(tuple(i for i in range(m) if mask >> i & 1))
    return out


class _AssignmentSearch:
    """Minimum expected word cost for weights placed prefix-free in a code tree.

    The optimum assigns each weight a word so that the word set is an
    antichain; recursion partitions the weights among the K children of the
    current node, charging each partition class the child's symbol cost times
    its mass, plus the subproblem inside the child.  Two heuristic
    assignments (a balanced fixed-depth tree and the midpoint-interval
    construction) seed the incumbent so the exhaustive pass prunes hard from
    the start.  Weights are processed heaviest-first under an incremental
    lower bound: a group's second and later members must descend at least one
    level past the group's child.  Children of equal cost in memoryless
    tables are interchangeable, so only canonical fills are explored.
    """

    def __init__(self, cf: CostFunction, budget: float):
        self.cf = cf
        self.budget = budget
        self.nodes = 0

    def solve(self, weights: Sequence[float]) -> tuple[float, list[Word] | None]:
        """Words live below the root (the empty word is not a codeword)."""
        cf = self.cf
        ws = sorted(weights, reverse=True)
        if len(ws) == 1:
            row = cf.table[()]
            a = min(range(1, cf.K + 1), key=lambda s: row[s - 1])
            if row[a - 1] > self.budget:
                return math.inf, None
            return ws[0] * row[a - 1], [(a,)]
        best_val, best_words = math.inf, None
        for seed in (self._balanced_seed(ws), self._interval_seed(ws)):
            if seed is not None and seed[0] < best_val:
                best_val, best_words = seed
        val, words = self._search(tuple(ws), best_val)
        if words is not None:
            return val, words
        return best_val, best_words

    def _seed_value(self, ws: list[float], words: list[Word]) -> tuple[float, list[Word]] | None:
        costs = []
        for w in words:
            c = cost_of_word(self.cf, w)
            if c > self.budget:
                return None
            costs.append(c)
        order = sorted(range(len(words)), key=lambda i: costs[i])
        value = math.fsum(ws[i] * costs[j] for i, j in enumerate(order))
        return value, [words[j] for j in order]

    def _balanced_seed(self, ws: list[float]) -> tuple[float, list[Word]] | None:
        m = len(ws)
        depth = 1
        while self.cf.K ** depth < m:
            depth += 1
        words: list[Word] = []

        # lexicographic walk emits the leftmost m leaves at `depth`
        def fill(prefix: Word) -> None:
            if len(words) >= m:
                return
            if len(prefix) == depth:
                words.append(prefix)
                return
            for a in range(1, self.cf.K + 1):
                if len(words) >= m:
                    return
                fill(prefix + (a,))

        fill(())
        return self._seed_value(ws, words)

    def _interval_seed(self, ws: list[float]) -> tuple[float, list[Word]] | None:
        from .sfe import assign_codeword  # local import: sfe does not import from here

        from .errors import CostcodeError

        total = math.fsum(ws)
        words: list[Word] = []
        cum = 0.0
        try:
            for w in ws:
                p = w / total
                words.append(assign_codeword(self.cf, cum, cum + p / 2.0, min(cum + p, 1.0)))
                cum += p
        except CostcodeError:
            return None
        return self._seed_value(ws, words)

    def _search(self, weights: tuple[float, ...], ub: float) -> tuple[float, list[Word] | None]:
        val, words = self._node(weights, (), self.budget, ub)
        return val, words

    def _node(
        self, weights: tuple[float, ...], ctx: Context, budget: float, ub: float
    ) -> tuple[float, list[Word] | None]:
        """Cheapest placement of all weights strictly inside this subtree, with
        word costs relative to the subtree root capped by budget; (inf, None)
        when nothing beats ub."""
        self.nodes += 1
        cf = self.cf
        K = cf.K
        row = cf.table[ctx]
        min_c = min(row)
        total_mass = math.fsum(weights)
        if total_mass * min_c >= ub:
            return math.inf, None
        # information floor: prefix-free words inside the subtree satisfy the
        # cost-weighted Kraft inequality, so the weighted cost is at least the
        # capacity-normalized entropy of the weights; this is what stops the
        # search from drifting down chains of near-free symbols
        alpha = cf.alpha_c
        if alpha is not None and len(weights) > 1:
            info = math.fsum(
                w * log_base(total_mass / w, K) for w in weights if w > 0.0
            ) / alpha
            if info >= ub:
                return math.inf, None
        m = len(weights)
        child_order = sorted(range(K), key=lambda a: row[a])
        # cheapest onward step inside each child, for the depth-2 lower bound
        next_min = [min(cf.table[cf.context_of(ctx + (a + 1,))]) for a in range(K)]
        symmetric = cf.context_depth == 0
        best_val = ub
        best_groups: tuple[tuple[float, ...], ...] | None = None
        best_words: list[list[Word]] | None = None
        groups: list[list[float]] = [[] for _ in range(K)]

        def evaluate() -> None:
            nonlocal best_val, best_groups, best_words
            val = 0.0
            parts: list[list[Word]] = []
            for a in range(1, K + 1):
                grp = groups[a - 1]
                if not grp:
                    parts.append([])
                    continue
                ca = row[a - 1]
                if ca > budget:
                    return
                val += ca * math.fsum(grp)
                if val >= best_val:
                    return
                if len(grp) == 1:
                    parts.append([(a,)])
                    continue
                sub_ctx = cf.context_of(ctx + (a,))
                sub_val, sub_words = self._node(tuple(grp), sub_ctx, budget - ca, best_val - val)
                if sub_words is None:
                    return
                val += sub_val
                if val >= best_val:
                    return
                parts.append([(a,) + w for w in sub_words])
            best_val = val
            best_groups = tuple(tuple(g) for g in groups)
            best_words = parts

        def place(i: int, lb: float, remaining_mass: float, min_pos: int) -> None:
            if lb + remaining_mass * min_c >= best_val:
                return
            if i == m:
                evaluate()
                return
            w = weights[i]
            # equal weights are interchangeable: force nondecreasing child
            # positions along a run so each partition is built exactly once
            start = min_pos if i > 0 and w == weights[i - 1] else 0
            seen_empty_cost: set[float] = set()
            for pos in range(start, K):
                a = child_order[pos]
                grp = groups[a]
                if symmetric and not grp:
                    if row[a] in seen_empty_cost:
                        continue
                    seen_empty_cost.add(row[a])
                # groups of two or more force every member below the child node
                if grp:
                    delta = w * (row[a] + next_min[a])
                    if len(grp) == 1:
                        delta += grp[0] * next_min[a]
                else:
                    delta = w * row[a]
                grp.append(w)
                place(i + 1, lb + delta, remaining_mass - w, pos)
                grp.pop()

        place(0, 0.0, total_mass, 0)
        if best_groups is None or best_words is None:
            return math.inf, None
        # stitch per-child words back to the heaviest-first weight order; groups
        # were filled heaviest-first, so first-fit matching by value is exact
        out: list[Word] = []
        counts = [0] * K
        for i in range(m):
            w = weights[i]
            for a in range(K):
                if counts[a] < len(best_groups[a]) and best_groups[a][counts[a]] == w:
                    out.append(best_words[a][counts[a]])
                    counts[a] += 1
                    break
        return best_val, out


def _min_expected_cost(
    cf: CostFunction, weights: Sequence[float], budget: float
) -> tuple[float, list[Word] | None, int]:
    search = _AssignmentSearch(cf, budget)
    val, words = search.solve(weights)
    return val, words, search.nodes


def optimal_code_exhaustive(
    d: Distribution,
    cf: CostFunction,
    epsilon: float,
    cost_budget: float | None = None,
) -> OracleResult:
    """Globally optimal average cost rate over all prefix codes within the budget.

    Every dominant set with complement mass at most epsilon is tried; the word
    search proves optimality by exhaustion.  A budget too small to give every
    member a word raises InfeasibleError (callers should raise the budget).
    """
    cf.require_alpha()
    if not 0.0 <= epsilon < 1.0:
        raise InvalidInputError(f"epsilon must lie in [0, 1), got {epsilon!r}")
    m = len(d)
    if m > ORACLE_SUPPORT_LIMIT:
        raise InvalidInputError(f"oracle handles supports up to {ORACLE_SUPPORT_LIMIT}, got {m}")
    if cost_budget is None:
        cost_budget = default_cost_budget(d, cf)
    best_value = math.inf
    best: OracleResult | None = None
    nodes = 0
    for keep in _feasible_dominant_sets(d, epsilon):
        keep_set = set(keep)
        comp = math.fsum(d.probs[i] for i in range(m) if i not in keep_set)
        members = sorted(keep, key=lambda i: (-d.probs[i], i))
        probs = [d.probs[i] for i in members]
        if comp == 0.0:
            val, words, n = _min_expected_cost(cf, probs, cost_budget)
            nodes += n
            scenario = "plain"
        else:
            # fresh escape word: one extra pseudo-member carrying the complement
            val_a, words_a, n_a = _min_expected_cost(cf, probs + [comp], cost_budget)
            # reused escape word: the heaviest member also carries the complement
            val_b, words_b, n_b = _min_expected_cost(
                cf, [probs[0] + comp] + probs[1:], cost_budget
            )
            nodes += n_a + n_b
            if val_a <= val_b:
                val, words, scenario = val_a, words_a, "fresh"
            else:
                val, words, scenario = val_b, words_b, "reuse"
        if words is None or val >= best_value:
            continue
        best_value = val
        if scenario == "fresh":
            # pseudo-member sits at the sorted position of its weight
            order = sorted(range(len(probs) + 1), key=lambda j: -(probs + [comp])[j])
            slot_of = {j: pos for pos, j in enumerate(order)}
            member_words = {
                d.support[members[j]]: words[slot_of[j]] for j in range(len(probs))
            }
            esc_word = words[slot_of[len(probs)]]
        else:
            member_words = {d.support[members[j]]: words[j] for j in range(len(probs))}
            esc_word = words[0] if scenario == "reuse" else None
        esc_cost = None
        if comp > 0.0 and esc_word is not None:
            esc_cost = cost_of_word(cf, esc_word)
        best = OracleResult(
            optimal_cost_rate=val,
            optimal_dominant=tuple(d.support[i] for i in sorted(keep)),
            optimal_words=member_words,
            escape_word=esc_word if comp > 0.0 else None,
            escape_cost=esc_cost,
            achieved_error=comp,
            nodes_explored=0,
        )
    if best is None:
        raise InfeasibleError(
            f"cost budget {cost_budget!r} cannot cover any dominant set; raise the budget"
        )
    best.nodes_explored = nodes
    return best


@dataclass
class SandwichReport:
    converse: float
    oracle: float
    constructed: float
    achievability: float
    ok: bool


def check_sandwich(
    d: Distribution,
    cf: CostFunction,
    epsilon: float,
    gamma: float = 0.01,
    n: int = 1,
    cost_budget: float | None = None,
) -> SandwichReport:
    """converse <= oracle optimum <= constructed code <= achievability, all four values.

    The converse is evaluated at the error probability the optimal code
    actually achieves (it is a per-code bound; the optimum may stay below the
    requested budget when no symbol is cheap enough to drop).  The
    achievability side keeps the requested budget.  A violated inequality
    signals an implementation bug; the report carries the numbers either way.
    """
    achv = achievability_bound(d, cf, epsilon, n, gamma)
    result = optimal_code_exhaustive(d, cf, epsilon, cost_budget)
    orc = result.optimal_cost_rate / n
    conv = converse_bound(d, cf, result.achieved_error, n)
    cb = build_code(d, cf, epsilon=epsilon, strategy="g_optimal")
    sfe_rate = average_cost_rate(cb, d, n)
    ok = conv <= orc <= sfe_rate <= achv
    return SandwichReport(converse=conv, oracle=orc, constructed=sfe_rate, achievability=achv, ok=ok)
