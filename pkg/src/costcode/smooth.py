"""Smooth entropy minimization over high-probability subsets.

Two set functions are minimized over subsets A whose probability is at least
1 - delta:

    H-quantity:  sum_{z in A} P(z) log_K(1 / P(z))
    G-quantity:  sum_{z in A} P(z) log_K(P(A) / P(z))

The minimizing set is a covering-knapsack solution, not a sorted prefix, so a
greedy scan can be strictly suboptimal.  Exact solvers: exhaustive subset
enumeration for small supports, and branch-and-bound over probability type
classes (symbols of identical probability are interchangeable, so only the
count taken per class matters).  Feasibility at the mass boundary is decided
by exact summation (math.fsum) of the *excluded* probabilities, which avoids
float drift in running differences; both exact methods and the greedy share
that rule and the objective evaluation, so their results are comparable
bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .costs import CostFunction, log_base
from .errors import ExactnessUnavailableError, InvalidInputError
from .sources import Distribution, IidSource, Symbol, block_distribution, entropy

BRUTE_SUPPORT_LIMIT = 22
CLASS_LIMIT = 80
_PRUNE_MARGIN = 1e-12
_SCREEN_MARGIN = 1e-9


@dataclass
class SmoothEntropyResult:
    quantity: str  # 'G' or 'H'
    delta: float
    value: float
    achieving_set: tuple[Symbol, ...]
    set_mass: float
    method: str  # 'brute_force', 'type_class_bnb', 'greedy'


def _check_delta(delta: float) -> None:
    if not 0.0 <= delta < 1.0:
        raise InvalidInputError(f"delta must lie in [0, 1), got {delta!r}")


def _feasible(d: Distribution, excluded_probs: Sequence[float], delta: float) -> bool:
    """Mass constraint, decided on the excluded side with exact summation."""
    return math.fsum(excluded_probs) <= delta


def subset_objective(d: Distribution, indices: Sequence[int], quantity: str) -> float:
    """Objective of a subset, evaluated canonically (terms in descending-probability
    order, exact summation) so the value depends only on the multiset of probabilities."""
    ps = sorted((d.probs[i] for i in indices), reverse=True)
    h = math.fsum(p * log_base(1.0 / p, d.base_K) for p in ps)
    if quantity == "H":
        return h
    if len(ps) == 1:
        return 0.0  # log(mass/p) vanishes exactly on singletons
    mass = math.fsum(ps)
    # every term log(mass/p) is nonnegative; clamp the ulp-level cancellation
    return max(0.0, h + mass * log_base(mass, d.base_K))


def _result_from_indices(
    d: Distribution, indices: Sequence[int], quantity: str, delta: float, method: str
) -> SmoothEntropyResult:
    idx = tuple(sorted(indices))
    return SmoothEntropyResult(
        quantity=quantity,
        delta=delta,
        value=subset_objective(d, idx, quantity),
        achieving_set=tuple(d.support[i] for i in idx),
        set_mass=math.fsum(d.probs[i] for i in idx),
        method=method,
    )


def _brute_force(d: Distribution, delta: float, quantity: str) -> tuple[float, tuple[int, ...]]:
    """Scan all subsets.  A cheap running-sum pass screens candidates; anything
    within a small margin of the screened optimum is re-evaluated exactly."""
    m = len(d)
    probs = d.probs
    w = [p * log_base(1.0 / p, d.base_K) for p in probs]
    full = (1 << m) - 1
    mass = [0.0] * (full + 1)
    cost = [0.0] * (full + 1)
    for msk in range(1, full + 1):
        b = (msk & -msk).bit_length() - 1
        prev = msk ^ (1 << b)
        mass[msk] = mass[prev] + probs[b]
        cost[msk] = cost[prev] + w[b]

    def dp_value(msk: int) -> float:
        if quantity == "H":
            return cost[msk]
        return cost[msk] + mass[msk] * log_base(mass[msk], d.base_K)

    def exact_feasible(msk: int) -> bool:
        excl = [probs[i] for i in range(m) if not msk >> i & 1]
        return _feasible(d, excl, delta)

    best_dp = math.inf
    for msk in range(1, full + 1):
        excl_dp = mass[full ^ msk]
        if excl_dp > delta + _PRUNE_MARGIN:
            continue
        if excl_dp > delta - _PRUNE_MARGIN and not exact_feasible(msk):
            continue
        v = dp_value(msk)
        if v < best_dp:
            best_dp = v
    if not math.isinf(best_dp):
        best: tuple[float, tuple[int, ...]] | None = None
        for msk in range(1, full + 1):
            if mass[full ^ msk] > delta + _PRUNE_MARGIN or dp_value(msk) > best_dp + _SCREEN_MARGIN:
                continue
            if not exact_feasible(msk):
                continue
            idx = tuple(i for i in range(m) if msk >> i & 1)
            v = subset_objective(d, idx, quantity)
            if best is None or v < best[0] or (v == best[0] and idx < best[1]):
                best = (v, idx)
        if best is not None:
            return best
    raise InvalidInputError("no subset satisfies the mass constraint")


def _type_classes(d: Distribution) -> list[tuple[float, list[int]]]:
    """Group support indices by exactly equal probability, largest probability first."""
    by_prob: dict[float, list[int]] = {}
    for i, p in enumerate(d.probs):
        by_prob.setdefault(p, []).append(i)
    return sorted(by_prob.items(), key=lambda kv: -kv[0])


def _class_bnb(d: Distribution, delta: float, quantity: str) -> tuple[float, tuple[int, ...]]:
    """Exact branch-and-bound over per-class inclusion counts.

    Classes are processed in ascending self-information order (descending
    probability), which makes the fractional-relaxation bound a greedy fill.
    At each node the search first asks whether stopping (taking nothing more)
    already meets the mass constraint; excess items only increase either
    objective, so a feasible stop dominates its subtree.  Count choices are
    explored largest-first; the relaxation bound is monotone as the count
    drops, so the loop breaks at the first pruned child.  Pruning is
    conservative (only when the bound is clearly above the incumbent), which
    keeps exact ties alive for deterministic lexicographic tie-breaking.
    """
    classes = _type_classes(d)
    g = len(classes)
    p_of = [p for p, _ in classes]
    idx_of = [sorted(members) for _, members in classes]
    size_of = [len(members) for members in idx_of]
    w_of = [p * log_base(1.0 / p, d.base_K) for p in p_of]
    ratio_of = [log_base(1.0 / p, d.base_K) for p in p_of]
    base = d.base_K

    # suffix_excl[i]: flat probabilities of every item in classes i..g-1
    suffix_excl: list[list[float]] = [[] for _ in range(g + 1)]
    for i in range(g - 1, -1, -1):
        suffix_excl[i] = [p_of[i]] * size_of[i] + suffix_excl[i + 1]
    suffix_mass = [math.fsum(s) for s in suffix_excl]

    target = 1.0 - delta
    inv_e = 1.0 / math.e

    def mterm_lower(lo: float, hi: float) -> float:
        # min of M*log_K(M) over [lo, hi]; convex with minimum at 1/e
        lo = max(lo, 1e-300)
        if lo <= inv_e <= hi:
            return -log_base(math.e, base) / math.e
        edge = lo if lo > inv_e else hi
        return edge * log_base(edge, base)

    def lp_fill(i: int, need: float) -> float:
        # the guard absorbs float noise in the running "need"; shrinking the
        # requirement only lowers the bound, which never over-prunes
        need -= 1e-12
        if need <= 0.0:
            return 0.0
        v = 0.0
        for j in range(i, g):
            gm = p_of[j] * size_of[j]
            if gm < need:
                v += w_of[j] * size_of[j]
                need -= gm
            else:
                return v + need * ratio_of[j]
        return math.inf

    best_value = math.inf
    best_idx: tuple[int, ...] | None = None

    def consider(counts: list[int]) -> None:
        nonlocal best_value, best_idx
        idx: list[int] = []
        for j, t in enumerate(counts):
            idx.extend(idx_of[j][:t])
        tup = tuple(sorted(idx))
        v = subset_objective(d, tup, quantity)
        if v < best_value or (v == best_value and (best_idx is None or tup < best_idx)):
            best_value = v
            best_idx = tup

    def stop_feasible(excluded_path: list[float], i: int) -> bool:
        return _feasible(d, excluded_path + suffix_excl[i], delta)

    def min_completing_count(excluded_path: list[float], i: int) -> int | None:
        # smallest t in [0, size] such that taking t of class i and nothing
        # after is feasible; None if even a full take is not
        lo, hi = 0, size_of[i]
        if not _feasible(d, excluded_path + suffix_excl[i + 1], delta):
            return None
        while lo < hi:
            mid = (lo + hi) // 2
            if _feasible(d, excluded_path + [p_of[i]] * (size_of[i] - mid) + suffix_excl[i + 1], delta):
                hi = mid
            else:
                lo = mid + 1
        return lo

    def dfs(i: int, counts: list[int], taken_mass: float, taken_cost: float,
            excluded_path: list[float]) -> None:
        nonlocal best_value
        if stop_feasible(excluded_path, i):
            # taking anything further strictly raises either objective, so a
            # feasible stop dominates its whole subtree
            consider(counts + [0] * (g - i))
            return
        if i == g:
            return
        t_complete = min_completing_count(excluded_path, i)
        t_hi = size_of[i] if t_complete is None else t_complete
        mterm = 0.0
        if quantity == "G":
            # one mass-term bound for every child keeps the bound monotone in t
            m_hi = taken_mass + t_hi * p_of[i] + suffix_mass[i + 1]
            mterm = mterm_lower(target, max(target, m_hi))
        for t in range(t_hi, -1, -1):
            c_mass = taken_mass + t * p_of[i]
            c_cost = taken_cost + t * w_of[i]
            completing = t_complete is not None and t == t_complete
            fill = 0.0 if completing else lp_fill(i + 1, target - c_mass)
            bound = c_cost + fill + mterm
            if bound > best_value + _PRUNE_MARGIN:
                if completing:
                    continue  # an overshooting cover can cost more than partial takes
                break  # below t_complete the bound only grows as t shrinks
            dfs(i + 1, counts + [t], c_mass, c_cost,
                excluded_path + [p_of[i]] * (size_of[i] - t))

    dfs(0, [], 0.0, 0.0, [])
    if best_idx is None:
        raise InvalidInputError("no subset satisfies the mass constraint")
    return best_value, best_idx


def _exact(d: Distribution, delta: float, quantity: str, method_hint: str) -> SmoothEntropyResult:
    _check_delta(delta)
    m = len(d)
    n_classes = len(set(d.probs))
    if method_hint == "auto":
        if m <= 16:
            method = "brute"
        elif n_classes <= CLASS_LIMIT:
            method = "bnb"
        elif m <= BRUTE_SUPPORT_LIMIT:
            method = "brute"
        else:
            raise ExactnessUnavailableError(
                f"support {m} exceeds {BRUTE_SUPPORT_LIMIT} and {n_classes} classes exceed "
                f"{CLASS_LIMIT}; no exact method applies (greedy is available as a fallback)"
            )
    elif method_hint in ("brute", "bnb"):
        method = method_hint
        if method == "brute" and m > BRUTE_SUPPORT_LIMIT:
            raise ExactnessUnavailableError(f"support {m} too large for subset enumeration")
        if method == "bnb" and n_classes > CLASS_LIMIT:
            raise ExactnessUnavailableError(f"{n_classes} type classes too many for branch-and-bound")
    else:
        raise InvalidInputError(f"unknown method hint {method_hint!r}")
    if method == "brute":
        value, idx = _brute_force(d, delta, quantity)
        tag = "brute_force"
    else:
        value, idx = _class_bnb(d, delta, quantity)
        tag = "type_class_bnb"
    return _result_from_indices(d, idx, quantity, delta, tag)


def h_delta_exact(d: Distribution, delta: float, method_hint: str = "auto") -> SmoothEntropyResult:
    """Exact minimum of the H-quantity over subsets of mass >= 1 - delta."""
    return _exact(d, delta, "H", method_hint)


def g_delta_exact(d: Distribution, delta: float, method_hint: str = "auto") -> SmoothEntropyResult:
    """Exact minimum of the G-quantity over subsets of mass >= 1 - delta."""
    return _exact(d, delta, "G", method_hint)


def _greedy(d: Distribution, delta: float, quantity: str) -> SmoothEntropyResult:
    _check_delta(delta)
    m = len(d)
    order = sorted(range(m), key=lambda i: (-d.probs[i], i))
    candidates: list[tuple[int, ...]] = []
    for k in range(1, m + 1):
        prefix = order[:k]
        excl = [d.probs[i] for i in order[k:]]
        if not _feasible(d, excl, delta):
            continue
        candidates.append(tuple(sorted(prefix)))
        if k < m:
            swapped = order[:k - 1] + [order[k]]
            excl_sw = [d.probs[i] for i in range(m) if i not in set(swapped)]
            if _feasible(d, excl_sw, delta):
                candidates.append(tuple(sorted(swapped)))
    if not candidates:
        raise InvalidInputError("no subset satisfies the mass constraint")
    best = min(candidates, key=lambda idx: (subset_objective(d, idx, quantity), idx))
    return _result_from_indices(d, best, quantity, delta, "greedy")


def h_delta_greedy(d: Distribution, delta: float) -> SmoothEntropyResult:
    """Descending-probability prefixes plus a boundary swap; upper-bounds the exact H."""
    return _greedy(d, delta, "H")


def g_delta_greedy(d: Distribution, delta: float) -> SmoothEntropyResult:
    """Greedy counterpart for the G-quantity; upper-bounds the exact value."""
    return _greedy(d, delta, "G")


@dataclass
class RateRecord:
    n: int
    h_value: float
    g_value: float
    h_rate: float
    g_rate: float
    h_cost_rate: float | None = None
    g_cost_rate: float | None = None


def rate_sequence(
    s: IidSource,
    cf: CostFunction | None,
    delta: float,
    n_max: int,
    max_support: int = 1 << 20,
    method_hint: str = "auto",
) -> list[RateRecord]:
    """Exact per-block smooth entropies for n = 1..n_max, plus per-symbol rates.

    When a cost function is supplied the rates are also divided by its
    capacity, giving cost rates per source symbol.
    """
    _check_delta(delta)
    if n_max < 1:
        raise InvalidInputError("n_max must be >= 1")
    alpha = cf.require_alpha() if cf is not None else None
    out: list[RateRecord] = []
    for n in range(1, n_max + 1):
        dn = block_distribution(s, n, max_support)
        h = h_delta_exact(dn, delta, method_hint).value
        g = g_delta_exact(dn, delta, method_hint).value
        rec = RateRecord(n=n, h_value=h, g_value=g, h_rate=h / n, g_rate=g / n)
        if alpha is not None:
            rec.h_cost_rate = h / (alpha * n)
            rec.g_cost_rate = g / (alpha * n)
        out.append(rec)
    return out


@dataclass
class AppendixReport:
    delta: float
    target: float  # (1 - delta) * H(X): the common limit of the finite-n rates
    entropy_single: float
    records: list[RateRecord]


def appendix_report(
    s: IidSource, delta: float, n_max: int, max_support: int = 1 << 20
) -> AppendixReport:
    """Finite-n smooth-entropy rates next to their memoryless limit (1-delta)H(X).

    Purely a reporting operation: the limit statements this illustrates hold
    as n grows, so no inequality is asserted at finite n.
    """
    h1 = entropy(s.single_letter)
    records = rate_sequence(s, None, delta, n_max, max_support)
    return AppendixReport(
        delta=delta, target=(1.0 - delta) * h1, entropy_single=h1, records=records
    )
