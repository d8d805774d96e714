"""Interval-based prefix coding over a dominant set, with unequal symbol costs.

Every code word over the K-ary alphabet owns a half-open subinterval of
[0, 1): the children of a word split its interval in symbol order, each child
taking the fraction K**(-alpha_c * cost(symbol | context)).  With the cost
capacity alpha_c solved, the widths at every level sum to one, so this is the
classic cumulative-interval construction generalized from lengths to costs.

A codebook is built for the members of a dominant set (the blocks the decoder
reproduces without error): members are ordered, their conditional
probabilities laid out cumulatively, and each member receives the shortest
word whose interval contains the member's midpoint while excluding both of
its cumulative endpoints.  Inner words are prefixed with symbol 1; the single
symbol 2 escapes every non-member and decodes to a fixed representative,
which is where the decoding error lives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .costs import CostFunction, Word, cost_of_word, log_base, q_weight
from .errors import (
    CodebookInvariantError,
    InvalidCodewordError,
    InvalidInputError,
    PrecisionExhaustionError,
)
from .smooth import g_delta_exact
from .sources import Distribution, Symbol

PRECISION_FLOOR = 4.0 * 2.0 ** -52

FLAG_SYMBOL = 1
ESCAPE_SYMBOL = 2


@dataclass
class DominantSet:
    """Ordered members the code reproduces exactly; the complement mass is the
    error probability the code will exhibit."""

    members: tuple[Symbol, ...]
    mass: float
    complement_mass: float

    def __post_init__(self):
        if not self.members:
            raise InvalidInputError("dominant set must be non-empty")
        if abs(self.complement_mass - (1.0 - self.mass)) > 1e-12:
            raise InvalidInputError("dominant mass and complement mass disagree")


@dataclass
class IntervalAssignment:
    member: Symbol
    cond_prob: float
    p_low: float    # cumulative mass before this member
    q_mid: float    # p_low + cond_prob / 2, the targeted point
    p_high: float   # cumulative mass through this member
    inner_word: Word
    beta: float
    gamma: float


@dataclass
class Codebook:
    dominant: DominantSet
    assignments: list[IntervalAssignment]
    words: dict[Symbol, Word]          # member -> full word (flag prepended)
    inner_words: dict[Symbol, Word]
    escape_word: Word
    representative: Symbol
    cost_function: CostFunction
    per_word_cost: dict[Symbol, float]
    distribution: Distribution
    escape_cost: float


def build_dominant_set(d: Distribution, epsilon: float, strategy: str = "greedy_drop") -> DominantSet:
    """Pick the members to protect; the dropped mass (at most epsilon) becomes the
    error probability.  `greedy_drop` sheds smallest-probability symbols while the
    exact dropped mass stays within epsilon; `g_optimal` takes the achieving set of
    the exact G-quantity at delta = epsilon."""
    if not 0.0 <= epsilon < 1.0:
        raise InvalidInputError(f"epsilon must lie in [0, 1), got {epsilon!r}")
    m = len(d)
    if strategy == "greedy_drop":
        # smallest probability first; ties drop the canonically last symbol
        candidates = sorted(range(m), key=lambda i: (d.probs[i], -i))
        dropped: list[int] = []
        dropped_probs: list[float] = []
        for i in candidates:
            if len(dropped) + 1 == m:
                break
            if math.fsum(dropped_probs + [d.probs[i]]) <= epsilon:
                dropped.append(i)
                dropped_probs.append(d.probs[i])
            else:
                break
        keep = sorted(set(range(m)) - set(dropped))
    elif strategy == "g_optimal":
        res = g_delta_exact(d, epsilon)
        keep = sorted(d.index(x) for x in res.achieving_set)
    else:
        raise InvalidInputError(f"unknown dominant-set strategy {strategy!r}")
    members = tuple(d.support[i] for i in keep)
    keep_set = set(keep)
    mass = math.fsum(d.probs[i] for i in keep)
    comp = math.fsum(d.probs[i] for i in range(m) if i not in keep_set)
    return DominantSet(members=members, mass=mass, complement_mass=comp)


def interval_of_word(cf: CostFunction, word: Sequence[int]) -> tuple[float, float]:
    """Half-open interval [beta, gamma) of a word; its width is the word's q-weight
    and beta is the q-weight sum of same-length lexicographic predecessors."""
    cf.require_alpha()
    if len(word) == 0:
        raise InvalidInputError("word must be non-empty")
    beta, width = 0.0, 1.0
    for k, sym in enumerate(word):
        if not 1 <= sym <= cf.K:
            raise InvalidInputError(f"symbol {sym} out of range 1..{cf.K}")
        weights = cf.child_weights(word[:k])
        beta += width * math.fsum(weights[:sym - 1])
        width *= weights[sym - 1]
    return beta, beta + width


def assign_codeword(cf: CostFunction, p_low: float, q_mid: float, p_high: float) -> Word:
    """Shortest word whose interval contains q_mid and excludes both endpoints.

    Descends from the root into the child interval holding q_mid.  At each
    length exactly one interval contains q_mid, and every proper prefix of a
    feasible word still contains an endpoint, so the first feasible node on
    the path is the minimum-length choice overall.
    """
    cf.require_alpha()
    if not (0.0 <= p_low < q_mid < p_high <= 1.0 + 1e-9):
        raise InvalidInputError(
            f"need 0 <= p_low < q_mid < p_high <= 1, got ({p_low!r}, {q_mid!r}, {p_high!r})"
        )
    word: list[int] = []
    beta, width = 0.0, 1.0
    while True:
        if width < PRECISION_FLOOR:
            raise PrecisionExhaustionError(
                f"interval width {width!r} below resolution before endpoints were excluded"
            )
        weights = cf.child_weights(word)
        chosen = 1
        chosen_beta = beta
        acc = 0.0
        for a in range(1, cf.K + 1):
            start = beta + width * acc
            if start <= q_mid:
                chosen = a
                chosen_beta = start
            else:
                break
            acc += weights[a - 1]
        word.append(chosen)
        beta = chosen_beta
        width *= weights[chosen - 1]
        if p_low < beta and p_high >= beta + width:
            return tuple(word)


def _prefix_points(values: Sequence[float]) -> list[float]:
    """Cumulative fenceposts 0, v1, v1+v2, ... computed with Neumaier compensation."""
    points = [0.0]
    s = 0.0
    comp = 0.0
    for v in values:
        t = s + v
        if abs(s) >= abs(v):
            comp += (s - t) + v
        else:
            comp += (v - t) + s
        s = t
        points.append(s + comp)
    return points


def _cheapest_escape_cost(cf: CostFunction) -> float:
    return cost_of_word(cf, (ESCAPE_SYMBOL,))


def build_code(
    d: Distribution,
    cf: CostFunction,
    epsilon: float | None = None,
    dominant: DominantSet | None = None,
    strategy: str = "greedy_drop",
    member_order: str = "canonical",
) -> Codebook:
    """Construct, validate and return the full codebook for a dominant set.

    Members are laid out in canonical (support) order by default; descending
    probability is available for experimentation.  Construction aborts with
    CodebookInvariantError if any invariant fails, so a returned codebook is
    already verified: prefix-free, disjoint intervals, cost-weighted Kraft sum
    at most one, per-word weight guarantee, and exact round-trip decoding.
    """
    cf.require_alpha()
    if dominant is None:
        if epsilon is None:
            raise InvalidInputError("need either epsilon or an explicit dominant set")
        dominant = build_dominant_set(d, epsilon, strategy)
    if member_order == "canonical":
        members = list(dominant.members)
    elif member_order == "prob_desc":
        members = sorted(dominant.members, key=lambda x: (-d.prob(x), d.index(x)))
    else:
        raise InvalidInputError(f"unknown member order {member_order!r}")

    cond = [d.prob(x) / dominant.mass for x in members]
    points = _prefix_points(cond)
    assignments: list[IntervalAssignment] = []
    for i, x in enumerate(members):
        p_low, p_high = points[i], points[i + 1]
        q_mid = p_low + cond[i] / 2.0
        inner = assign_codeword(cf, p_low, q_mid, p_high)
        beta, gamma = interval_of_word(cf, inner)
        assignments.append(IntervalAssignment(
            member=x, cond_prob=cond[i], p_low=p_low, q_mid=q_mid, p_high=p_high,
            inner_word=inner, beta=beta, gamma=gamma,
        ))

    inner_words = {a.member: a.inner_word for a in assignments}
    words = {a.member: (FLAG_SYMBOL,) + a.inner_word for a in assignments}
    per_word_cost = {x: cost_of_word(cf, w) for x, w in words.items()}
    cb = Codebook(
        dominant=dominant,
        assignments=assignments,
        words=words,
        inner_words=inner_words,
        escape_word=(ESCAPE_SYMBOL,),
        representative=members[0],
        cost_function=cf,
        per_word_cost=per_word_cost,
        distribution=d,
        escape_cost=_cheapest_escape_cost(cf),
    )
    _validate_codebook(cb)
    return cb


def _is_prefix(a: Word, b: Word) -> bool:
    return len(a) <= len(b) and b[:len(a)] == a


def _validate_codebook(cb: Codebook) -> None:
    cf = cb.cost_function
    alpha = cf.require_alpha()
    all_words = sorted(list(cb.words.values()) + [cb.escape_word])
    for w1, w2 in zip(all_words, all_words[1:]):
        if w1 == w2 or _is_prefix(w1, w2):
            raise CodebookInvariantError(f"codebook not prefix-free: {w1} vs {w2}")
    for a in cb.assignments:
        if not (a.beta <= a.q_mid < a.gamma):
            raise CodebookInvariantError(f"interval of {a.member!r} misses its midpoint")
        if not (a.p_low < a.beta and a.gamma <= a.p_high):
            raise CodebookInvariantError(f"interval of {a.member!r} leaks past its endpoints")
    for a1, a2 in zip(cb.assignments, cb.assignments[1:]):
        if a1.gamma > a2.beta:
            raise CodebookInvariantError("assigned intervals overlap")
    kraft = math.fsum(q_weight(cf, w) for w in cb.inner_words.values())
    if kraft > 1.0 + 1e-12:
        raise CodebookInvariantError(f"cost-weighted Kraft sum {kraft!r} exceeds 1")
    floor_factor = cf.K ** (-alpha * cf.c_max)
    for a in cb.assignments:
        if not q_weight(cf, a.inner_word) > (a.cond_prob / 2.0) * floor_factor:
            raise CodebookInvariantError(f"per-word weight guarantee fails for {a.member!r}")
    for x in cb.dominant.members:
        if decode(cb, encode(cb, x)) != x:
            raise CodebookInvariantError(f"round trip fails for member {x!r}")


def encode(cb: Codebook, x: Symbol) -> Word:
    """Member -> its word; any other supported block -> the escape word."""
    w = cb.words.get(x)
    if w is not None:
        return w
    cb.distribution.index(x)  # raises for symbols outside the block support
    return cb.escape_word


def decode(cb: Codebook, word: Sequence[int]) -> Symbol:
    """Exact codeword lookup; the escape word decodes to the representative."""
    word = tuple(word)
    if word == cb.escape_word:
        return cb.representative
    rev = getattr(cb, "_reverse", None)
    if rev is None:
        rev = {w: x for x, w in cb.words.items()}
        cb._reverse = rev
    try:
        return rev[word]
    except KeyError:
        raise InvalidCodewordError(f"{word!r} is not a codeword") from None


def _same_distribution(a: Distribution, b: Distribution) -> bool:
    return a is b or (a.support == b.support and a.probs == b.probs)


def average_cost_rate(cb: Codebook, d: Distribution, n: int = 1) -> float:
    """Expected word cost per source symbol under d (escape cost for non-members)."""
    if not _same_distribution(d, cb.distribution):
        raise InvalidInputError("codebook was built for a different distribution")
    if n < 1:
        raise InvalidInputError("block length must be >= 1")
    total = math.fsum(
        p * cb.per_word_cost.get(x, cb.escape_cost) for x, p in zip(d.support, d.probs)
    )
    return total / n


def error_probability(cb: Codebook, d: Distribution) -> float:
    """Exactly the dominant complement mass: non-members decode to the representative."""
    if not _same_distribution(d, cb.distribution):
        raise InvalidInputError("codebook was built for a different distribution")
    return cb.dominant.complement_mass


def transcode(cb: Codebook, cf2: CostFunction) -> Codebook:
    """Rebuild the codebook under another regular cost function.

    The dominant set, member order, cumulative fenceposts, error behavior and
    escape word all carry over untouched; only the interval geometry (hence
    the inner words) changes.  Each new full word obeys the cost bound
    alpha' c'(word) <= log_K(2 / P(x|D)) + 2 alpha' c'_max + alpha' c'(flag),
    which the construction guarantees for context depths 0 and 1.
    """
    alpha2 = cf2.require_alpha()
    if cf2.K != cb.cost_function.K:
        raise InvalidInputError("transcoding requires the same code alphabet size")
    assignments: list[IntervalAssignment] = []
    for a in cb.assignments:
        inner = assign_codeword(cf2, a.p_low, a.q_mid, a.p_high)
        beta, gamma = interval_of_word(cf2, inner)
        assignments.append(IntervalAssignment(
            member=a.member, cond_prob=a.cond_prob, p_low=a.p_low, q_mid=a.q_mid,
            p_high=a.p_high, inner_word=inner, beta=beta, gamma=gamma,
        ))
    inner_words = {a.member: a.inner_word for a in assignments}
    words = {a.member: (FLAG_SYMBOL,) + a.inner_word for a in assignments}
    per_word_cost = {x: cost_of_word(cf2, w) for x, w in words.items()}
    out = Codebook(
        dominant=cb.dominant,
        assignments=assignments,
        words=words,
        inner_words=inner_words,
        escape_word=cb.escape_word,
        representative=cb.representative,
        cost_function=cf2,
        per_word_cost=per_word_cost,
        distribution=cb.distribution,
        escape_cost=_cheapest_escape_cost(cf2),
    )
    _validate_codebook(out)
    if cf2.context_depth <= 1:
        flag_cost = cf2.symbol_cost(FLAG_SYMBOL, ())
        base = cf2.K
        for a in assignments:
            lhs = alpha2 * per_word_cost[a.member]
            rhs = (
                log_base(1.0 / a.cond_prob, base)
                + log_base(2.0, base)
                + 2.0 * alpha2 * cf2.c_max
                + alpha2 * flag_cost
            )
            if lhs > rhs + 1e-9:
                raise CodebookInvariantError(
                    f"transcoded word cost bound fails for {a.member!r}: {lhs!r} > {rhs!r}"
                )
    return out


def block_token(x: Symbol) -> str:
    """Stable text form of a block symbol: tuples join their letters with commas."""
    if isinstance(x, tuple):
        return ",".join(str(t) for t in x)
    return str(x)


def word_digits(w: Word) -> str:
    return "".join(str(s) for s in w)


def dump_codebook(cb: Codebook) -> str:
    """Plain-text dump: header with escape/representative/alpha, then one line
    `<block> <codeword digits> <cost>` per member."""
    lines = [
        f"escape {word_digits(cb.escape_word)} representative "
        f"{block_token(cb.representative)} alpha {cb.cost_function.require_alpha()!r}"
    ]
    for a in cb.assignments:
        x = a.member
        lines.append(f"{block_token(x)} {word_digits(cb.words[x])} {cb.per_word_cost[x]!r}")
    return "\n".join(lines) + "\n"
