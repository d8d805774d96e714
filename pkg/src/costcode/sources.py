"""Finite-support source distributions and their information quantities.

Symbols carry strictly positive probability (zeros are dropped on
construction) and all logarithms run in the code-alphabet base K, so entropy
and self-information plug directly into cost-normalized rate formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Hashable, Iterable

from .costs import log_base
from .errors import InvalidInputError, ParseError, SupportBlowupError

Symbol = Hashable

DEFAULT_MAX_SUPPORT = 1 << 20


@dataclass
class Distribution:
    """Ordered finite support with exact-renormalized positive probabilities."""

    support: tuple[Symbol, ...]
    probs: tuple[float, ...]
    base_K: int = 2

    def __post_init__(self):
        if self.base_K < 2:
            raise InvalidInputError("log base must be >= 2")
        if len(self.support) != len(self.probs):
            raise InvalidInputError("support and probability lists differ in length")
        kept = [(s, p) for s, p in zip(self.support, self.probs) if p != 0.0]
        for s, p in kept:
            if not (p > 0.0 and math.isfinite(p)):
                raise InvalidInputError(f"probability {p!r} for symbol {s!r} not positive finite")
        if not kept:
            raise InvalidInputError("distribution needs at least one positive-probability symbol")
        total = math.fsum(p for _, p in kept)
        if abs(total - 1.0) > 1e-9:
            raise InvalidInputError(f"probabilities sum to {total!r}, outside 1 +/- 1e-9")
        self.support = tuple(s for s, _ in kept)
        self.probs = tuple(p / total for _, p in kept)
        if len(set(self.support)) != len(self.support):
            raise InvalidInputError("support symbols must be unique")
        self._index = {s: i for i, s in enumerate(self.support)}

    def __len__(self) -> int:
        return len(self.support)

    def prob(self, x: Symbol) -> float:
        try:
            return self.probs[self._index[x]]
        except KeyError:
            raise InvalidInputError(f"symbol {x!r} not in support") from None

    def index(self, x: Symbol) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise InvalidInputError(f"symbol {x!r} not in support") from None


@dataclass
class IidSource:
    """Stationary memoryless source given by its single-letter distribution."""

    single_letter: Distribution


def self_information(d: Distribution, x: Symbol) -> float:
    """log_K(1/P(x)) for a supported symbol."""
    return log_base(1.0 / d.prob(x), d.base_K)


def entropy(d: Distribution) -> float:
    """Average self-information, base K."""
    return math.fsum(p * log_base(1.0 / p, d.base_K) for p in d.probs)


def varentropy(d: Distribution) -> float:
    """Variance of self-information; exactly 0.0 when it is constant (uniform, point mass)."""
    infos = [log_base(1.0 / p, d.base_K) for p in d.probs]
    if min(infos) == max(infos):
        return 0.0
    h = math.fsum(p * s for p, s in zip(d.probs, infos))
    return math.fsum(p * (s - h) ** 2 for p, s in zip(d.probs, infos))


def block_distribution(
    s: IidSource, n: int, max_support: int = DEFAULT_MAX_SUPPORT
) -> Distribution:
    """Product distribution over ordered n-tuples of source letters.

    Tuples are enumerated lexicographically in support order, which fixes the
    canonical block ordering used by the coder.  Each block probability is the
    product over letter counts in a fixed letter order, so equal-composition
    blocks get bit-identical floats and group into exact type classes.
    """
    if n < 1:
        raise InvalidInputError("block length must be >= 1")
    d = s.single_letter
    m = len(d)
    if m ** n > max_support:
        raise SupportBlowupError(
            f"support of size {m}^{n} exceeds the limit of {max_support} symbols"
        )
    prob_of_counts: dict[tuple[int, ...], float] = {}
    blocks: list[tuple[Symbol, ...]] = []
    probs: list[float] = []
    for idx_tuple in product(range(m), repeat=n):
        counts = [0] * m
        for i in idx_tuple:
            counts[i] += 1
        key = tuple(counts)
        p = prob_of_counts.get(key)
        if p is None:
            p = math.prod(d.probs[i] ** c for i, c in enumerate(counts) if c)
            prob_of_counts[key] = p
        blocks.append(tuple(d.support[i] for i in idx_tuple))
        probs.append(p)
    return Distribution(support=tuple(blocks), probs=tuple(probs), base_K=d.base_K)


def conditional_on_set(
    d: Distribution, members: Iterable[Symbol]
) -> tuple[Distribution, float]:
    """Restrict to a subset and renormalize; returns (conditional, mass of the subset)."""
    wanted = set(members)
    if not wanted:
        raise InvalidInputError("conditioning set must be non-empty")
    unknown = wanted - set(d.support)
    if unknown:
        raise InvalidInputError(f"conditioning set contains unknown symbol {next(iter(unknown))!r}")
    pairs = [(s, p) for s, p in zip(d.support, d.probs) if s in wanted]
    mass = math.fsum(p for _, p in pairs)
    cond = Distribution(
        support=tuple(s for s, _ in pairs),
        probs=tuple(p / mass for _, p in pairs),
        base_K=d.base_K,
    )
    return cond, mass


def bernoulli(p: float, base_K: int = 2) -> Distribution:
    """Two-symbol distribution over 0/1 with P(1) = p."""
    return Distribution(support=(0, 1), probs=(1.0 - p, p), base_K=base_K)


def uniform(m: int, base_K: int = 2) -> Distribution:
    """Uniform distribution over symbols 0..m-1."""
    return Distribution(support=tuple(range(m)), probs=tuple(1.0 / m for _ in range(m)), base_K=base_K)


def parse_distribution_file(path: str, base_K: int | None = None) -> Distribution:
    """Read `K <int>` then `<symbol> <probability>` lines; symbols are arbitrary tokens."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    header_seen = False
    K = 2
    symbols: list[Symbol] = []
    probs: list[float] = []
    for line_no, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.split()
        if not header_seen:
            if len(parts) != 2 or parts[0] != "K":
                raise ParseError(path, line_no, "expected header `K <int>`")
            try:
                K = int(parts[1])
            except ValueError:
                raise ParseError(path, line_no, "K must be an integer") from None
            header_seen = True
            continue
        if len(parts) != 2:
            raise ParseError(path, line_no, "expected `<symbol> <probability>`")
        try:
            p = float(parts[1])
        except ValueError:
            raise ParseError(path, line_no, f"bad probability {parts[1]!r}") from None
        symbols.append(parts[0])
        probs.append(p)
    if not header_seen:
        raise ParseError(path, 1, "missing header line")
    try:
        return Distribution(
            support=tuple(symbols), probs=tuple(probs), base_K=base_K if base_K else K
        )
    except InvalidInputError as exc:
        raise ParseError(path, 1, str(exc)) from None
