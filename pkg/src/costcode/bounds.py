"""Finite-length converse/achievability bounds and asymptotic rate formulas.

All rates are in base-K units per source symbol; dividing an entropy-like
quantity by the cost capacity alpha_c converts it into a cost rate.  The
converse holds for every prefix code at the given block length and error
budget; the achievability value is met by the interval construction.  For
memoryless sources the first-order limit is (1 - eps) H(X) / alpha_c and the
second-order constant is -(1/alpha_c) sqrt(V(X)/2pi) exp(-(Qinv(eps))^2 / 2),
with V the varentropy and Qinv the inverse Gaussian tail function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .costs import CostFunction, log_base
from .errors import InvalidInputError
from .smooth import g_delta_exact, h_delta_exact
from .sources import Distribution, IidSource, block_distribution, entropy, varentropy

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def gaussian_q(z: float) -> float:
    """Complementary standard Gaussian distribution function Q(z)."""
    return 0.5 * math.erfc(z / _SQRT2)


def inverse_q(epsilon: float) -> float:
    """z with Q(z) = epsilon, to |Q(z) - epsilon| <= 1e-9.

    A rational tail approximation seeds Newton iteration on the Gaussian tail
    integral; bisection picks up the rare non-converging case.
    """
    if not 0.0 < epsilon < 1.0:
        raise InvalidInputError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if epsilon == 0.5:
        return 0.0
    tail = min(epsilon, 1.0 - epsilon)
    t = math.sqrt(-2.0 * math.log(tail))
    z = t - (2.30753 + 0.27061 * t) / (1.0 + 0.99229 * t + 0.04481 * t * t)
    if epsilon > 0.5:
        z = -z
    for _ in range(50):
        err = gaussian_q(z) - epsilon
        if abs(err) <= 1e-15:
            break
        pdf = math.exp(-0.5 * z * z) / _SQRT_2PI
        if pdf <= 0.0:
            break
        z += err / pdf
    if abs(gaussian_q(z) - epsilon) > 1e-9:
        lo, hi = -40.0, 40.0  # Q decreasing: Q(lo) ~ 1, Q(hi) ~ 0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if gaussian_q(mid) > epsilon:
                lo = mid
            else:
                hi = mid
        z = 0.5 * (lo + hi)
    return z


def converse_bound(dn: Distribution, cf: CostFunction, epsilon_n: float, n: int) -> float:
    """Cost rate no prefix code at this block length and error budget can beat."""
    alpha = cf.require_alpha()
    if n < 1:
        raise InvalidInputError("block length must be >= 1")
    g = g_delta_exact(dn, epsilon_n).value
    return g / (alpha * n) + epsilon_n * cf.c_min / n


def achievability_bound(
    dn: Distribution, cf: CostFunction, epsilon_n: float, n: int, gamma: float = 0.01
) -> float:
    """Cost rate the interval construction is guaranteed to reach (slack gamma > 0)."""
    alpha = cf.require_alpha()
    if n < 1:
        raise InvalidInputError("block length must be >= 1")
    if gamma <= 0.0:
        raise InvalidInputError("gamma must be positive")
    g = g_delta_exact(dn, epsilon_n).value
    overhead = (log_base(2.0, cf.K) + gamma) / (alpha * n)
    return g / (alpha * n) + overhead + (2.0 + epsilon_n) * cf.c_max / n


def first_order_rate_iid(s: IidSource, cf: CostFunction, epsilon: float) -> float:
    """Limit of the optimal cost rate for a memoryless source: (1-eps) H(X) / alpha_c.

    The formula extends continuously to epsilon = 0 (the classic zero-error
    rate), which the deviation sequences rely on."""
    alpha = cf.require_alpha()
    if not 0.0 <= epsilon < 1.0:
        raise InvalidInputError(f"epsilon must lie in [0, 1), got {epsilon!r}")
    return (1.0 - epsilon) * entropy(s.single_letter) / alpha


def second_order_rate_iid(s: IidSource, cf: CostFunction, epsilon: float) -> float:
    """Second-order constant at the first-order rate; zero iff the varentropy is zero."""
    alpha = cf.require_alpha()
    if not 0.0 < epsilon < 1.0:
        raise InvalidInputError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    v = varentropy(s.single_letter)
    if v == 0.0:
        return 0.0
    z = inverse_q(epsilon)
    return -(1.0 / alpha) * math.sqrt(v / (2.0 * math.pi)) * math.exp(-0.5 * z * z)


@dataclass
class DeviationRecord:
    n: int
    h_value: float
    deviation: float  # (H_[eps](X^n)/alpha - n R) / sqrt(n)


def second_order_sequence(
    s: IidSource,
    cf: CostFunction,
    epsilon: float,
    n_max: int,
    max_support: int = 1 << 20,
) -> list[DeviationRecord]:
    """Normalized finite-n deviations from the first-order line; they approach the
    second-order constant from the memoryless closed form as n grows."""
    alpha = cf.require_alpha()
    if n_max < 1:
        raise InvalidInputError("n_max must be >= 1")
    rate = first_order_rate_iid(s, cf, epsilon)
    out: list[DeviationRecord] = []
    for n in range(1, n_max + 1):
        dn = block_distribution(s, n, max_support)
        h = h_delta_exact(dn, epsilon).value
        dev = (h / alpha - n * rate) / math.sqrt(n)
        out.append(DeviationRecord(n=n, h_value=h, deviation=dev))
    return out


@dataclass
class BoundReport:
    n: int
    epsilon: float
    gamma: float
    converse: float
    achievability: float
    g_value: float
    h_value: float
    alpha_c: float
    first_order: float | None
    second_order_L: float | None
    K: int
    source_entropy: float
    source_varentropy: float


def bound_report(
    s: IidSource,
    cf: CostFunction,
    epsilon: float,
    n: int,
    gamma: float = 0.01,
    max_support: int = 1 << 20,
) -> BoundReport:
    """Evaluate both finite-length bounds and the rate formulas in one shot."""
    alpha = cf.require_alpha()
    dn = s.single_letter if n == 1 else block_distribution(s, n, max_support)
    g = g_delta_exact(dn, epsilon).value
    h = h_delta_exact(dn, epsilon).value
    conv = g / (alpha * n) + epsilon * cf.c_min / n
    achv = g / (alpha * n) + (log_base(2.0, cf.K) + gamma) / (alpha * n) + (2.0 + epsilon) * cf.c_max / n
    interior = 0.0 < epsilon < 1.0
    return BoundReport(
        n=n,
        epsilon=epsilon,
        gamma=gamma,
        converse=conv,
        achievability=achv,
        g_value=g,
        h_value=h,
        alpha_c=alpha,
        first_order=first_order_rate_iid(s, cf, epsilon),
        second_order_L=second_order_rate_iid(s, cf, epsilon) if interior else None,
        K=cf.K,
        source_entropy=entropy(s.single_letter),
        source_varentropy=varentropy(s.single_letter),
    )


@dataclass
class RelationCheck:
    first_order_diff: float
    second_order_diff: float
    tol: float
    ok: bool


def cost_rate_relation_check(
    r1: BoundReport, r2: BoundReport, tol: float = 1e-9
) -> RelationCheck:
    """Capacity-scaled rates must agree across regular cost functions: both
    alpha_c * first_order and alpha_c * L are cost-function invariants."""
    if r1.K != r2.K:
        raise InvalidInputError("cost functions must share the code alphabet size")
    if r1.epsilon != r2.epsilon:
        raise InvalidInputError("reports were computed at different error budgets")
    if (r1.source_entropy, r1.source_varentropy) != (r2.source_entropy, r2.source_varentropy):
        raise InvalidInputError("reports come from different sources")
    if r1.first_order is None or r2.first_order is None:
        raise InvalidInputError("relation check needs interior epsilon reports")
    d1 = r1.alpha_c * r1.first_order - r2.alpha_c * r2.first_order
    d2 = r1.alpha_c * (r1.second_order_L or 0.0) - r2.alpha_c * (r2.second_order_L or 0.0)
    return RelationCheck(
        first_order_diff=d1,
        second_order_diff=d2,
        tol=tol,
        ok=abs(d1) <= tol and abs(d2) <= tol,
    )
