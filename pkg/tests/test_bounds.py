import math
from random import Random

import pytest

from costcode import (
    Distribution,
    IidSource,
    InvalidInputError,
    achievability_bound,
    bernoulli,
    block_distribution,
    bound_report,
    converse_bound,
    cost_rate_relation_check,
    entropy,
    first_order_rate_iid,
    gaussian_q,
    golden_cost,
    inverse_q,
    second_order_rate_iid,
    second_order_sequence,
    solve_cost_capacity,
    uniform,
    uniform_cost,
    varentropy,
)
from reference import q_inverse_by_bisection

B3 = bernoulli(0.3)
POINT = Distribution(support=("x",), probs=(1.0,))


def unit2():
    cf = uniform_cost(2)
    solve_cost_capacity(cf)
    return cf


def golden():
    cf = golden_cost()
    solve_cost_capacity(cf)
    return cf


def test_converse_examples():
    cf = unit2()
    assert converse_bound(uniform(4), cf, 0.0, 1) == 2.0
    assert converse_bound(POINT, cf, 0.3, 1) == 0.3
    expected = 0.75 * math.log2(3.0) + 0.25
    assert abs(converse_bound(uniform(4), cf, 0.25, 1) - expected) <= 1e-12


def test_achievability_examples():
    cf = unit2()
    assert abs(achievability_bound(uniform(4), cf, 0.0, 1, 0.01) - 5.01) <= 1e-9
    assert abs(achievability_bound(POINT, cf, 0.0, 1, 0.01) - 3.01) <= 1e-9
    d4 = block_distribution(IidSource(uniform(4)), 4)
    assert abs(achievability_bound(d4, cf, 0.0, 4, 0.01) - 2.7525) <= 1e-9


def test_achievability_needs_positive_gamma():
    cf = unit2()
    with pytest.raises(InvalidInputError):
        achievability_bound(uniform(4), cf, 0.0, 1, 0.0)


def test_converse_below_achievability():
    rng = Random(3)
    for _ in range(30):
        m = rng.randint(1, 8)
        raw = [rng.random() + 0.01 for _ in range(m)]
        total = sum(raw)
        d = Distribution(support=tuple(range(m)), probs=tuple(r / total for r in raw))
        cf = unit2()
        eps = rng.choice([0.0, 0.1, 0.3])
        conv = converse_bound(d, cf, eps, 1)
        assert 0.0 <= conv <= achievability_bound(d, cf, eps, 1, 0.01)


def test_first_order_examples():
    cf = unit2()
    assert first_order_rate_iid(IidSource(bernoulli(0.5)), cf, 0.5) == 0.5
    r = first_order_rate_iid(IidSource(B3), cf, 0.1)
    assert abs(r - 0.9 * entropy(B3)) <= 1e-12
    assert abs(r - 0.793162) <= 1e-6
    cfg = golden()
    rg = first_order_rate_iid(IidSource(B3), cfg, 0.1)
    assert abs(rg - r / cfg.alpha_c) <= 1e-12
    assert abs(rg - 1.14249) <= 1e-5
    with pytest.raises(InvalidInputError):
        first_order_rate_iid(IidSource(B3), cf, 1.0)


def test_inverse_q_values():
    assert inverse_q(0.5) == 0.0
    assert abs(inverse_q(0.15865525393145707) - 1.0) <= 1e-8
    assert abs(inverse_q(0.025) - 1.959964) <= 1e-6
    for eps in (0.001, 0.2, 0.7, 0.999):
        assert abs(inverse_q(eps) - q_inverse_by_bisection(eps)) <= 1e-8
    with pytest.raises(InvalidInputError):
        inverse_q(0.0)
    with pytest.raises(InvalidInputError):
        inverse_q(1.0)


def test_inverse_q_grid():
    for i in range(50):
        eps = 0.001 + (0.998 * i) / 49.0
        assert abs(gaussian_q(inverse_q(eps)) - eps) <= 1e-9


def test_second_order_zero_varentropy():
    cf = unit2()
    assert second_order_rate_iid(IidSource(uniform(4)), cf, 0.3) == 0.0
    assert second_order_rate_iid(IidSource(POINT), cf, 0.3) == 0.0


def test_second_order_bernoulli():
    cf = unit2()
    v = varentropy(B3)
    expected = -math.sqrt(v / (2.0 * math.pi))
    got = second_order_rate_iid(IidSource(B3), cf, 0.5)
    assert abs(got - expected) <= 1e-12
    assert abs(got - (-0.2234757285876084)) <= 1e-12
    cfg = golden()
    got_g = second_order_rate_iid(IidSource(B3), cfg, 0.5)
    assert abs(got_g - expected / cfg.alpha_c) <= 1e-12


def test_second_order_never_positive():
    rng = Random(5)
    cf = unit2()
    for _ in range(30):
        m = rng.randint(1, 6)
        raw = [rng.random() + 0.01 for _ in range(m)]
        total = sum(raw)
        d = Distribution(support=tuple(range(m)), probs=tuple(r / total for r in raw))
        eps = 0.05 + 0.9 * rng.random()
        L = second_order_rate_iid(IidSource(d), cf, eps)
        assert L <= 0.0
        if varentropy(d) > 1e-12:
            assert L < 0.0


def test_second_order_sequence_trivial_sources():
    cf = unit2()
    for rec in second_order_sequence(IidSource(POINT), cf, 0.3, 5):
        assert rec.deviation == 0.0
    for rec in second_order_sequence(IidSource(bernoulli(0.5)), cf, 0.0, 5):
        assert abs(rec.deviation) <= 1e-12


def test_bound_report_and_relation_check():
    cf = unit2()
    cfg = golden()
    src = IidSource(B3)
    r1 = bound_report(src, cf, 0.1, 1)
    r2 = bound_report(src, cfg, 0.1, 1)
    assert r1.converse <= r1.achievability
    assert r1.first_order is not None and r1.second_order_L is not None
    check = cost_rate_relation_check(r1, r2)
    assert check.ok
    assert abs(check.first_order_diff) <= 1e-9
    assert abs(check.second_order_diff) <= 1e-9
    same = cost_rate_relation_check(r1, r1)
    assert same.first_order_diff == 0.0 and same.second_order_diff == 0.0


def test_relation_check_rejects_mismatches():
    cf = unit2()
    cfg = golden()
    cf3 = uniform_cost(3)
    solve_cost_capacity(cf3)
    src = IidSource(B3)
    r1 = bound_report(src, cf, 0.1, 1)
    r3 = bound_report(IidSource(Distribution(support=(0, 1), probs=(0.7, 0.3), base_K=3)), cf3, 0.1, 1)
    with pytest.raises(InvalidInputError):
        cost_rate_relation_check(r1, r3)
    r_eps = bound_report(src, cfg, 0.2, 1)
    with pytest.raises(InvalidInputError):
        cost_rate_relation_check(r1, r_eps)
    r_other = bound_report(IidSource(bernoulli(0.4)), cf, 0.1, 1)
    with pytest.raises(InvalidInputError):
        cost_rate_relation_check(r1, r_other)
