import math
from random import Random

import pytest

from costcode import (
    CostFunction,
    InvalidInputError,
    NonRegularCostError,
    ParseError,
    cost_of_word,
    golden_cost,
    memoryless_cost,
    parse_cost_file,
    q_weight,
    random_regular_cost,
    solve_cost_capacity,
    uniform_cost,
    validate_regularity,
)
from costcode.costs import _capacity_gap, all_contexts

GOLDEN_ALPHA = math.log2(2.0 / (math.sqrt(5.0) - 1.0))  # closed form
GOLDEN_T = (math.sqrt(5.0) - 1.0) / 2.0


def depth1_example():
    # c(1|-)=1, c(2|-)=1, c(1|1)=1, c(2|1)=3, c(1|2)=2, c(2|2)=2
    return CostFunction(
        K=2,
        context_depth=1,
        table={(): (1.0, 1.0), (1,): (1.0, 3.0), (2,): (2.0, 2.0)},
    )


def test_cost_of_word_uniform_is_length():
    cf = uniform_cost(2)
    assert cost_of_word(cf, (1, 2, 1, 2, 2)) == 5.0
    rng = Random(3)
    for _ in range(50):
        w = tuple(rng.choice([1, 2]) for _ in range(rng.randint(1, 30)))
        assert cost_of_word(cf, w) == float(len(w))


def test_cost_of_word_memoryless():
    cf = memoryless_cost([1.0, 2.0])
    assert cost_of_word(cf, (1, 2, 2)) == 5.0


def test_cost_of_word_context():
    cf = depth1_example()
    assert cost_of_word(cf, (1, 2, 1)) == 6.0  # 1 + 3 + 2


def test_cost_of_word_rejects_bad_input():
    cf = uniform_cost(2)
    with pytest.raises(InvalidInputError):
        cost_of_word(cf, ())
    with pytest.raises(InvalidInputError):
        cost_of_word(cf, (1, 3))


def test_alpha_uniform_binary():
    cf = uniform_cost(2)
    alpha = solve_cost_capacity(cf)
    assert abs(alpha - 1.0) <= 1e-12
    assert cf.alpha_c == alpha


def test_alpha_uniform_ternary():
    assert abs(solve_cost_capacity(uniform_cost(3)) - 1.0) <= 1e-12


def test_alpha_golden_ratio():
    alpha = solve_cost_capacity(golden_cost())
    assert abs(alpha - GOLDEN_ALPHA) <= 1e-12


def test_solver_rejects_bad_tolerance():
    with pytest.raises(InvalidInputError):
        solve_cost_capacity(uniform_cost(2), tol=0.0)


def test_regularity_uniform_depth1():
    cf = uniform_cost(2, depth=1)
    report = validate_regularity(cf)
    assert report.regular
    for root in report.roots.values():
        assert abs(root - 1.0) <= 1e-12
    assert set(report.roots) == set(all_contexts(2, 1))


def test_regularity_memoryless_single_context():
    report = validate_regularity(memoryless_cost([1.0, 2.0]))
    assert report.regular and len(report.roots) == 1


def test_non_regular_table_detected():
    # per-context roots 1.0 (uniform row) vs golden-ratio row
    cf = CostFunction(
        K=2,
        context_depth=1,
        table={(): (1.0, 1.0), (1,): (1.0, 1.0), (2,): (1.0, 2.0)},
    )
    report = validate_regularity(cf, tol=1e-6)
    assert not report.regular
    assert report.spread > 0.25
    with pytest.raises(NonRegularCostError):
        solve_cost_capacity(cf)


def test_q_weight_uniform():
    cf = uniform_cost(2)
    solve_cost_capacity(cf)
    assert abs(q_weight(cf, (1, 2, 1)) - 0.125) <= 1e-15


def test_q_weight_golden():
    cf = golden_cost()
    solve_cost_capacity(cf)
    assert abs(q_weight(cf, (2,)) - GOLDEN_T**2) <= 1e-12
    total = math.fsum(q_weight(cf, (a, b)) for a in (1, 2) for b in (1, 2))
    assert abs(total - 1.0) <= 1e-9


def test_q_weight_requires_solved_alpha():
    with pytest.raises(InvalidInputError):
        q_weight(golden_cost(), (1,))


@pytest.mark.parametrize("K,depth", [(2, 0), (2, 1), (3, 0), (3, 1)])
def test_q_normalization_random_tables(K, depth):
    rng = Random(1000 + 10 * K + depth)
    for _ in range(5):
        cf = random_regular_cost(rng, K, depth)
        solve_cost_capacity(cf)
        for k in range(1, 5):
            words = [[]]
            for _ in range(k):
                words = [w + [a] for w in words for a in range(1, K + 1)]
            total = math.fsum(q_weight(cf, tuple(w)) for w in words)
            assert abs(total - 1.0) <= 1e-8 * K**k


def test_capacity_gap_strictly_decreasing():
    rng = Random(5)
    for cf in [uniform_cost(2), golden_cost(), random_regular_cost(rng, 3, 1)]:
        for ctx in all_contexts(cf.K, cf.context_depth):
            gaps = [_capacity_gap(cf, ctx, a) for a in [0.05, 0.2, 0.5, 1.0, 2.0, 4.0]]
            assert all(g1 > g2 for g1, g2 in zip(gaps, gaps[1:]))


def test_table_validation():
    with pytest.raises(InvalidInputError):
        CostFunction(K=1, context_depth=0, table={(): (1.0,)})
    with pytest.raises(InvalidInputError):
        CostFunction(K=2, context_depth=0, table={(): (1.0, 0.0)})
    with pytest.raises(InvalidInputError):
        CostFunction(K=2, context_depth=0, table={(): (1.0, math.inf)})
    with pytest.raises(InvalidInputError):
        CostFunction(K=2, context_depth=1, table={(): (1.0, 1.0)})  # missing contexts


def test_parse_cost_file_roundtrip(tmp_path):
    p = tmp_path / "g.cost"
    p.write_text("K 2 depth 0\n- 1 1.0\n- 2 2.0\n")
    cf = parse_cost_file(str(p))
    assert cf.K == 2 and cf.context_depth == 0
    assert cf.table[()] == (1.0, 2.0)
    assert cf.c_min == 1.0 and cf.c_max == 2.0


def test_parse_cost_file_depth1(tmp_path):
    p = tmp_path / "d1.cost"
    p.write_text(
        "K 2 depth 1\n- 1 1.0\n- 2 1.0\n1 1 1.0\n1 2 3.0\n2 1 2.0\n2 2 2.0\n"
    )
    cf = parse_cost_file(str(p))
    assert cf.table[(1,)] == (1.0, 3.0)


@pytest.mark.parametrize(
    "text,line",
    [
        ("hello\n", 1),
        ("K 2 depth 0\n- 1 x\n", 2),
        ("K 2 depth 0\n- 1 1.0\n- 5 1.0\n", 3),
        ("K 2 depth 0\n- 1 1.0\n", 1),  # symbol 2 missing
    ],
)
def test_parse_cost_file_errors(tmp_path, text, line):
    p = tmp_path / "bad.cost"
    p.write_text(text)
    with pytest.raises(ParseError) as exc:
        parse_cost_file(str(p))
    assert f":{line}:" in str(exc.value)
