import numpy as np
import pytest

from matchsim.market import generate_market
from matchsim.metrics import kendall_distance
from matchsim.optimizer import (
    RANK_COMBINATIONS,
    BudgetError,
    best_lexnest_report,
    best_weight_report,
    expressiveness_gap,
    weight_grid
)
from matchsim.preference import (
    UtilitySpec,
    draw_spec,
    induce_ranking
)
from matchsim.report import expand


# tie free, and its university gaps (4000 then 12000) are not equal
WITNESS = UtilitySpec('SEP', 40, 35, 30)


def test_weight_grid():
    grid = weight_grid(50)
    assert grid.shape == (27, 3)
    assert tuple(grid[0]) == (0, 0, 0)
    assert tuple(grid[1]) == (0, 0, 50)
    assert tuple(grid[-1]) == (100, 100, 100)
    assert len(weight_grid(5)) == 21 ** 3
    with pytest.raises(ValueError):
        weight_grid(7)
    with pytest.raises(ValueError):
        weight_grid(0)
    assert len(RANK_COMBINATIONS) == 216


def test_lex_is_expressible():
    rng = np.random.default_rng(0)
    for seed in range(5):
        market = generate_market(seed)
        truth = induce_ranking(draw_spec('LEX', rng), market)
        lexnest = best_lexnest_report(truth)
        assert lexnest.kendall == 0
        assert lexnest.searched == 216
        assert expand('LEXNEST', lexnest.report).order == truth.order

    weight = best_weight_report(truth, grid_step=10)
    assert weight.kendall == 0
    assert weight.searched == 216 * 11 ** 3
    assert expand('WEIGHT', weight.report).order == truth.order


def test_separable_witness():
    for seed in range(3):
        market = generate_market(seed)
        truth = induce_ranking(WITNESS, market)
        assert not truth.ties

        lexnest = best_lexnest_report(truth)
        assert lexnest.kendall > 0
        coarse = best_weight_report(truth, grid_step=20)
        assert coarse.kendall > 0
        finer = best_weight_report(truth, grid_step=10)
        assert 0 < finer.kendall <= coarse.kendall


@pytest.mark.perf
def test_separable_witness_fine_grid():
    truth = induce_ranking(WITNESS, generate_market(0))
    result = best_weight_report(truth, grid_step=5, workers=4)
    assert result.kendall > 0
    assert result.kendall <= best_weight_report(truth, grid_step=10).kendall


def test_certificates():
    rng = np.random.default_rng(1)
    market = generate_market(1)
    for kind in ('SEP', 'COMP'):
        truth = induce_ranking(draw_spec(kind, rng), market)
        lexnest = best_lexnest_report(truth)
        assert kendall_distance(
            expand('LEXNEST', lexnest.report), truth
        ) == pytest.approx(lexnest.kendall)
        weight = best_weight_report(truth, grid_step=20)
        assert kendall_distance(
            expand('WEIGHT', weight.report), truth
        ) == pytest.approx(weight.kendall)
        # finer grids hold the coarser ones
        assert best_weight_report(truth, grid_step=10).kendall <= weight.kendall


def test_workers():
    truth = induce_ranking(WITNESS, generate_market(5))
    single = best_weight_report(truth, grid_step=20)
    many = best_weight_report(truth, grid_step=20, workers=4)
    assert single == many


def test_budget():
    truth = induce_ranking(WITNESS, generate_market(0))
    with pytest.raises(BudgetError) as err:
        best_weight_report(truth, grid_step=5, budget=1000)
    assert err.value.reason == 'budget'
    assert 'coarser' in str(err.value)


def test_toy_market():
    market = generate_market(8, 6)
    truth = induce_ranking(WITNESS, market)
    result = best_lexnest_report(truth, market.programs)
    assert 0 <= result.kendall <= 1
    assert kendall_distance(
        expand('LEXNEST', result.report, market.programs), truth
    ) == pytest.approx(result.kendall)


def test_expressiveness_gap():
    lex = expressiveness_gap('LEX', 'LEXNEST', 5, np.random.default_rng(0))
    assert lex['mean'] == 0
    assert lex['samples'] == 5
    assert len(lex['distances']) == 5
    assert 'grid_step' not in lex

    sep = expressiveness_gap('SEP', 'LEXNEST', 5, np.random.default_rng(0))
    assert sep['min'] > 0

    weight = expressiveness_gap(
        'COMP', 'WEIGHT', 2, np.random.default_rng(0), grid_step=20
    )
    assert weight['grid_step'] == 20
    assert weight['min'] <= weight['mean'] <= weight['max']

    with pytest.raises(ValueError):
        expressiveness_gap('SEP', 'CHOICE', 5, np.random.default_rng(0))
    with pytest.raises(ValueError):
        expressiveness_gap('SEP', 'LEXNEST', 0, np.random.default_rng(0))


@pytest.mark.perf
def test_lex_is_always_expressible():
    rng = np.random.default_rng(42)
    gap = expressiveness_gap('LEX', 'LEXNEST', 1000, rng)
    assert gap['max'] == 0
