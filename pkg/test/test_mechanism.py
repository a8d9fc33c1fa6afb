from itertools import (
    permutations,
    product
)

import numpy as np
import pytest

from matchsim.market import (
    PriorityOrder,
    generate_market,
    priority_of
)
from matchsim.mechanism import (
    EMPTY,
    MechanismTrace,
    TurnError,
    rp_draws,
    run_sd,
    session_choose,
    session_menu,
    session_new,
    simulate_rp
)
from matchsim.preference import (
    draw_spec,
    induce_ranking
)
from matchsim.report import FullRankingReport
from matchsim.testutil import (
    ranking,
    toymarket,
    truth
)


def test_run_sd():
    priority = PriorityOrder((2, 0, 1))
    reports = {
        0: ranking(10, 11, 12),
        1: ranking(10, 11, 12),
        2: ranking(11, 10, 12)
    }
    allocation, trace = run_sd(priority, reports)
    assert allocation.assignment == {2: 11, 0: 10, 1: 12}
    assert allocation.feasible()
    assert allocation.holder() == {11: 2, 10: 0, 12: 1}
    assert [t.available for t in trace] == [
        (10, 11, 12),
        (10, 12),
        (12,)
    ]
    assert MechanismTrace.fromdict(trace.todict()) == trace


def test_run_sd_more_participants_than_programs():
    priority = PriorityOrder((0, 1, 2))
    reports = {
        0: ranking(5, 6),
        1: ranking(5, 6),
        2: ranking(6, 5)
    }
    allocation, trace = run_sd(priority, reports)
    assert allocation.assignment == {0: 5, 1: 6, 2: None}
    assert trace.turns[-1].available == ()

    with pytest.raises(ValueError):
        run_sd(priority, {0: ranking(5, 6)})


def test_sequential_session():
    market = toymarket([90, 50, 10], cids=(0, 1, 2))
    session = session_new(market, priority_of(market))
    assert session.current == 0
    assert session_menu(session) == (0, 1, 2)

    with pytest.raises(TurnError) as err:
        session_choose(session, 1, 0)
    assert err.value.reason == 'out-of-turn'

    with pytest.raises(TurnError) as err:
        session_choose(session, 0, 7)
    assert err.value.reason == 'not-in-menu'

    session_choose(session, 0, 1)
    assert session_menu(session) == (0, 2)
    # an empty choice takes nothing
    session_choose(session, 1, EMPTY)
    assert session_menu(session) == (0, 2)
    session_choose(session, 2, 2)
    assert session.done
    assert session.current is None
    assert session.allocation.assignment == {0: 1, 1: None, 2: 2}
    assert [t.action for t in session.trace] == [1, None, 2]

    with pytest.raises(TurnError) as err:
        session_choose(session, 2, 0)
    assert err.value.reason == 'session-complete'


def test_sequential_equals_direct():
    rng = np.random.default_rng(3)
    for seed in range(10):
        market = generate_market(seed)
        priority = priority_of(market)
        truths = {
            p.participant_id: induce_ranking(draw_spec('COMP', rng), market)
            for p in market.participants
        }
        reports = {
            pid: FullRankingReport(t.order)
            for pid, t in truths.items()
        }
        direct, _ = run_sd(priority, reports, market.program_ids)

        session = session_new(market, priority)
        while not session.done:
            pid = session.current
            session.choose(pid, truths[pid].best_in(session.menu()))
        assert session.allocation.assignment == direct.assignment


def greedy(market, reports):
    " hand each participant, best mark first, their first free program "
    taken = {}
    for p in sorted(market.participants, key=lambda p: -p.mark):
        pid = p.participant_id
        taken[pid] = next(
            cid for cid in reports[pid].order
            if cid not in taken.values()
        )
    return taken


@pytest.mark.perf
def test_run_sd_matches_greedy():
    rng = np.random.default_rng(4)
    for seed in range(1000):
        market = generate_market(seed)
        reports = {
            p.participant_id: FullRankingReport(
                tuple(int(cid) for cid in rng.permutation(27))
            )
            for p in market.participants
        }
        allocation, trace = run_sd(priority_of(market), reports, market.program_ids)
        assert allocation.assignment == greedy(market, reports)
        assert sorted(allocation.assignment.values()) == list(range(27))
        assert [len(turn.available) for turn in trace] == list(range(27, 0, -1))


def test_strategy_proofness():
    items = (0, 1, 2)
    orders = list(permutations(items))
    priority = PriorityOrder((0, 1, 2))
    for profile in product(orders, repeat=3):
        reports = {
            pid: ranking(*order)
            for pid, order in enumerate(profile)
        }
        allocation, _ = run_sd(priority, reports, items)
        for pid, order in enumerate(profile):
            honest = truth(*order).rank_of(allocation[pid])
            for lie in orders:
                lied, _ = run_sd(
                    priority,
                    {**reports, pid: ranking(*lie)},
                    items
                )
                assert truth(*order).rank_of(lied[pid]) >= honest


def test_random_priority():
    reports = {
        pid: ranking(0, 1, 2)
        for pid in range(3)
    }
    truths = {pid: truth(0, 1, 2) for pid in range(3)}

    with pytest.raises(ValueError):
        list(rp_draws(reports, 0, np.random.default_rng(0)))

    draws = list(rp_draws(reports, 50, np.random.default_rng(0)))
    assert len(draws) == 50
    firsts = {priority.ordering[0] for priority, _, _ in draws}
    assert firsts == {0, 1, 2}
    for priority, allocation, _ in draws:
        assert allocation[priority.ordering[0]] == 0

    assert simulate_rp(reports, truths, 20, np.random.default_rng(1)) == 1.

    # everybody lists its true worst first
    liars = {pid: ranking(2, 1, 0) for pid in range(3)}
    accuracy = simulate_rp(liars, truths, 20, np.random.default_rng(1))
    # only the last one, left with the one program, is accurate
    assert accuracy == pytest.approx(1 / 3)
