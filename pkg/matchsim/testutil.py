from matchsim.market import (
    ALLPROGRAMS,
    AttributeCatalog,
    Market,
    Participant
)
from matchsim.preference import InducedRanking
from matchsim.report import FullRankingReport


def remove_metadata(dfrepr):
    if 'Name:' in dfrepr or 'dtype:' in dfrepr:
        return dfrepr[:dfrepr.rindex('\n')]
    return dfrepr


def assert_df(expected, df):
    exp = remove_metadata(expected.strip())
    got = remove_metadata(df.to_string().strip())
    assert exp == got


def toymarket(marks, cids=None, seed=0):
    """A market with given marks (participant i has marks[i]) and
    programs (the first len(marks) canonical ids by default)."""
    marks = list(marks)
    if cids is None:
        cids = range(len(marks))
    programs = tuple(ALLPROGRAMS[cid] for cid in cids)
    return Market(
        catalog=AttributeCatalog(),
        programs=programs,
        participants=tuple(
            Participant(pid, mark)
            for pid, mark in enumerate(marks)
        ),
        market_seed=seed
    )


def truth(*order):
    " a true ranking with decreasing scores, best first "
    return InducedRanking(
        tuple(order),
        {cid: float(len(order) - idx) for idx, cid in enumerate(order)}
    )


def ranking(*order):
    return FullRankingReport(tuple(order))
