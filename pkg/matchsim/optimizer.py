import logging
from dataclasses import dataclass
from itertools import (
    permutations,
    product
)

import numpy as np

from matchsim.market import (
    ALLPROGRAMS,
    generate_market
)
from matchsim.preference import (
    DomainKind,
    draw_spec,
    induce_ranking
)
from matchsim.report import (
    LEXNEST_WEIGHTS,
    AttributeReport,
    InterfaceKind
)
from matchsim.util import threadpool


L = logging.getLogger('matchsim.optimizer')

RANK_PERMUTATIONS = tuple(permutations((1, 2, 3)))
# (university, field, tuition) rank combinations, in enumeration order
RANK_COMBINATIONS = tuple(product(RANK_PERMUTATIONS, repeat=3))
DEFAULT_GRID_STEP = 5
DEFAULT_BUDGET = 5_000_000


class BudgetError(ValueError):
    reason = 'budget'


@dataclass(frozen=True)
class OptimizerResult:
    report: AttributeReport
    kendall: float
    searched: int
    exhaustive: bool = True

    def todict(self):
        return {
            'report': self.report.todict(),
            'kendall': self.kendall,
            'searched': self.searched,
            'exhaustive': self.exhaustive
        }


class _truthpairs:
    """Pairs of programs (better, worse) of a true ranking, as column
    indices of a points matrix whose columns follow `programs`."""
    __slots__ = ('better', 'worse', 'tiebreak', 'total')

    def __init__(self, truth, programs):
        column = {
            p.canonical_id: idx
            for idx, p in enumerate(programs)
        }
        if set(column) != set(truth.order):
            raise ValueError('truth and programs are not over the same items')
        cols = np.array([column[cid] for cid in truth.order])
        cids = np.array(truth.order)
        first, second = np.triu_indices(len(cols), 1)
        self.better = cols[first]
        self.worse = cols[second]
        # on equal points the lower canonical id comes first
        self.tiebreak = cids[second] < cids[first]
        self.total = len(first)

    def discordances(self, points):
        " discordant pair count for each row of a (candidates x programs) matrix "
        pb = points[:, self.better]
        pw = points[:, self.worse]
        flipped = (pw < pb) | ((pw == pb) & self.tiebreak)
        return flipped.sum(axis=1)


def _rankmatrix(combination, programs):
    " (programs x 3) ranks of each bundle under a rank combination "
    uranks, franks, tranks = combination
    return np.array([
        (uranks[p.university], franks[p.field], tranks[p.tuition])
        for p in programs
    ])


def best_lexnest_report(truth, programs=ALLPROGRAMS) -> OptimizerResult:
    """Exhaustive search over the 216 attribute rank combinations for
    the lexicographic report closest (in Kendall distance) to a
    truth. Ties go to the first combination found."""
    pairs = _truthpairs(truth, programs)
    weights = np.array(LEXNEST_WEIGHTS)
    points = np.array([
        _rankmatrix(combination, programs) @ weights
        for combination in RANK_COMBINATIONS
    ])
    discordances = pairs.discordances(points)
    best = int(np.argmin(discordances))
    return OptimizerResult(
        AttributeReport(*RANK_COMBINATIONS[best]),
        float(discordances[best]) / pairs.total,
        len(RANK_COMBINATIONS)
    )


def weight_grid(grid_step=DEFAULT_GRID_STEP):
    if grid_step <= 0:
        raise ValueError(f'grid step must be positive (got {grid_step})')
    steps = 100 / grid_step
    if abs(steps - round(steps)) > 1e-9:
        raise ValueError(f'grid step {grid_step} does not divide 100')
    axis = np.arange(int(round(steps)) + 1) * grid_step
    # lexicographic (w_U, w_F, w_T) order
    return np.array(list(product(axis, axis, axis)), dtype=float)


def best_weight_report(truth, grid_step=DEFAULT_GRID_STEP,
                       budget=DEFAULT_BUDGET,
                       programs=ALLPROGRAMS,
                       workers=1) -> OptimizerResult:
    """Exhaustive search over the rank combinations times the weight
    grid {0, step, ..., 100}^3 for the weighted report closest to a
    truth. Enumeration goes rank combinations first then weights in
    lexicographic order; ties go to the first candidate found.
    """
    grid = weight_grid(grid_step)
    size = len(RANK_COMBINATIONS) * len(grid)
    if size > budget:
        raise BudgetError(
            f'{size} candidates exceed the evaluation budget of {budget}: '
            f'use a coarser grid step than {grid_step}'
        )
    pairs = _truthpairs(truth, programs)
    found = [None] * len(RANK_COMBINATIONS)

    def search(idx):
        points = grid @ _rankmatrix(RANK_COMBINATIONS[idx], programs).T
        discordances = pairs.discordances(points)
        best = int(np.argmin(discordances))
        found[idx] = (int(discordances[best]), best)

    threadpool(max(workers, 1))(
        search, [(idx,) for idx in range(len(RANK_COMBINATIONS))]
    )
    # first minimum in enumeration order
    bestcombo = min(
        range(len(found)),
        key=lambda idx: (found[idx][0], idx)
    )
    discordance, bestweights = found[bestcombo]
    L.info('weight search: %s candidates, minimum %s discordant pairs',
           size, discordance)
    return OptimizerResult(
        AttributeReport(
            *RANK_COMBINATIONS[bestcombo],
            weights=tuple(float(w) for w in grid[bestweights])
        ),
        discordance / pairs.total,
        size
    )


def expressiveness_gap(kind, interface, samples, rng,
                       grid_step=DEFAULT_GRID_STEP,
                       budget=DEFAULT_BUDGET,
                       n=27, workers=1):
    """Distribution of the minimal Kendall distance an attribute
    interface can reach, over freshly drawn markets and specs."""
    kind = DomainKind(kind)
    interface = InterfaceKind(interface)
    if samples < 1:
        raise ValueError(f'at least one sample is needed (got {samples})')
    if interface not in (InterfaceKind.LEXNEST, InterfaceKind.WEIGHT):
        raise ValueError(f'no attribute search for {interface.value}')

    distances = []
    for _ in range(samples):
        market = generate_market(int(rng.integers(2**32)), n)
        truth = induce_ranking(draw_spec(kind, rng), market)
        if interface == InterfaceKind.LEXNEST:
            result = best_lexnest_report(truth, market.programs)
        else:
            result = best_weight_report(
                truth, grid_step, budget, market.programs, workers
            )
        distances.append(result.kendall)

    summary = {
        'domain': kind.value,
        'interface': interface.value,
        'samples': samples,
        'mean': float(np.mean(distances)),
        'min': float(np.min(distances)),
        'max': float(np.max(distances)),
        'distances': distances
    }
    if interface == InterfaceKind.WEIGHT:
        summary['grid_step'] = grid_step
    return summary
