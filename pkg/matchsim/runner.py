import json
import logging
from dataclasses import (
    dataclass,
    field
)
from pathlib import Path
from typing import (
    Dict,
    List,
    Tuple
)

import numpy as np
import pandas as pd
from tqdm import tqdm

from matchsim.agent import (
    AgentPolicy,
    act
)
from matchsim.market import (
    NPROGRAMS,
    Market,
    generate_market,
    priority_of
)
from matchsim.mechanism import (
    MechanismTrace,
    rp_draws,
    run_sd,
    session_new
)
from matchsim.metrics import (
    MarketMetrics,
    MetricsRow,
    choice_accuracy,
    efficiency_loss,
    justified_envy,
    kendall_distance,
    payoff_accuracy,
    payoff_rank,
    top_accuracy,
    true_ranks,
    utilitarian_loss
)
from matchsim.preference import (
    DomainKind,
    UtilitySpec,
    draw_spec,
    induce_ranking
)
from matchsim.report import (
    InterfaceKind,
    expand
)
from matchsim.util import (
    rngstream,
    threadpool
)


L = logging.getLogger('matchsim.runner')

# treatment name -> interface, in a fixed order which also keys the
# random streams of each treatment
TREATMENTS = {
    'ACCURACY': InterfaceKind.ACCURACY,
    'SD-DIRECT': InterfaceKind.DIRECT,
    'SD-WEIGHT': InterfaceKind.WEIGHT,
    'SD-LEX': InterfaceKind.LEXNEST,
    'SD-CHOICE': InterfaceKind.CHOICE
}
TREATMENT_INDEX = {
    name: idx for idx, name in enumerate(TREATMENTS)
}
ALLDOMAINS = tuple(DomainKind)

ROW_COLUMNS = [
    'treatment', 'domain', 'session', 'round', 'participant', 'mark',
    'accuracy', 'kendall', 'envy', 'true_rank', 'payoff',
    'menu_size', 'top_accuracy'
]
MARKET_COLUMNS = [
    'treatment', 'domain', 'session', 'round', 'market_seed',
    'efficiency_loss', 'efficiency_loss_m', 'accuracy_mean',
    'envy_share', 'utilitarian_loss'
]


class ConfigError(ValueError):

    def __init__(self, reason, message):
        self.reason = reason
        super().__init__(message)


@dataclass(frozen=True)
class RunConfig:
    treatments: Tuple[str, ...] = tuple(TREATMENTS)
    markets: int = 72  # per treatment: 6 sessions x 12 rounds
    rounds: int = 12
    domains: Tuple[DomainKind, ...] = ALLDOMAINS
    n: int = NPROGRAMS
    draws: int = 100
    seed: int = 0
    workers: int = 1
    policy: AgentPolicy = AgentPolicy()
    utilitarian: bool = False

    def __post_init__(self):
        unknown = set(self.treatments) - set(TREATMENTS)
        if unknown or not self.treatments:
            raise ConfigError(
                'treatments',
                f'unknown or missing treatments {sorted(unknown)} '
                f'(choose among {list(TREATMENTS)})'
            )
        if len(set(self.treatments)) != len(self.treatments):
            raise ConfigError('treatments', 'duplicate treatments')
        try:
            domains = tuple(DomainKind(d) for d in self.domains)
        except ValueError as exc:
            raise ConfigError('domains', str(exc))
        if not domains or len(set(domains)) != len(domains):
            raise ConfigError('domains', f'bad domain list {self.domains}')
        object.__setattr__(self, 'domains', domains)
        if self.rounds < 1 or self.rounds % len(domains):
            raise ConfigError(
                'rounds',
                f'{self.rounds} rounds cannot be split in blocks '
                f'of {len(domains)} domains'
            )
        if self.markets < 0 or self.markets % self.rounds:
            raise ConfigError(
                'markets',
                f'{self.markets} markets is not a whole number of '
                f'sessions of {self.rounds} rounds'
            )
        if not 1 <= self.n <= NPROGRAMS:
            raise ConfigError('n', f'market size {self.n} outside 1..{NPROGRAMS}')
        if self.draws < 1:
            raise ConfigError('draws', f'draws must be positive (got {self.draws})')
        if self.workers < 1:
            raise ConfigError('workers', f'workers must be positive (got {self.workers})')

    @property
    def sessions(self):
        return self.markets // self.rounds

    def todict(self):
        return {
            'treatments': list(self.treatments),
            'markets': self.markets,
            'rounds': self.rounds,
            'domains': [d.value for d in self.domains],
            'n': self.n,
            'draws': self.draws,
            'seed': self.seed,
            'workers': self.workers,
            'policy': self.policy.todict(),
            'utilitarian': self.utilitarian
        }

    @classmethod
    def fromdict(cls, doc, defaults=None):
        merged = dict(defaults or {})
        merged.update(doc)
        policy = dict((defaults or {}).get('policy', {}))
        policy.update(doc.get('policy', {}))

        unknown = set(merged) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError('unknown-keys', f'unknown config keys {sorted(unknown)}')
        try:
            kw = {}
            for name in ('markets', 'rounds', 'n', 'draws', 'seed', 'workers'):
                if name in merged:
                    kw[name] = int(merged[name])
            if 'treatments' in merged:
                kw['treatments'] = tuple(_aslist(merged['treatments']))
            if 'domains' in merged:
                kw['domains'] = tuple(
                    str(d).upper() for d in _aslist(merged['domains'])
                )
            if 'utilitarian' in merged:
                kw['utilitarian'] = _asbool(merged['utilitarian'])
            kw['policy'] = AgentPolicy.fromdict(policy)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError('invalid', f'invalid config: {exc}')
        return cls(**kw)

    @classmethod
    def fromfile(cls, path, defaults=None):
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError('json', f'{path} is not a json document ({exc})')
        if not isinstance(doc, dict):
            raise ConfigError('json', f'{path} must hold a json object')
        return cls.fromdict(doc, defaults)


def _aslist(value):
    # ini defaults come as comma separated strings
    if isinstance(value, str):
        return [v.strip() for v in value.split(',') if v.strip()]
    return list(value)


def _asbool(value):
    if isinstance(value, str):
        return value.strip().lower() in ('1', 'true', 'yes', 'on')
    return bool(value)


@dataclass
class MarketResult:
    treatment: str
    session: int
    round: int
    domain: DomainKind
    market: Market
    specs: Dict[int, UtilitySpec]
    reports: Dict[int, object]
    trace: MechanismTrace
    rows: List[MetricsRow]
    metrics: MarketMetrics

    def tojson(self):
        return {
            'treatment': self.treatment,
            'session': self.session,
            'round': self.round,
            'domain': self.domain.value,
            'market': self.market.tojson(),
            'specs': {
                str(pid): spec.todict()
                for pid, spec in self.specs.items()
            },
            'reports': {
                str(pid): report.todict()
                for pid, report in self.reports.items()
            },
            'trace': self.trace.todict(),
            'metrics': self.metrics.todict()
        }


@dataclass
class RunRecord:
    config: RunConfig
    results: List[MarketResult] = field(default_factory=list)

    def rows(self) -> pd.DataFrame:
        rows = [
            {
                'treatment': res.treatment,
                'domain': res.domain.value,
                'session': res.session,
                'round': res.round,
                'participant': row.participant_id,
                'mark': row.mark,
                'accuracy': row.choice_accuracy,
                'kendall': row.kendall,
                'envy': row.justified_envy,
                'true_rank': row.true_rank,
                'payoff': row.payoff,
                'menu_size': row.menu_size,
                'top_accuracy': row.top_accuracy
            }
            for res in self.results
            for row in res.rows
        ]
        df = pd.DataFrame(rows, columns=ROW_COLUMNS)
        df['true_rank'] = df['true_rank'].astype('Int64')
        # same dtypes whatever the treatments
        for column in ('accuracy', 'kendall', 'payoff'):
            df[column] = df[column].astype('float64')
        return df

    def markets(self) -> pd.DataFrame:
        rows = [
            {
                'treatment': res.treatment,
                'domain': res.domain.value,
                'session': res.session,
                'round': res.round,
                'market_seed': res.market.market_seed,
                **res.metrics.todict()
            }
            for res in self.results
        ]
        df = pd.DataFrame(rows, columns=MARKET_COLUMNS)
        df['utilitarian_loss'] = df['utilitarian_loss'].astype('float64')
        return df

    def tojson(self):
        return {
            'config': self.config.todict(),
            'markets': [res.tojson() for res in self.results]
        }


def schedule_blocks(rounds, rng, domains=ALLDOMAINS) -> List[DomainKind]:
    """Domain of each round: rounds / len(domains) blocks, each a
    random permutation of the domains."""
    domains = tuple(DomainKind(d) for d in domains)
    if rounds < 1 or rounds % len(domains):
        raise ConfigError(
            'rounds',
            f'{rounds} rounds cannot be split in blocks of {len(domains)}'
        )
    sequence = []
    for _ in range(rounds // len(domains)):
        sequence.extend(
            domains[idx] for idx in rng.permutation(len(domains))
        )
    return sequence


def run_market(config: RunConfig, treatment, session, rnd, domain, rng) -> MarketResult:
    """One market of a treatment: draw it, let the agents report or
    choose, run the mechanism and measure the outcome."""
    interface = TREATMENTS[treatment]
    policy = config.policy
    market = generate_market(int(rng.integers(2**32)), config.n)
    specs = {
        p.participant_id: draw_spec(domain, rng)
        for p in market.participants
    }
    truths = {
        pid: induce_ranking(spec, market)
        for pid, spec in specs.items()
    }
    marks = market.marks()

    def submit(pid, menu=None):
        return act(
            policy, specs[pid], market, interface, marks[pid],
            menu=menu, rng=rng, truth=truths[pid]
        )

    submitted = {}
    if interface == InterfaceKind.CHOICE:
        priority = priority_of(market)
        sdsession = session_new(market, priority)
        while not sdsession.done:
            pid = sdsession.current
            sdsession.choose(pid, submit(pid, sdsession.menu()))
        allocation, trace = sdsession.allocation, sdsession.trace
        rankings = None
        accuracy = choice_accuracy(trace, truths)
    elif interface == InterfaceKind.ACCURACY:
        submitted = {pid: submit(pid) for pid in truths}
        rankings = submitted
        hits = {pid: 0 for pid in truths}
        first = None
        for draw in rp_draws(rankings, config.draws, rng, market.program_ids):
            first = first or draw
            for pid, hit in choice_accuracy(draw[2], truths, rankings).items():
                hits[pid] += hit
        accuracy = {pid: hits[pid] / config.draws for pid in truths}
        # outcomes of the first simulated market stand for the allocation
        priority, allocation, trace = first
    else:
        priority = priority_of(market)
        submitted = {pid: submit(pid) for pid in truths}
        rankings = {
            pid: expand(interface, report, market.programs)
            for pid, report in submitted.items()
        }
        allocation, trace = run_sd(priority, rankings, market.program_ids)
        accuracy = choice_accuracy(trace, truths, rankings)

    envy, share = justified_envy(market, truths, allocation, priority)
    ranks = true_ranks(truths, allocation)
    turns = trace.byparticipant()
    rows = []
    for p in market.participants:
        pid = p.participant_id
        kendall = (
            None if rankings is None
            else kendall_distance(rankings[pid], truths[pid])
        )
        rows.append(
            MetricsRow(
                participant_id=pid,
                choice_accuracy=accuracy[pid],
                kendall=kendall,
                justified_envy=envy[pid],
                true_rank=ranks[pid],
                payoff=(
                    payoff_accuracy(kendall)
                    if interface == InterfaceKind.ACCURACY
                    else payoff_rank(ranks[pid])
                ),
                mark=p.mark,
                menu_size=len(turns[pid].available),
                top_accuracy=(
                    accuracy[pid] if rankings is None
                    else top_accuracy(rankings[pid], truths[pid])
                )
            )
        )

    metrics = MarketMetrics(
        efficiency_loss=efficiency_loss(market, truths, allocation, priority),
        efficiency_loss_m=efficiency_loss(
            market, truths, allocation, priority, denominator='M'
        ),
        accuracy_mean=float(np.mean([accuracy[pid] for pid in truths])),
        envy_share=share,
        utilitarian_loss=(
            utilitarian_loss(market, truths, allocation)
            if config.utilitarian else None
        )
    )
    return MarketResult(
        treatment=treatment,
        session=session + 1,
        round=rnd + 1,
        domain=DomainKind(domain),
        market=market,
        specs=specs,
        reports=submitted,
        trace=trace,
        rows=rows,
        metrics=metrics
    )


def _jobs(config: RunConfig):
    jobs = []
    for treatment in config.treatments:
        tidx = TREATMENT_INDEX[treatment]
        for session in range(config.sessions):
            domains = schedule_blocks(
                config.rounds,
                rngstream(config.seed, tidx, session, 0),
                config.domains
            )
            for rnd, domain in enumerate(domains):
                jobs.append((tidx, treatment, session, rnd, domain))
    return jobs


def run_batch(config: RunConfig, progress=False) -> RunRecord:
    """Run every market of every treatment of a configuration.

    Each market draws from its own stream, keyed by (seed, treatment,
    session, round): the record does not depend on the number of
    workers nor on the order in which they finish.
    """
    jobs = _jobs(config)
    L.info('running %s markets (%s) with %s workers',
           len(jobs), ', '.join(config.treatments), config.workers)
    results = [None] * len(jobs)
    bar = tqdm(total=len(jobs), disable=not progress, unit='market')

    def work(idx):
        tidx, treatment, session, rnd, domain = jobs[idx]
        results[idx] = run_market(
            config, treatment, session, rnd, domain,
            rngstream(config.seed, tidx, session, 1, rnd)
        )
        L.debug('done %s session %s round %s', treatment, session + 1, rnd + 1)
        bar.update()

    try:
        threadpool(config.workers)(work, [(idx,) for idx in range(len(jobs))])
    finally:
        bar.close()
    L.info('batch done')
    return RunRecord(config, results)
