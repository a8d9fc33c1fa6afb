import logging
from pathlib import Path

import click
import pandas as pd

from matchsim.market import (
    FIELDS,
    generate_market
)
from matchsim.metrics import summarize
from matchsim.optimizer import (
    DEFAULT_BUDGET,
    DEFAULT_GRID_STEP,
    expressiveness_gap
)
from matchsim.output import (
    emit_outputs,
    plot as plotrows,
    read_outputs,
    read_rows
)
from matchsim.preference import DomainKind
from matchsim.runner import (
    RunConfig,
    run_batch
)
from matchsim.util import (
    cfg_defaults,
    dumps,
    find_config,
    get_cfg_path,
    logme,
    onerror,
    rngstream
)


@click.group()
def msim():
    pass


@msim.command()
@click.option('--seed', type=int, default=0)
@click.option('--n', type=int, default=27)
@click.option('--json', is_flag=True, default=False)
@onerror
def generate(seed, n, json):
    """draw a market (catalog, programs and participants) """
    market = generate_market(seed, n)
    if json:
        print(dumps(market.tojson()))
        return

    cat = market.catalog
    print(f'market seed: {market.market_seed}')
    print(f'field points: {dict(zip(FIELDS, cat.field_assignment))}')
    programs = pd.DataFrame(
        [
            {
                'id': p.canonical_id,
                'program': p.label,
                'points': sum(market.program_points(p))
            }
            for p in market.programs
        ]
    ).set_index('id')
    with pd.option_context('display.max_rows', None):
        print(programs)
        print(
            pd.DataFrame(
                [(p.participant_id, p.mark) for p in market.participants],
                columns=['participant', 'mark']
            ).set_index('participant')
        )


@msim.command()
@click.option('--config', 'configname', required=True,
              help='json run config path or name of the [configs] section')
@click.option('--out', 'outdir', required=True, type=click.Path())
@click.option('--workers', type=int, default=None)
@click.option('--verbose', is_flag=True, default=False)
@onerror
def run(configname, outdir, workers=None, verbose=False):
    """run a batch of simulated markets and write its outputs """
    if verbose:
        logme('matchsim', logging.INFO)
    config = RunConfig.fromfile(find_config(configname), cfg_defaults())
    if workers is not None:
        config = RunConfig.fromdict({**config.todict(), 'workers': workers})
    record = run_batch(config, progress=verbose)
    emit_outputs(record, outdir)
    print(f'{len(record.results)} markets written to {Path(outdir).resolve()}')


@msim.command()
@click.option('--in', 'indir', required=True, type=click.Path(exists=True))
@click.option('--json', is_flag=True, default=False)
@onerror
def metrics(indir, json):
    """treatment x domain summary of a run output directory """
    rows, markets = read_outputs(indir)
    table = summarize(rows, markets)
    if json:
        # no kendall distance under sequential choice
        doc = table.astype(object).where(table.notna(), None)
        print(dumps({
            f'{treatment}/{domain}': values
            for (treatment, domain), values in doc.to_dict('index').items()
        }))
        return
    with pd.option_context('display.max_rows', None, 'display.width', 120):
        print(table)


@msim.command()
@click.option('--domain', type=click.Choice([d.value for d in DomainKind]),
              required=True)
@click.option('--interface', type=click.Choice(['LEXNEST', 'WEIGHT']),
              required=True)
@click.option('--samples', type=int, default=100)
@click.option('--seed', type=int, default=0)
@click.option('--n', type=int, default=27)
@click.option('--grid-step', type=float, default=DEFAULT_GRID_STEP)
@click.option('--budget', type=int, default=DEFAULT_BUDGET)
@click.option('--workers', type=int, default=1)
@click.option('--verbose', is_flag=True, default=False)
@onerror
def optimize(domain, interface, samples, seed, n,
             grid_step, budget, workers, verbose=False):
    """smallest Kendall distance an attribute interface reaches,
    over sampled markets and preferences"""
    if verbose:
        logme('matchsim', logging.INFO)
    if grid_step == int(grid_step):
        grid_step = int(grid_step)
    summary = expressiveness_gap(
        domain, interface, samples,
        rngstream(seed),
        grid_step=grid_step,
        budget=budget,
        n=n,
        workers=workers
    )
    print(dumps(summary))


@msim.command()
@click.option('--in', 'rowspath', required=True, type=click.Path(exists=True))
@click.option('--out', 'outdir', required=True, type=click.Path())
@onerror
def plot(rowspath, outdir):
    """rebuild the plot data files and figures from a rows.csv file """
    plotrows(read_rows(rowspath), outdir)
    print(f'plots written to {Path(outdir).resolve()}')


@msim.command()
def configpath():
    """show the configuration file in use """
    print(get_cfg_path())
