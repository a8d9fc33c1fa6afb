import logging
from pathlib import Path

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import pandas as pd

from matchsim.runner import (
    MARKET_COLUMNS,
    ROW_COLUMNS,
    RunRecord
)
from matchsim.util import dumps


L = logging.getLogger('matchsim.output')

# stable svg ids, so that two renderings of the same data are identical
plt.rcParams['svg.hashsalt'] = 'matchsim'

MARK_BINS = tuple(
    f'{low}-{low + 9}' for low in range(1, 100, 10)
)
BYMARK_COLUMNS = ['treatment', 'bin', 'accuracy', 'count']
BYMENU_COLUMNS = ['treatment', 'menu_size', 'accuracy', 'count']
BYROUND_COLUMNS = ['treatment', 'round', 'accuracy', 'count']


def mark_bin(mark):
    " decile label of a mark, 0 falls in the first bin "
    return MARK_BINS[max(0, (int(mark) - 1) // 10)]


# plot data

def accuracy_by_mark(rows: pd.DataFrame) -> pd.DataFrame:
    if not len(rows):
        return pd.DataFrame(columns=BYMARK_COLUMNS)
    df = rows.assign(
        bin=pd.Categorical(
            rows['mark'].map(mark_bin),
            categories=MARK_BINS,
            ordered=True
        )
    )
    out = df.groupby(['treatment', 'bin'], observed=True).agg(
        accuracy=('accuracy', 'mean'),
        count=('accuracy', 'size')
    ).reset_index()
    out['bin'] = out['bin'].astype(str)
    return out[BYMARK_COLUMNS]


def accuracy_by_menu(rows: pd.DataFrame) -> pd.DataFrame:
    """Accuracy by size of the menu a participant faced: choice
    accuracy for sequential choice, top rank accuracy for the full
    ranking treatments."""
    if not len(rows):
        return pd.DataFrame(columns=BYMENU_COLUMNS)
    choice = rows['treatment'] == 'SD-CHOICE'
    df = rows.assign(
        hit=rows['accuracy'].where(choice, rows['top_accuracy'])
    )
    out = df.groupby(['treatment', 'menu_size']).agg(
        accuracy=('hit', 'mean'),
        count=('hit', 'size')
    ).reset_index()
    out = out.sort_values(
        ['treatment', 'menu_size'],
        ascending=[True, False]
    ).reset_index(drop=True)
    return out[BYMENU_COLUMNS]


def accuracy_by_round(rows: pd.DataFrame) -> pd.DataFrame:
    if not len(rows):
        return pd.DataFrame(columns=BYROUND_COLUMNS)
    out = rows.groupby(['treatment', 'round']).agg(
        accuracy=('accuracy', 'mean'),
        count=('accuracy', 'size')
    ).reset_index()
    return out[BYROUND_COLUMNS]


# renderings

def _render(df, x, xlabel, title, path, categories=None):
    fig, ax = plt.subplots(figsize=(8, 5))
    for treatment, group in df.groupby('treatment'):
        xs = group[x].map(categories.index) if categories else group[x]
        ax.plot(xs, group['accuracy'], marker='o', label=treatment)
    if categories:
        ax.set_xticks(range(len(categories)))
        ax.set_xticklabels(categories, rotation=45)
    ax.set_xlabel(xlabel)
    ax.set_ylabel('accuracy')
    ax.set_ylim(0, 1.05)
    ax.set_title(title)
    if len(df):
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)


def plot(rows: pd.DataFrame, outdir):
    """Write the plot data files and their svg renderings."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    bymark = accuracy_by_mark(rows)
    bymark.to_csv(outdir / 'accuracy_by_mark.csv', index=False)
    # fixed categorical axis: one slot per bin, whatever is observed
    _render(
        bymark, 'bin', 'mark', 'Accuracy by mark',
        outdir / 'accuracy_by_mark.svg',
        categories=MARK_BINS
    )

    bymenu = accuracy_by_menu(rows)
    bymenu.to_csv(outdir / 'accuracy_by_menu.csv', index=False)
    _render(
        bymenu, 'menu_size', 'menu size', 'Accuracy by menu size',
        outdir / 'accuracy_by_menu.svg'
    )

    byround = accuracy_by_round(rows)
    byround.to_csv(outdir / 'accuracy_by_round.csv', index=False)
    _render(
        byround, 'round', 'round', 'Accuracy by round',
        outdir / 'accuracy_by_round.svg'
    )
    L.info('plots written to %s', outdir)


def read_rows(path) -> pd.DataFrame:
    rows = pd.read_csv(path)
    missing = set(ROW_COLUMNS) - set(rows.columns)
    if missing:
        raise ValueError(f'{path} lacks the columns {sorted(missing)}')
    return rows


def emit_outputs(record: RunRecord, outdir):
    """Write the outcome of a batch:

    * rows.csv: one line per participant and market
    * markets.csv: one line per market
    * record.json: the config and the full per market record
    * the plot data files and their renderings
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    rows = record.rows()
    rows.to_csv(outdir / 'rows.csv', index=False)
    record.markets().to_csv(outdir / 'markets.csv', index=False)
    (outdir / 'record.json').write_text(dumps(record.tojson()))
    plot(rows, outdir)
    L.info('%s rows written to %s', len(rows), outdir)
    return outdir


def read_outputs(indir):
    " rows and markets frames of an output directory "
    indir = Path(indir)
    rows = read_rows(indir / 'rows.csv')
    markets = pd.read_csv(indir / 'markets.csv')
    missing = set(MARKET_COLUMNS) - set(markets.columns)
    if missing:
        raise ValueError(f'{indir / "markets.csv"} lacks the columns {sorted(missing)}')
    return rows, markets
