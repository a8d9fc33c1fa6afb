import json

import pandas as pd

from matchsim.output import (
    MARK_BINS,
    accuracy_by_mark,
    accuracy_by_menu,
    accuracy_by_round,
    emit_outputs,
    mark_bin,
    read_outputs
)
from matchsim.runner import (
    MARKET_COLUMNS,
    ROW_COLUMNS,
    RunConfig,
    RunRecord,
    run_batch
)
from matchsim.testutil import assert_df


def test_mark_bins():
    assert len(MARK_BINS) == 10
    assert mark_bin(0) == '1-10'
    assert mark_bin(1) == '1-10'
    assert mark_bin(10) == '1-10'
    assert mark_bin(11) == '11-20'
    assert mark_bin(55) == '51-60'
    assert mark_bin(100) == '91-100'


def test_accuracy_by_mark():
    rows = pd.DataFrame({
        'treatment': ['SD-DIRECT'] * 4,
        'mark': [0, 5, 55, 100],
        'accuracy': [1., 0., 1., 1.]
    })
    assert_df("""
   treatment     bin  accuracy  count
0  SD-DIRECT    1-10       0.5      2
1  SD-DIRECT   51-60       1.0      1
2  SD-DIRECT  91-100       1.0      1
""", accuracy_by_mark(rows))


def test_accuracy_by_menu_and_round():
    rows = pd.DataFrame({
        'treatment': ['SD-CHOICE', 'SD-CHOICE', 'SD-DIRECT', 'SD-DIRECT'],
        'round': [1, 2, 1, 1],
        'menu_size': [27, 1, 27, 26],
        'accuracy': [0., 1., 1., 1.],
        'top_accuracy': [0, 1, 0, 1]
    })
    bymenu = accuracy_by_menu(rows)
    # choice accuracy for choices, top rank accuracy for rankings
    assert list(bymenu['treatment']) == ['SD-CHOICE', 'SD-CHOICE', 'SD-DIRECT', 'SD-DIRECT']
    assert list(bymenu['menu_size']) == [27, 1, 27, 26]
    assert list(bymenu['accuracy']) == [0., 1., 0., 1.]

    byround = accuracy_by_round(rows)
    assert list(byround['round']) == [1, 2, 1]
    assert list(byround['accuracy']) == [0., 1., 1.]
    assert list(byround['count']) == [1, 1, 2]


def test_empty_record(tmp_path):
    emit_outputs(RunRecord(RunConfig(), []), tmp_path)
    assert (tmp_path / 'rows.csv').read_text() == ','.join(ROW_COLUMNS) + '\n'
    assert (tmp_path / 'markets.csv').read_text() == ','.join(MARKET_COLUMNS) + '\n'
    assert (tmp_path / 'accuracy_by_mark.csv').read_text() == 'treatment,bin,accuracy,count\n'
    assert (tmp_path / 'accuracy_by_menu.svg').exists()
    doc = json.loads((tmp_path / 'record.json').read_text())
    assert doc == {'config': RunConfig().todict(), 'markets': []}


def test_emit_outputs(tmp_path):
    record = run_batch(
        RunConfig(treatments=('SD-DIRECT', 'SD-CHOICE'), markets=3, rounds=3)
    )
    emit_outputs(record, tmp_path / 'one')
    emit_outputs(record, tmp_path / 'two')

    names = (
        'rows.csv', 'markets.csv', 'record.json',
        'accuracy_by_mark.csv', 'accuracy_by_menu.csv', 'accuracy_by_round.csv',
        'accuracy_by_mark.svg', 'accuracy_by_menu.svg', 'accuracy_by_round.svg'
    )
    for name in names:
        one = (tmp_path / 'one' / name).read_bytes()
        assert one == (tmp_path / 'two' / name).read_bytes()

    rows, markets = read_outputs(tmp_path / 'one')
    assert list(rows.columns) == ROW_COLUMNS
    assert len(rows) == 2 * 3 * 27
    assert len(markets) == 6

    bymark = pd.read_csv(tmp_path / 'one' / 'accuracy_by_mark.csv')
    assert set(bymark['bin']) <= set(MARK_BINS)
    assert bymark['count'].sum() == len(rows)

    doc = json.loads((tmp_path / 'one' / 'record.json').read_text())
    assert doc['markets'][0]['treatment'] == 'SD-DIRECT'
    assert len(doc['markets'][0]['market']['participants']) == 27
