import json

from matchsim.runner import ROW_COLUMNS


def test_generate(cli):
    r = cli('generate', seed=3, json=True)
    assert r.exit_code == 0
    doc = json.loads(r.output)
    assert doc['seed'] == 3
    assert len(doc['participants']) == 27
    assert cli('generate', seed=3, json=True).output == r.output

    r = cli('generate', n=5)
    assert r.exit_code == 0
    assert r.output.startswith('market seed: 0')


def test_error_document(cli):
    r = cli('generate', n=200, json=True)
    assert r.exit_code == 1
    assert json.loads(r.output) == {
        'error': 'InfeasibleMarksError',
        'reason': 'infeasible-marks',
        'message': 'cannot draw 200 distinct marks out of 101 values'
    }


def test_run_and_metrics(cli, datadir, tmp_path):
    out = tmp_path / 'out'
    r = cli('run', config=datadir / 'tiny.json', out=out, workers=2)
    assert r.exit_code == 0
    assert '9 markets written' in r.output
    header = (out / 'rows.csv').read_text().splitlines()[0]
    assert header == ','.join(ROW_COLUMNS)

    r = cli('metrics', '--in', out, json=True)
    assert r.exit_code == 0
    table = json.loads(r.output)
    assert set(table) == {
        f'{treatment}/{domain}'
        for treatment in ('SD-DIRECT', 'SD-CHOICE', 'ACCURACY')
        for domain in ('LEX', 'SEP', 'COMP')
    }
    # truthful agents
    assert table['SD-DIRECT/SEP']['accuracy'] == 100
    assert table['SD-CHOICE/LEX']['kendall'] is None

    r = cli('metrics', '--in', out)
    assert r.exit_code == 0
    assert 'efficiency_loss' in r.output

    r = cli('plot', '--in', out / 'rows.csv', out=tmp_path / 'plots')
    assert r.exit_code == 0
    assert (tmp_path / 'plots' / 'accuracy_by_menu.csv').read_text() == (
        out / 'accuracy_by_menu.csv'
    ).read_text()


def test_run_bad_config(cli, tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text(json.dumps({'markets': 7, 'rounds': 3}))
    r = cli('run', config=path, out=tmp_path / 'out')
    assert r.exit_code == 1
    doc = json.loads(r.output)
    assert doc['error'] == 'ConfigError'
    assert doc['reason'] == 'markets'

    r = cli('run', config='nowhere', out=tmp_path / 'out')
    assert r.exit_code == 1
    assert json.loads(r.output)['error'] == 'Exception'


def test_named_config(cli, datadir, tmp_path, monkeypatch):
    cfg = tmp_path / 'matchsim.cfg'
    cfg.write_text(
        '[configs]\n'
        f'tiny = {datadir / "tiny.json"}\n'
        '\n'
        '[defaults]\n'
        'policy.kind = noisy\n'
        'policy.epsilon = 0.5\n'
    )
    monkeypatch.setenv('MATCHSIMCFGPATH', str(cfg))

    r = cli('configpath')
    assert r.output.strip() == str(cfg)

    out = tmp_path / 'out'
    r = cli('run', config='tiny', out=out)
    assert r.exit_code == 0
    doc = json.loads((out / 'record.json').read_text())
    assert doc['config']['policy'] == {'kind': 'NOISY', 'epsilon': .5, 'p_max': .6}


def test_optimize(cli):
    r = cli('optimize', domain='LEX', interface='LEXNEST', samples=2)
    assert r.exit_code == 0
    doc = json.loads(r.output)
    assert doc['mean'] == 0
    assert doc['samples'] == 2

    r = cli('optimize', domain='SEP', interface='WEIGHT', samples=1,
            grid_step=5, budget=1000)
    assert r.exit_code == 1
    assert json.loads(r.output)['reason'] == 'budget'
