"""A module for testing the pipalter command line and its exit codes.

Typical usage example:
    !pytest test_cli.py::<TEST_NAME>
"""

import json

import numpy as np

from pipalter.cli import EXIT_OK, EXIT_USAGE, EXIT_WIDTH_ONE, main
from pipalter.instances import io
from pipalter.instances.bases import PipInstance
from pipalter.instances.normalization import normalize


def write(tmp_path, name, inst):
    """Writes inst to tmp_path / name and returns the path as a string."""

    path = tmp_path.joinpath(name)
    io.write_instance(inst, path)
    return str(path)


def test_gen_mis_complete(tmp_path):
    """Test that gen writes the K6 reduction with delta1 = 1 + 5/6."""

    out = tmp_path.joinpath('k6.json')
    assert main(['gen', '--kind', 'mis', '--graph', 'k', '6',
                 '--out', str(out)]) == EXIT_OK
    inst = io.read_instance(out)
    assert inst.n == inst.m == 6
    assert np.isclose(normalize(inst).delta1, 1 + 5 / 6)


def test_solve_strong(tmp_path):
    """Test that solve on a W = 3 instance selects strong and writes a
    feasible solution."""

    inst = PipInstance.from_dense([[1, 0.5, 0.5], [0.5, 1, 1]], [3, 3],
                                  [1, 2, 3])
    path = write(tmp_path, 'w3.json', inst)
    out = tmp_path.joinpath('sol.json')
    code = main(['solve', '--input', path, '--trials', '50', '--seed', '1',
                 '--out', str(out)])
    assert code == EXIT_OK

    doc = json.loads(out.read_text(encoding='utf-8'))
    assert doc['regime'] == 'strong'
    assert doc['seed'] == 1 and doc['trials'] == 50
    assert io.check_solution(inst, doc['x'])
    assert np.isclose(doc['value'], inst.c @ np.array(doc['x']))
    assert set(doc) >= {'value', 'x', 'regime', 'alpha', 'lpOpt', 'trials',
                        'seed'}


def test_solve_reproducible(tmp_path, capsys):
    """Test that equal seeds give equal solutions on stdout."""

    inst = PipInstance.from_dense([[1, 0.4, 0.7, 0.2]], [2], [1, 1, 2, 1])
    path = write(tmp_path, 'k.json', inst)
    argv = ['solve', '--input', path, '--trials', '40', '--seed', '5']
    assert main(argv) == EXIT_OK
    first = json.loads(capsys.readouterr().out)
    assert main(argv) == EXIT_OK
    second = json.loads(capsys.readouterr().out)
    assert first == second


def test_solve_width_one(tmp_path, capsys):
    """Test that width one instances exit 3 unless forced."""

    out = tmp_path.joinpath('k5.json')
    main(['gen', '--kind', 'mis', '--graph', 'complete', '5', '--out',
          str(out)])
    code = main(['solve', '--input', str(out), '--seed', '0'])
    assert code == EXIT_WIDTH_ONE
    assert 'independent set' in capsys.readouterr().err

    code = main(['solve', '--input', str(out), '--seed', '0', '--trials',
                 '20', '--force-heuristic'])
    assert code == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc['regime'] == 'heuristic'
    assert doc['guarantee'] is None
    assert sum(doc['x']) <= 1


def test_usage_errors(tmp_path, capsys):
    """Test that invalid flags and inputs exit with code 2."""

    inst = PipInstance.from_dense([[1, 1]], [2], [1, 1])
    path = write(tmp_path, 'ok.json', inst)
    assert main(['solve', '--input', path, '--trials', '0']) == EXIT_USAGE
    assert main(['solve', '--input', path, '--regime', 'fast']) == EXIT_USAGE
    assert main(['bogus']) == EXIT_USAGE

    broken = tmp_path.joinpath('broken.json')
    broken.write_text('{"n": 1', encoding='utf-8')
    assert main(['solve', '--input', str(broken), '--seed', '0']) == \
            EXIT_USAGE

    missing = tmp_path.joinpath('missing.json')
    assert main(['solve', '--input', str(missing), '--seed', '0']) == \
            EXIT_USAGE

    scalar = tmp_path.joinpath('scalar.json')
    scalar.write_text(json.dumps({'n': 1, 'm': 1, 'c': 5, 'b': [1],
                                  'A': {'dense': [[1]]}}), encoding='utf-8')
    assert main(['solve', '--input', str(scalar), '--seed', '0']) == \
            EXIT_USAGE

    negative = write(tmp_path, 'neg.json',
                     PipInstance.from_dense([[1, -1]], [1], [1, 1]))
    assert main(['solve', '--input', negative, '--seed', '0']) == EXIT_USAGE
    assert 'NegativeEntry' in capsys.readouterr().err

    # smallwidth does not apply at W = 2 with a mismatched eps
    assert main(['solve', '--input', path, '--regime', 'smallwidth',
                 '--eps', '0.3', '--seed', '0']) == EXIT_USAGE


def test_solve_artifacts(tmp_path):
    """Test the per-trial CSV and basis dump flags."""

    inst = PipInstance.from_dense([[1, 0.5, 0.5]], [2], [1, 1, 1])
    path = write(tmp_path, 'k.json', inst)
    trials = tmp_path.joinpath('trials.csv')
    basis = tmp_path.joinpath('basis.txt')
    code = main(['solve', '--input', path, '--trials', '12', '--seed', '3',
                 '--trials-csv', str(trials), '--dump-basis', str(basis),
                 '--out', str(tmp_path.joinpath('s.json'))])
    assert code == EXIT_OK
    assert len(trials.read_text(encoding='utf-8').splitlines()) == 13
    assert basis.read_text(encoding='utf-8').startswith('# basis after')


def test_gen_solve_roundtrip(tmp_path):
    """Test that generated instances solve to solutions that pass the
    independent check against the generated file."""

    for kind, extra in (('random', ['--n', '15', '--m', '4', '--width', '3']),
                        ('knapsack', ['--n', '12', '--width', '1.5',
                                      '--profile', 'mixedBigSmall'])):
        inst_path = tmp_path.joinpath(kind + '.json')
        sol_path = tmp_path.joinpath(kind + '-sol.json')
        assert main(['gen', '--kind', kind, '--seed', '2', '--out',
                     str(inst_path)] + extra) == EXIT_OK
        assert main(['solve', '--input', str(inst_path), '--trials', '30',
                     '--seed', '2', '--out', str(sol_path)]) == EXIT_OK
        doc = json.loads(sol_path.read_text(encoding='utf-8'))
        assert io.check_solution(io.read_instance(inst_path), doc['x'])


def test_gen_suite(tmp_path):
    """Test that the suite is written one file per member."""

    out = tmp_path.joinpath('suite')
    assert main(['gen', '--kind', 'suite', '--seed', '0', '--out',
                 str(out)]) == EXIT_OK
    files = sorted(p.name for p in out.iterdir())
    assert len(files) == 30
    assert files[0] == '00-random-w2.json'


def test_gen_edges(tmp_path):
    """Test the reduction of an edge-list graph."""

    edges = tmp_path.joinpath('g.txt')
    edges.write_text('0 1\n1 2\n', encoding='utf-8')
    out = tmp_path.joinpath('g.json')
    assert main(['gen', '--kind', 'mis', '--edges', str(edges), '--out',
                 str(out)]) == EXIT_OK
    assert io.read_instance(out).n == 3
    assert main(['gen', '--kind', 'mis']) == EXIT_USAGE


def test_oracle(tmp_path, capsys):
    """Test that the oracle matches the LP optimum of an integral
    relaxation."""

    inst = PipInstance.from_dense([[1, 1]], [2], [3, 4])
    path = write(tmp_path, 'small.json', inst)
    assert main(['oracle', '--input', path]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc['value'] == 7 and doc['x'] == [1, 1]

    assert main(['oracle', '--input', path, '--exhaustive']) == EXIT_OK
    assert json.loads(capsys.readouterr().out)['value'] == 7

    assert main(['solve', '--input', path, '--trials', '5', '--seed',
                 '0']) == EXIT_OK
    assert np.isclose(json.loads(capsys.readouterr().out)['lpOpt'], 7)


def test_experiment(tmp_path):
    """Test that experiment writes identical deterministic reports."""

    spec = tmp_path.joinpath('spec.json')
    spec.write_text(json.dumps({
            'instances': [{'kind': 'random', 'n': 8, 'm': 3, 'width': 2,
                           'seed': 1}],
            'regimes': ['auto', 'weak'], 'trials': [50]}), encoding='utf-8')
    first, second = tmp_path.joinpath('a.csv'), tmp_path.joinpath('b.csv')
    for out in (first, second):
        assert main(['experiment', '--spec', str(spec), '--out', str(out),
                     '--seed', '4', '--threads', '1',
                     '--deterministic']) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    assert len(first.read_text(encoding='utf-8').splitlines()) == 3

    bad = tmp_path.joinpath('bad.json')
    bad.write_text(json.dumps({'instances': [{'kind': 'mps'}]}),
                   encoding='utf-8')
    assert main(['experiment', '--spec', str(bad), '--out',
                 str(first)]) == EXIT_USAGE

    bad.write_text(json.dumps({'instances': {'kind': 'random'}}),
                   encoding='utf-8')
    assert main(['experiment', '--spec', str(bad), '--out',
                 str(first)]) == EXIT_USAGE


def test_verify_bounds(capsys):
    """Test that a coarse verification prints an all pass table."""

    code = main(['verify-bounds', '--step', '0.01', '--draws', '20',
                 '--samples', '300', '--seed', '0'])
    assert code == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split()[0] == 'check'
    assert len(lines) == 5
    assert all(line.endswith('PASS') for line in lines[1:])
