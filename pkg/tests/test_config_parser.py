""" Tests for robj2r.config_parser
"""
import pytest

from robj2r import config_parser
from robj2r.simulation.scenarios import PHI_H0, ErrorFamily, Hypothesis


def test_get_envvars(monkeypatch):
    truth = {
        'scenario': {
            'name': 'run-1',
            'base': 'normal-h1'
        },
        'output': {
            'records': '/tmp/records.csv',
            'report': '/tmp/report.json'
        }
    }
    d = {
        'scenario': {
            'name': 'run-$JOBNO',
            'base': 'normal-h1'
        },
        'output': {
            'records': '$ROOTDIR/records.csv',
            'report': '$ROOTDIR/report.json'
        }
    }
    envvars = {
        'JOBNO': '1',
        'ROOTDIR': '/tmp'
    }
    for k in envvars:
        monkeypatch.setenv(k, envvars[k])

    expanded = config_parser.expand_envvars(d)

    assert truth == expanded


def test_parse_scenario_file(tmp_path):
    path = tmp_path / 'scenario.yaml'
    path.write_text('scenario:\n'
                    '  base: normal-h1\n'
                    '  name: small-t5\n'
                    '  errors: t5\n'
                    '  n_per_arm: 200\n')
    sc = config_parser.parse_scenario_file(str(path))
    assert sc.name == 'small-t5'
    assert sc.errors is ErrorFamily.T5
    assert sc.n_per_arm == 200
    assert sc.truth == 0.6809


def test_hypothesis_override_resets_phi(tmp_path):
    path = tmp_path / 'scenario.yaml'
    path.write_text('scenario:\n  hypothesis: H0\n')
    sc = config_parser.parse_scenario_file(str(path))
    assert sc.hypothesis is Hypothesis.H0
    assert sc.phi == PHI_H0
    assert sc.truth == 0.0


@pytest.mark.parametrize('text', [
    'simulation:\n  n_per_arm: 10\n',
    'scenario:\n  base: lognormal\n',
    'scenario:\n  n_subjects: 10\n',
])
def test_bad_scenario_file(tmp_path, text):
    path = tmp_path / 'scenario.yaml'
    path.write_text(text)
    with pytest.raises(KeyError):
        config_parser.parse_scenario_file(str(path))


def test_resolve_scenario(tmp_path):
    assert config_parser.resolve_scenario('t5-h0').name == 't5-h0'
    with pytest.raises(KeyError):
        config_parser.resolve_scenario(str(tmp_path / 'missing.yaml'))


def test_run_config_dict():
    cfg = config_parser.RunConfig('simulate', seed=None, reps=10)
    out = cfg.to_dict()
    assert out['seed'] == 0
    assert out['reps'] == 10
    assert 'input' not in out
    assert 'version' in out
