""" Command line surface: reports and exit codes """
# ======== standard imports ========
import json
# ==================================

# ======= third party imports ======
from click.testing import CliRunner
import pytest
# ==================================

# ========= program imports ========
from orbitstrata.cli import main
# ==================================


@pytest.fixture
def run(tmp_path):
    runner = CliRunner()

    def invoke(*args):
        out = tmp_path / 'report.json'
        if out.exists():
            out.unlink()
        result = runner.invoke(main, [*args, '--out', str(out)])
        report = json.loads(out.read_text()) if out.exists() else None
        return result, report
    return invoke


@pytest.fixture
def variant(tmp_path, data_dir):
    ''' Write a modified copy of a shipped problem '''
    def make(name, **changes):
        payload = json.loads((data_dir / name).read_text())
        for key, value in changes.items():
            if key.startswith('job_'):
                payload["strata_jobs"][0][key[4:]] = value
            else:
                payload[key] = value
        path = tmp_path / f'variant_{name}'
        path.write_text(json.dumps(payload))
        return str(path)
    return make


def test_pmatrix(run, data_dir):
    result, report = run('pmatrix', str(data_dir / 'dihedral6.json'))
    assert result.exit_code == 0
    assert report["command"] == 'pmatrix'
    entries = report["results"]["entries"]
    assert entries["P11"]["text"] == '4*p1'
    assert entries["P12"]["text"] == '6*p2'
    assert entries["P22"]["text"] == '9*p1^2'
    assert report["results"]["euler_row"]
    assert len(report["inputs_digest"]) == 64
    assert 'pmatrix' in report["timings"]


def test_pmatrix_without_norm_first(run, data_dir):
    result, report = run('pmatrix', str(data_dir / 'z2_minus_identity.json'))
    assert result.exit_code == 0
    assert not report["results"]["euler_row"]
    assert report["results"]["grading"]
    assert report["diagnostics"]


def test_relations(run, data_dir):
    result, report = run('relations', str(data_dir / 'z2_minus_identity.json'), '--max-degree', '4')
    assert result.exit_code == 0
    found = report["results"]["relations"]
    assert [r["poly"]["text"] for r in found] == ['p1*p3 - p2^2']
    assert not report["results"]["coregular_up_to_bound"]


def test_relations_bound_too_small(run, data_dir):
    result, report = run('relations', str(data_dir / 'z2_minus_identity.json'), '--max-degree', '3')
    assert result.exit_code == 2
    assert report is None


def test_stratum(run, data_dir):
    result, report = run('stratum', str(data_dir / 'dihedral6.json'))
    assert result.exit_code == 0
    assert [f["text"] for f in report["results"]["phi"]] == ['l1^2', 'l1^3']
    assert report["results"]["globality"] == 'global'
    assert report["results"]["factorization"]["holds"]


def test_stratum_convention_mismatch(run, variant):
    path = variant('dihedral6.json', job_expected_phi=["l1^2", "l1^3"], job_sign_flips=["l1"])
    result, report = run('stratum', path)
    assert result.exit_code == 1
    assert report["results"]["convention"]["mismatched"] == [1]


def test_stratum_unknown_job(run, data_dir):
    result, _ = run('stratum', str(data_dir / 'dihedral6.json'), '--job', '3')
    assert result.exit_code == 2


def test_verify(run, data_dir):
    result, report = run('verify', str(data_dir / 'dihedral6.json'))
    assert result.exit_code == 0
    assert report["results"]["factors"][0]["divides"]
    job = report["results"]["jobs"][0]
    assert job["relations_vanish"] and job["factorization"]


def test_verify_reports_non_factor(run, variant):
    path = variant('dihedral6.json', candidate_factors=["p1^3 - p2^2", "p1 + p2"])
    result, report = run('verify', path)
    assert result.exit_code == 1
    assert [f["divides"] for f in report["results"]["factors"]] == [True, False]


def test_classify(run, data_dir):
    result, report = run('classify', str(data_dir / 'dihedral6.json'), '--point', '1,2')
    assert result.exit_code == 0
    assert report["results"]["p"] == ['5', '-11']
    assert report["results"]["rank"] == 2
    assert report["results"]["member"]


def test_classify_wrong_length(run, data_dir):
    result, _ = run('classify', str(data_dir / 'dihedral6.json'), '--point', '1')
    assert result.exit_code == 2


def test_probe(run, data_dir):
    result, report = run('probe', str(data_dir / 'dihedral6.json'), '--box=-1:1', '--samples', '1000',
                         '--threads', '2')
    assert result.exit_code == 0
    probe = report["results"]["probe"]
    assert probe["tested"] == 1000
    assert probe["min_rank"] == 1
    assert report["results"]["region"]["dimension"] == 1


@pytest.mark.parametrize('box', ['1:0', '2', 'a:b', '0:1,0:1'])
def test_probe_bad_box(run, data_dir, box):
    result, _ = run('probe', str(data_dir / 'dihedral6.json'), f'--box={box}')
    assert result.exit_code == 2


def test_missing_problem_file(run, tmp_path):
    result, _ = run('pmatrix', str(tmp_path / 'absent.json'))
    assert result.exit_code == 2


def test_schema_error_exit_code(run, tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text('{"name": "bad"}')
    result, _ = run('pmatrix', str(path))
    assert result.exit_code == 2
