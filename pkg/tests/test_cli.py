import json
import random
import subprocess
import sys

import mpmath
import pytest

from magchar.cli import RunConfig, main
from magchar.corpus import corpus_space
from magchar.errors import ValidationError
from magchar.formats import format_edge_list, space_from_json, space_to_json
from magchar.metric import is_isometric

from conftest import random_weak3_space


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    def write(name, content):
        path = tmp_path / name
        path.write_text(content if isinstance(content, str) else json.dumps(content))
        return str(path)

    return write


def edges(name):
    return format_edge_list(corpus_space(name)[1])


def test_charpoly_p4(capsys, files):
    code, out, _ = run(capsys, "charpoly", files("p4.txt", edges("P4")))
    assert code == 0
    assert out.splitlines()[0] == "p(q;λ) = λ^4 - 4λ^3 + (6 - 3q^2 - 2q^4 - q^6)λ^2 + (-4 + 6q^2 - 2q^6)λ + (1 - 3q^2 + 3q^4 - q^6)"


def test_charpoly_single_point(capsys, files):
    code, out, _ = run(capsys, "charpoly", files("one.json", {"dist": [[0]]}))
    assert code == 0 and out.startswith("p(q;λ) = λ - 1\n")


def test_exit_codes(capsys, files):
    assert run(capsys, "charpoly", files("bad.json", "{oops"))[0] == 2
    assert run(capsys, "charpoly", "/nonexistent/file")[0] == 2
    tri = {"dist": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]}
    code, _, err = run(capsys, "charpoly", files("tri.json", tri))
    assert code == 3 and "triangle" in err.lower()
    assert run(capsys, "--allow-nonmetric", "charpoly", files("tri.json", tri))[0] == 0
    assert run(capsys, "charpoly", files("disc.txt", "3 1\n0 1\n"))[0] == 3


def test_reconstruct_triangle(capsys, files):
    code, out, _ = run(capsys, "reconstruct", files("s.json", {"S1": [3, 4, 6], "S3": [13]}))
    assert code == 0
    X = space_from_json(json.loads(out))
    assert sorted(X.edge_lengths()) == [3, 4, 6]


def test_reconstruct_collision(capsys, files):
    code, _, err = run(capsys, "reconstruct", files("s.json", {"S1": [1, 2, 3, 4, 5, 6], "S3": [6, 7, 8, 9]}))
    assert code == 4 and "not weakly 3-generic" in err


def test_charpoly_pipes_into_reconstruct(capsys, files):
    X = random_weak3_space(random.Random(11), 5)
    code, out, _ = run(capsys, "--format", "json", "charpoly", files("x.json", space_to_json(X)))
    assert code == 0
    payload = json.loads(out)
    for keep in ("charpoly", "tau"):
        code, out2, _ = run(capsys, "reconstruct", files("p.json", {keep: payload[keep], "n": payload["n"]}))
        assert code == 0
        assert is_isometric(X, space_from_json(json.loads(out2))) is not None


def test_fourpoint(capsys, files):
    X = {"dist": [[0, 1, 1, 2], [1, 0, 2, 1], [1, 2, 0, 2], [2, 1, 2, 0]]}
    code, out, _ = run(capsys, "--format", "json", "fourpoint", files("x.json", X))
    assert code == 0
    assert is_isometric(space_from_json(X), space_from_json(json.loads(out))) is not None
    code, out, _ = run(capsys, "fourpoint", files("d.json", {"S1": [1] * 6, "S3": [3] * 4, "S_opp": [2, 2, 2]}))
    assert code == 0
    assert run(capsys, "fourpoint", files("p4.txt", edges("path3")))[0] == 3


def test_magnitude_outputs(capsys, files):
    two = files("two.json", {"dist": [[0, 1], [1, 0]]})
    code, out, _ = run(capsys, "magnitude", two, "--t", "1")
    assert code == 0 and out.startswith("|1X| = 1.462117157260009758")
    code, out, _ = run(capsys, "magnitude", two, "--formal", "7/2")
    assert out.strip() == "2 - 2q + 2q^2 - 2q^3"
    code, out, _ = run(capsys, "--format", "csv", "magnitude", two)
    assert out.splitlines()[0] == "t,magnitude" and len(out.splitlines()) == 5


def test_magnitude_singular(capsys, files):
    k32 = files("k32.txt", "5 6\n0 3\n0 4\n1 3\n1 4\n2 3\n2 4\n")
    code, _, err = run(capsys, "magnitude", k32, "--t", "log(2)/2")
    assert code == 4 and "singular" in err


def test_compare(capsys, files):
    p4, star = files("p4.txt", edges("P4")), files("k13.txt", edges("K1_3"))
    code, out, _ = run(capsys, "--format", "json", "compare", p4, star)
    report = json.loads(out)
    assert code == 0 and report["charpoly_differs_at"] == 2 and report["magnitude_equal"]
    assert report["adjacency_equal"] is False
    code, out, _ = run(capsys, "--format", "json", "compare", p4, p4)
    report = json.loads(out)
    assert report["isometric"] and report["charpoly_equal"] and report["magnitude_equal"]
    prism, k33 = files("prism.txt", edges("prism")), files("k33.txt", edges("K3_3"))
    report = json.loads(run(capsys, "--format", "json", "compare", prism, k33)[1])
    assert report["magnitude_equal"] and not report["charpoly_equal"]


def test_compare_all(capsys, tmp_path):
    for name in ("P4", "K1_3", "path3"):
        (tmp_path / f"{name}.edges").write_text(edges(name))
    code, out, _ = run(capsys, "--format", "json", "compare", "--all", str(tmp_path), "--workers", "2")
    assert code == 0 and len(json.loads(out)) == 3


def test_check_and_spectra(capsys, files):
    code, out, _ = run(capsys, "check", files("t.json", {"dist": [[0, 1, 2], [1, 0, 2.5], [2, 2.5, 0]]}), "--weak3")
    assert out.strip() == "weak3generic: true"
    code, out, _ = run(capsys, "adjacency-spectrum", files("k2.txt", "2 1\n0 1\n"))
    assert out.strip() == "λ^2 - 1"
    code, out, _ = run(capsys, "stochastic", files("p4.txt", edges("P4")), "--q", "1/2")
    assert code == 0 and out.startswith("q=1/2: (1)λ^4")


def test_tau_with_oracle(capsys, files):
    code, out, _ = run(capsys, "tau", files("p4.txt", edges("P4")), "--oracle")
    assert code == 0 and "cycle oracle: agrees" in out


def test_corpus_commands(capsys):
    code, out, _ = run(capsys, "corpus", "list")
    assert "R9prime" in out.split()
    code, out, _ = run(capsys, "corpus", "emit", "R6")
    assert space_from_json(json.loads(out)).n == 6
    assert run(capsys, "corpus", "emit", "R6", "--edges")[0] == 3


def test_deterministic_output(capsys, files):
    path = files("r9.json", space_to_json(corpus_space("R9")[0]))
    first = run(capsys, "--format", "json", "charpoly", path)[1]
    assert run(capsys, "--format", "json", "charpoly", path)[1] == first


def _closed_form(digits):
    with mpmath.workdps(digits + 20):
        return mpmath.nstr(2 / (1 + mpmath.exp(-1)), digits)


def test_digits_option(capsys, files):
    two = files("two.json", {"dist": [[0, 1], [1, 0]]})
    out = run(capsys, "--digits", "40", "magnitude", two, "--t", "1")[1]
    assert out.split("=")[1].strip() == _closed_form(40)
    assert run(capsys, "--digits", "10", "magnitude", two)[0] == 3
    main(["--digits", "50", "corpus", "list"])
    capsys.readouterr()


def test_run_config_validation():
    with pytest.raises(ValidationError):
        RunConfig(precision_digits=20)
    with pytest.raises(ValidationError):
        RunConfig(stochastic_q_samples=[1])
    with pytest.raises(ValidationError):
        RunConfig(formal_cutoff=0)


def test_stdin_and_env(tmp_path):
    env = {"MAGCHAR_DIGITS": "35", "PATH": ""}
    proc = subprocess.run(
        [sys.executable, "-m", "magchar.cli", "magnitude", "-", "--t", "1"],
        input='{"dist": [[0, 1], [1, 0]]}', capture_output=True, text=True, env=env,
    )
    assert proc.returncode == 0
    assert proc.stdout.split("=")[1].strip() == _closed_form(35)
