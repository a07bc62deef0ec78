import io
import math
import re
import subprocess
import sys

import pytest

from conftest import haar, haar_state, random_local
from q2synth.circuit import parse, unitary_of
from q2synth.cli import dispatch
from q2synth.linalg import SWAP, phase_dist
from q2synth.textio import format_matrix, format_state


def run(argv):
    out = io.StringIO()
    code = dispatch([str(a) for a in argv], out=out)
    text = out.getvalue()
    assert text.splitlines()[-1].startswith("RESULT: ")
    return code, text


def result(text):
    return text.splitlines()[-1][len("RESULT: "):]


def fields(text):
    return dict(kv.split("=", 1) for kv in result(text).split() if "=" in kv)


def circuit_text(text):
    return "\n".join(ln for ln in text.splitlines() if not ln.startswith(("RESULT", "gamma", "delta")))


@pytest.fixture
def files(tmp_path, rng):
    def write(name, content):
        p = tmp_path / name
        p.write_text(content)
        return p

    u = haar(4, rng)
    phi = haar_state(rng)
    return {
        "u": write("u.mat", format_matrix(u)),
        "v": write("v.mat", format_matrix(random_local(rng) @ u @ random_local(rng))),
        "cnot": write("cnot.mat", "# CNOT\n1 0 0 0\n0 1 0 0\n0 0 0 1\n0 0 1 0\n"),
        "swap": write("swap.mat", format_matrix(SWAP)),
        "bell": write("bell.state", f"{1 / math.sqrt(2)!r} 0 0 {1 / math.sqrt(2)!r}\n"),
        "bell_raw": write("bell_raw.state", "1 0 0 1\n"),
        "phi": write("phi.state", format_state(phi)),
        "psi": write("psi.state", format_state(random_local(rng) @ phi)),
        "bad": write("bad.mat", "1 0 0 0\n0 1 x 0\n"),
        "nonunitary": write("nu.mat", "1 1 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n"),
        "tpl": write("t.tpl", "# q2synth-template v1\nVARSU2 0\nVARSU2 1\nCNOT 0 1\n"),
        "matrix_u": u,
    }


def test_prep_bell(files):
    code, text = run(["prep", "--state", files["bell"]])
    assert code == 0
    eps = float(re.search(r"fidelity=1-(\S+)", result(text)).group(1))
    assert eps < 1e-9
    assert parse(circuit_text(text)).cnot_count == 1


def test_bounds():
    code, text = run(["bounds", "--n", 2, "--kind", "full"])
    assert code == 0 and result(text) == "3"


def test_check_equiv_identity(files):
    code, text = run(["check-equiv", "--u", files["u"], "--w", files["u"], "--decomp", "1+1+1+1"])
    assert code == 0 and result(text) == "equivalent"
    code, text = run(["check-equiv", "--u", files["u"], "--w", files["swap"], "--blocks", "0,1|2,3"])
    assert code == 1 and result(text) == "not-equivalent"


def test_eps_and_renorm(files):
    code, text = run(["eps", "--state", files["bell"]])
    assert code == 0 and abs(float(fields(text)["abs"]) - 1) < 1e-12
    code, _ = run(["eps", "--state", files["bell_raw"]])
    assert code == 2
    code, text = run(["eps", "--state", files["bell_raw"], "--renorm"])
    assert code == 0


def test_invariants(files):
    code, text = run(["invariants", "--u", files["cnot"]])
    f = fields(text)
    assert code == 0 and abs(float(f["theta_x"]) - math.pi / 4) < 1e-6


def test_synth3_reverifies(files):
    code, text = run(["synth3", "--u", files["u"]])
    assert code == 0
    f = fields(text)
    assert f["cnots"] == "3" and f["fallback"] == "false"
    c = parse(circuit_text(text))
    assert phase_dist(unitary_of(c), files["matrix_u"]) < 1e-8


def test_synth2_mdc(files):
    for extra in ([], ["--decomp", "2+2"], ["--blocks", "0|1,2,3"]):
        code, text = run(["synth2-mdc", "--u", files["swap"], *extra])
        f = fields(text)
        assert code == 0 and f["cnots"] == "2" and f["equivalent"] == "true"
        assert f["bell_span"] == "true"


def test_prep_row(files):
    code, text = run(["prep-row", "--u", files["u"]])
    assert code == 0 and fields(text)["cnots"] == "1"


def test_canprep(files):
    code, text = run(["canprep", "--gate", files["cnot"]])
    assert code == 0 and fields(text)["answer"] == "true"
    code, text = run(["canprep", "--gate", files["swap"]])
    assert code == 1 and fields(text)["answer"] == "false"


def test_rank_and_footnote(files):
    code, text = run(["rank", "--fixture", "fig1"])
    assert code == 0 and fields(text)["rank"] == "15"
    code, text = run(["rank", "--fixture", "prop7", "--decomp", "2+2"])
    assert fields(text)["rank"] == "13" and fields(text)["universality"] == "impossible"
    code, text = run(["rank", "--template", files["tpl"]])
    assert code == 0 and int(fields(text)["rank"]) <= 9
    code, text = run(["footnote2", "--seed", 3])
    assert code == 0 and int(fields(text)["rank"]) <= 15


def test_localequiv(files):
    code, text = run(["localequiv", "--u", files["u"], "--v", files["v"]])
    assert code == 0 and result(text).startswith("equivalent")
    code, text = run(["localequiv", "--u", files["u"], "--v", files["cnot"]])
    assert code == 1 and result(text) == "not-equivalent"


def test_state_localequiv(files):
    code, text = run(["state-localequiv", "--phi", files["phi"], "--psi", files["psi"]])
    assert code == 0 and result(text).startswith("equivalent")
    code, text = run(["state-localequiv", "--phi", files["phi"], "--psi", files["bell"]])
    assert code == 1 and result(text) == "not-equivalent"


@pytest.mark.parametrize("key", ["bad", "nonunitary"])
def test_malformed_input_exits_2(files, key):
    code, text = run(["invariants", "--u", files[key]])
    assert code == 2 and "malformed" in result(text)


def test_missing_file_exits_2(tmp_path):
    code, _ = run(["synth3", "--u", tmp_path / "nope.mat"])
    assert code == 2


def test_bad_blocks_exit_2(files):
    code, _ = run(["check-equiv", "--u", files["u"], "--w", files["u"], "--blocks", "0,1|1,2"])
    assert code == 2


def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        dispatch(["bounds", "--n", "2", "--kind", "nope"], out=io.StringIO())
    assert info.value.code == 2


def test_output_is_deterministic(files):
    for argv in (["synth3", "--u", files["u"]], ["canprep", "--gate", files["u"]],
                 ["synth2-mdc", "--u", files["u"]], ["footnote2"]):
        assert run(argv)[1] == run(argv)[1]


def test_console_script(files):
    proc = subprocess.run([sys.executable, "-m", "q2synth.cli", "bounds", "--n", "2",
                           "--kind", "diag_dc"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "RESULT: 2"
