import io
import json
import subprocess
import sys

import pytest

from elnum.cli import SCHEMA_VERSION, run, split_top_level


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def structured(*argv):
    code, out, _ = call(*argv, "--output", "structured")
    doc = json.loads(out)
    assert doc["exit_code"] == code
    return code, doc


MATRIX = [
    # (argv, exit code)
    (["parse", "4 + log(1 + exp(log(2)/3))"], 0),
    (["parse", "log(0"], 1),
    (["eval", "exp(exp(0))", "--precision-bits", "128"], 0),
    (["eval", "log(0)"], 1),
    (["eval", "1/(e - exp(1))"], 1),
    (["tower", "4 + log(1 + exp(log(2)/3))"], 0),
    (["reduce", "4 + log(1 + exp(log(2)/3))"], 0),
    (["reduce", "exp(pi) + exp(pi + exp(-210))", "--height-bound", "5"], 1),
    (["zero", "exp(log(-1)) + 1"], 0),
    (["zero", "e + pi"], 0),
    (["zero", "log(1 + pow(2, 1/2)) + log(pow(2, 1/2) - 1)"], 2),
    (["relation", "log(2)", "log(8)"], 0),
    (["relation", "1", "log(2)", "log(3)"], 0),
    (["relation", "R", "R"], 0),
    (["relation", "R", "r1"], 0),
    (["enum", "--n-max", "2"], 0),
    (["enum", "--n-max", "9"], 1),
    (["s5"], 0),
    (["s5", "1,0,0,0,0,-1"], 0),
    (["s5", "1,0,0,0,0,-2", "--prime-budget", "50"], 2),
    (["s5", "1,2"], 1),
    (["conjecture", "1", "--height-bound", "20"], 0),
    (["conjecture", "1", "--height-bound", "20", "--basis", "log(2), log(4)"], 2),
    (["conjecture", "3"], 1),
    (["frobnicate"], 1),
    ([], 1),
    (["eval", "1", "--precision-bits", "16"], 1),
    (["relation", "log(2)", "log(8)", "--height-bound", "0"], 1),
]


@pytest.mark.parametrize("argv,code", MATRIX, ids=[" ".join(a) or "<none>" for a, _ in MATRIX])
def test_exit_code_matrix(argv, code):
    assert call(*argv)[0] == code


# argparse rejects these before a configuration exists, so no document
USAGE = {("conjecture", "3"), ("frobnicate",), (), ("eval", "1", "--precision-bits", "16"),
         ("relation", "log(2)", "log(8)", "--height-bound", "0")}
DOCUMENTED = [m for m in MATRIX if tuple(m[0]) not in USAGE]


@pytest.mark.parametrize("argv,code", DOCUMENTED, ids=[" ".join(a) for a, _ in DOCUMENTED])
def test_structured_document(argv, code):
    c, doc = structured(*argv)
    assert c == code
    assert doc["version"] == SCHEMA_VERSION
    assert doc["command"] == argv[0]
    assert set(doc["config"]) == {"precision_bits", "height_bound", "budget_ms", "output", "seed"}
    assert ("result" in doc) != ("error" in doc)


@pytest.mark.parametrize("argv", sorted(USAGE))
def test_usage_errors_print_help(argv):
    code, out, err = call(*argv)
    assert code == 1 and out == "" and "usage" in err


def test_eval_text_digits():
    code, out, _ = call("eval", "exp(exp(0))", "--precision-bits", "128")
    assert out.startswith("2.71828182845904523536028747135266249")


def test_reduce_text():
    _, out, _ = call("reduce", "4 + log(1 + exp(log(2)/3))")
    assert "reduced tower (length 2)" in out
    assert "A1: alpha = log(2)/3, m = 3, ExpInBase: Y1^3 = 2" in out


def test_zero_structured_derivation():
    _, doc = structured("zero", "exp(log(-1)) + 1")
    assert doc["result"]["verdict"] == "Zero"
    assert [s["rule"] for s in doc["result"]["derivation"]][-1] == "fold_rational"


def test_relation_structured():
    _, doc = structured("relation", "log(2)", "log(8)")
    rel = doc["result"]["relation"]
    assert rel["coefficients"] == [-3, 1] and rel["status"] == "VerifiedSymbolic"


def test_parse_error_structured():
    code, doc = structured("parse", "log(0")
    assert code == 1 and doc["error"]["type"] == "ParseError"
    assert "5" in doc["error"]["message"]


def test_budget_deadline():
    code, doc = structured("enum", "--n-max", "4", "--budget-ms", "1")
    assert code == 2 and doc["error"]["type"] == "BudgetExhausted"


@pytest.mark.parametrize("argv", [
    ["conjecture", "2", "--height-bound", "20"],
    ["enum", "--n-max", "3", "--members"],
    ["s5"],
    ["reduce", "4 + log(1 + exp(log(2)/3))"],
])
def test_deterministic_output(argv):
    a = call(*argv, "--output", "structured", "--seed", "5")
    b = call(*argv, "--output", "structured", "--seed", "5")
    assert a == b


def test_split_top_level():
    assert split_top_level("log(2), pow(2, 1/2),e") == ["log(2)", "pow(2, 1/2)", "e"]


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "elnum", "zero", "i*i + 1"],
                       capture_output=True, text=True, check=False)
    assert p.returncode == 0 and p.stdout.startswith("Zero")


def test_help_exits_zero():
    assert call("--help")[0] == 0
    assert call("eval", "--help")[0] == 0
