import math

import pytest

from costcode.cli import main

GOLDEN = "K 2 depth 0\n- 1 1.0\n- 2 2.0\n"
UNIT = "K 2 depth 0\n- 1 1.0\n- 2 1.0\n"
U4 = "K 2\na 0.25\nb 0.25\nc 0.25\nd 0.25\n"
BERN3 = "K 2\n0 0.7\n1 0.3\n"


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in [
        ("golden.cost", GOLDEN),
        ("unit.cost", UNIT),
        ("u4.dist", U4),
        ("bern3.dist", BERN3),
    ]:
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
    return paths


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def as_dict(out):
    kv = {}
    for line in out.strip().split("\n"):
        for part in line.split():
            if "=" in part:
                k, v = part.split("=", 1)
                kv[k] = v
    return kv


def test_alpha(files, capsys):
    code, out, _ = run(capsys, ["alpha", "--cost", files["golden.cost"]])
    assert code == 0
    kv = as_dict(out)
    assert abs(float(kv["alpha_c"]) - math.log2(2 / (math.sqrt(5) - 1))) <= 1e-9
    assert kv["c_min"] == "1.0" and kv["c_max"] == "2.0"


def test_validate_cost(files, capsys):
    code, out, _ = run(capsys, ["validate-cost", "--cost", files["golden.cost"]])
    assert code == 0
    assert "regular=true" in out


def test_entropy_and_bits(files, tmp_path, capsys):
    code, out, _ = run(capsys, ["entropy", "--dist", files["bern3.dist"]])
    assert code == 0
    kv = as_dict(out)
    assert abs(float(kv["entropy"]) - 0.8812908992306926) <= 1e-9
    p = tmp_path / "u4b4.dist"
    p.write_text("K 4\na 0.25\nb 0.25\nc 0.25\nd 0.25\n")
    _, out4, _ = run(capsys, ["entropy", "--dist", str(p)])
    assert float(as_dict(out4)["entropy"]) == 1.0  # base 4
    _, out4b, _ = run(capsys, ["entropy", "--dist", str(p), "--bits"])
    assert float(as_dict(out4b)["entropy"]) == 2.0


def test_smooth(files, capsys):
    code, out, _ = run(
        capsys,
        ["smooth", "--dist", files["u4.dist"], "--delta", "0.25", "--quantity", "H"],
    )
    assert code == 0
    kv = as_dict(out)
    assert kv["value"] == "1.5"
    assert kv["set_mass"] == "0.75"
    assert kv["set_size"] == "3"
    assert kv["method"] == "brute_force"
    _, out2, _ = run(
        capsys,
        ["smooth", "--dist", files["u4.dist"], "--delta", "0.25", "--quantity", "G",
         "--method", "greedy"],
    )
    assert as_dict(out2)["method"] == "greedy"


def test_bounds(files, capsys):
    code, out, _ = run(
        capsys,
        ["bounds", "--dist", files["u4.dist"], "--cost", files["unit.cost"],
         "--epsilon", "0", "--n", "1", "--gamma", "0.01"],
    )
    assert code == 0
    kv = as_dict(out)
    assert float(kv["converse"]) == 2.0
    assert abs(float(kv["achievability"]) - 5.01) <= 1e-9


def test_build_encode_decode_roundtrip(files, capsys):
    args = ["--dist", files["bern3.dist"], "--cost", files["unit.cost"],
            "--epsilon", "0", "--n", "2"]
    code, out, _ = run(capsys, ["build-code"] + args)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].startswith("escape 2 representative 0,0 alpha ")
    assert len(lines) == 5  # header plus four blocks
    code, out, _ = run(capsys, ["encode"] + args + ["--block", "0,1"])
    assert code == 0
    word = as_dict(out)["word"]
    code, out, _ = run(capsys, ["decode"] + args + ["--word", word])
    assert code == 0
    assert as_dict(out)["block"] == "0,1"


def test_decode_rejects_non_codeword(files, capsys):
    code, _, err = run(
        capsys,
        ["decode", "--dist", files["u4.dist"], "--cost", files["unit.cost"],
         "--epsilon", "0", "--word", "21111"],
    )
    assert code == 1
    assert "not a codeword" in err


def test_transcode(files, capsys):
    args = ["--dist", files["u4.dist"], "--cost", files["unit.cost"],
            "--epsilon", "0.25", "--to-cost", files["golden.cost"]]
    code, out, _ = run(capsys, ["transcode"] + args)
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 4  # header plus the three kept blocks
    assert lines[0].split()[1] == "2"


def test_second_order_and_rate_seq(files, capsys):
    code, out, _ = run(
        capsys,
        ["second-order", "--dist", files["bern3.dist"], "--cost", files["unit.cost"],
         "--epsilon", "0.1", "--n-max", "3"],
    )
    assert code == 0
    assert out.count("\n") == 3
    code, out, _ = run(
        capsys,
        ["rate-seq", "--dist", files["bern3.dist"], "--delta", "0.1", "--n-max", "2",
         "--cost", files["golden.cost"], "--table"],
    )
    assert code == 0
    header = out.split("\n")[0].split("\t")
    assert header[:3] == ["n", "h_value", "g_value"]
    assert "h_cost_rate" in header


def test_relation_check(files, capsys):
    code, out, _ = run(
        capsys,
        ["relation-check", "--dist", files["bern3.dist"], "--cost", files["unit.cost"],
         "--to-cost", files["golden.cost"], "--epsilon", "0.1"],
    )
    assert code == 0
    kv = as_dict(out)
    assert kv["ok"] == "true"
    assert abs(float(kv["first_order_diff"])) <= 1e-9


def test_appendix_report(files, capsys):
    code, out, _ = run(
        capsys,
        ["appendix-report", "--dist", files["bern3.dist"], "--delta", "0.1", "--n-max", "3"],
    )
    assert code == 0
    kv = as_dict(out)
    assert abs(float(kv["target"]) - 0.793162) <= 1e-5


def test_sandwich_test_determinism(files, capsys):
    argv = ["sandwich-test", "--seed", "7", "--trials", "4"]
    code1, out1, _ = run(capsys, argv)
    code2, out2, _ = run(capsys, argv)
    assert code1 == code2 == 0
    assert out1 == out2
    assert "violations=0" in out1


def test_exit_codes(files, tmp_path, capsys):
    bad = tmp_path / "bad.cost"
    bad.write_text("K 2 depth 0\n- 1 nope\n")
    code, _, err = run(capsys, ["alpha", "--cost", str(bad)])
    assert code == 1 and "bad.cost:2" in err
    code, _, err = run(capsys, ["alpha", "--cost", str(tmp_path / "missing.cost")])
    assert code == 1
    # support blowup surfaces as the infeasible exit code
    code, _, err = run(
        capsys,
        ["rate-seq", "--dist", files["bern3.dist"], "--delta", "0.0", "--n-max", "25"],
    )
    assert code == 2
