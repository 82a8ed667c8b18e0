import pytest

from noncommutator import cli
from noncommutator.cli import GroupFileError, embedded_group_file, main, parse_group_file
from noncommutator.machale import MACHALE_GENERATORS


def write_group(tmp_path, name, text):
    path = tmp_path / f"{name}.txt"
    path.write_text(text)
    return str(path)


@pytest.fixture
def s4(tmp_path):
    return write_group(tmp_path, "s4", "# symmetric group on 4 points\ndegree 4\n(1,2)\n(1,2,3,4)\n")


@pytest.fixture
def q8(tmp_path):
    return write_group(tmp_path, "q8", "degree 8\n(1,2,4,8)(3,6,7,5)\n(1,3,4,7)(2,5,8,6)\n")


@pytest.fixture
def c2a5(tmp_path):
    return write_group(tmp_path, "c2a5", "degree 7\n(1,2)\n(3,4,5)\n(3,4,6)\n(3,4,7)\n")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_group_file():
    gf = parse_group_file("degree 3  # comment\n\n(1,2)\n(1,2,3)\n")
    assert gf.degree == 3 and len(gf.generators) == 2
    assert parse_group_file(gf.text()).generators == gf.generators


@pytest.mark.parametrize("text,line", [("", 1), ("(1,2)\n", 1), ("degree 3\n(1,2)\n(1,4)\n", 3),
                                       ("degree 0\n", 1), ("degree 3\n\n(1,2\n", 3)])
def test_parse_group_file_errors(text, line):
    with pytest.raises(GroupFileError) as e:
        parse_group_file(text)
    assert e.value.lineno == line and f"line {line}" in str(e.value)


def test_embedded_group_file_text():
    gf = embedded_group_file()
    assert gf.degree == 44
    assert parse_group_file(gf.text()).generators == gf.generators
    assert len(gf.generators) == len(MACHALE_GENERATORS)


def test_parse_error_exit_code(capsys, tmp_path):
    bad = write_group(tmp_path, "bad", "degree 4\n(1,2)\n(1,5)\n")
    code, _, err = run(capsys, "order", "--group", bad)
    assert code == cli.EXIT_PARSE and "line 3" in err


def test_order(capsys, s4):
    assert run(capsys, "order", "--group", s4)[:2] == (0, "24\n")
    assert run(capsys, "order", "--group", s4, "--oracle")[:2] == (0, "24\n")


def test_center_and_derived(capsys, q8, s4):
    code, out, _ = run(capsys, "center", "--group", q8)
    lines = out.split()
    assert code == 0 and lines[0] == "2" and len(out.splitlines()) == 2
    assert run(capsys, "center", "--group", q8, "--oracle")[1] == out
    assert run(capsys, "derived", "--group", s4)[1] == "12\n"
    assert run(capsys, "derived", "--group", s4, "--oracle")[1] == "12\n"


def test_perfect(capsys, s4, tmp_path):
    a5 = write_group(tmp_path, "a5", "degree 5\n(1,2,3)\n(1,2,3,4,5)\n")
    assert run(capsys, "perfect", "--group", s4)[1] == "false\n"
    assert run(capsys, "perfect", "--group", a5)[1] == "true\n"
    assert run(capsys, "perfect", "--group", a5, "--oracle")[1] == "true\n"


def test_blocks(capsys, tmp_path):
    # C2 wr C3 acting on 6 points with blocks {1,2},{3,4},{5,6}
    g = write_group(tmp_path, "w", "degree 6\n(1,2)\n(1,3,5)(2,4,6)\n")
    code, out, _ = run(capsys, "blocks", "--group", g, "--wreath")
    assert code == 0
    assert "image order 3" in out and "transitive true" in out
    assert "wreath order 24" in out


def test_classes_roundtrip(capsys, s4, tmp_path):
    inv = tmp_path / "inv.txt"
    code, out, _ = run(capsys, "classes", "--group", s4, "--out", str(inv))
    assert (code, out) == (0, "5\n")
    assert inv.read_text().startswith("inventory order 24 classes 5 degree 4")
    code, out, _ = run(capsys, "classes", "--group", s4, "--oracle")
    assert out.splitlines()[0] == "5" and sorted(map(int, out.split()[1:])) == [1, 3, 6, 6, 8]


def test_witnesses_and_check(capsys, c2a5, tmp_path):
    inv, wit = tmp_path / "inv.txt", tmp_path / "wit.txt"
    assert run(capsys, "classes", "--group", c2a5, "--out", str(inv))[0] == 0
    code, out, err = run(capsys, "witnesses", "--group", c2a5, "--inventory", str(inv), "--out", str(wit))
    assert (code, out) == (0, "5\n")
    assert err.count("commutator-free") == 4
    code, out, _ = run(capsys, "check", "--group", c2a5, "--inventory", str(inv), "--witnesses", str(wit),
                       "--expect", "5")
    assert code == 0 and "PASS" in out and "t class excluded true" in out
    code, out, _ = run(capsys, "check", "--group", c2a5, "--inventory", str(inv), "--witnesses", str(wit))
    assert code == cli.EXIT_VERIFY and "FAIL" in out


def test_check_truncated_witnesses(capsys, c2a5, tmp_path):
    wit = tmp_path / "wit.txt"
    run(capsys, "witnesses", "--group", c2a5, "--out", str(wit))
    lines = wit.read_text().splitlines()
    head = lines[0].split()
    head[1] = str(len(lines) - 2)
    wit.write_text("\n".join([" ".join(head)] + lines[1:-1]) + "\n")
    code, out, _ = run(capsys, "check", "--group", c2a5, "--witnesses", str(wit), "--expect", "5")
    assert code == cli.EXIT_VERIFY and "4 of 5" in out


def test_check_requires_witnesses(capsys, s4):
    assert run(capsys, "check", "--group", s4)[0] == cli.EXIT_PARSE


def test_verify_non_perfect(capsys, s4, tmp_path):
    out = tmp_path / "rep.txt"
    code, stdout, _ = run(capsys, "verify", "--group", s4, "--out", str(out))
    assert code == cli.EXIT_VERIFY
    assert "FAILED at stage perfectness" in stdout
    text = out.read_text()
    assert "perfect=false" in text and "theoremReproduced=false" in text
    assert (tmp_path / "rep.txt.timings").exists()


def test_budget_exit(capsys):
    code, _, err = run(capsys, "classes", "--budget-nodes", "1")
    assert code == cli.EXIT_BUDGET and "budget" in err


def test_quotient_demo(capsys):
    code, out, _ = run(capsys, "quotient-demo")
    assert code == 0
    assert "Q8: |G|=8" in out and "|K|=32" in out and "D16: |G|=16" in out
    assert "identity=FAILS" not in out
    assert "137936812337056972800" in out
