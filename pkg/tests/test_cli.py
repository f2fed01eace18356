import numpy as np
import pytest

from gpstd import fixtures
from gpstd.cli import (
    FileFormatError,
    format_decomposition,
    format_tensor,
    main,
    parse_decomposition,
    parse_tensor,
    read_decomposition,
    read_tensor,
    write_decomposition,
    write_tensor,
)
from gpstd.decompose import Decomposition, decomposition_error
from gpstd.symtensor import SymTensor

from conftest import crandn, random_tensor


@pytest.mark.parametrize("name", fixtures.NAMES)
def test_fixture_files_match_builders(name):
    text = fixtures.path(name).read_text()
    assert format_tensor(parse_tensor(text)) == text
    assert np.array_equal(fixtures.load(name).data, fixtures.build(name).data)


@pytest.mark.parametrize("fmt", ["uptri", "terms"])
def test_tensor_round_trip(fmt, rng):
    F = random_tensor(3, 3, rng)
    text = format_tensor(F, fmt)
    G = parse_tensor(text)
    assert G == F
    assert format_tensor(G, fmt) == text


def test_terms_missing_entries_are_zero():
    F = parse_tensor("symtensor 3 2 terms\n1 1 2.5 -1\n# comment\n\n0 0 1 0\n")
    assert F[(1, 1)] == 2.5 - 1j and F[(0, 0)] == 1
    assert np.count_nonzero(F.data) == 2


@pytest.mark.parametrize("text", [
    "", "tensor 3 3 uptri\n", "symtensor 3 3 uptri\n1 0\n", "symtensor 3 3 cube\n",
    "symtensor 3 2 terms\n3 0 1 0\n", "symtensor 3 2 uptri\n" + "1 x\n" * 6,
])
def test_bad_tensor_files(text):
    with pytest.raises(FileFormatError):
        parse_tensor(text)


def test_decomposition_round_trip(rng):
    dec = Decomposition(crandn(rng, 4, 3), 1.25e-13)
    text = format_decomposition(dec, 2, 3)
    n, m, back = parse_decomposition(text)
    assert (n, m) == (2, 3) and np.array_equal(back.vectors, dec.vectors) and back.error == dec.error
    assert format_decomposition(back, n, m) == text
    with pytest.raises(FileFormatError):
        parse_decomposition("decomposition 3 3 2 0.0\n1 0 1 0 1 0\n")


@pytest.fixture
def files(tmp_path):
    def put(name):
        p = tmp_path / f"{name}.tensor"
        write_tensor(p, fixtures.build(name))
        return p
    return put


def test_decompose_example_13(files, tmp_path, capsys):
    out = tmp_path / "e13.dec"
    assert main(["decompose", str(files("example_1_3")), "--rank", "3", "-o", str(out)]) == 0
    n, m, dec = read_decomposition(out)
    F = read_tensor(files("example_1_3"))
    assert dec.error <= 1e-10
    assert abs(decomposition_error(F, dec.vectors) - dec.error) <= 1e-10
    assert "r = 3, d = 0, ell = 0" in capsys.readouterr().out


def test_decompose_all_writes_indexed_set(files, tmp_path):
    out = tmp_path / "ex51.dec"
    code = main(["decompose", str(files("example_5_1")), "--rank", "4", "--mode", "all",
                 "--restarts", "300", "-o", str(out)])
    assert code == 0
    written = sorted(tmp_path.glob("ex51_*.dec"))
    assert len(written) == 7
    F = fixtures.build("example_5_1")
    for p in written:
        assert decomposition_error(F, read_decomposition(p)[2].vectors) <= 1e-8


def test_decompose_exit_codes(files, tmp_path, capsys):
    bad = tmp_path / "bad.tensor"
    bad.write_text("symtensor 3 3 uptri\n1 2 3\n")
    assert main(["decompose", str(bad)]) == 1
    assert main(["decompose", str(tmp_path / "missing.tensor")]) == 1
    assert main(["decompose", str(files("example_5_2")), "--rank", "4"]) == 3
    assert "increase the value of r" in capsys.readouterr().err
    # too few iterations to converge
    code = main(["decompose", str(files("example_5_2")), "--rank", "6", "--restarts", "1",
                 "--tol", "1e-300", "-o", str(tmp_path / "x.dec")])
    assert code == 2 and (tmp_path / "x.dec").exists()
    assert main(["decompose", str(files("example_5_2")), "--rank", "zero"]) == 1


def test_decompose_grow_retries(files, tmp_path):
    out = tmp_path / "g.dec"
    assert main(["decompose", str(files("example_5_2")), "--rank", "5", "--grow", "1",
                 "-o", str(out)]) == 0
    assert len(read_decomposition(out)[2]) == 6


def test_decompose_reduce_and_transform(files, tmp_path):
    out = tmp_path / "q.dec"
    assert main(["decompose", str(files("quartic")), "--rank", "6", "--transform", "--reduce",
                 "-o", str(out)]) == 0
    assert len(read_decomposition(out)[2]) == 2


def test_determinism(files, tmp_path, monkeypatch):
    src = str(files("example_5_2"))
    a, b, c = (tmp_path / f"{k}.dec" for k in "abc")
    main(["decompose", src, "--seed", "4", "-o", str(a)])
    main(["decompose", src, "--seed", "4", "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()
    monkeypatch.setenv("GPSTD_SEED", "4")
    main(["decompose", src, "-o", str(c)])
    assert c.read_bytes() == a.read_bytes()


def test_verify(files, tmp_path, capsys):
    t = files("example_1_3")
    good = tmp_path / "good.dec"
    U = fixtures.rank_one_rows("example_1_3")
    write_decomposition(good, Decomposition(U, 0.0), 2, 3)
    assert main(["verify", str(t), str(good)]) == 0
    U0 = U.copy()
    U0[1] = 0
    bad = tmp_path / "bad.dec"
    write_decomposition(bad, Decomposition(U0, 0.0), 2, 3)
    assert main(["verify", str(t), str(bad)]) != 0
    zero_t = tmp_path / "zero.tensor"
    write_tensor(zero_t, SymTensor.zeros(2, 3))
    empty = tmp_path / "empty.dec"
    write_decomposition(empty, Decomposition(np.zeros((0, 3)), 0.0), 2, 3)
    assert main(["verify", str(zero_t), str(empty)]) == 0
    other = tmp_path / "other.dec"
    write_decomposition(other, Decomposition(np.ones((1, 4)), 0.0), 3, 3)
    assert main(["verify", str(t), str(other)]) == 1


def test_catrank_genrank(files, capsys):
    assert main(["catrank", str(files("example_5_2"))]) == 0
    assert capsys.readouterr().out.strip() == "6"
    main(["genrank", "3", "3"])
    out = capsys.readouterr().out
    assert "generic rank 4" in out and "gap at r = 4: 2" in out
    main(["genrank", "4", "3"])
    out = capsys.readouterr().out
    assert "generic rank 5" in out and "gap at r = 5: 0" in out


def test_fixture_command(tmp_path, capsys):
    assert main(["fixture"]) == 0
    assert "example_5_1" in capsys.readouterr().out
    p = tmp_path / "f.tensor"
    assert main(["fixture", "example_5_1", "-o", str(p)]) == 0
    assert read_tensor(p) == fixtures.build("example_5_1")


def test_reproduce_command(capsys):
    assert main(["reproduce", "quartic"]) == 0
    assert "length 2" in capsys.readouterr().out
