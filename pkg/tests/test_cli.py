import pytest

from main import main, parse_arguments
from src.utils import read_bench_csv

TINY_GRID = ["--heights", "1", "2", "--widths", "2", "--channels", "1"]


class TestParsing:
    def test_command_is_required(self):
        with pytest.raises(SystemExit):
            parse_arguments([])

    def test_common_flags(self):
        args = parse_arguments(["bench", "--seed", "3", "--dtype", "float64", "--groups", "1", "2"])
        assert args.seed == 3
        assert args.dtype == "float64"
        assert args.groups == [1, 2]


class TestFlopsCommand:
    def test_default_geometry(self, capsys):
        assert main(["flops"]) == 0
        out = capsys.readouterr().out
        assert "channelized" in out
        assert "axial/self" in out

    def test_gate_sweep(self, capsys):
        assert main(["flops", "--gate-sweep"]) == 0
        assert "256" in capsys.readouterr().out

    def test_mismatched_resolutions(self):
        assert main(["flops", "--heights", "8", "16", "--widths", "8"]) == 1


class TestVerifyCommand:
    def test_selected_suites_pass(self):
        assert main(["verify", *TINY_GRID, "--suite", "oracle", "--suite", "bypass"]) == 0

    def test_mutation_fails(self, capsys):
        assert main(["verify", *TINY_GRID, "--suite", "oracle", "--mutate"]) == 1
        assert "menor caso com falha" in capsys.readouterr().out

    def test_unknown_suite(self):
        assert main(["verify", "--suite", "nope"]) == 1

    def test_invalid_grid(self):
        assert main(["verify", "--heights", "0", "--suite", "bypass"]) == 1


class TestBenchCommand:
    def test_writes_csv(self, tmp_path):
        out = tmp_path / "bench.csv"
        args = ["bench", "--heights", "4", "--widths", "4", "--channels", "2", "--groups", "1", "2", "8"]
        assert main([*args, "--repeats", "1", "--out", str(out)]) == 0

        assert out.read_text(encoding="utf-8").startswith("# ")
        assert [r["G"] for r in read_bench_csv(out)] == ["1", "2"]


class TestFixturesCommand:
    def test_rewrite_is_byte_identical(self, tmp_path):
        sizes = ["--heights", "2", "--widths", "3", "--channels", "2"]
        assert main(["fixtures", *sizes, "--out", str(tmp_path / "a")]) == 0
        assert main(["fixtures", *sizes, "--out", str(tmp_path / "b")]) == 0

        first, second = tmp_path / "a", tmp_path / "b"
        files = sorted(p.relative_to(first) for p in first.rglob("*") if p.is_file())
        assert files
        for rel in files:
            assert (first / rel).read_bytes() == (second / rel).read_bytes()

    def test_oracle_cap_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CAA_ORACLE_CAP", "10")
        assert main(["fixtures", "--out", str(tmp_path / "fx")]) == 1
        assert not (tmp_path / "fx").exists()

    def test_float64_only(self, tmp_path):
        assert main(["fixtures", "--dtype", "float32", "--out", str(tmp_path)]) == 1

    def test_replay_through_verify(self, tmp_path):
        assert main(["fixtures", "--out", str(tmp_path)]) == 0
        assert main(["verify", "--suite", "fixtures", "--fixtures-dir", str(tmp_path)]) == 0
