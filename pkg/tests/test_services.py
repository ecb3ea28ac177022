from dataclasses import replace
from pathlib import Path

import pytest

from src.core import DEFAULT_SEED, OracleCapError, PlanError
from src.schemas import (
    Activation,
    AttnDims,
    BenchConfig,
    GateConfig,
    OracleCaps,
    SuiteResult,
    VerifyConfig,
)
from src.services import (
    DEFAULT_FIXTURE_SIZES,
    BenchPipeline,
    FixtureWriter,
    FlopReporter,
    VerificationRunner,
    replay_fixtures,
)
from src.services.suites import (
    BypassSuite,
    DeterminismSuite,
    EquivarianceSuite,
    FixtureSuite,
    FlopSuite,
    GateSuite,
    GradientSuite,
    GridPoint,
    GroupSuite,
    MemorySuite,
    NormalizationSuite,
    OracleSuite,
    draw_sample,
)
from src.tensor import Tensor, read_bundle, write_bundle
from src.utils import read_bench_csv

COMMITTED_FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def tiny_config() -> VerifyConfig:
    return VerifyConfig(
        heights=[1, 3],
        widths=[2],
        channels=[1, 2],
        depths=[1, 3],
        activations=[Activation.LEAKY_RELU],
        seeds_per_case=1,
    )


class TestSuites:
    @pytest.mark.parametrize(
        "suite_cls",
        [
            OracleSuite,
            NormalizationSuite,
            BypassSuite,
            GateSuite,
            EquivarianceSuite,
            FlopSuite,
            DeterminismSuite,
            FixtureSuite,
            GroupSuite,
            MemorySuite,
            GradientSuite,
        ],
        ids=lambda cls: cls.name,
    )
    def test_passes_on_tiny_grid(self, tiny_config, suite_cls):
        result = suite_cls(tiny_config).run()
        assert result.passed, result.first_failure
        assert result.cases > 0

    def test_mutation_is_caught(self, tiny_config):
        config = tiny_config.model_copy(update={"mutate": True})
        result = OracleSuite(config).run()
        assert not result.passed
        assert result.first_failure is not None

    def test_reports_smallest_failure(self, tiny_config):
        config = tiny_config.model_copy(update={"mutate": True})
        result = OracleSuite(config).run()
        assert result.first_failure.startswith("H=1")

    def test_grid_is_deterministic(self, tiny_config):
        first = list(OracleSuite(tiny_config).grid())
        second = list(OracleSuite(tiny_config).grid())
        assert first == second
        assert len(first) == 2 * 1 * 2 * 2


class TestGradientSuite:
    def test_default_seed_passes(self):
        result = GradientSuite(VerifyConfig(suites=["gradients"])).run()
        assert result.passed, result.first_failure
        assert result.cases == 12

    def test_kink_distance_sees_zero_preactivation(self):
        point = GridPoint(2, 3, 3, 2, seed=1)
        s = draw_sample(point, GateConfig(depth=1, width=4))
        assert GradientSuite.kink_distance(s, "channelized_self") > 0.0

        w0 = s.gate_self.layers[0].numpy().copy()
        w0[:, 0] = 0.0
        gate = s.gate_self.with_tensors({"gate.self.w0": Tensor(w0)})
        flat = replace(s, gate_self=gate)
        assert GradientSuite.kink_distance(flat, "channelized_self") == 0.0


class TestVerificationRunner:
    def test_selects_suites_in_order(self, tiny_config):
        config = tiny_config.model_copy(update={"suites": ["bypass", "oracle"]})
        assert [s.name for s in VerificationRunner(config).suites] == ["bypass", "oracle"]

    def test_unknown_suite(self, tiny_config):
        config = tiny_config.model_copy(update={"suites": ["nope"]})
        with pytest.raises(PlanError):
            VerificationRunner(config)

    def test_render(self):
        table = VerificationRunner.render(
            [
                SuiteResult(name="oracle", passed=True, cases=3),
                SuiteResult(name="bypass", passed=False, cases=2, failures=1, first_failure="H=1 W=1"),
            ]
        )
        assert "PASS" in table and "FAIL" in table
        assert "[bypass] menor caso com falha: H=1 W=1" in table


class TestFixtures:
    def test_rewrite_is_identical(self, tmp_path):
        first = FixtureWriter(7).write(tmp_path / "a", [(2, 3, 2)])
        second = FixtureWriter(7).write(tmp_path / "b", [(2, 3, 2)])
        files = sorted(p.relative_to(first[0]) for p in first[0].rglob("*") if p.is_file())
        assert files
        for rel in files:
            assert (first[0] / rel).read_bytes() == (second[0] / rel).read_bytes()

    def test_replay_passes(self, tmp_path):
        FixtureWriter(7).write(tmp_path, [(2, 2, 1), (3, 2, 2)])
        assert replay_fixtures(tmp_path) == []

    def test_replay_detects_tampering(self, tmp_path):
        (case_dir,) = FixtureWriter(7).write(tmp_path, [(3, 3, 2)])
        stored = read_bundle(case_dir)
        stored["out.caa"] = Tensor(stored["out.caa"].numpy() * 1.001)
        write_bundle(case_dir, stored)

        mismatches = replay_fixtures(tmp_path)
        assert any("out.caa" in m for m in mismatches)
        assert not any("out.axial" in m for m in mismatches)

    def test_refuses_before_writing(self, tmp_path):
        writer = FixtureWriter(7, caps=OracleCaps(max_rank5_elements=100))
        with pytest.raises(OracleCapError):
            writer.write(tmp_path, [(2, 2, 1), (4, 4, 4)])
        assert not any(tmp_path.iterdir())

    def test_missing_directory(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            replay_fixtures(tmp_path / "missing")


@pytest.mark.skipif(not COMMITTED_FIXTURES.is_dir(), reason="gere com: python main.py fixtures --out tests/fixtures")
class TestCommittedFixtures:
    def test_replay_is_exact(self):
        assert replay_fixtures(COMMITTED_FIXTURES) == []

    def test_default_seed_reproduces_files(self, tmp_path):
        FixtureWriter(DEFAULT_SEED).write(tmp_path, DEFAULT_FIXTURE_SIZES)
        committed = sorted(p.relative_to(COMMITTED_FIXTURES) for p in COMMITTED_FIXTURES.rglob("*") if p.is_file())
        regenerated = sorted(p.relative_to(tmp_path) for p in tmp_path.rglob("*") if p.is_file())
        assert committed == regenerated
        for rel in committed:
            assert (COMMITTED_FIXTURES / rel).read_bytes() == (tmp_path / rel).read_bytes(), rel

    def test_includes_seeded_4x4x3_case(self):
        assert (COMMITTED_FIXTURES / "case_4x4x3" / "case.json").is_file()


class TestBenchPipeline:
    def test_skips_group_counts_above_height(self, tmp_path):
        config = BenchConfig(
            heights=[4],
            widths=[4],
            channels=[2],
            groups=[1, 2, 8],
            repeats=1,
            out_path=tmp_path / "bench.csv",
        )
        rows = BenchPipeline().run(config)
        assert [r.groups for r in rows] == [1, 2]

        lines = config.out_path.read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("# caa-bench schema v")
        records = read_bench_csv(config.out_path)
        assert [r["G"] for r in records] == ["1", "2"]

    def test_same_seed_same_peaks(self, tmp_path):
        config = BenchConfig(heights=[5], widths=[3], channels=[2], groups=[1, 3], repeats=1)
        runs = [
            BenchPipeline().run(config.model_copy(update={"out_path": tmp_path / f"{k}.csv"}))
            for k in range(2)
        ]
        assert [r.peak_intermediate_elements for r in runs[0]] == [
            r.peak_intermediate_elements for r in runs[1]
        ]

    def test_mismatched_resolutions(self):
        with pytest.raises(ValueError):
            BenchConfig(heights=[4, 8], widths=[4])


class TestFlopReporterDims:
    def test_square_dims(self):
        reports = FlopReporter().compare(AttnDims.square(4, 1))
        by_kind = {r.kind.value: r for r in reports}
        assert by_kind["self"].attention_macs == 2 * by_kind["axial"].attention_macs
