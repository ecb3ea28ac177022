"""
Serviços dos comandos da CLI.
Conectam os kernels, a execução em grupos e os oráculos às suítes de verificação, ao
benchmark, ao modelo de custo e à gravação de fixtures.
"""

from src.services.bench import BenchPipeline
from src.services.fixtures import DEFAULT_FIXTURE_SIZES, FixtureWriter, replay_fixtures
from src.services.flop_report import GATE_SWEEP_DIMS, FlopReporter
from src.services.verification import VerificationRunner

__all__ = [
    "DEFAULT_FIXTURE_SIZES",
    "GATE_SWEEP_DIMS",
    "BenchPipeline",
    "FixtureWriter",
    "FlopReporter",
    "VerificationRunner",
    "replay_fixtures",
]
