import argparse
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from src.core import DEFAULT_SEED, CAAError, setup_logging
from src.schemas import AttnDims, BenchConfig, GateConfig, OracleCaps, VerifyConfig
from src.services import (
    DEFAULT_FIXTURE_SIZES,
    BenchPipeline,
    FixtureWriter,
    FlopReporter,
    VerificationRunner,
)
from src.tensor import DType

logger = logging.getLogger(__name__)


def _common_flags() -> argparse.ArgumentParser:
    """
    Flags aceitas por todos os comandos.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Semente global (padrão: 42).")
    common.add_argument(
        "--dtype",
        choices=[d.value for d in DType],
        default=None,
        help="Tipo de elemento (bench: float32 por padrão; oráculos e fixtures são sempre float64).",
    )
    common.add_argument("--heights", type=int, nargs="+", help="Alturas H.")
    common.add_argument("--widths", type=int, nargs="+", help="Larguras W.")
    common.add_argument("--channels", type=int, nargs="+", help="Canais C.")
    common.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        help="Ativa logs detalhados (DEBUG) no console.",
    )
    return common


def parse_arguments(argv: list[str] | None = None) -> argparse.Namespace:
    """
    Define e faz o parsing dos argumentos da linha de comando.

    Returns:
        argparse.Namespace: Objeto contendo os argumentos parseados.
    """
    parser = argparse.ArgumentParser(
        description="Atenção axial canalizada: verificação, benchmark, modelo de custo e fixtures.",
        epilog="Exemplo: python main.py bench --heights 16 32 64 --widths 16 32 64 --groups 1 2 4 8 16",
    )
    common = _common_flags()
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", parents=[common], help="Roda as suítes de verificação.")
    verify.add_argument("--suite", action="append", help="Suíte a executar (pode repetir).")
    verify.add_argument(
        "--mutate",
        action="store_true",
        help="Injeta uma falha: perturba um peso de portão só no caminho eficiente.",
    )
    verify.add_argument("--fixtures-dir", type=Path, default=None, help="Fixtures para replay.")

    bench = commands.add_parser("bench", parents=[common], help="Mede tempo e memória por G.")
    bench.add_argument("--groups", type=int, nargs="+", help="Valores de G.")
    bench.add_argument("--repeats", type=int, default=None, help="Repetições por combinação.")
    bench.add_argument("--out", type=Path, default=Path("bench.csv"), help="CSV de saída.")

    cost = commands.add_parser("flops", parents=[common], help="Imprime o modelo de custo.")
    cost.add_argument("--gate-depth", type=int, default=None, help="Camadas ocultas dos portões.")
    cost.add_argument("--gate-width", type=int, default=None, help="Largura dos portões.")
    cost.add_argument(
        "--gate-sweep",
        action="store_true",
        help="Varredura de profundidade/largura dos portões em H=W=33, C=512.",
    )

    fixtures = commands.add_parser("fixtures", parents=[common], help="Grava fixtures dos oráculos.")
    fixtures.add_argument("--out", type=Path, default=Path("fixtures"), help="Pasta de destino.")

    return parser.parse_args(argv)


def _grid_overrides(args: argparse.Namespace) -> dict:
    return {
        name: getattr(args, name)
        for name in ("heights", "widths", "channels")
        if getattr(args, name) is not None
    }


def cmd_verify(args: argparse.Namespace) -> int:
    config = VerifyConfig(
        seed=args.seed,
        suites=args.suite,
        mutate=args.mutate,
        fixture_dir=args.fixtures_dir,
        **_grid_overrides(args),
    )
    runner = VerificationRunner(config)
    results = runner.run()
    print(runner.render(results))
    return 0 if all(r.passed for r in results) else 1


def cmd_bench(args: argparse.Namespace) -> int:
    options = _grid_overrides(args)
    if args.groups is not None:
        options["groups"] = args.groups
    if args.repeats is not None:
        options["repeats"] = args.repeats
    if args.dtype is not None:
        options["dtype"] = args.dtype

    config = BenchConfig(seed=args.seed, out_path=args.out, **options)
    BenchPipeline().run(config)
    return 0


def cmd_flops(args: argparse.Namespace) -> int:
    reporter = FlopReporter()

    if args.gate_sweep:
        print(reporter.render(reporter.gate_sweep()))
        return 0

    gate_options = {}
    if args.gate_depth is not None:
        gate_options["depth"] = args.gate_depth
    if args.gate_width is not None:
        gate_options["width"] = args.gate_width
    gate = GateConfig(**gate_options)

    heights = args.heights or [33]
    widths = args.widths or heights
    if len(heights) != len(widths):
        raise ValueError("--heights e --widths devem ter o mesmo comprimento")

    for height, width in zip(heights, widths):
        for channels in args.channels or [512]:
            dims = AttnDims(
                height=height,
                width=width,
                channels=channels,
                query_channels=channels,
                value_channels=channels,
            )
            reports = reporter.compare(dims, gate)
            print(reporter.render([(gate, r) for r in reports]))
            print(reporter.ratios(reports))
            print()
    return 0


def cmd_fixtures(args: argparse.Namespace) -> int:
    if args.dtype not in (None, DType.FLOAT64.value):
        raise ValueError("As fixtures dos oráculos são sempre float64")

    if args.heights or args.widths or args.channels:
        heights = args.heights or []
        widths = args.widths or heights
        channels = args.channels or []
        if not (len(heights) == len(widths) == len(channels)):
            raise ValueError("--heights, --widths e --channels devem ter o mesmo comprimento")
        sizes = list(zip(heights, widths, channels))
    else:
        sizes = list(DEFAULT_FIXTURE_SIZES)

    written = FixtureWriter(args.seed, caps=OracleCaps()).write(args.out, sizes)
    logger.info(f"{len(written)} fixtures gravadas em {args.out}")
    return 0


COMMANDS = {
    "verify": cmd_verify,
    "bench": cmd_bench,
    "flops": cmd_flops,
    "fixtures": cmd_fixtures,
}


def main(argv: list[str] | None = None) -> int:
    """
    Função principal da CLI.

    Fluxo de execução:
    1. Parsing dos argumentos da linha de comando.
    2. Configuração do sistema de logs.
    3. Execução do comando escolhido.
    4. Tratamento de erros e código de saída (0 sucesso, 1 falha).
    """

    # Parsing dos Argumentos
    args = parse_arguments(argv)

    # Configuração de Logs
    setup_logging(verbose=args.verbose)

    try:
        return COMMANDS[args.command](args)

    except ValidationError as e:
        logger.critical(f"Configuração inválida: {e}")
        return 1

    except CAAError as e:
        logger.critical(f"{type(e).__name__}: {e}")
        if args.verbose:
            logger.exception("Detalhes do erro:")
        return 1

    except Exception as e:
        logger.critical(f"Erro fatal durante a execução de '{args.command}': {e}")

        # Imprime stack trace se estiver em modo verbose
        if args.verbose:
            logger.exception("Detalhes do erro:")

        return 1


if __name__ == "__main__":
    sys.exit(main())
