import logging

from src.core import CAAError
from src.groupexec import measure
from src.schemas import AttnDims, BenchConfig, ExecStats, GateStage
from src.tensor import Rng
from src.utils import init_attn_params, init_gate_params, init_input, write_bench_csv

logger = logging.getLogger(__name__)


class BenchPipeline:
    """
    Estudo de velocidade × memória da execução em grupos.

    Para cada resolução e quantidade de canais sorteia entrada e pesos com a semente global
    e mede cada G válido. Combinações inválidas são puladas com aviso; falhas de uma
    combinação são registradas e o estudo continua.
    """

    def run(self, config: BenchConfig) -> list[ExecStats]:
        """
        Executa o estudo e grava o CSV em `config.out_path`.

        Args:
            config (BenchConfig): Resoluções, canais, grupos, repetições, tipo e destino.

        Returns:
            list[ExecStats]: Registros na ordem de gravação.
        """
        logger.info("=== Iniciando benchmark da execução em grupos ===")

        rows: list[ExecStats] = []
        for height, width in config.resolutions:
            for channels in config.channels:
                rows.extend(self._run_geometry(config, height, width, channels))

        write_bench_csv(config.out_path, rows)
        logger.info(f"=== Benchmark concluído: {len(rows)} registros ===")
        return rows

    def _run_geometry(
        self, config: BenchConfig, height: int, width: int, channels: int
    ) -> list[ExecStats]:
        dims = AttnDims(
            height=height,
            width=width,
            channels=channels,
            query_channels=channels,
            value_channels=channels,
        )
        rng = Rng(config.seed).child(f"bench/{height}x{width}x{channels}")

        x = init_input(rng, dims, batch=1, dtype=config.dtype)
        params = init_attn_params(rng, dims, config.dtype)
        gc = init_gate_params(rng, GateStage.COLUMN, channels, config.gate, config.dtype)
        gr = init_gate_params(rng, GateStage.ROW, channels, config.gate, config.dtype)

        logger.info(f"Geometria H={height}, W={width}, C={channels} ({config.dtype.value})")

        rows = []
        for groups in config.groups:
            if groups > height:
                logger.warning(f"Combinação ignorada: G={groups} maior que H={height}")
                continue

            try:
                (stats,) = measure(x, params, (gc, gr), [groups], repeats=config.repeats)
            except CAAError as e:
                logger.error(f"Falha em H={height}, W={width}, C={channels}, G={groups}: {e}")
                continue

            logger.info(
                f"G={groups}: {stats.wall_time:.4f}s, pico de {stats.peak_intermediate_elements} "
                f"elementos (padding {stats.padding})"
            )
            rows.append(stats)

        return rows
