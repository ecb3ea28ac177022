import logging

from src.core import GATE_SWEEP_CONFIGS
from src.kernels import flops
from src.schemas import AttentionKind, AttnDims, FlopReport, GateConfig

logger = logging.getLogger(__name__)

# Geometria de referência da varredura de profundidade/largura dos portões
GATE_SWEEP_DIMS = AttnDims.square(33, 512)


class FlopReporter:
    """
    Monta e formata os relatórios do modelo de custo.
    """

    HEADER = (
        f"{'camada':<18}{'depth':>6}{'width':>7}{'projeção':>16}{'atenção':>16}"
        f"{'portões':>12}{'total MACs':>16}{'FLOPs':>16}{'overhead':>11}"
    )

    def compare(self, dims: AttnDims, gate: GateConfig | None = None) -> list[FlopReport]:
        """
        Conta as quatro variantes de atenção para a mesma geometria.
        """
        gate = gate or GateConfig()
        logger.info(
            f"=== Modelo de custo: H={dims.height}, W={dims.width}, C={dims.channels}, "
            f"Cq={dims.query_channels}, Cv={dims.value_channels} ==="
        )
        return [flops(kind, dims, gate) for kind in AttentionKind]

    def gate_sweep(self, dims: AttnDims = GATE_SWEEP_DIMS) -> list[tuple[GateConfig, FlopReport]]:
        """
        Atenção axial canalizada em cada configuração (profundidade, largura) da varredura.
        """
        logger.info(f"=== Varredura de portões em H={dims.height}, W={dims.width}, C={dims.channels} ===")
        sweep = []
        for depth, width in GATE_SWEEP_CONFIGS:
            gate = GateConfig(depth=depth, width=width)
            sweep.append((gate, flops(AttentionKind.CHANNELIZED, dims, gate)))
        return sweep

    def render(self, rows: list[tuple[GateConfig, FlopReport]]) -> str:
        lines = [self.HEADER, "-" * len(self.HEADER)]
        for gate, r in rows:
            gated = r.gate_sites > 0
            lines.append(
                f"{r.kind.value:<18}"
                f"{(gate.depth if gated else '-'):>6}{(gate.width if gated else '-'):>7}"
                f"{r.projection_macs:>16,}{r.attention_macs:>16,}{r.gate_macs:>12,}"
                f"{r.total_macs:>16,}{r.flops:>16,}{r.gate_overhead_fraction:>11.2e}"
            )
        return "\n".join(lines)

    def ratios(self, reports: list[FlopReport]) -> str:
        by_kind = {r.kind: r for r in reports}
        axial = by_kind[AttentionKind.AXIAL]
        full = by_kind[AttentionKind.SELF]
        return (
            f"axial/self (atenção): {axial.attention_macs / full.attention_macs:.6f} | "
            f"axial/self (total): {axial.total_macs / full.total_macs:.6f} | "
            f"overhead dos portões (canalizada): "
            f"{by_kind[AttentionKind.CHANNELIZED].gate_overhead_fraction:.3e}"
        )
