"""
Modelo analítico de custo das camadas de atenção, em multiplicações-acumulações (MACs).

Modelo (1 MAC = 2 FLOPs):
    - Projeções 1×1: H·W·C·(Cq + Cv) na autoatenção (θ e g); H·W·C·(2·Cq + Cv) na axial (θ, φ e g).
    - Autoatenção: (HW)²·Cq para os logits e (HW)²·Cv para aplicar os pesos aos valores.
    - Axial: HW·(H+W)·Cq para os mapas de coluna e linha e HW·(H+W)·Cv para aplicá-los.
    - Portões: cada ponto de inserção custa o tamanho das matrizes do MLP
      (Cv·w + (L−1)·w² + w·Cv). A versão canalizada da axial tem dois pontos (coluna e
      linha); a da autoatenção, um.

O custo denso dos portões (MLP avaliado em cada posição espacial mantida pelo portão) é
reportado à parte, sem entrar no total.
"""

from src.schemas import AttentionKind, AttnDims, FlopReport, GateConfig


def _gate_sites(kind: AttentionKind) -> int:
    if kind is AttentionKind.CHANNELIZED:
        return 2
    if kind is AttentionKind.CHANNELIZED_SELF:
        return 1
    return 0


def _gate_evaluations(kind: AttentionKind, dims: AttnDims) -> int:
    # Coluna mantém (i, n); linha mantém j; autoatenção mantém (i, j)
    if kind is AttentionKind.CHANNELIZED:
        return dims.height * dims.width + dims.width
    if kind is AttentionKind.CHANNELIZED_SELF:
        return dims.height * dims.width
    return 0


def flops(
    kind: AttentionKind | str, dims: AttnDims, gate: GateConfig | None = None
) -> FlopReport:
    """
    Conta as MACs de uma camada de atenção segundo o modelo documentado no módulo.

    Args:
        kind (AttentionKind | str): self, axial, channelized ou channelized_self.
        dims (AttnDims): Geometria da camada.
        gate (GateConfig | None): Configuração dos portões; padrão 5 camadas de largura 128.

    Returns:
        FlopReport: Contagens por componente, total e fração de custo dos portões.
    """
    kind = AttentionKind(kind)
    gate = gate or GateConfig()

    hw = dims.height * dims.width
    c, cq, cv = dims.channels, dims.query_channels, dims.value_channels

    if kind in (AttentionKind.SELF, AttentionKind.CHANNELIZED_SELF):
        projection = hw * c * (cq + cv)
        attention = hw * hw * (cq + cv)
    else:
        projection = hw * c * (2 * cq + cv)
        attention = hw * (dims.height + dims.width) * (cq + cv)

    sites = _gate_sites(kind)
    per_gate = gate.macs_per_evaluation(cv) if sites else 0
    evaluations = _gate_evaluations(kind, dims)

    return FlopReport(
        kind=kind,
        height=dims.height,
        width=dims.width,
        channels=c,
        query_channels=cq,
        value_channels=cv,
        projection_macs=projection,
        attention_macs=attention,
        gate_sites=sites,
        gate_macs=per_gate * sites,
        gate_evaluations=evaluations,
        gate_macs_dense=per_gate * evaluations,
    )
