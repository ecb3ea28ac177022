from __future__ import annotations

from src.core.compat import StrEnum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core import DEFAULT_LEAKY_SLOPE
from src.tensor import Tensor


class GateStage(StrEnum):
    COLUMN = "column"
    ROW = "row"
    SELF = "self"


class Activation(StrEnum):
    RELU = "relu"
    LEAKY_RELU = "leaky_relu"


class AttnDims(BaseModel):
    """
    Geometria de uma camada de atenção: mapa H × W com C canais de entrada.
    """

    model_config = ConfigDict(frozen=True)

    height: int = Field(..., gt=0, description="Altura H do mapa de características.")
    width: int = Field(..., gt=0, description="Largura W do mapa de características.")
    channels: int = Field(..., gt=0, description="Canais C da entrada.")
    query_channels: int = Field(..., gt=0, description="Canais Cq de consulta/chave.")
    value_channels: int = Field(..., gt=0, description="Canais Cv dos valores.")

    @classmethod
    def square(cls, size: int, channels: int) -> AttnDims:
        """
        Atalho sem gargalo: H = W = size e Cq = Cv = C.
        """
        return cls(
            height=size,
            width=size,
            channels=channels,
            query_channels=channels,
            value_channels=channels,
        )


class AttnParams(BaseModel):
    """
    Matrizes de projeção θ (coluna), φ (linha) e g (valores) e a geometria da camada.

    Consulta e chave compartilham a mesma matriz em cada estágio; não há matriz de chave
    separada nem bias.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    theta: Tensor = Field(..., description="Projeção C × Cq do estágio de coluna.")
    phi: Tensor = Field(..., description="Projeção C × Cq do estágio de linha.")
    g: Tensor = Field(..., description="Projeção C × Cv dos valores.")
    dims: AttnDims

    @model_validator(mode="after")
    def check_shapes(self) -> AttnParams:
        d = self.dims
        expected = {
            "theta": (d.channels, d.query_channels),
            "phi": (d.channels, d.query_channels),
            "g": (d.channels, d.value_channels),
        }
        for name, shape in expected.items():
            tensor = getattr(self, name)
            if tensor.shape != shape:
                raise ValueError(f"{name} deveria ter formato {shape}, recebido {tensor.shape}")

        if not self.theta.dtype is self.phi.dtype is self.g.dtype:
            raise ValueError("θ, φ e g devem ter o mesmo tipo de elemento")
        return self

    @property
    def dtype(self):
        return self.theta.dtype

    def tensors(self) -> dict[str, Tensor]:
        return {"attn.theta": self.theta, "attn.phi": self.phi, "attn.g": self.g}

    def with_tensors(self, tensors: dict[str, Tensor]) -> AttnParams:
        """
        Cria uma cópia com parte das matrizes substituídas (chaves como em `tensors()`).
        """
        current = self.tensors() | {k: v for k, v in tensors.items() if k.startswith("attn.")}
        return AttnParams(
            theta=current["attn.theta"],
            phi=current["attn.phi"],
            g=current["attn.g"],
            dims=self.dims,
        )


class GateParams(BaseModel):
    """
    Pilha de pesos do MLP de atenção de canal espacialmente variável.

    `layer_count` camadas ocultas de largura `hidden_width`, cada uma seguida da ativação,
    mais uma projeção de saída para Cv seguida de sigmoid (não configurável).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    layers: list[Tensor] = Field(
        default_factory=list,
        description="Matrizes Cv→w, w→w (…), w→Cv, em ordem de aplicação.",
    )
    activation: Activation = Field(default=Activation.LEAKY_RELU)
    slope: float = Field(default=DEFAULT_LEAKY_SLOPE, ge=0.0, lt=1.0)
    stage: GateStage
    bypass: bool = Field(
        default=False, description="Congela o portão em 1 (o estágio deixa de ser canalizado)."
    )

    @model_validator(mode="after")
    def check_stack(self) -> GateParams:
        if not self.layers:
            if not self.bypass:
                raise ValueError("Portão sem camadas só é permitido com bypass")
            return self

        if len(self.layers) < 2:
            raise ValueError("O MLP do portão precisa de ao menos duas matrizes")

        for k, layer in enumerate(self.layers):
            if layer.ndim != 2:
                raise ValueError(f"Camada {k} deveria ser uma matriz, formato {layer.shape}")
            if layer.dtype is not self.layers[0].dtype:
                raise ValueError("Todas as camadas do portão devem ter o mesmo tipo")

        for k, (current, following) in enumerate(zip(self.layers, self.layers[1:])):
            if current.shape[1] != following.shape[0]:
                raise ValueError(
                    f"Largura incompatível entre as camadas {k} e {k + 1}: "
                    f"{current.shape} seguida de {following.shape}"
                )

        if self.layers[0].shape[0] != self.layers[-1].shape[1]:
            raise ValueError("A última camada deve devolver a largura de entrada (Cv)")
        return self

    @property
    def layer_count(self) -> int:
        return max(len(self.layers) - 1, 0)

    @property
    def hidden_width(self) -> int:
        return self.layers[0].shape[1] if self.layers else 0

    @property
    def value_channels(self) -> int | None:
        return self.layers[0].shape[0] if self.layers else None

    def tensors(self) -> dict[str, Tensor]:
        return {f"gate.{self.stage.value}.w{k}": layer for k, layer in enumerate(self.layers)}

    def with_tensors(self, tensors: dict[str, Tensor]) -> GateParams:
        current = self.tensors()
        layers = [tensors.get(name, layer) for name, layer in current.items()]
        return GateParams(
            layers=layers,
            activation=self.activation,
            slope=self.slope,
            stage=self.stage,
            bypass=self.bypass,
        )


class SEParams(BaseModel):
    """
    Pesos do bloco Squeeze-and-Excitation usado como linha de base (C→r→C).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    w1: Tensor = Field(..., description="Redução C × r.")
    w2: Tensor = Field(..., description="Expansão r × C.")
    bypass: bool = Field(default=False, description="Congela o portão de canal em 1.")

    @model_validator(mode="after")
    def check_shapes(self) -> SEParams:
        if self.w1.ndim != 2 or self.w2.ndim != 2:
            raise ValueError("w1 e w2 devem ser matrizes")
        if self.w1.shape[1] != self.w2.shape[0] or self.w1.shape[0] != self.w2.shape[1]:
            raise ValueError(f"Larguras incompatíveis no SE: {self.w1.shape} e {self.w2.shape}")
        return self

    @property
    def channels(self) -> int:
        return self.w1.shape[0]

    def tensors(self) -> dict[str, Tensor]:
        return {"se.w1": self.w1, "se.w2": self.w2}


class AttentionMaps(BaseModel):
    """
    Mapas de atenção normalizados por softmax.

    `a_col[i, m, j]` = A_col(x_{i,j}, x_{m,j}) normalizado em m (H × H × W) e
    `a_row[i, j, n]` = A_row(x_{i,j}, x_{i,n}) normalizado em n (H × W × W).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    a_col: Tensor
    a_row: Tensor


class Breakdown(BaseModel):
    """
    Características intermediárias ponderadas da atenção axial.

    `alpha_sum[i, j, n, c]` = Σ_m α_{i,j,m,n} e `beta[i, j, n, c]` = β_{i,j,n}; `alpha_full`
    (H × W × H × W × Cv) só existe quando materializado explicitamente.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: Tensor = Field(..., description="g(x) no layout Cv × H × W.")
    alpha_sum: Tensor
    beta: Tensor
    alpha_full: Tensor | None = None


class GateField(BaseModel):
    """
    Valores de um portão de canal já avaliado.

    Coluna: (i, n, c) com formato H × W × Cv; linha: (j, c) com formato W × Cv;
    autoatenção: (i, j, c) com formato H × W × Cv.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    stage: GateStage
    values: Tensor
    bypass: bool = Field(default=False, description="Portão congelado em 1.")

    @model_validator(mode="after")
    def check_range(self) -> GateField:
        expected_rank = 2 if self.stage is GateStage.ROW else 3
        if self.values.ndim != expected_rank:
            raise ValueError(
                f"Portão de {self.stage.value} deveria ter posto {expected_rank}, "
                f"formato {self.values.shape}"
            )

        arr = self.values.numpy()
        if self.bypass:
            if not (arr == 1).all():
                raise ValueError("Portão em bypass deve valer exatamente 1")
            return self

        if not ((arr > 0).all() and (arr < 1).all()):
            raise ValueError("Valores do portão fora do intervalo aberto (0, 1)")
        return self
