"""
Hierarquia de exceções do projeto.
Todas derivam de CAAError para que a CLI consiga isolar falhas do domínio.
"""


class CAAError(Exception):
    """
    Erro base do domínio de atenção axial canalizada.
    """


class ShapeError(CAAError, ValueError):
    """
    Formatos incompatíveis entre operandos ou com a configuração.
    """


class BroadcastError(ShapeError):
    """
    Operandos que não obedecem à regra de broadcast pelos eixos finais.
    """

    def __init__(self, left: tuple[int, ...], right: tuple[int, ...]):
        self.left = left
        self.right = right
        super().__init__(f"Broadcast impossível entre os formatos {left} e {right}")


class AxisError(CAAError, ValueError):
    """
    Eixo inválido, repetido ou permutação mal formada.
    """


class DTypeError(CAAError, TypeError):
    """
    Tipo de elemento não suportado ou operandos com tipos diferentes.
    """


class NonFiniteError(CAAError, ArithmeticError):
    """
    Operação produziu NaN ou infinito.
    """


class TapeError(CAAError):
    """
    Uso incorreto da fita de diferenciação reversa.
    """


class StageMismatchError(CAAError, ValueError):
    """
    Portão configurado para um estágio diferente do exigido.
    """


class OracleCapError(CAAError):
    """
    Entrada excede o limite de materialização dos oráculos.
    """


class PlanError(CAAError, ValueError):
    """
    Plano de execução em grupos inconsistente com a entrada.
    """


class InfeasibleBudgetError(PlanError):
    """
    Nenhuma quantidade de grupos cabe no orçamento de memória informado.
    """


class ContainerFormatError(CAAError):
    """
    Arquivo de tensor corrompido ou com cabeçalho inesperado.
    """
