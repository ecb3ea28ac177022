import logging

from src.core import PlanError
from src.schemas import SuiteResult, VerifyConfig
from src.services.suites import ALL_SUITES, BaseSuite

logger = logging.getLogger(__name__)


class VerificationRunner:
    """
    Executa as suítes de verificação e resume o resultado numa tabela.

    Uma suíte que quebra por completo (ex.: erro ao gerar os casos) é registrada como
    falha e as demais continuam rodando.
    """

    def __init__(self, config: VerifyConfig):
        self.config = config
        self.suites = self._select(config.suites)

    @staticmethod
    def _select(names: list[str] | None) -> list[type[BaseSuite]]:
        if not names:
            return list(ALL_SUITES)

        known = {suite.name: suite for suite in ALL_SUITES}
        unknown = [name for name in names if name not in known]
        if unknown:
            raise PlanError(f"Suítes desconhecidas: {', '.join(unknown)}. Disponíveis: {', '.join(known)}")
        return [known[name] for name in names]

    def run(self) -> list[SuiteResult]:
        logger.info(
            f"=== Iniciando verificação: {len(self.suites)} suítes, semente {self.config.seed} ==="
        )
        if self.config.mutate:
            logger.warning("Mutação ativa: o caminho eficiente usa um portão perturbado")

        results = []
        for suite_cls in self.suites:
            try:
                results.append(suite_cls(self.config).run())
            except Exception as e:
                logger.error(f"Suíte {suite_cls.name} interrompida: {e}")
                results.append(SuiteResult(name=suite_cls.name, passed=False, first_failure=str(e)))

        return results

    @staticmethod
    def render(results: list[SuiteResult]) -> str:
        """
        Tabela de aprovação por suíte, com o menor caso divergente de cada falha.
        """
        lines = [f"{'suíte':<15}{'status':<8}{'casos':>7}{'falhas':>8}{'tempo':>10}"]
        lines.append("-" * len(lines[0]))
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            lines.append(f"{r.name:<15}{status:<8}{r.cases:>7}{r.failures:>8}{r.seconds:>9.2f}s")

        for r in results:
            if r.first_failure:
                lines.append(f"[{r.name}] menor caso com falha: {r.first_failure}")
        return "\n".join(lines)
