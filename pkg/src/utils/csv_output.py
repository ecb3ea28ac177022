import csv
import logging
from collections.abc import Iterable
from pathlib import Path

from src.core import CSV_COLUMNS, CSV_SCHEMA_VERSION
from src.schemas import ExecStats

logger = logging.getLogger(__name__)


def csv_header_comment() -> str:
    return f"# caa-bench schema v{CSV_SCHEMA_VERSION}: {','.join(CSV_COLUMNS)}"


def write_bench_csv(path: Path, rows: Iterable[ExecStats]) -> int:
    """
    Grava os registros do benchmark com uma linha de comentário versionada antes do cabeçalho.

    Args:
        path (Path): Destino (a pasta é criada se necessário).
        rows (Iterable[ExecStats]): Registros na ordem de execução.

    Returns:
        int: Quantidade de linhas de dados gravadas.
    """
    path.parent.mkdir(parents=True, exist_ok=True)

    count = 0
    with path.open("w", encoding="utf-8", newline="") as f:
        f.write(csv_header_comment() + "\n")
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for stats in rows:
            writer.writerow(stats.csv_row())
            count += 1

    logger.info(f"{count} linhas gravadas em {path}")
    return count


def read_bench_csv(path: Path) -> list[dict[str, str]]:
    """
    Lê um CSV do benchmark ignorando as linhas de comentário.
    """
    with path.open("r", encoding="utf-8", newline="") as f:
        lines = [line for line in f if not line.startswith("#")]
    return list(csv.DictReader(lines))
