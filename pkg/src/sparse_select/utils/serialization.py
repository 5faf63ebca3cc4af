"""
Leitura e escrita dos artefatos: JSON ordenado para resultados
estruturados e CSV para tabelas.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..core.exceptions import DataError
from .formatting import to_builtin
from .logging_setup import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]
INTERCEPT_LABEL = "(intercept)"
FLOAT_FORMAT = "%.17g"


def write_json(path: PathLike, payload: Mapping[str, Any]) -> Path:
    """Grava JSON com chaves ordenadas (saída determinística)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_builtin(payload), sort_keys=True, indent=2, ensure_ascii=False) + "\n",
                    encoding="utf-8")
    return path


def read_json(path: PathLike) -> Dict[str, Any]:
    """
    Lê um JSON.

    Raises:
        DataError: Arquivo ausente ou JSON inválido
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"Arquivo não encontrado: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as error:
        raise DataError(f"JSON inválido em {path}: {error}") from error


def _write_frame(path: PathLike, frame: pd.DataFrame) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def read_table(path: PathLike) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"Arquivo não encontrado: {path}")
    return pd.read_csv(path)


# =============================================================================
# Coeficientes e seleções
# =============================================================================

def write_coefficients(
    path: PathLike,
    names: Sequence[str],
    coefficients: Iterable[float],
    intercept: float = 0.0,
) -> Path:
    """CSV (variable, coefficient) com o intercepto na primeira linha."""
    frame = pd.DataFrame({
        "variable": [INTERCEPT_LABEL] + list(names),
        "coefficient": [float(intercept)] + [float(c) for c in coefficients],
    })
    return _write_frame(path, frame)


def read_coefficients(path: PathLike) -> Tuple[float, Dict[str, float]]:
    """
    Lê um CSV de coeficientes.

    Returns:
        (intercepto, nome → coeficiente)
    """
    frame = read_table(path)
    if list(frame.columns[:2]) != ["variable", "coefficient"]:
        raise DataError(f"{path}: esperado cabeçalho variable,coefficient")
    values = dict(zip(frame["variable"].astype(str), frame["coefficient"].astype(float)))
    intercept = values.pop(INTERCEPT_LABEL, 0.0)
    return float(intercept), values


def write_selection(output_dir: PathLike, payload: Mapping[str, Any]) -> Dict[str, Path]:
    """
    Grava selection.json e coefficients.csv de uma seleção.

    Args:
        output_dir: Diretório de saída
        payload: Dicionário com selected, coefficients (nome → valor) e intercept
    """
    output_dir = Path(output_dir)
    coefficients = dict(payload.get("coefficients", {}))
    return {
        "selection": write_json(output_dir / "selection.json", payload),
        "coefficients": write_coefficients(
            output_dir / "coefficients.csv", list(coefficients), coefficients.values(),
            payload.get("intercept") or 0.0,
        ),
    }


def read_selection(path: PathLike) -> Dict[str, Any]:
    """
    Lê selection.json (ou o JSON de um ajuste) e valida a chave selected.

    Raises:
        DataError: Se selected estiver ausente
    """
    payload = read_json(path)
    if "selected" not in payload:
        raise DataError(f"{path}: chave 'selected' ausente")
    return payload


# =============================================================================
# λ, validação cruzada e caminho
# =============================================================================

def write_lambda(path: PathLike, values: Iterable[float]) -> Path:
    """CSV de uma coluna (lambda)."""
    return _write_frame(path, pd.DataFrame({"lambda": [float(v) for v in values]}))


def read_lambda(path: PathLike) -> np.ndarray:
    """
    Lê uma sequência λ de CSV de uma coluna, com ou sem cabeçalho.

    Raises:
        DataError: Mais de uma coluna ou célula não numérica
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"Arquivo não encontrado: {path}")
    frame = pd.read_csv(path, header=None, dtype=str)
    if frame.shape[1] != 1:
        raise DataError(f"{path}: esperada uma única coluna, encontradas {frame.shape[1]}")
    cells = frame.iloc[:, 0].str.strip()
    if cells.iloc[0].lower() == "lambda":
        cells = cells.iloc[1:]
    values = pd.to_numeric(cells, errors="coerce")
    if values.isna().any():
        raise DataError(f"{path}: valor não numérico na sequência λ")
    return values.to_numpy(dtype=float)


def write_cv_table(path: PathLike, result: Any) -> Path:
    """Tabela (ponto, erro médio, se) de um CvResult."""
    return _write_frame(path, result.table())


def path_table(points: Sequence[Any]) -> pd.DataFrame:
    """Uma linha por ponto do caminho: escala, não nulos, clusters, objetivo."""
    return pd.DataFrame({
        "scale": [point.scale for point in points],
        "nonzero": [point.fit.n_nonzero for point in points],
        "clusters": [point.fit.n_clusters for point in points],
        "objective": [point.fit.objective for point in points],
        "converged": [point.fit.converged for point in points],
    })


def write_path_table(path: PathLike, points: Sequence[Any]) -> Path:
    return _write_frame(path, path_table(points))


# =============================================================================
# Knockoffs e simulação
# =============================================================================

def write_knockoff(output_dir: PathLike, payload: Mapping[str, Any]) -> Dict[str, Path]:
    """Grava knockoff.json (t̂, Ŝ, q) e W.csv (variable, W)."""
    output_dir = Path(output_dir)
    W = dict(payload["W"])
    summary = {key: value for key, value in payload.items() if key != "W"}
    return {
        "knockoff": write_json(output_dir / "knockoff.json", summary),
        "W": _write_frame(output_dir / "W.csv", pd.DataFrame({"variable": list(W), "W": list(W.values())})),
    }


def write_simulation(report: Any, output_dir: PathLike, name: str) -> Dict[str, Path]:
    """
    Grava <name>_records.csv (por réplica) e <name>_summary.csv (formato longo).

    Returns:
        Tipo → caminho gravado
    """
    output_dir = Path(output_dir)
    paths = {
        "records": _write_frame(output_dir / f"{name}_records.csv", report.records),
        "summary": _write_frame(output_dir / f"{name}_summary.csv", report.summary),
    }
    logger.info("Resultados de %s gravados em %s", name, output_dir)
    return paths


def read_summary(path: PathLike) -> pd.DataFrame:
    """
    Lê a tabela longa de um estudo.

    Raises:
        DataError: Se faltarem colunas do formato longo
    """
    frame = read_table(path)
    missing: List[str] = [c for c in ("scenario", "n", "method", "metric", "value", "se") if c not in frame.columns]
    if missing:
        raise DataError(f"{path}: colunas ausentes {missing}")
    return frame
