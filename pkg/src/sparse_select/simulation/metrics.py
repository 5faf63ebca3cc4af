"""
Métricas de seleção e estimação por réplica e seus agregados Monte Carlo.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

RECORD_COLUMNS = [
    "scenario", "n", "p", "k", "replicate", "method", "failed", "error",
    "selected", "tp", "fp", "fn", "sq_error", "pred_error", "beta_norm2", "signal_norm2",
]
SUMMARY_COLUMNS = ["scenario", "n", "method", "metric", "value", "se"]
METRIC_ORDER = [
    "fdr", "fwer", "power", "misclassifications", "bayes_risk", "selected",
    "mse", "msp", "rel_mse", "rel_msp", "failures",
]


@dataclass(frozen=True)
class Confusion:
    """Contagens de uma seleção frente ao suporte verdadeiro."""
    tp: int
    fp: int
    fn: int

    @property
    def selected(self) -> int:
        return self.tp + self.fp

    @property
    def fdp(self) -> float:
        return self.fp / max(1, self.fp + self.tp)


def confusion(selected: Iterable[int], truth: Iterable[int]) -> Confusion:
    """
    Compara índices selecionados com o suporte verdadeiro.

    Examples:
        >>> confusion([0, 1, 5], [0, 1, 2])
        Confusion(tp=2, fp=1, fn=1)
    """
    chosen, true = set(int(j) for j in selected), set(int(j) for j in truth)
    return Confusion(tp=len(chosen & true), fp=len(chosen - true), fn=len(true - chosen))


def bayes_risk(
    t1: float,
    t2: float,
    eta: float,
    p: int,
    delta0: float = 1.0,
    delta_a: float = 1.0,
) -> float:
    """
    Risco de Bayes do teste múltiplo sob perda aditiva.

    R = p((1 - η) t1 δ0 + η t2 δA), com t1 e t2 as taxas de erro tipo I e II.

    Examples:
        >>> bayes_risk(0.25, 0.5, 0.5, 8)
        3.0
    """
    return float(p * ((1.0 - eta) * t1 * delta0 + eta * t2 * delta_a))


def replicate_record(
    *,
    scenario: str,
    n: int,
    p: int,
    replicate: int,
    method: str,
    truth: Sequence[int],
    true_beta: np.ndarray,
    X: np.ndarray,
    support: Optional[Sequence[int]] = None,
    beta_hat: Optional[np.ndarray] = None,
    error: Optional[str] = None,
) -> Dict[str, Any]:
    """
    Registro bruto de um (réplica, método).

    Args:
        truth: Suporte verdadeiro
        true_beta: β verdadeiro (p,)
        X: Desenho da réplica
        support: Índices selecionados (None se o método falhou)
        beta_hat: Estimativa (p,)
        error: Mensagem de falha

    Returns:
        Dicionário com as colunas de RECORD_COLUMNS
    """
    record: Dict[str, Any] = {
        "scenario": scenario, "n": n, "p": p, "k": len(truth), "replicate": replicate, "method": method,
        "beta_norm2": float(true_beta @ true_beta),
        "signal_norm2": float(np.sum((X @ true_beta) ** 2)),
    }
    if support is None or beta_hat is None:
        record.update(failed=True, error=error or "falha", selected=np.nan, tp=np.nan, fp=np.nan,
                      fn=np.nan, sq_error=np.nan, pred_error=np.nan)
        return record
    counts = confusion(support, truth)
    diff = np.asarray(beta_hat, dtype=float) - true_beta
    record.update(
        failed=False, error="", selected=counts.selected, tp=counts.tp, fp=counts.fp, fn=counts.fn,
        sq_error=float(diff @ diff), pred_error=float(np.sum((X @ diff) ** 2)),
    )
    return record


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    values = values[~np.isnan(values)]
    if values.size == 0:
        return math.nan, math.nan
    if values.size == 1:
        return float(values.mean()), math.nan
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def _ratio(numerator: pd.Series, denominator: pd.Series) -> np.ndarray:
    num, den = numerator.to_numpy(dtype=float), denominator.to_numpy(dtype=float)
    out = np.full(num.shape, np.nan)
    np.divide(num, den, out=out, where=den > 0)
    return out


def _method_metrics(group: pd.DataFrame, delta0: float, delta_a: float) -> Dict[str, tuple[float, float]]:
    ok = group[~group["failed"].astype(bool)].sort_values("replicate")
    tp = ok["tp"].to_numpy(dtype=float)
    fp = ok["fp"].to_numpy(dtype=float)
    fn = ok["fn"].to_numpy(dtype=float)
    k = ok["k"].to_numpy(dtype=float)
    p = ok["p"].to_numpy(dtype=float)
    fdp = fp / np.maximum(1.0, fp + tp)
    power = np.full(tp.shape, np.nan)
    np.divide(tp, k, out=power, where=k > 0)
    risk = delta0 * fp + delta_a * fn
    results = {
        "fdr": _mean_se(fdp),
        "fwer": _mean_se((fp >= 1).astype(float)),
        "power": _mean_se(power),
        "misclassifications": _mean_se(fp + fn),
        "bayes_risk": _mean_se(risk),
        "selected": _mean_se(tp + fp),
        "mse": _mean_se(ok["sq_error"].to_numpy(dtype=float)),
        "msp": _mean_se(ok["pred_error"].to_numpy(dtype=float)),
        "rel_mse": _mean_se(_ratio(ok["sq_error"], ok["beta_norm2"])),
        "rel_msp": _mean_se(_ratio(ok["pred_error"], ok["signal_norm2"])),
        "failures": (float(group["failed"].astype(bool).sum()), math.nan),
    }
    if p.size and np.all(p == p[0]):
        # taxas por hipótese para o risco de Bayes
        truly_null = p[0] - k[0]
        t1 = float(fp.mean() / truly_null) if truly_null > 0 else 0.0
        t2 = float(fn.mean() / k[0]) if k[0] > 0 else 0.0
        _, se = results["bayes_risk"]
        results["bayes_risk"] = (bayes_risk(t1, t2, k[0] / p[0], int(p[0]), delta0, delta_a), se)
    return results


@dataclass(frozen=True)
class MetricsReport:
    """
    Registros brutos por réplica e o resumo em formato longo.

    Attributes:
        records: Uma linha por (réplica, método)
        summary: Colunas scenario, n, method, metric, value, se
    """
    records: pd.DataFrame
    summary: pd.DataFrame

    def metric(self, method: str, name: str, n: Optional[int] = None) -> float:
        """Valor de uma métrica agregada."""
        rows = self.summary[(self.summary["method"] == method) & (self.summary["metric"] == name)]
        if n is not None:
            rows = rows[rows["n"] == n]
        if rows.empty:
            raise KeyError(f"Métrica {name!r} ausente para {method!r}")
        return float(rows["value"].iloc[0])

    def standard_error(self, method: str, name: str, n: Optional[int] = None) -> float:
        rows = self.summary[(self.summary["method"] == method) & (self.summary["metric"] == name)]
        if n is not None:
            rows = rows[rows["n"] == n]
        return float(rows["se"].iloc[0])

    def wide(self) -> pd.DataFrame:
        """Tabela larga: uma linha por (cenário, n, método), uma coluna por métrica."""
        return self.summary.pivot_table(
            index=["scenario", "n", "method"], columns="metric", values="value", sort=False
        ).reset_index()

    @property
    def methods(self) -> List[str]:
        return list(dict.fromkeys(self.records["method"]))


def summarize_records(
    records: Sequence[Mapping[str, Any]],
    delta0: float = 1.0,
    delta_a: float = 1.0,
) -> MetricsReport:
    """
    Agrega registros brutos por (cenário, n, método).

    Falhas são excluídas das médias e contadas em "failures". Métricas
    sem réplicas válidas (p. ex. poder com k = 0) valem NaN.
    """
    frame = pd.DataFrame(list(records), columns=RECORD_COLUMNS)
    frame = frame.sort_values(["scenario", "n", "replicate"], kind="stable").reset_index(drop=True)
    rows: List[Dict[str, Any]] = []
    for (scenario, n, method), group in frame.groupby(["scenario", "n", "method"], sort=False):
        for name, (value, se) in _method_metrics(group, delta0, delta_a).items():
            rows.append({"scenario": scenario, "n": int(n), "method": method, "metric": name,
                         "value": value, "se": se})
    summary = pd.DataFrame(rows, columns=SUMMARY_COLUMNS)
    return MetricsReport(records=frame, summary=summary)


def combine_reports(reports: Sequence[MetricsReport]) -> MetricsReport:
    """Concatena relatórios (p. ex. vários n de um estudo)."""
    if not reports:
        return MetricsReport(pd.DataFrame(columns=RECORD_COLUMNS), pd.DataFrame(columns=SUMMARY_COLUMNS))
    return MetricsReport(
        records=pd.concat([r.records for r in reports], ignore_index=True),
        summary=pd.concat([r.summary for r in reports], ignore_index=True),
    )
