"""
Conjuntos de demonstração gerados deterministicamente a partir de uma semente.
"""
from __future__ import annotations

from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np
import pandas as pd

from ..core.dataset import LANE_NOISE, Dataset, RngStream, draw_gaussian_design
from ..core.entities import DesignSpec, Family
from ..utils.logging_setup import get_logger

logger = get_logger(__name__)

DEMO_SEED = 2024
DEMO_N = 50
DEMO_P = 10
DEMO_SIGNALS: Dict[int, float] = {2: 3.0, 6: -2.5}


def demo_dataset(
    seed: int = DEMO_SEED,
    *,
    n: int = DEMO_N,
    p: int = DEMO_P,
    signals: Union[Dict[int, float], None] = None,
    family: Family = Family.GAUSSIAN,
) -> Tuple[Dataset, np.ndarray]:
    """
    Dados com poucos sinais fortes em colunas N(0, 1) independentes.

    Args:
        seed: Semente
        n, p: Dimensões
        signals: Índice → efeito (padrão: colunas x3 e x7); {} gera ruído puro
        family: gaussian ou binomial (resposta logística)

    Returns:
        (conjunto, β verdadeiro)
    """
    signals = DEMO_SIGNALS if signals is None else signals
    stream = RngStream(seed)
    X = draw_gaussian_design(n, p, DesignSpec(), 1.0, stream)
    beta = np.zeros(p)
    for index, effect in signals.items():
        beta[index] = effect
    eta = X @ beta
    noise = stream.generator(LANE_NOISE)
    if Family(family) == Family.BINOMIAL:
        y = (noise.random(n) < 1.0 / (1.0 + np.exp(-eta))).astype(float)
    else:
        y = eta + noise.standard_normal(n)
    return Dataset(y=y, X=X, family=family), beta


def noise_dataset(seed: int = DEMO_SEED, *, n: int = DEMO_N, p: int = DEMO_P) -> Dataset:
    """Resposta independente de todas as colunas."""
    return demo_dataset(seed, n=n, p=p, signals={})[0]


def to_frame(d: Dataset, response: str = "y") -> pd.DataFrame:
    frame = pd.DataFrame(np.asarray(d.X), columns=list(d.names))
    frame.insert(0, response, d.y)
    return frame


def write_demo(output_dir: Union[str, Path], seed: int = DEMO_SEED) -> Dict[str, Path]:
    """
    Grava demo_signal.csv, demo_noise.csv e demo_binary.csv.

    Returns:
        Nome → caminho gravado
    """
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    datasets = {
        "signal": demo_dataset(seed)[0],
        "noise": noise_dataset(seed + 1),
        "binary": demo_dataset(seed + 2, n=200, family=Family.BINOMIAL, signals={0: 1.5, 4: -1.5})[0],
    }
    paths: Dict[str, Path] = {}
    for name, dataset in datasets.items():
        path = output_dir / f"demo_{name}.csv"
        to_frame(dataset).to_csv(path, index=False, float_format="%.10g")
        paths[name] = path
        logger.info("Gravado %s (n=%d, p=%d)", path, dataset.n, dataset.p)
    return paths
