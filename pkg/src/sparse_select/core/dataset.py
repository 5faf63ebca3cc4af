"""
Representação de dados, padronização, leitura de CSV e geração aleatória
determinística usadas por todos os módulos.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import linalg

from ..utils.logging_setup import get_logger
from ..utils.validation import validate_column_name
from .entities import DesignSpec, Family, ScalingMode
from .exceptions import DataError

logger = get_logger(__name__)

_SCALE_EPS = 1e-12

# Canais independentes de um mesmo RngStream
LANE_DESIGN = 0
LANE_NOISE = 1
LANE_EFFECTS = 2
LANE_METHOD = 3


def _frozen(array: np.ndarray, *, fortran: bool = False) -> np.ndarray:
    out = np.array(array, dtype=float, order="F" if fortran else "C", copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Dataset:
    """
    Resposta, matriz de desenho e metadados das colunas.

    Imutável após a construção; pode ser compartilhado entre threads.

    Attributes:
        y: Resposta (n,); valores em {0, 1} para a família binomial
        X: Matriz de desenho (n, p), armazenada em ordem de colunas
        names: Rótulos das p colunas
        family: Família de verossimilhança
    """
    y: np.ndarray
    X: np.ndarray
    names: Tuple[str, ...] = ()
    family: Family = Family.GAUSSIAN

    def __post_init__(self) -> None:
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float).ravel()
        if X.ndim != 2:
            raise DataError(f"X deve ser uma matriz, recebido ndim={X.ndim}")
        n, p = X.shape
        if n < 2 or p < 1:
            raise DataError(f"Conjunto de dados requer n >= 2 e p >= 1, recebido n={n}, p={p}")
        if y.shape[0] != n:
            raise DataError(f"y tem {y.shape[0]} entradas, X tem {n} linhas")
        if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
            raise DataError("Valores não finitos em y ou X")
        family = Family(self.family)
        if family == Family.BINOMIAL and not np.all((y == 0.0) | (y == 1.0)):
            raise DataError("invalid-binary-response: resposta binomial deve estar em {0, 1}")
        names = tuple(self.names) if self.names else tuple(f"x{j + 1}" for j in range(p))
        if len(names) != p:
            raise DataError(f"names tem {len(names)} rótulos, X tem {p} colunas")
        object.__setattr__(self, "X", _frozen(X, fortran=True))
        object.__setattr__(self, "y", _frozen(y))
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "family", family)

    @property
    def n(self) -> int:
        return int(self.X.shape[0])

    @property
    def p(self) -> int:
        return int(self.X.shape[1])

    def subset(self, columns: Sequence[int]) -> "Dataset":
        """Novo conjunto com as colunas indicadas, na ordem dada."""
        columns = list(columns)
        return Dataset(
            y=self.y,
            X=self.X[:, columns],
            names=tuple(self.names[j] for j in columns),
            family=self.family,
        )

    def with_design(self, X: np.ndarray, names: Optional[Sequence[str]] = None) -> "Dataset":
        """Mesmo y e família com outra matriz de desenho."""
        return Dataset(y=self.y, X=X, names=tuple(names) if names is not None else (), family=self.family)


@dataclass(frozen=True)
class Standardization:
    """
    Médias e escalas por coluna para retornar coeficientes à escala original.

    Attributes:
        mode: Modo aplicado
        means: Médias das colunas (zeros no modo none binomial)
        scales: Escalas das colunas (uns nos modos none e center)
        y_mean: Média da resposta removida (0 para binomial)
    """
    mode: ScalingMode
    means: np.ndarray
    scales: np.ndarray
    y_mean: float = 0.0

    def coefficients_to_original(
        self, coefficients: np.ndarray, intercept: float = 0.0
    ) -> Tuple[float, np.ndarray]:
        """
        Converte coeficientes da escala padronizada para a original.

        Args:
            coefficients: β na escala padronizada
            intercept: Intercepto na escala padronizada

        Returns:
            (intercepto, β) na escala original, com X β + intercepto igual
            aos valores ajustados na escala padronizada somados a y_mean
        """
        beta = np.asarray(coefficients, dtype=float) / self.scales
        return float(self.y_mean + intercept - self.means @ beta), beta


def standardize(d: Dataset, mode: Union[ScalingMode, str] = ScalingMode.UNIT_L2) -> Tuple[Dataset, Standardization]:
    """
    Centraliza e escala as colunas de X.

    Todos os modos exceto none centralizam as colunas; unit-l2 escala para
    Σx² = n e unit-l2-one para norma 1. Na família gaussiana y e X são sempre
    centralizados (a perda penalizada não tem intercepto); none só dispensa
    a escala.

    Args:
        d: Conjunto de dados
        mode: Modo de padronização

    Returns:
        (conjunto padronizado, Standardization)

    Raises:
        DataError: constant-column se uma coluna tiver escala <= 1e-12

    Examples:
        >>> d = Dataset(y=[1.0, 2.0, 3.0, 4.0], X=[[1.0], [-1.0], [1.0], [-1.0]])
        >>> std, info = standardize(d, "unit-l2")
        >>> float((std.X[:, 0] ** 2).sum())
        4.0
    """
    mode = ScalingMode(mode)
    p = d.p
    if mode == ScalingMode.NONE and d.family != Family.GAUSSIAN:
        return d, Standardization(mode=mode, means=np.zeros(p), scales=np.ones(p))

    means = d.X.mean(axis=0)
    centred = d.X - means
    scales = np.ones(p)
    if mode in (ScalingMode.UNIT_L2, ScalingMode.UNIT_L2_ONE):
        norms = np.sqrt((centred ** 2).sum(axis=0))
        for j in np.flatnonzero(norms <= _SCALE_EPS):
            raise DataError(f"constant-column: coluna '{d.names[j]}' tem variância nula")
        target = np.sqrt(d.n) if mode == ScalingMode.UNIT_L2 else 1.0
        scales = norms / target
        centred = centred / scales

    y = d.y
    y_mean = 0.0
    if d.family == Family.GAUSSIAN:
        y_mean = float(y.mean())
        y = y - y_mean
    info = Standardization(mode=mode, means=_frozen(means), scales=_frozen(scales), y_mean=y_mean)
    return Dataset(y=y, X=centred, names=d.names, family=d.family), info


@dataclass(frozen=True)
class RngStream:
    """
    Fluxo aleatório determinístico identificado por (seed, stream_id).

    Usa o gerador Philox (baseado em contador) com chaves derivadas por
    SeedSequence, de modo que réplicas distintas são independentes e o
    resultado não depende da ordem de execução nem do número de processos.

    Attributes:
        seed: Semente de 64 bits, não negativa
        stream_id: Identificador do fluxo (índice da réplica)
    """
    seed: int
    stream_id: int = 0
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.seed < 0 or self.stream_id < 0:
            raise ValueError("seed e stream_id devem ser não negativos")

    def generator(self, lane: int = LANE_DESIGN, tag: Optional[int] = None) -> np.random.Generator:
        """
        Gerador de um canal do fluxo.

        O mesmo canal retorna sempre o mesmo objeto, que avança a cada
        sorteio; canais diferentes são independentes. tag subdivide um
        canal (p. ex. um subcanal por método).
        """
        key = (lane, tag)
        if key not in self._cache:
            spawn_key = (self.stream_id, lane) if tag is None else (self.stream_id, lane, tag)
            sequence = np.random.SeedSequence(self.seed, spawn_key=spawn_key)
            self._cache[key] = np.random.Generator(np.random.Philox(sequence))
        return self._cache[key]


def load_csv(
    path: Union[str, Path],
    response_column: str,
    family: Union[Family, str] = Family.GAUSSIAN,
) -> Dataset:
    """
    Lê um CSV com cabeçalho e monta um Dataset.

    As colunas restantes formam X, na ordem do arquivo.

    Args:
        path: Caminho do arquivo
        response_column: Nome da coluna resposta
        family: Família da resposta

    Returns:
        Conjunto de dados

    Raises:
        DataError: Arquivo ausente, coluna inexistente, célula não numérica
            ou resposta binomial fora de {0, 1}
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"Arquivo não encontrado: {path}")
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    columns = [str(c).strip() for c in frame.columns]
    frame.columns = columns
    response_column = validate_column_name(response_column, columns)

    numeric = {}
    for name in columns:
        values = pd.to_numeric(frame[name].str.strip(), errors="coerce")
        bad = np.flatnonzero(values.isna().to_numpy())
        if bad.size:
            row = int(bad[0])
            raise DataError(
                f"non-numeric-cell: coluna '{name}', linha {row + 2}: {frame[name].iloc[row]!r}"
            )
        numeric[name] = values.to_numpy(dtype=float)

    predictors = [name for name in columns if name != response_column]
    if not predictors:
        raise DataError("CSV não tem colunas explicativas")
    X = np.column_stack([numeric[name] for name in predictors])
    dataset = Dataset(y=numeric[response_column], X=X, names=tuple(predictors), family=Family(family))
    logger.info("Carregado %s: n=%d, p=%d, família=%s", path, dataset.n, dataset.p, dataset.family.value)
    return dataset


def draw_gaussian_design(
    n: int,
    p: int,
    design: DesignSpec,
    row_scale: float,
    rng: Union[RngStream, np.random.Generator],
) -> np.ndarray:
    """
    Sorteia X com linhas i.i.d. N(0, row_scale² Σ).

    Args:
        n: Número de linhas
        p: Número de colunas
        design: Estrutura de Σ
        row_scale: Escala das linhas (1 ou 1/√n)
        rng: Fluxo (usa o canal de desenho) ou gerador

    Returns:
        Matriz (n, p) em ordem de colunas

    Raises:
        DataError: Se Σ não for positiva definida
        ValueError: Se row_scale <= 0
    """
    if row_scale <= 0:
        raise ValueError(f"row_scale deve ser positivo, recebido {row_scale}")
    generator = rng.generator(LANE_DESIGN) if isinstance(rng, RngStream) else rng
    Z = generator.standard_normal((n, p))
    if not design.is_identity:
        sigma = design.covariance(p)
        try:
            factor = linalg.cholesky(sigma, lower=True)
        except linalg.LinAlgError as error:
            raise DataError("non-positive-definite: covariância Σ não é positiva definida") from error
        Z = Z @ factor.T
    return np.asfortranarray(Z * row_scale)
