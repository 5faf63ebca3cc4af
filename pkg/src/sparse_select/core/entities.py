"""
Modelos de dados para especificações de critérios, planos de busca,
validação cruzada e desenhos de simulação.

Os modelos pydantic validam as entradas estruturadas vindas da CLI,
do servidor MCP e de arquivos de configuração.
"""
from enum import Enum
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Family(str, Enum):
    """Família de verossimilhança da resposta."""
    GAUSSIAN = "gaussian"
    BINOMIAL = "binomial"


class ScalingMode(str, Enum):
    """Modo de padronização das colunas."""
    NONE = "none"
    CENTER = "center"
    UNIT_L2 = "unit-l2"
    UNIT_L2_ONE = "unit-l2-one"


class CovarianceKind(str, Enum):
    """Estrutura de covariância das linhas do desenho."""
    IDENTITY = "identity"
    COMPOUND_SYMMETRY = "compound-symmetry"
    BLOCK = "block"


class BlockSpec(BaseModel):
    """
    Estrutura em blocos com simetria composta dentro de cada bloco.

    Attributes:
        block_sizes: Tamanho de cada bloco correlacionado
        causal_per_block: Número de variáveis causais em cada bloco
        independent: Variáveis independentes adicionais (após os blocos)
        independent_causal: Quantas das variáveis independentes são causais

    Example:
        O desenho padrão tem 4 blocos de 32, 16, 8 e 4 variáveis, 16
        independentes, p = 256 e 28 variáveis causais.
    """
    model_config = ConfigDict(frozen=True)

    block_sizes: List[int] = Field(min_length=1)
    causal_per_block: List[int]
    independent: int = Field(default=0, ge=0)
    independent_causal: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_counts(self) -> "BlockSpec":
        if len(self.block_sizes) != len(self.causal_per_block):
            raise ValueError("block_sizes e causal_per_block devem ter o mesmo tamanho")
        for size, causal in zip(self.block_sizes, self.causal_per_block):
            if size < 1 or causal < 0 or causal > size:
                raise ValueError(f"Bloco inválido: tamanho {size}, causais {causal}")
        if self.independent_causal > self.independent:
            raise ValueError("independent_causal não pode exceder independent")
        return self

    @classmethod
    def correlated_blocks(cls) -> "BlockSpec":
        """Desenho de blocos de tamanhos 32/16/8/4 com 3, 2, 1 e 0 causais por grupo."""
        sizes: List[int] = []
        causal: List[int] = []
        for size in (32, 16, 8, 4):
            sizes.extend([size] * 4)
            causal.extend([3, 2, 1, 0])
        return cls(block_sizes=sizes, causal_per_block=causal, independent=16, independent_causal=4)

    @property
    def p(self) -> int:
        return sum(self.block_sizes) + self.independent

    @property
    def k(self) -> int:
        return sum(self.causal_per_block) + self.independent_causal

    def causal_indices(self) -> List[int]:
        """Índices causais: as primeiras colunas de cada bloco e das independentes."""
        indices: List[int] = []
        start = 0
        for size, causal in zip(self.block_sizes, self.causal_per_block):
            indices.extend(range(start, start + causal))
            start += size
        indices.extend(range(start, start + self.independent_causal))
        return indices


class DesignSpec(BaseModel):
    """
    Especificação da covariância Σ das linhas de X.

    Attributes:
        kind: identity, compound-symmetry ou block
        rho: Correlação (simetria composta ou dentro dos blocos), em [0, 1)
        blocks: Estrutura de blocos (obrigatória para kind=block)
    """
    model_config = ConfigDict(frozen=True)

    kind: CovarianceKind = CovarianceKind.IDENTITY
    rho: float = Field(default=0.0, ge=0.0, lt=1.0)
    blocks: Optional[BlockSpec] = None

    @model_validator(mode="after")
    def _check_blocks(self) -> "DesignSpec":
        if self.kind == CovarianceKind.BLOCK and self.blocks is None:
            raise ValueError("kind=block requer blocks")
        return self

    def covariance(self, p: int) -> np.ndarray:
        """
        Constrói Σ (p × p) com diagonal unitária.

        Args:
            p: Número de colunas

        Returns:
            Matriz de covariância

        Raises:
            ValueError: Se p não for compatível com a estrutura de blocos
        """
        if self.kind == CovarianceKind.IDENTITY:
            return np.eye(p)
        if self.kind == CovarianceKind.COMPOUND_SYMMETRY:
            sigma = np.full((p, p), self.rho)
            np.fill_diagonal(sigma, 1.0)
            return sigma
        assert self.blocks is not None
        if self.blocks.p != p:
            raise ValueError(f"Estrutura de blocos define p={self.blocks.p}, recebido p={p}")
        sigma = np.eye(p)
        start = 0
        for size in self.blocks.block_sizes:
            block = slice(start, start + size)
            sigma[block, block] = self.rho
            start += size
        np.fill_diagonal(sigma, 1.0)
        return sigma

    @property
    def is_identity(self) -> bool:
        return self.kind == CovarianceKind.IDENTITY or self.rho == 0.0


class CriterionKind(str, Enum):
    """Critérios de informação com penalidade L0."""
    AIC = "aic"
    BIC = "bic"
    RIC = "ric"
    MBIC = "mbic"
    MAIC = "maic"
    MBIC2 = "mbic2"
    MAIC2 = "maic2"
    EBIC = "ebic"


class CriterionSpec(BaseModel):
    """
    Critério de informação e suas constantes.

    Attributes:
        kind: Tipo do critério
        E: Número esperado de sinais a priori (mBIC/mBIC2)
        const: Constante do mAIC/mAIC2 (const = e reproduz o RIC)
        kappa: Parâmetro do EBIC em [0, 1]
        p_total: p usado na penalidade (None: número de colunas do conjunto)
        sigma: Desvio-padrão conhecido do ruído (None: verossimilhança perfilada)
    """
    model_config = ConfigDict(frozen=True)

    kind: CriterionKind
    E: float = Field(default=4.0, gt=0.0)
    const: float = Field(default=0.5, gt=0.0)
    kappa: float = Field(default=0.5, ge=0.0, le=1.0)
    p_total: Optional[int] = Field(default=None, ge=1)
    sigma: Optional[float] = Field(default=None, gt=0.0)

    @field_validator("kind", mode="before")
    @classmethod
    def _lower_kind(cls, v: object) -> object:
        return v.strip().lower() if isinstance(v, str) else v

    def resolve(self, p: int) -> "CriterionSpec":
        """Preenche p_total com p quando não informado."""
        if self.p_total is not None:
            return self
        return self.model_copy(update={"p_total": int(p)})

    def with_kind(self, kind: Union[str, CriterionKind]) -> "CriterionSpec":
        """Copia as constantes para outro critério."""
        value = kind.value if isinstance(kind, CriterionKind) else kind.strip().lower()
        return self.model_copy(update={"kind": CriterionKind(value)})

    @property
    def label(self) -> str:
        return self.kind.value


class StageKind(str, Enum):
    """Tipos de estágio de um plano de busca."""
    SCREEN = "screen"
    FORWARD = "forward"
    BACKWARD = "backward"
    STEPWISE = "stepwise"
    FORWARD_STEPS = "forward-steps"


class SearchStage(BaseModel):
    """
    Um estágio de um plano de busca.

    Attributes:
        kind: Tipo do estágio
        threshold: Limiar de p-valor (screen), em (0, 1]
        criterion: Critério (forward/backward/stepwise/forward-steps)
        count: Número máximo de adições (forward-steps)
    """
    model_config = ConfigDict(frozen=True)

    kind: StageKind
    threshold: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    criterion: Optional[CriterionSpec] = None
    count: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode="after")
    def _check_payload(self) -> "SearchStage":
        if self.kind == StageKind.SCREEN:
            if self.threshold is None:
                raise ValueError("Estágio screen requer threshold")
        elif self.criterion is None:
            raise ValueError(f"Estágio {self.kind.value} requer criterion")
        if self.kind == StageKind.FORWARD_STEPS and self.count is None:
            raise ValueError("Estágio forward-steps requer count")
        return self

    @property
    def label(self) -> str:
        if self.kind == StageKind.SCREEN:
            return f"screen({self.threshold:g})"
        assert self.criterion is not None
        if self.kind == StageKind.FORWARD_STEPS:
            return f"forward-steps({self.criterion.label},{self.count})"
        return f"{self.kind.value}({self.criterion.label})"


class SearchPlan(BaseModel):
    """Sequência ordenada de estágios de busca."""
    model_config = ConfigDict(frozen=True)

    stages: List[SearchStage] = Field(min_length=1)

    @classmethod
    def single(cls, kind: StageKind, criterion: CriterionSpec) -> "SearchPlan":
        return cls(stages=[SearchStage(kind=kind, criterion=criterion)])

    @classmethod
    def default(cls, criterion: CriterionSpec, screen_threshold: float = 0.15) -> "SearchPlan":
        """
        Triagem marginal, forward liberal com BIC, backward e stepwise com o critério.

        Args:
            criterion: Critério dos estágios backward e stepwise
            screen_threshold: Limiar de p-valor da triagem

        Returns:
            Plano em quatro estágios
        """
        bic = criterion.with_kind(CriterionKind.BIC)
        return cls(stages=[
            SearchStage(kind=StageKind.SCREEN, threshold=screen_threshold),
            SearchStage(kind=StageKind.FORWARD, criterion=bic),
            SearchStage(kind=StageKind.BACKWARD, criterion=criterion),
            SearchStage(kind=StageKind.STEPWISE, criterion=criterion),
        ])

    @classmethod
    def escape(cls, criterion: CriterionSpec, steps: int = 2) -> "SearchPlan":
        """
        Stepwise, alguns passos forward com BIC e stepwise de novo.

        O resultado nunca é pior (no critério final) que o stepwise simples,
        pois run_plan retorna o melhor suporte entre os estágios do critério final.
        """
        bic = criterion.with_kind(CriterionKind.BIC)
        return cls(stages=[
            SearchStage(kind=StageKind.STEPWISE, criterion=criterion),
            SearchStage(kind=StageKind.FORWARD_STEPS, criterion=bic, count=steps),
            SearchStage(kind=StageKind.STEPWISE, criterion=criterion),
        ])

    @classmethod
    def parse(cls, text: str, template: CriterionSpec) -> "SearchPlan":
        """
        Interpreta um plano textual.

        Formato: estágios separados por vírgula, cada um ``tipo:arg[:arg]``.
        Os critérios herdam as constantes de ``template``.

        Examples:
            >>> spec = CriterionSpec(kind="mbic2")
            >>> plan = SearchPlan.parse("screen:0.15,forward:bic,stepwise:mbic2", spec)
            >>> [stage.label for stage in plan.stages]
            ['screen(0.15)', 'forward(bic)', 'stepwise(mbic2)']
        """
        stages: List[SearchStage] = []
        for chunk in text.split(","):
            parts = [part.strip() for part in chunk.strip().split(":")]
            if not parts or not parts[0]:
                continue
            kind = StageKind(parts[0].lower())
            if kind == StageKind.SCREEN:
                if len(parts) != 2:
                    raise ValueError(f"Estágio inválido: {chunk!r} (esperado screen:<limiar>)")
                stages.append(SearchStage(kind=kind, threshold=float(parts[1])))
                continue
            if len(parts) < 2:
                raise ValueError(f"Estágio inválido: {chunk!r} (falta o critério)")
            criterion = template.with_kind(parts[1])
            count = None
            if kind == StageKind.FORWARD_STEPS:
                if len(parts) != 3:
                    raise ValueError(f"Estágio inválido: {chunk!r} (esperado forward-steps:<critério>:<n>)")
                count = int(parts[2])
            stages.append(SearchStage(kind=kind, criterion=criterion, count=count))
        return cls(stages=stages)


class CvMethod(str, Enum):
    """Estimador ajustado dentro da validação cruzada."""
    LASSO = "lasso"
    SLOPE = "slope"


class CvErrorKind(str, Enum):
    """Erro de predição usado na validação cruzada."""
    SQUARED = "squared"
    DEVIANCE = "deviance"


TuningGrid = Union[List[Tuple[float, float]], List[float]]


class CvSpec(BaseModel):
    """
    Especificação da validação cruzada K-fold.

    Attributes:
        folds: Número de folds K (>= 2)
        grid: Pontos de ajuste (λ para LASSO; pares (c, q) para SLOPE); None usa o padrão
        error: Erro de predição; None escolhe pela família (squared/deviance)
        seed: Semente da atribuição de folds
        one_se: Se usa a regra de um erro-padrão
        grid_size: Tamanho da grade LASSO padrão (ignorado se grid for dado)
    """
    model_config = ConfigDict(frozen=True)

    folds: int = Field(default=10, ge=2)
    grid: Optional[TuningGrid] = None
    error: Optional[CvErrorKind] = None
    seed: int = Field(default=0, ge=0)
    one_se: bool = False
    grid_size: int = Field(default=100, ge=2)

    @field_validator("grid")
    @classmethod
    def _grid_not_empty(cls, v: Optional[TuningGrid]) -> Optional[TuningGrid]:
        if v is not None and len(v) == 0:
            raise ValueError("grid não pode ser vazio")
        return v
