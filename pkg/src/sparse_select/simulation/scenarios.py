"""
Cenários declarativos de simulação.

Cada cenário descreve como n determina p e k, como os efeitos são
sorteados, a estrutura de covariância do desenho e os métodos avaliados.
"""
from __future__ import annotations

import json
import math
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..core.entities import BlockSpec, CovarianceKind, DesignSpec
from ..core.exceptions import DataError

CONSISTENCY_N = (49, 100, 225, 529, 1024)
# p e k constantes: a grade segue até 2048
FIXED_DIMENSION_N = CONSISTENCY_N + (2048,)
CRITERIA_METHODS = ["aic", "bic", "mbic", "maic", "mbic2", "maic2"]
IDENTIFICATION_METHODS = ["slope-bh", "slope-inflated-05", "slope-inflated-10", "slope-heuristic", "lasso-bonferroni"]


class PRuleKind(str, Enum):
    CONSTANT = "constant"
    SQRT_N = "sqrt_n"
    EQUAL_N = "equal_n"
    POWER_1_5 = "power_1_5"


class KRuleKind(str, Enum):
    CONSTANT = "constant"
    POWER = "power"
    FRACTION = "fraction"
    TABLE = "table"


class EffectKind(str, Enum):
    CONSTANT = "constant"
    SQRT_2LOG_P_OVER_K = "sqrt_2log_p_over_k"
    SCALED = "scaled"
    NORMAL = "normal"


class RowScale(str, Enum):
    UNIT = "unit"
    INV_SQRT_N = "inv_sqrt_n"


class PRule(BaseModel):
    """
    Regra p(n).

    constant: p = value; sqrt_n: p = round(factor·√n) (factor padrão 7);
    equal_n: p = n; power_1_5: p = round(factor·n^1.5) (factor padrão 0.05).
    """
    model_config = ConfigDict(frozen=True)

    kind: PRuleKind = PRuleKind.CONSTANT
    value: Optional[int] = Field(default=None, ge=1)
    factor: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _check(self) -> "PRule":
        if self.kind == PRuleKind.CONSTANT and self.value is None:
            raise ValueError("p constante requer value")
        return self

    def evaluate(self, n: int) -> int:
        if self.kind == PRuleKind.CONSTANT:
            assert self.value is not None
            return self.value
        if self.kind == PRuleKind.EQUAL_N:
            return n
        if self.kind == PRuleKind.SQRT_N:
            return max(1, int(round((self.factor or 7.0) * math.sqrt(n))))
        return max(1, int(round((self.factor or 0.05) * n ** 1.5)))


class KRule(BaseModel):
    """
    Regra k(n, p).

    constant: k = value; power: k = round(n^alpha); fraction: k = round(fraction·p);
    table: valores por n, interpolados linearmente em log n (constantes fora da tabela).
    """
    model_config = ConfigDict(frozen=True)

    kind: KRuleKind = KRuleKind.CONSTANT
    value: Optional[int] = Field(default=None, ge=0)
    alpha: Optional[float] = Field(default=None, gt=0, lt=1)
    fraction: Optional[float] = Field(default=None, ge=0, le=1)
    table: Optional[Dict[int, int]] = None

    @model_validator(mode="after")
    def _check(self) -> "KRule":
        required = {
            KRuleKind.CONSTANT: self.value,
            KRuleKind.POWER: self.alpha,
            KRuleKind.FRACTION: self.fraction,
            KRuleKind.TABLE: self.table,
        }[self.kind]
        if required is None:
            raise ValueError(f"Regra k={self.kind.value} sem parâmetro")
        if self.kind == KRuleKind.TABLE and not self.table:
            raise ValueError("Tabela de k vazia")
        return self

    def evaluate(self, n: int, p: int) -> int:
        if self.kind == KRuleKind.CONSTANT:
            assert self.value is not None
            return self.value
        if self.kind == KRuleKind.POWER:
            assert self.alpha is not None
            return int(round(n ** self.alpha))
        if self.kind == KRuleKind.FRACTION:
            assert self.fraction is not None
            return int(round(self.fraction * p))
        assert self.table is not None
        keys = sorted(self.table)
        if n in self.table:
            return self.table[n]
        values = [self.table[key] for key in keys]
        return int(round(float(np.interp(math.log(n), np.log(keys), values))))


class EffectRule(BaseModel):
    """
    Regra dos efeitos das k variáveis causais.

    constant: β = value; sqrt_2log_p_over_k: β = √(2 log(p/k));
    scaled: β = gamma·√(2 log p); normal: β ~ N(0, tau2).
    """
    model_config = ConfigDict(frozen=True)

    kind: EffectKind = EffectKind.CONSTANT
    value: Optional[float] = None
    gamma: Optional[float] = Field(default=None, gt=0)
    tau2: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _check(self) -> "EffectRule":
        if self.kind == EffectKind.CONSTANT and self.value is None:
            raise ValueError("Efeito constante requer value")
        if self.kind == EffectKind.SCALED and self.gamma is None:
            raise ValueError("Efeito scaled requer gamma")
        if self.kind == EffectKind.NORMAL and self.tau2 is None:
            raise ValueError("Efeito normal requer tau2")
        return self

    def draw(self, k: int, p: int, rng: np.random.Generator) -> np.ndarray:
        if k == 0:
            return np.zeros(0)
        if self.kind == EffectKind.CONSTANT:
            return np.full(k, float(self.value))
        if self.kind == EffectKind.SQRT_2LOG_P_OVER_K:
            return np.full(k, math.sqrt(2.0 * math.log(p / k)))
        if self.kind == EffectKind.SCALED:
            return np.full(k, float(self.gamma) * math.sqrt(2.0 * math.log(p)))
        return rng.normal(0.0, math.sqrt(float(self.tau2)), size=k)


class ScenarioSpec(BaseModel):
    """
    Célula de simulação.

    Attributes:
        name: Nome do cenário
        n: Tamanho amostral padrão
        n_values: Grade de n para estudos de consistência
        p_rule, k_rule, effect: Regras geradoras
        design: Covariância das linhas de X
        row_scale: unit (N(0, Σ)) ou inv_sqrt_n (N(0, Σ/n))
        noise_sigma: Desvio-padrão do erro
        replicates: Número de réplicas
        methods: Métodos avaliados
        seed: Semente
        q: Nível nominal dos métodos SLOPE/knockoff
        cv_folds: Folds da validação cruzada
    """
    model_config = ConfigDict(frozen=True)

    name: str
    n: int = Field(ge=3)
    n_values: Optional[List[int]] = None
    p_rule: PRule
    k_rule: KRule
    effect: EffectRule = EffectRule(kind=EffectKind.CONSTANT, value=0.0)
    design: DesignSpec = DesignSpec()
    row_scale: RowScale = RowScale.UNIT
    noise_sigma: float = Field(default=1.0, gt=0)
    replicates: int = Field(default=100, ge=1)
    methods: List[str] = Field(default_factory=lambda: list(CRITERIA_METHODS))
    seed: int = Field(default=20240101, ge=0)
    q: float = Field(default=0.2, gt=0, lt=1)
    cv_folds: int = Field(default=10, ge=2)

    @model_validator(mode="after")
    def _check_dimensions(self) -> "ScenarioSpec":
        for n in [self.n] + list(self.n_values or []):
            self.dimensions(n)
        return self

    def dimensions(self, n: Optional[int] = None) -> Tuple[int, int, int]:
        """
        (n, p, k) para o tamanho amostral dado.

        Raises:
            ValueError: Se k > p ou a estrutura de blocos não casar com p
        """
        n = self.n if n is None else n
        p = self.p_rule.evaluate(n)
        k = self.k_rule.evaluate(n, p)
        if self.design.kind == CovarianceKind.BLOCK and self.design.blocks is not None:
            if self.design.blocks.p != p:
                raise ValueError(f"{self.name}: blocos definem p={self.design.blocks.p}, regra dá p={p}")
            k = self.design.blocks.k
        if k > p:
            raise ValueError(f"{self.name}: k={k} excede p={p} para n={n}")
        return n, p, k

    def row_factor(self, n: int) -> float:
        return 1.0 / math.sqrt(n) if self.row_scale == RowScale.INV_SQRT_N else 1.0

    def causal_indices(self, p: int, k: int) -> List[int]:
        """Colunas causais: as primeiras de cada bloco, ou as k primeiras."""
        if self.design.kind == CovarianceKind.BLOCK and self.design.blocks is not None:
            return self.design.blocks.causal_indices()
        return list(range(k))

    def with_overrides(self, **updates: object) -> "ScenarioSpec":
        """Cópia validada com campos substituídos (valores None são ignorados)."""
        data = self.model_dump()
        data.update({key: value for key, value in updates.items() if value is not None})
        return ScenarioSpec.model_validate(data)


def _consistency(
    name: str, p_rule: PRule, k_rule: KRule, n_values: Sequence[int] = CONSISTENCY_N
) -> ScenarioSpec:
    return ScenarioSpec(
        name=name,
        n=1024,
        n_values=list(n_values),
        p_rule=p_rule,
        k_rule=k_rule,
        effect=EffectRule(kind=EffectKind.CONSTANT, value=0.4),
        replicates=200,
        methods=list(CRITERIA_METHODS),
    )


def builtin_scenarios() -> Dict[str, ScenarioSpec]:
    """
    Cenários embutidos, com número de réplicas reduzido para escala de bancada.

    Returns:
        Dicionário nome → cenário
    """
    scenarios: List[ScenarioSpec] = [
        _consistency(
            "scenario0", PRule(kind="constant", value=49), KRule(kind="constant", value=0), FIXED_DIMENSION_N
        ),
        _consistency(
            "scenario1", PRule(kind="constant", value=49), KRule(kind="constant", value=5), FIXED_DIMENSION_N
        ),
        _consistency(
            "scenario2",
            PRule(kind="sqrt_n", factor=7.0),
            KRule(kind="table", table={49: 5, 100: 7, 225: 10, 529: 13, 1024: 16}),
        ),
        _consistency(
            "scenario3",
            PRule(kind="equal_n"),
            KRule(kind="table", table={49: 5, 100: 7, 225: 10, 529: 15, 1024: 20}),
        ),
    ]
    blocks = BlockSpec.correlated_blocks()
    for rho in (0.0, 0.2, 0.4, 0.6):
        scenarios.append(ScenarioSpec(
            name=f"block-correlation-rho{int(rho * 10):02d}" if rho else "block-correlation",
            n=100,
            p_rule=PRule(kind="constant", value=blocks.p),
            k_rule=KRule(kind="constant", value=blocks.k),
            effect=EffectRule(kind="normal", tau2=0.5),
            design=DesignSpec(kind="block", rho=rho, blocks=blocks),
            replicates=300,
            methods=["bic", "mbic", "maic", "mbic2", "maic2"],
        ))
    for label, design in (
        ("independent", DesignSpec()),
        ("correlated", DesignSpec(kind="compound-symmetry", rho=0.5)),
    ):
        for k in (20, 100):
            scenarios.append(ScenarioSpec(
                name=f"slope-prediction-{label}-k{k}",
                n=1000,
                p_rule=PRule(kind="equal_n"),
                k_rule=KRule(kind="fraction", fraction=k / 1000),
                effect=EffectRule(kind="sqrt_2log_p_over_k"),
                design=design,
                row_scale="inv_sqrt_n",
                replicates=20,
                methods=["slope-cv", "lasso-cv"],
                cv_folds=5,
            ))
    for alpha in (0.3, 0.4, 0.5):
        scenarios.append(ScenarioSpec(
            name=f"slope-identification-a{int(round(alpha * 10)):02d}",
            n=200,
            n_values=[100, 200, 500, 1000, 2000],
            p_rule=PRule(kind="power_1_5", factor=0.05),
            k_rule=KRule(kind="power", alpha=alpha),
            effect=EffectRule(kind="scaled", gamma=0.9),
            row_scale="inv_sqrt_n",
            replicates=100,
            methods=list(IDENTIFICATION_METHODS),
            q=0.2,
        ))
    for label, design, slope_method in (
        ("independent", DesignSpec(), "slope-heuristic"),
        ("correlated", DesignSpec(kind="compound-symmetry", rho=0.5), "slope-bh"),
    ):
        for strength, gamma in (("weak", 1.3), ("strong", 2.0)):
            scenarios.append(ScenarioSpec(
                name=f"comparison-{label}-{strength}",
                n=500,
                p_rule=PRule(kind="equal_n"),
                k_rule=KRule(kind="constant", value=40),
                effect=EffectRule(kind="scaled", gamma=gamma),
                design=design,
                row_scale="inv_sqrt_n",
                replicates=40,
                methods=["mbic2", slope_method, "lasso-cv", "knockoff-lasso-cv"],
                cv_folds=5,
                q=0.2,
            ))
    return {scenario.name: scenario for scenario in scenarios}


def load_scenarios(path: Union[str, Path]) -> List[ScenarioSpec]:
    """
    Lê cenários de um arquivo JSON (objeto, lista ou JSON Lines).

    Raises:
        DataError: Arquivo ausente, JSON inválido ou cenário inválido
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"Arquivo de cenário não encontrado: {path}")
    text = path.read_text(encoding="utf-8").strip()
    try:
        if text.startswith("["):
            documents = json.loads(text)
        elif "\n" in text and not text.startswith("{\n"):
            documents = [json.loads(line) for line in text.splitlines() if line.strip()]
        else:
            documents = [json.loads(text)]
    except json.JSONDecodeError as error:
        raise DataError(f"JSON inválido em {path}: {error}") from error
    try:
        return [ScenarioSpec.model_validate(document) for document in documents]
    except ValidationError as error:
        raise DataError(f"Cenário inválido em {path}: {error}") from error


def resolve_scenario(name_or_path: str) -> List[ScenarioSpec]:
    """Cenário embutido pelo nome ou cenários de um arquivo."""
    scenarios = builtin_scenarios()
    if name_or_path in scenarios:
        return [scenarios[name_or_path]]
    if Path(name_or_path).suffix.lower() in (".json", ".jsonl", ".cfg"):
        return load_scenarios(name_or_path)
    raise DataError(
        f"Cenário desconhecido: {name_or_path!r}. Disponíveis: {', '.join(sorted(scenarios))}"
    )
