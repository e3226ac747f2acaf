from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from core.enums import ELabel
from core.evaluation.cross_validation import LEARNING_RATE_GRID, SENSITIVITY_GRID
from core.evaluation.synthetic import SynthConfig
from core.model.detector import TrainConfig
from core.value_object import DataReferencia


class TrainSettings(BaseModel):
    """Hiperparâmetros de treino (padrões da configuração de referência)."""

    model_config = ConfigDict(extra="forbid")

    learning_rate: float = Field(0.6, gt=0)
    weight_decay: float = Field(0.0005, ge=0)
    epochs: int = Field(100, ge=1)
    mu: float = Field(0.2, gt=0, le=1)
    hidden: int = Field(32, ge=1)
    attn_dim: int = Field(128, ge=1)
    heads: int = Field(2, ge=1)
    radius_cadence: int = Field(5, ge=1)
    warmup_epochs: int = Field(10, ge=0)
    center_eps: float = Field(0.1, gt=0)
    lr_backoff: float = Field(0.5, gt=0, lt=1)
    max_backtracks: int = Field(10, ge=0)
    validation_fraction: float = Field(0.0, ge=0, lt=1)


class EvalSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    folds: int = Field(10, ge=2)
    positive_class: ELabel = ELabel.NON_COLLUSIVE
    select_learning_rate: bool = False
    lr_grid: list[float] = Field(default_factory=lambda: list(LEARNING_RATE_GRID))


class SweepSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    hidden: list[int] = Field(default_factory=lambda: list(SENSITIVITY_GRID["hidden"]))
    attn_dim: list[int] = Field(default_factory=lambda: list(SENSITIVITY_GRID["attn_dim"]))
    heads: list[int] = Field(default_factory=lambda: list(SENSITIVITY_GRID["heads"]))
    folds: Optional[int] = Field(None, ge=2)

    def grades(self) -> dict[str, list[int]]:
        return {"hidden": self.hidden, "attn_dim": self.attn_dim, "heads": self.heads}


class SynthSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_collusive: int = Field(500, ge=0)
    n_organic: int = Field(100, ge=0)
    n_intermediaries: int = Field(300, ge=0)
    credit_rate: float = Field(0.4, ge=0, le=1)
    follow_back_prob: float = Field(0.5, ge=0, le=1)
    topic_concentration: float = Field(0.8, ge=0, le=1)
    K_topics: int = Field(20, ge=1)
    tweets_per_user: int = Field(10, ge=0)
    initial_credit: int = Field(50, ge=0)
    organic_follows: int = Field(8, ge=0)
    metadata_shift: float = Field(1.0, ge=0)
    embedding_dim: int = Field(64, ge=1)
    reference_date: str = "2020-01-01"


class DetectSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    users: Optional[list[str]] = None
    strict: bool = False


class RunConfig(BaseModel):
    """Configuração efetiva de uma execução (flag > arquivo > padrão)."""

    model_config = ConfigDict(extra="forbid")

    users_path: Optional[str] = None
    follows_path: Optional[str] = None
    tweets_path: Optional[str] = None
    labels_path: Optional[str] = None
    out_dir: str = "out"
    now: Optional[str] = None
    seed: int = 0
    topics_k: int = Field(1000, ge=1)
    kmeans_max_iter: int = Field(100, ge=1)
    kmeans_tol: float = Field(1e-9, ge=0)
    embedding_dim: int = Field(64, ge=1)
    train: TrainSettings = Field(default_factory=TrainSettings)
    eval: EvalSettings = Field(default_factory=EvalSettings)
    sweep: SweepSettings = Field(default_factory=SweepSettings)
    synth: SynthSettings = Field(default_factory=SynthSettings)
    detect: DetectSettings = Field(default_factory=DetectSettings)

    @field_validator("now")
    @classmethod
    def _validar_now(cls, valor: Optional[str]) -> Optional[str]:
        return None if valor is None else DataReferencia.criar_de_texto(valor).como_iso()

    def train_config(self, **alteracoes) -> TrainConfig:
        campos = self.train.model_dump(exclude={"validation_fraction"})
        campos.update(alteracoes)
        return TrainConfig(seed=self.seed, **campos)

    def synth_config(self) -> SynthConfig:
        return SynthConfig(seed=self.seed, **self.synth.model_dump())
