from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

import numpy as np
from sklearn.model_selection import KFold

from core.entities.hetnet import HetNet
from core.entities.subgraph import Subgraph
from core.enums import ELabel, ERelationship
from core.graph.features import standardize
from core.model.detector import TrainConfig, score_embeddings, svdd_loss, train
from core.shared.exceptions import ConfigError, DataError, NonFiniteLossError
from .metrics import COLLUSIVE, NON_COLLUSIVE, EvalReport, evaluate_fold

_logger = logging.getLogger("conluio.core.evaluation")

LEARNING_RATE_GRID = (0.6, 0.06, 0.006)
SENSITIVITY_GRID: dict[str, tuple[int, ...]] = {
    "hidden": (8, 16, 32, 64, 128),
    "attn_dim": (32, 64, 128, 256),
    "heads": (1, 2, 4, 6),
}


@dataclass(frozen=True, slots=True, eq=False)
class Dataset:
    """Entrada da avaliação: subgrafos, matriz bruta de atributos e rótulos (1 = colusivo)."""

    subgraphs: Mapping[ERelationship, Subgraph]
    raw_features: np.ndarray
    labels: np.ndarray
    user_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        n = self.raw_features.shape[0]
        if self.labels.shape != (n,) or len(self.user_ids) != n:
            raise DataError("Rótulos, ids e atributos com tamanhos diferentes.")
        for relacao, sub in self.subgraphs.items():
            if sub.n != n:
                raise DataError(f"Subgrafo {relacao.rotulo} com {sub.n} nós; esperado {n}.")

    @property
    def collusive_rows(self) -> np.ndarray:
        return np.flatnonzero(self.labels == COLLUSIVE)

    @property
    def non_collusive_rows(self) -> np.ndarray:
        return np.flatnonzero(self.labels == NON_COLLUSIVE)

    def selecionar(self, relacoes: Sequence[ERelationship]) -> list[Subgraph]:
        return [self.subgraphs[r] for r in relacoes]


def build_dataset(g: HetNet, subgraphs: Mapping[ERelationship, Subgraph], raw_features: np.ndarray) -> Dataset:
    if not g.labels:
        raise DataError("Avaliação exige rótulos de verdade (arquivo {user_id, label}).")
    rotulos = np.array(
        [COLLUSIVE if g.labels.get(int(i)) is ELabel.COLLUSIVE else NON_COLLUSIVE for i in g.labeled],
        dtype=np.int64,
    )
    return Dataset(
        subgraphs=dict(subgraphs),
        raw_features=np.asarray(raw_features, dtype=np.float64),
        labels=rotulos,
        user_ids=tuple(g.labeled_user_ids()),
    )


def _todas() -> tuple[ERelationship, ...]:
    return tuple(ERelationship)


def fold_partition(n: int, folds: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Partição embaralhada com semente: (posições de treino, posições de teste) por dobra."""
    if folds < 2:
        raise ConfigError("São necessárias pelo menos 2 dobras.")
    if folds > n:
        raise DataError(f"{folds} dobras para apenas {n} usuários colusivos.")
    divisor = KFold(n_splits=folds, shuffle=True, random_state=seed)
    return [(treino, teste) for treino, teste in divisor.split(np.arange(n))]


def cross_validate(
    dataset: Dataset,
    cfg: TrainConfig,
    folds: int = 10,
    *,
    relationships: Optional[Sequence[ERelationship]] = None,
    positive: int = NON_COLLUSIVE,
    variant: str = "full",
) -> EvalReport:
    """Cada dobra treina nos demais grupos colusivos e testa no grupo retido ∪ não colusivos."""
    relacoes = tuple(relationships) if relationships else _todas()
    colusivos = dataset.collusive_rows
    nao_colusivos = dataset.non_collusive_rows
    if nao_colusivos.size == 0:
        raise DataError("Avaliação exige um conjunto de usuários não colusivos.")
    subgrafos = dataset.selecionar(relacoes)
    relatorio = EvalReport(variant=variant)

    for dobra, (treino, teste) in enumerate(fold_partition(colusivos.size, folds, cfg.seed)):
        linhas_treino = colusivos[treino]
        linhas_teste = np.concatenate([colusivos[teste], nao_colusivos])
        X, _, _ = standardize(dataset.raw_features, linhas_treino)
        resultado = train(subgrafos, X, cfg, linhas_treino)
        pontuacoes = score_embeddings(resultado.embeddings, resultado.sphere)
        metricas = evaluate_fold(
            dobra,
            pontuacoes.anomaly[linhas_teste],
            dataset.labels[linhas_teste],
            positive=positive,
        )
        relatorio.folds.append(metricas)
        _logger.info(
            "Fold evaluated",
            extra={"variant": variant, "fold": dobra, "auc_roc": metricas.auc_roc, "auc_pr": metricas.auc_pr},
        )
    return relatorio


def ablation(
    dataset: Dataset,
    cfg: TrainConfig,
    folds: int = 10,
    *,
    positive: int = NON_COLLUSIVE,
) -> dict[str, EvalReport]:
    """Uma variante por subgrafo isolado mais o modelo completo."""
    relatorios: dict[str, EvalReport] = {}
    for relacao in ERelationship:
        relatorios[relacao.rotulo] = cross_validate(
            dataset, cfg, folds, relationships=(relacao,), positive=positive, variant=relacao.rotulo
        )
    relatorios["full"] = cross_validate(dataset, cfg, folds, positive=positive, variant="full")
    return relatorios


def select_learning_rate(
    dataset: Dataset,
    cfg: TrainConfig,
    grid: Sequence[float] = LEARNING_RATE_GRID,
    *,
    val_fraction: float = 0.2,
) -> tuple[float, list[dict]]:
    """Escolhe a taxa com menor perda de validação numa partição retida de colusivos."""
    if not grid:
        raise ConfigError("Grade de taxas de aprendizado vazia.")
    colusivos = dataset.collusive_rows
    if colusivos.size < 2:
        raise DataError("São necessários pelo menos 2 usuários colusivos para validação.")
    embaralhados = np.random.default_rng(cfg.seed).permutation(colusivos)
    n_val = min(max(1, int(round(val_fraction * colusivos.size))), colusivos.size - 1)
    validacao, treino = embaralhados[:n_val], embaralhados[n_val:]
    X, _, _ = standardize(dataset.raw_features, treino)
    subgrafos = dataset.selecionar(_todas())

    registros: list[dict] = []
    melhor_lr, melhor_perda = float(grid[0]), float("inf")
    for lr in grid:
        try:
            resultado = train(subgrafos, X, replace(cfg, learning_rate=float(lr)), treino)
            perda, _ = svdd_loss(resultado.embeddings[validacao], resultado.sphere)
        except NonFiniteLossError:
            _logger.warning("Learning rate diverged", extra={"lr": lr})
            perda = float("inf")
        registros.append({"learning_rate": float(lr), "val_loss": perda})
        if perda < melhor_perda:
            melhor_lr, melhor_perda = float(lr), perda
    _logger.info("Learning rate selected", extra={"lr": melhor_lr, "val_loss": melhor_perda})
    return melhor_lr, registros


def sensitivity_sweep(
    dataset: Dataset,
    cfg: TrainConfig,
    grids: Optional[Mapping[str, Sequence[int]]] = None,
    folds: int = 10,
) -> list[dict]:
    """Varia um hiperparâmetro por vez mantendo os demais na configuração base."""
    grades = dict(grids) if grids is not None else dict(SENSITIVITY_GRID)
    registros: list[dict] = []
    for parametro, valores in grades.items():
        if parametro not in SENSITIVITY_GRID:
            raise ConfigError(f"Parâmetro de sensibilidade desconhecido: '{parametro}'.")
        for valor in valores:
            configuracao = replace(cfg, **{parametro: int(valor)})
            relatorio = cross_validate(dataset, configuracao, folds, variant=f"{parametro}={valor}")
            registros.append(
                {
                    "parameter": parametro,
                    "value": int(valor),
                    "auc_roc_mean": relatorio.mean("auc_roc"),
                    "auc_roc_std": relatorio.std("auc_roc"),
                }
            )
    return registros
