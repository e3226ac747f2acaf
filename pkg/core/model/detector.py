from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from core.entities.subgraph import Subgraph
from core.shared.exceptions import ConfigError, DataError, NonFiniteLossError, ShapeError
from .adam import Adam
from .hsa import ForwardTrace, HsaParams, hsa_backward, hsa_forward, init_params, normalized_adjacency

_logger = logging.getLogger("conluio.core.detector")


@dataclass(frozen=True, slots=True)
class TrainConfig:
    learning_rate: float = 0.6
    weight_decay: float = 0.0005
    epochs: int = 100
    seed: int = 0
    mu: float = 0.2
    hidden: int = 32
    attn_dim: int = 128
    heads: int = 2
    radius_cadence: int = 5
    warmup_epochs: int = 10
    center_eps: float = 0.1
    lr_backoff: float = 0.5
    max_backtracks: int = 10

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate deve ser > 0.")
        if self.weight_decay < 0:
            raise ConfigError("weight_decay não pode ser negativo.")
        if self.epochs < 1:
            raise ConfigError("epochs deve ser >= 1.")
        if not 0 < self.mu <= 1:
            raise ConfigError("mu deve estar em (0, 1].")
        if self.hidden < 1 or self.attn_dim < 1 or self.heads < 1:
            raise ConfigError("Dimensões e número de cabeças devem ser >= 1.")
        if self.radius_cadence < 1:
            raise ConfigError("radius_cadence deve ser >= 1.")
        if self.warmup_epochs < 0:
            raise ConfigError("warmup_epochs não pode ser negativo.")
        if not 0 < self.lr_backoff < 1:
            raise ConfigError("lr_backoff deve estar em (0, 1).")
        if self.max_backtracks < 0:
            raise ConfigError("max_backtracks não pode ser negativo.")


@dataclass(slots=True, eq=False)
class Hypersphere:
    """Fronteira de uma classe: centro c (fixo após a inicialização), r² e penalidade μ."""

    center: np.ndarray
    mu: float
    r2: Optional[float] = None

    def __post_init__(self) -> None:
        if not 0 < self.mu <= 1:
            raise ConfigError("mu deve estar em (0, 1].")
        if self.r2 is not None and self.r2 < 0:
            raise ConfigError("r² não pode ser negativo.")


@dataclass(slots=True, eq=False)
class TrainResult:
    params: HsaParams
    sphere: Hypersphere
    log: list[dict] = field(default_factory=list)
    embeddings: Optional[np.ndarray] = None


@dataclass(frozen=True, slots=True, eq=False)
class Scores:
    distance2: np.ndarray
    r2: float

    @property
    def anomaly(self) -> np.ndarray:
        """d² - r²; negativo do lado colusivo."""
        return self.distance2 - self.r2

    @property
    def collusive(self) -> np.ndarray:
        return self.distance2 <= self.r2


def _linhas(n: int, rows: Optional[Sequence[int]]) -> np.ndarray:
    return np.arange(n) if rows is None else np.asarray(rows, dtype=np.int64)


def clamp_center(c: np.ndarray, eps: float = 0.1) -> np.ndarray:
    """Componentes com |c_j| < eps viram ±eps pelo sinal (sinal zero vira +eps)."""
    c = np.array(c, dtype=np.float64)
    pequenos = np.abs(c) < eps
    c[pequenos & (c < 0)] = -eps
    c[pequenos & (c >= 0)] = eps
    return c


def init_center(
    subs: Sequence[Subgraph],
    X: np.ndarray,
    params: HsaParams,
    train_rows: Optional[Sequence[int]] = None,
    *,
    eps: float = 0.1,
    a_hat: Optional[Sequence[sp.csr_matrix]] = None,
) -> np.ndarray:
    """c0 = média das embeddings da primeira passagem sobre os usuários de treino."""
    linhas = _linhas(X.shape[0], train_rows)
    if linhas.size == 0:
        raise DataError("Conjunto de treino vazio: impossível inicializar o centro.")
    Z, _ = hsa_forward(subs, X, params, a_hat=a_hat)
    return clamp_center(Z[linhas].mean(axis=0), eps)


def svdd_loss(Z: np.ndarray, sphere: Hypersphere) -> tuple[float, np.ndarray]:
    """L = r² + 1/(μn) Σ max(0, d_i² - r²)."""
    if Z.ndim != 2 or Z.shape[1] != sphere.center.size:
        raise ShapeError(f"Embeddings {Z.shape} incompatíveis com centro de dimensão {sphere.center.size}.")
    r2 = sphere.r2 or 0.0
    d2 = np.sum((Z - sphere.center) ** 2, axis=1)
    n = Z.shape[0]
    if n == 0:
        return float(r2), d2
    folga = np.maximum(0.0, d2 - r2)
    return float(r2 + folga.sum() / (sphere.mu * n)), d2


def svdd_loss_grad(Z: np.ndarray, sphere: Hypersphere) -> np.ndarray:
    """dL/dZ com r² constante: 2/(μn)(z - c) nas linhas fora da esfera."""
    r2 = sphere.r2 or 0.0
    diferenca = Z - sphere.center
    ativos = np.sum(diferenca**2, axis=1) > r2
    return (2.0 / (sphere.mu * Z.shape[0])) * diferenca * ativos[:, None]


def radius_squared(distances2: np.ndarray, mu: float) -> float:
    """r² = quantil (1 - μ) de d² pela regra de posto inferior."""
    d2 = np.asarray(distances2, dtype=np.float64)
    if d2.size == 0:
        raise DataError("Sem distâncias para atualizar o raio.")
    return float(np.quantile(d2, 1.0 - mu, method="inverted_cdf"))


def update_radius(distances2: np.ndarray, mu: float) -> float:
    return float(np.sqrt(radius_squared(distances2, mu)))


def _checar_finito(epoch: int, nome: str, valor: np.ndarray | float) -> None:
    if not np.all(np.isfinite(valor)):
        _logger.error("Non-finite value during training", extra={"epoch": epoch, "tensor": nome})
        raise NonFiniteLossError(epoch, nome)


def monotone_step(
    otimizador: Adam,
    params: HsaParams,
    grads: HsaParams,
    perda: float,
    avaliar: Callable[[], tuple[float, np.ndarray, ForwardTrace]],
    cfg: TrainConfig,
) -> Optional[tuple[np.ndarray, ForwardTrace]]:
    """Passo de Adam aceito só se a perda não subir; senão desfaz e reduz a taxa por `lr_backoff`.

    Devolve o forward dos parâmetros aceitos, ou None se nenhuma tentativa foi aceita
    (parâmetros e momentos ficam como antes do passo).
    """
    originais = {nome: tensor.copy() for nome, tensor in params.tensors()}
    estado = otimizador.state.copy()
    for _ in range(cfg.max_backtracks + 1):
        otimizador.step(params.named(), grads.named())
        with np.errstate(over="ignore", invalid="ignore"):
            nova, Z, trace = avaliar()
        if np.isfinite(nova) and np.all(np.isfinite(Z)) and nova <= perda:
            return Z, trace
        for nome, tensor in params.tensors():
            tensor[...] = originais[nome]
        otimizador.state = estado.copy()
        otimizador.lr *= cfg.lr_backoff
    return None


def train(
    subs: Sequence[Subgraph],
    X: np.ndarray,
    cfg: TrainConfig,
    train_rows: Optional[Sequence[int]] = None,
    val_rows: Optional[Sequence[int]] = None,
) -> TrainResult:
    """Laço full-batch: forward -> perda -> backward -> Adam -> atualização periódica do raio.

    Um passo que aumentaria a perda é desfeito e refeito com taxa menor, e o raio é
    recalculado sobre as embeddings já atualizadas; a perda registrada por época não cresce.
    """
    X = np.asarray(X, dtype=np.float64)
    linhas = _linhas(X.shape[0], train_rows)
    validacao = None if val_rows is None else np.asarray(val_rows, dtype=np.int64)
    if linhas.size == 0:
        raise DataError("Conjunto de treino vazio.")

    a_hat = [normalized_adjacency(s) for s in subs]
    params = init_params(X.shape[1], cfg.hidden, cfg.attn_dim, cfg.heads, cfg.seed, n_subgraphs=len(subs))
    centro = init_center(subs, X, params, linhas, eps=cfg.center_eps, a_hat=a_hat)
    sphere = Hypersphere(center=centro, mu=cfg.mu, r2=0.0)
    otimizador = Adam(lr=cfg.learning_rate, weight_decay=cfg.weight_decay)
    registros: list[dict] = []

    def avaliar() -> tuple[float, np.ndarray, ForwardTrace]:
        Z_novo, trace_novo = hsa_forward(subs, X, params, a_hat=a_hat)
        perda_nova, _ = svdd_loss(Z_novo[linhas], sphere)
        return perda_nova, Z_novo, trace_novo

    _logger.info(
        "Training started",
        extra={"train_rows": int(linhas.size), "epochs": cfg.epochs, "seed": cfg.seed, "lr": cfg.learning_rate},
    )
    Z, trace = hsa_forward(subs, X, params, a_hat=a_hat)
    for epoch in range(1, cfg.epochs + 1):
        _checar_finito(epoch, "Z", Z)
        perda, _ = svdd_loss(Z[linhas], sphere)
        _checar_finito(epoch, "loss", perda)

        dZ = np.zeros_like(Z)
        dZ[linhas] = svdd_loss_grad(Z[linhas], sphere)
        grads, _ = hsa_backward(trace, dZ, params)
        for nome, tensor in grads.tensors():
            _checar_finito(epoch, nome, tensor)

        betas = trace.betas.tolist()
        passo = monotone_step(otimizador, params, grads, perda, avaliar, cfg)
        if passo is not None:
            Z, trace = passo
        else:
            _logger.debug("Step rejected at every learning rate", extra={"epoch": epoch, "lr": otimizador.lr})

        if epoch > cfg.warmup_epochs and epoch % cfg.radius_cadence == 0:
            _, d2 = svdd_loss(Z[linhas], sphere)
            sphere.r2 = radius_squared(d2, cfg.mu)

        registro = {
            "epoch": epoch,
            "loss": perda,
            "r2": float(sphere.r2 or 0.0),
            "lr": otimizador.lr,
            "accepted": passo is not None,
            "betas": betas,
        }
        if validacao is not None and validacao.size:
            perda_val, d2_val = svdd_loss(Z[validacao], sphere)
            registro["val_loss"] = perda_val
            registro["val_recall"] = float(np.mean(d2_val <= (sphere.r2 or 0.0)))
        registros.append(registro)
        _logger.debug("Epoch finished", extra={"epoch": epoch, "loss": perda, "r2": registro["r2"]})

    _checar_finito(cfg.epochs, "Z", Z)
    _, d2 = svdd_loss(Z[linhas], sphere)
    sphere.r2 = radius_squared(d2, cfg.mu)
    _logger.info(
        "Training finished",
        extra={"final_loss": registros[-1]["loss"], "r2": sphere.r2, "epochs": cfg.epochs, "lr": otimizador.lr},
    )
    return TrainResult(params=params, sphere=sphere, log=registros, embeddings=Z)


def score(
    subs: Sequence[Subgraph],
    X: np.ndarray,
    params: HsaParams,
    sphere: Hypersphere,
    *,
    a_hat: Optional[Sequence[sp.csr_matrix]] = None,
) -> Scores:
    """Colusivo sse ||z - c||² <= r² (fronteira inclusiva)."""
    if sphere.r2 is None:
        raise ConfigError("Hiperesfera sem raio: treine o modelo antes de pontuar.")
    Z, _ = hsa_forward(subs, X, params, a_hat=a_hat)
    return score_embeddings(Z, sphere)


def score_embeddings(Z: np.ndarray, sphere: Hypersphere) -> Scores:
    if sphere.r2 is None:
        raise ConfigError("Hiperesfera sem raio: treine o modelo antes de pontuar.")
    if Z.ndim != 2 or Z.shape[1] != sphere.center.size:
        raise ShapeError(f"Embeddings {Z.shape} incompatíveis com centro de dimensão {sphere.center.size}.")
    return Scores(distance2=np.sum((Z - sphere.center) ** 2, axis=1), r2=float(sphere.r2))
