from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.feature_extraction.text import HashingVectorizer

from core.dataframe.hetnet_extrator import LeitorRegistros
from core.dataframe.jsonl_wrapper import JsonlWrapper
from core.entities.hetnet import HetNet
from core.entities.records import TweetRecord
from core.entities.topic_histogram import TopicHistogram
from core.shared.exceptions import ConfigError, DataError

_logger = logging.getLogger("conluio.core.topics")

_TOLERANCIA_NORMA = 1e-12


@dataclass(frozen=True, slots=True, eq=False)
class EmbeddingMatrix:
    """Embeddings unitários de tweets; `tweet_rows[i]` é o índice do tweet da linha i."""

    vectors: np.ndarray
    tweet_rows: np.ndarray
    tweet_ids: tuple[str, ...]
    unassigned: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1]) if self.vectors.ndim == 2 else 0

    @property
    def rows(self) -> int:
        return int(self.vectors.shape[0])


@dataclass(frozen=True, slots=True, eq=False)
class TopicModel:
    centroids: np.ndarray
    assignment: np.ndarray
    tweet_rows: np.ndarray
    tweet_ids: tuple[str, ...]
    objective: float
    iterations: int
    history: tuple[float, ...] = field(default=())

    @property
    def k(self) -> int:
        return int(self.centroids.shape[0])

    def assignments(self) -> list[dict]:
        """Registros `{tweet_id, topic}` na ordem das linhas de embedding."""
        return [
            {"tweet_id": tid, "topic": int(topico)}
            for tid, topico in zip(self.tweet_ids, self.assignment)
        ]


def _normalizar_linhas(matriz: np.ndarray) -> np.ndarray:
    normas = np.linalg.norm(matriz, axis=1, keepdims=True)
    return matriz / normas


def load_embeddings(
    tweets_path: str,
    g: Optional[HetNet] = None,
    *,
    leitor: Optional[LeitorRegistros] = None,
) -> EmbeddingMatrix:
    """Lê os vetores `embedding` do arquivo de tweets e normaliza cada linha.

    Tweets sem embedding ficam sem tópico. Vetor nulo é erro, como no `HashingEmbedder`.
    """
    leitor = leitor or JsonlWrapper()
    vetores: list[list[float]] = []
    linhas: list[int] = []
    ids: list[str] = []
    sem_embedding: list[str] = []
    dimensao: Optional[int] = None

    for posicao, (numero_linha, registro) in enumerate(leitor.ler_registros(TweetRecord, tweets_path)):
        if registro.embedding is None:
            sem_embedding.append(registro.tweet_id)
            continue
        if dimensao is None:
            dimensao = len(registro.embedding)
        if len(registro.embedding) != dimensao or dimensao == 0:
            raise DataError(
                f"Dimensão de embedding inconsistente para '{registro.tweet_id}': "
                f"{len(registro.embedding)} (esperado {dimensao}).",
                path=tweets_path,
                line_number=numero_linha,
            )
        vetor = np.asarray(registro.embedding, dtype=np.float64)
        if not np.all(np.isfinite(vetor)):
            raise DataError(
                f"Embedding não finito no tweet '{registro.tweet_id}'.",
                path=tweets_path,
                line_number=numero_linha,
            )
        if np.linalg.norm(vetor) <= _TOLERANCIA_NORMA:
            raise DataError(
                f"Embedding nulo no tweet '{registro.tweet_id}'.",
                path=tweets_path,
                line_number=numero_linha,
            )
        vetores.append(registro.embedding)
        linhas.append(g.tweet_index(registro.tweet_id) if g is not None else posicao)
        ids.append(registro.tweet_id)

    matriz = (
        _normalizar_linhas(np.asarray(vetores, dtype=np.float64))
        if vetores
        else np.zeros((0, dimensao or 0), dtype=np.float64)
    )
    _logger.info(
        "Embeddings loaded",
        extra={"embedded": len(ids), "unassigned": len(sem_embedding), "dim": dimensao or 0},
    )
    return EmbeddingMatrix(
        vectors=matriz,
        tweet_rows=np.asarray(linhas, dtype=np.int64),
        tweet_ids=tuple(ids),
        unassigned=tuple(sem_embedding),
    )


@dataclass(frozen=True, slots=True)
class HashingEmbedder:
    """Embedder substituto: bag-of-words com hashing de atributos, normalizado em l2."""

    dim: int = 64

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ConfigError("Dimensão do embedder deve ser >= 1.")

    def _vetorizador(self) -> HashingVectorizer:
        return HashingVectorizer(n_features=self.dim, alternate_sign=True, norm="l2")

    def embed(self, textos: Sequence[str]) -> np.ndarray:
        if not textos:
            return np.zeros((0, self.dim), dtype=np.float64)
        return np.asarray(self._vetorizador().transform(list(textos)).toarray(), dtype=np.float64)

    def embed_tweets(self, g: HetNet) -> EmbeddingMatrix:
        """Embeddings para todos os tweets da rede; texto que cai no vetor nulo é erro."""
        textos = g.tweets["text"].fillna("").astype(str).tolist() if g.tweet_count else []
        ids = g.tweets["tweet_id"].astype(str).tolist() if g.tweet_count else []
        matriz = self.embed(textos)
        nulos = np.flatnonzero(np.linalg.norm(matriz, axis=1) <= _TOLERANCIA_NORMA)
        if nulos.size:
            raise DataError(
                f"Texto do tweet '{ids[nulos[0]]}' gera embedding nulo "
                f"({nulos.size} tweet(s) sem termos)."
            )
        return EmbeddingMatrix(
            vectors=_normalizar_linhas(matriz) if len(textos) else np.zeros((0, self.dim)),
            tweet_rows=np.arange(len(textos), dtype=np.int64),
            tweet_ids=tuple(ids),
        )


def _semear(vetores: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Sementes no estilo k-means++ ponderadas pela distância de cosseno (1 - cos)."""
    m = vetores.shape[0]
    escolhidos = [int(rng.integers(m))]
    distancia = np.clip(1.0 - vetores @ vetores[escolhidos[0]], 0.0, None)
    for _ in range(1, k):
        total = distancia.sum()
        if total <= 0:
            candidatos = np.setdiff1d(np.arange(m), escolhidos)
            proximo = int(rng.choice(candidatos)) if candidatos.size else int(rng.integers(m))
        else:
            proximo = int(rng.choice(m, p=distancia / total))
        escolhidos.append(proximo)
        distancia = np.minimum(distancia, np.clip(1.0 - vetores @ vetores[proximo], 0.0, None))
    return vetores[escolhidos].copy()


def _atualizar_centroides(
    vetores: np.ndarray, atribuicao: np.ndarray, centroides: np.ndarray
) -> np.ndarray:
    k = centroides.shape[0]
    novos = centroides.copy()
    cosseno_atual = np.einsum("ij,ij->i", vetores, centroides[atribuicao])
    for topico in range(k):
        membros = atribuicao == topico
        if not np.any(membros):
            # cluster vazio: re-semeia no ponto pior representado
            pior = int(np.argmin(cosseno_atual))
            novos[topico] = vetores[pior]
            cosseno_atual[pior] = np.inf
            continue
        soma = vetores[membros].sum(axis=0)
        norma = np.linalg.norm(soma)
        if norma > _TOLERANCIA_NORMA:
            novos[topico] = soma / norma
    return novos


def spherical_kmeans(
    emb: EmbeddingMatrix,
    K: int,
    seed: int,
    max_iter: int = 100,
    tol: float = 1e-9,
) -> TopicModel:
    if K < 1:
        raise ConfigError("K deve ser >= 1.")
    if K > emb.rows:
        raise DataError(f"K={K} maior que o número de tweets com embedding ({emb.rows}).")

    vetores = emb.vectors
    rng = np.random.default_rng(seed)
    centroides = _semear(vetores, K, rng)
    similaridade = vetores @ centroides.T
    atribuicao = np.argmax(similaridade, axis=1)
    objetivo = float(similaridade.max(axis=1).mean())
    historico = [objetivo]
    iteracoes = 0

    for iteracoes in range(1, max_iter + 1):
        centroides = _atualizar_centroides(vetores, atribuicao, centroides)
        similaridade = vetores @ centroides.T
        nova = np.argmax(similaridade, axis=1)
        novo_objetivo = float(similaridade[np.arange(vetores.shape[0]), nova].mean())
        mudancas = int(np.count_nonzero(nova != atribuicao))
        _logger.debug(
            "k-means iteration",
            extra={"iteration": iteracoes, "objective": novo_objetivo, "changes": mudancas},
        )
        ganho = novo_objetivo - objetivo
        atribuicao, objetivo = nova, novo_objetivo
        historico.append(objetivo)
        if mudancas == 0 or ganho < tol:
            break

    _logger.info(
        "k-means converged",
        extra={"k": K, "iterations": iteracoes, "objective": objetivo, "rows": emb.rows},
    )
    return TopicModel(
        centroids=centroides,
        assignment=atribuicao.astype(np.int64),
        tweet_rows=emb.tweet_rows.copy(),
        tweet_ids=emb.tweet_ids,
        objective=objetivo,
        iterations=iteracoes,
        history=tuple(historico),
    )


def topic_histogram(g: HetNet, tweet_rows: Iterable[int], assignment: Iterable[int], k: int) -> TopicHistogram:
    """Histograma o^i a partir de (tweet, tópico), sem alterar a rede."""
    linhas = np.asarray(list(tweet_rows), dtype=np.int64)
    topicos = np.asarray(list(assignment), dtype=np.int64)
    contains = sp.csr_matrix(
        (np.ones(linhas.size, dtype=np.float64), (linhas, topicos)), shape=(g.tweet_count, k)
    )
    return TopicHistogram((g.posts @ contains).tocsr())


def attach_topics(g: HetNet, model: TopicModel) -> TopicHistogram:
    """Cria as arestas Contains (tweet -> tópico) e agrega o histograma por usuário."""
    contains = sp.csr_matrix(
        (np.ones(model.tweet_rows.size, dtype=np.float64), (model.tweet_rows, model.assignment)),
        shape=(g.tweet_count, model.k),
    )
    g.fixar_topicos(contains, model.k)
    hist = TopicHistogram((g.posts @ g.contains).tocsr())
    _logger.info(
        "Topics attached",
        extra={"k": model.k, "assigned_tweets": int(model.tweet_rows.size), "histogram_total": hist.total()},
    )
    return hist
