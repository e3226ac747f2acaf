"""Gerador de redes sintéticas com economia de troca de seguidores.

Três papéis: clientes colusivos (rotulados), usuários orgânicos (rotulados, só no
teste) e intermediários não rotulados. Clientes gastam créditos seguindo outros
clientes e intermediários; intermediários seguem clientes de volta, o que cria os
caminhos de transição b -> x -> a. Clientes concentram tweets em tópicos
promocionais e têm metadados deslocados.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import timedelta

import numpy as np

from core.entities.records import FollowRecord, LabelRecord, TweetRecord, UserRecord
from core.enums import ELabel
from core.graph.topics import HashingEmbedder
from core.shared.exceptions import DataError
from core.value_object import DataReferencia

_logger = logging.getLogger("conluio.core.synthetic")

_PALAVRAS_POR_TOPICO = 12
_PALAVRAS_COMUNS = tuple(f"comum{j}" for j in range(20))
_COLUSIVO, _ORGANICO, _INTERMEDIARIO = 0, 1, 2


@dataclass(frozen=True, slots=True)
class SynthConfig:
    n_collusive: int = 500
    n_organic: int = 100
    n_intermediaries: int = 300
    credit_rate: float = 0.4
    follow_back_prob: float = 0.5
    topic_concentration: float = 0.8
    K_topics: int = 20
    tweets_per_user: int = 10
    seed: int = 0
    initial_credit: int = 50
    organic_follows: int = 8
    metadata_shift: float = 1.0
    embedding_dim: int = 64
    reference_date: str = "2020-01-01"

    def __post_init__(self) -> None:
        for nome in ("n_collusive", "n_organic", "n_intermediaries", "tweets_per_user", "initial_credit", "organic_follows"):
            if getattr(self, nome) < 0:
                raise DataError(f"{nome} não pode ser negativo.")
        for nome in ("credit_rate", "follow_back_prob", "topic_concentration"):
            if not 0.0 <= getattr(self, nome) <= 1.0:
                raise DataError(f"{nome} deve estar em [0, 1].")
        if self.n_collusive + self.n_organic == 0:
            raise DataError("Configuração inviável: nenhum usuário rotulado.")
        if self.K_topics < 1:
            raise DataError("K_topics deve ser >= 1.")
        if self.metadata_shift < 0:
            raise DataError("metadata_shift não pode ser negativo.")
        DataReferencia.criar_de_texto(self.reference_date)


@dataclass(slots=True)
class SyntheticDataset:
    users: list[UserRecord] = field(default_factory=list)
    follows: list[FollowRecord] = field(default_factory=list)
    tweets: list[TweetRecord] = field(default_factory=list)
    labels: list[LabelRecord] = field(default_factory=list)


def _topicos_promocionais(k: int) -> np.ndarray:
    return np.arange(max(1, k // 5))


def _preferencias(cfg: SynthConfig, papeis: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    promocionais = _topicos_promocionais(cfg.K_topics)
    comuns = np.setdiff1d(np.arange(cfg.K_topics), promocionais)
    if comuns.size == 0:
        comuns = promocionais
    preferido = rng.choice(comuns, size=papeis.size)
    colusivos = papeis == _COLUSIVO
    concentrados = colusivos & (rng.random(papeis.size) < cfg.topic_concentration)
    preferido[concentrados] = rng.choice(promocionais, size=int(concentrados.sum()))
    return preferido


def _seguir_organico(
    cfg: SynthConfig, preferido: np.ndarray, rng: np.random.Generator, arestas: set[tuple[int, int]]
) -> None:
    n = preferido.size
    por_topico = {int(t): np.flatnonzero(preferido == t) for t in np.unique(preferido)}
    for u in range(n):
        pares = por_topico[int(preferido[u])]
        pares = pares[pares != u]
        if pares.size == 0:
            pares = np.setdiff1d(np.arange(n), [u])
        if pares.size == 0:
            continue
        quantidade = min(cfg.organic_follows, pares.size)
        for v in rng.choice(pares, size=quantidade, replace=False):
            arestas.add((u, int(v)))


def _seguir_por_credito(
    cfg: SynthConfig, papeis: np.ndarray, rng: np.random.Generator, arestas: set[tuple[int, int]]
) -> None:
    clientes = np.flatnonzero(papeis == _COLUSIVO)
    intermediarios = np.flatnonzero(papeis == _INTERMEDIARIO)
    alvos = np.concatenate([clientes, intermediarios])
    if alvos.size < 2:
        return
    for u in clientes:
        gastos = int(rng.binomial(cfg.initial_credit, cfg.credit_rate))
        candidatos = alvos[alvos != u]
        for v in rng.choice(candidatos, size=min(gastos, candidatos.size), replace=False):
            arestas.add((int(u), int(v)))
            if rng.random() < cfg.follow_back_prob:
                arestas.add((int(v), int(u)))
    # intermediários do serviço devolvem seguidores a clientes
    if clientes.size == 0:
        return
    for x in intermediarios:
        gastos = int(rng.binomial(cfg.initial_credit, cfg.credit_rate))
        for a in rng.choice(clientes, size=min(gastos, clientes.size), replace=False):
            arestas.add((int(x), int(a)))


def _texto(topico: int, rng: np.random.Generator) -> str:
    proprias = [f"topico{topico}palavra{j}" for j in rng.integers(0, _PALAVRAS_POR_TOPICO, size=8)]
    comuns = [_PALAVRAS_COMUNS[j] for j in rng.integers(0, len(_PALAVRAS_COMUNS), size=2)]
    return " ".join(proprias + comuns)


def generate_synthetic(cfg: SynthConfig) -> SyntheticDataset:
    rng = np.random.default_rng(cfg.seed)
    papeis = np.concatenate(
        [
            np.full(cfg.n_collusive, _COLUSIVO),
            np.full(cfg.n_organic, _ORGANICO),
            np.full(cfg.n_intermediaries, _INTERMEDIARIO),
        ]
    )
    papeis = papeis[rng.permutation(papeis.size)]
    n = papeis.size
    ids = [f"u{i:05d}" for i in range(n)]
    preferido = _preferencias(cfg, papeis, rng)

    arestas: set[tuple[int, int]] = set()
    _seguir_organico(cfg, preferido, rng, arestas)
    _seguir_por_credito(cfg, papeis, rng, arestas)
    ordenadas = sorted(arestas)
    saida = np.zeros(n, dtype=np.int64)
    entrada = np.zeros(n, dtype=np.int64)
    for u, v in ordenadas:
        saida[u] += 1
        entrada[v] += 1

    dataset = SyntheticDataset()
    dataset.follows = [FollowRecord(src=ids[u], dst=ids[v]) for u, v in ordenadas]

    embedder = HashingEmbedder(cfg.embedding_dim)
    referencia = DataReferencia.criar_de_texto(cfg.reference_date).as_date()
    desvio = cfg.metadata_shift

    textos: list[str] = []
    pendentes: list[dict] = []
    for u in range(n):
        colusivo = papeis[u] == _COLUSIVO
        topicos = np.where(
            rng.random(cfg.tweets_per_user) < cfg.topic_concentration,
            preferido[u],
            rng.integers(0, cfg.K_topics, size=cfg.tweets_per_user),
        )
        p_retweet = min(0.95, 0.2 + 0.4 * desvio) if colusivo else 0.2
        for t, topico in enumerate(topicos):
            textos.append(_texto(int(topico), rng))
            pendentes.append(
                {
                    "user": ids[u],
                    "tweet_id": f"{ids[u]}t{t:03d}",
                    "is_retweet": bool(rng.random() < p_retweet),
                    "n_emojis": int(rng.poisson(1.0 + desvio if colusivo else 1.0)),
                    "n_urls": int(rng.poisson(0.3 + desvio if colusivo else 0.3)),
                    "n_mentions": int(rng.poisson(1.0)),
                    "n_words": int(rng.poisson(12.0)),
                    "n_hashtags": int(rng.poisson(1.0 + 2.0 * desvio if colusivo else 1.0)),
                }
            )

        idade = int(rng.integers(30, 30 + int(900 / (1.0 + desvio)) + 1)) if colusivo else int(rng.integers(300, 3000))
        criado_em = referencia - timedelta(days=idade)
        anos = range(criado_em.year, referencia.year + 1)
        dataset.users.append(
            UserRecord(
                id=ids[u],
                followers_count=int(entrada[u]),
                friends_count=int(saida[u]),
                statuses_count=int(cfg.tweets_per_user + rng.poisson(200.0 * (1.0 + desvio) if colusivo else 200.0)),
                favourites_count=int(rng.poisson(50.0 if colusivo else 150.0)),
                description="" if rng.random() < (0.5 if colusivo else 0.1) else "perfil " + ids[u],
                url_in_description=bool(rng.random() < (0.6 if colusivo else 0.2)),
                location_present=bool(rng.random() < (0.3 if colusivo else 0.7)),
                profile_image=bool(rng.random() < 0.9),
                background_image=bool(rng.random() < (0.4 if colusivo else 0.6)),
                created_at=criado_em.isoformat(),
                tweet_year_counts={str(ano): int(rng.poisson(20.0)) for ano in anos},
            )
        )
        if papeis[u] != _INTERMEDIARIO:
            rotulo = ELabel.COLLUSIVE if colusivo else ELabel.NON_COLLUSIVE
            dataset.labels.append(LabelRecord(user_id=ids[u], label=rotulo))

    vetores = embedder.embed(textos)
    for registro, texto, vetor in zip(pendentes, textos, vetores):
        dataset.tweets.append(TweetRecord(text=texto, embedding=vetor.tolist(), **registro))

    _logger.info(
        "Synthetic dataset generated",
        extra={
            "users": n,
            "follows": len(dataset.follows),
            "tweets": len(dataset.tweets),
            "labeled": len(dataset.labels),
            "seed": cfg.seed,
        },
    )
    return dataset

