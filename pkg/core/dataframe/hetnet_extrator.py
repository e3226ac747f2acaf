from __future__ import annotations

import logging
from typing import Iterator, Optional, Protocol, TypeVar

import numpy as np
import pandas as pd
import scipy.sparse as sp
from pydantic import BaseModel

from core.entities.hetnet import HetNet
from core.entities.records import FollowRecord, LabelRecord, TweetRecord, UserRecord
from core.enums import ELabel
from core.shared.exceptions import DataError
from .jsonl_wrapper import JsonlWrapper

_logger = logging.getLogger("conluio.core.hetnet")

ModeloRegistro = TypeVar("ModeloRegistro", bound=BaseModel)

COLUNAS_TWEET = (
    "tweet_id",
    "user",
    "text",
    "is_retweet",
    "n_emojis",
    "n_urls",
    "n_mentions",
    "n_words",
    "n_hashtags",
)


class LeitorRegistros(Protocol):
    def ler_registros(
        self, modelo: type[ModeloRegistro], file_path: Optional[str] = None
    ) -> Iterator[tuple[int, ModeloRegistro]]: ...


class HetnetExtrator:
    """Monta a HetNet a partir dos arquivos users/follows/tweets (+ rótulos opcionais)."""

    def __init__(self, *, leitor: Optional[LeitorRegistros] = None) -> None:
        self.leitor: LeitorRegistros = leitor or JsonlWrapper()

    # --- Fluxo principal ---------------------------------------------------
    def extrair(
        self,
        users_path: str,
        follows_path: str,
        tweets_path: str,
        labels_path: Optional[str] = None,
    ) -> HetNet:
        user_ids, registros = self._ler_usuarios(users_path)
        indice = {uid: i for i, uid in enumerate(user_ids)}

        follows = self._ler_follows(follows_path, indice)
        tweets = self._ler_tweets(tweets_path, indice)
        posts = _matriz_posts(tweets, len(user_ids))
        labeled, labels = self._selecionar_rotulados(labels_path, indice, registros)

        g = HetNet(
            user_ids=user_ids,
            user_records=registros,
            tweets=tweets,
            follows=follows,
            posts=posts,
            labeled=labeled,
            labels=labels,
            _user_index=indice,
        )
        _logger.info(
            "Heterogeneous network loaded",
            extra={
                "user_count": g.user_count,
                "tweet_count": g.tweet_count,
                "follow_edges": int(follows.nnz),
                "labeled_count": int(labeled.size),
            },
        )
        return g

    # --- Passos do domínio -------------------------------------------------
    def _ler_usuarios(self, users_path: str) -> tuple[list[str], list[UserRecord]]:
        user_ids: list[str] = []
        registros: list[UserRecord] = []
        vistos: set[str] = set()
        for numero_linha, registro in self.leitor.ler_registros(UserRecord, users_path):
            if registro.id in vistos:
                raise DataError(
                    f"Id de usuário duplicado: '{registro.id}'.",
                    path=users_path,
                    line_number=numero_linha,
                )
            vistos.add(registro.id)
            user_ids.append(registro.id)
            registros.append(registro)
        return user_ids, registros

    def _ler_follows(self, follows_path: str, indice: dict[str, int]) -> sp.csr_matrix:
        origens: list[int] = []
        destinos: list[int] = []
        lacos_ignorados = 0
        for numero_linha, registro in self.leitor.ler_registros(FollowRecord, follows_path):
            for uid in (registro.src, registro.dst):
                if uid not in indice:
                    raise DataError(
                        f"Id de usuário pendente: '{uid}'.",
                        path=follows_path,
                        line_number=numero_linha,
                    )
            if registro.src == registro.dst:
                lacos_ignorados += 1
                continue
            origens.append(indice[registro.src])
            destinos.append(indice[registro.dst])

        if lacos_ignorados:
            _logger.warning("Self-loop follows dropped", extra={"dropped_count": lacos_ignorados})

        n = len(indice)
        matriz = sp.coo_matrix(
            (np.ones(len(origens), dtype=np.float64), (origens, destinos)), shape=(n, n)
        ).tocsr()
        # relação de seguir é um conjunto: arestas repetidas colapsam
        matriz.sum_duplicates()
        matriz.data[:] = 1.0
        matriz.sort_indices()
        return matriz

    def _ler_tweets(self, tweets_path: str, indice: dict[str, int]) -> pd.DataFrame:
        linhas: list[dict] = []
        vistos: set[str] = set()
        for numero_linha, registro in self.leitor.ler_registros(TweetRecord, tweets_path):
            if registro.user not in indice:
                raise DataError(
                    f"Id de usuário pendente: '{registro.user}'.",
                    path=tweets_path,
                    line_number=numero_linha,
                )
            if registro.tweet_id in vistos:
                raise DataError(
                    f"Id de tweet duplicado: '{registro.tweet_id}'.",
                    path=tweets_path,
                    line_number=numero_linha,
                )
            vistos.add(registro.tweet_id)
            linha = registro.model_dump(exclude={"embedding"})
            linha["user"] = indice[registro.user]
            linhas.append(linha)
        return pd.DataFrame.from_records(linhas, columns=list(COLUNAS_TWEET))

    def _selecionar_rotulados(
        self,
        labels_path: Optional[str],
        indice: dict[str, int],
        registros: list[UserRecord],
    ) -> tuple[np.ndarray, dict[int, ELabel]]:
        if labels_path:
            labels: dict[int, ELabel] = {}
            for numero_linha, registro in self.leitor.ler_registros(LabelRecord, labels_path):
                if registro.user_id not in indice:
                    raise DataError(
                        f"Id de usuário pendente: '{registro.user_id}'.",
                        path=labels_path,
                        line_number=numero_linha,
                    )
                posicao = indice[registro.user_id]
                if posicao in labels:
                    raise DataError(
                        f"Rótulo duplicado para '{registro.user_id}'.",
                        path=labels_path,
                        line_number=numero_linha,
                    )
                labels[posicao] = registro.label
            return np.array(sorted(labels), dtype=np.int64), labels

        if any(registro.labeled is not None for registro in registros):
            marcados = [i for i, registro in enumerate(registros) if registro.labeled]
            return np.array(marcados, dtype=np.int64), {}

        return np.arange(len(registros), dtype=np.int64), {}


def _matriz_posts(tweets: pd.DataFrame, user_count: int) -> sp.csr_matrix:
    t = len(tweets)
    autores = tweets["user"].to_numpy(dtype=np.int64) if t else np.zeros(0, dtype=np.int64)
    matriz = sp.csr_matrix(
        (np.ones(t, dtype=np.float64), (autores, np.arange(t))), shape=(user_count, t)
    )
    matriz.sort_indices()
    return matriz


def load_hetnet(
    users_path: str,
    follows_path: str,
    tweets_path: str,
    labels_path: Optional[str] = None,
    *,
    leitor: Optional[LeitorRegistros] = None,
) -> HetNet:
    return HetnetExtrator(leitor=leitor).extrair(users_path, follows_path, tweets_path, labels_path)
