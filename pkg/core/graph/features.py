from __future__ import annotations

import logging
import math
from dataclasses import astuple, dataclass, fields
from datetime import date
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd
from sklearn.preprocessing import StandardScaler

from core.entities.hetnet import HetNet
from core.entities.records import UserRecord
from core.enums import ENodeKind
from core.shared.exceptions import DataError, ShapeError
from core.value_object import DataReferencia, NodeId

_logger = logging.getLogger("conluio.core.features")

COLUNAS_BINARIAS = ("description_presence", "url", "location", "profile_image", "background_image")
_CONTAGENS_TWEET = ("n_emojis", "n_urls", "n_mentions", "n_words", "n_hashtags")


@dataclass(frozen=True, slots=True)
class FeatureVector:
    follower_count: float
    friend_count: float
    status_count: float
    favorite_count: float
    description_presence: float
    description_length: float
    url: float
    location: float
    profile_image: float
    background_image: float
    account_age_days: float
    account_entropy: float
    emojis_avg: float
    retweet_ratio: float
    urls_avg: float
    mentions_avg: float
    words_avg: float
    hashtags_avg: float

    @classmethod
    def colunas(cls) -> tuple[str, ...]:
        return tuple(campo.name for campo in fields(cls))

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=np.float64)


FEATURE_COLUMNS: tuple[str, ...] = FeatureVector.colunas()


@dataclass(frozen=True, slots=True, eq=False)
class FeatureMatrix:
    """Matriz n x 18 sobre os usuários rotulados e os parâmetros de padronização."""

    raw: np.ndarray
    values: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    user_ids: tuple[str, ...]

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def aplicar(self, raw: np.ndarray) -> np.ndarray:
        """Padroniza linhas novas com os parâmetros já ajustados."""
        raw = np.asarray(raw, dtype=np.float64)
        if raw.ndim != 2 or raw.shape[1] != self.mean.size:
            raise ShapeError(f"Esperado (*, {self.mean.size}); recebido {raw.shape}.")
        return (raw - self.mean) / self.std

    def to_frame(self, *, padronizada: bool = False) -> pd.DataFrame:
        dados = self.values if padronizada else self.raw
        frame = pd.DataFrame(dados, columns=list(FEATURE_COLUMNS))
        frame.insert(0, "user_id", list(self.user_ids))
        return frame


def account_entropy(tweet_year_counts: dict[str, int]) -> float:
    """Σ c·ln(c) sobre os anos com c > 0 (forma não normalizada)."""
    return float(sum(c * math.log(c) for c in tweet_year_counts.values() if c > 0))


def _medias_tweets(tweets: pd.DataFrame) -> dict[str, float]:
    total = len(tweets)
    if total == 0:
        return {"retweet_ratio": 0.0, **{coluna: 0.0 for coluna in _CONTAGENS_TWEET}}
    retweets = int(tweets["is_retweet"].astype(bool).sum())
    medias = {coluna: float(tweets[coluna].astype(np.float64).mean()) for coluna in _CONTAGENS_TWEET}
    return {"retweet_ratio": retweets / total, **medias}


def _vetor(registro: UserRecord, referencia: DataReferencia, tweets: pd.DataFrame) -> FeatureVector:
    criado_em = DataReferencia.criar_de_texto(registro.created_at)
    medias = _medias_tweets(tweets)
    return FeatureVector(
        follower_count=float(registro.followers_count),
        friend_count=float(registro.friends_count),
        status_count=float(registro.statuses_count),
        favorite_count=float(registro.favourites_count),
        description_presence=float(bool(registro.description)),
        description_length=float(len(registro.description)),
        url=float(registro.url_in_description),
        location=float(registro.location_present),
        profile_image=float(registro.profile_image),
        background_image=float(registro.background_image),
        account_age_days=float(criado_em.dias_ate(referencia)),
        account_entropy=account_entropy(registro.tweet_year_counts),
        emojis_avg=medias["n_emojis"],
        retweet_ratio=medias["retweet_ratio"],
        urls_avg=medias["n_urls"],
        mentions_avg=medias["n_mentions"],
        words_avg=medias["n_words"],
        hashtags_avg=medias["n_hashtags"],
    )


def extract_features(g: HetNet, user: NodeId, now: Union[str, date, DataReferencia]) -> FeatureVector:
    if user.kind is not ENodeKind.USER or user.index >= g.user_count:
        raise DataError(f"Nó {user} não é um usuário da rede.")
    referencia = DataReferencia.coagir(now)
    tweets = g.tweets[g.tweets["user"] == user.index] if g.tweet_count else g.tweets
    return _vetor(g.user_records[user.index], referencia, tweets)


def raw_feature_matrix(g: HetNet, now: Union[str, date, DataReferencia]) -> np.ndarray:
    """Matriz bruta (antes da padronização) na ordem dos usuários rotulados."""
    referencia = DataReferencia.coagir(now)
    por_usuario = dict(tuple(g.tweets.groupby("user", sort=False))) if g.tweet_count else {}
    vazio = g.tweets.iloc[0:0]
    linhas = [
        _vetor(g.user_records[int(i)], referencia, por_usuario.get(int(i), vazio)).as_array()
        for i in g.labeled
    ]
    if not linhas:
        return np.zeros((0, len(FEATURE_COLUMNS)), dtype=np.float64)
    return np.vstack(linhas)


def standardize(
    raw: np.ndarray, train_rows: Optional[Sequence[int]] = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """z-score com estatísticas das linhas de treino; colunas constantes mantêm escala 1."""
    raw = np.asarray(raw, dtype=np.float64)
    linhas = np.arange(raw.shape[0]) if train_rows is None else np.asarray(train_rows, dtype=np.int64)
    if linhas.size == 0:
        raise DataError("Conjunto de treino vazio para padronização.")
    scaler = StandardScaler().fit(raw[linhas])
    constantes = [FEATURE_COLUMNS[j] for j in np.flatnonzero(scaler.var_ == 0) if j < len(FEATURE_COLUMNS)]
    if constantes:
        _logger.warning("Constant feature columns kept at scale 1", extra={"columns": constantes})
    return scaler.transform(raw), scaler.mean_.copy(), scaler.scale_.copy()


def build_feature_matrix(
    g: HetNet,
    now: Union[str, date, DataReferencia],
    train_rows: Optional[Sequence[int]] = None,
) -> FeatureMatrix:
    raw = raw_feature_matrix(g, now)
    valores, media, desvio = standardize(raw, train_rows)
    _logger.info("Feature matrix built", extra={"rows": raw.shape[0], "columns": raw.shape[1]})
    return FeatureMatrix(
        raw=raw,
        values=valores,
        mean=media,
        std=desvio,
        user_ids=tuple(g.labeled_user_ids()),
    )
