from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from core.enums import ELabel
from core.value_object import DataReferencia


class UserRecord(BaseModel):
    """Linha de `users.jsonl`: metadados de perfil de um usuário."""

    model_config = ConfigDict(extra="ignore", frozen=True)

    id: str = Field(..., min_length=1)
    followers_count: int = Field(..., ge=0)
    friends_count: int = Field(..., ge=0)
    statuses_count: int = Field(..., ge=0)
    favourites_count: int = Field(..., ge=0)
    description: str = ""
    url_in_description: bool
    location_present: bool
    profile_image: bool
    background_image: bool
    created_at: str
    tweet_year_counts: dict[str, int] = Field(default_factory=dict)
    labeled: Optional[bool] = Field(
        None, description="Marca opcional de usuário rotulado (ausente = decidir pelo arquivo de rótulos)."
    )

    @field_validator("id", mode="before")
    @classmethod
    def _id_como_texto(cls, valor: object) -> object:
        return str(valor) if isinstance(valor, int) and not isinstance(valor, bool) else valor

    @field_validator("created_at")
    @classmethod
    def _validar_data(cls, valor: str) -> str:
        return DataReferencia.criar_de_texto(valor).como_iso()

    @field_validator("tweet_year_counts")
    @classmethod
    def _validar_contagens(cls, valor: dict[str, int]) -> dict[str, int]:
        for ano, contagem in valor.items():
            if contagem < 0:
                raise ValueError(f"Contagem negativa de tweets no ano {ano}.")
        return valor


class FollowRecord(BaseModel):
    """Linha de `follows.jsonl`: `src` segue `dst`."""

    model_config = ConfigDict(extra="ignore", frozen=True)

    src: str = Field(..., min_length=1)
    dst: str = Field(..., min_length=1)

    @field_validator("src", "dst", mode="before")
    @classmethod
    def _id_como_texto(cls, valor: object) -> object:
        return str(valor) if isinstance(valor, int) and not isinstance(valor, bool) else valor


class TweetRecord(BaseModel):
    """Linha de `tweets.jsonl`."""

    model_config = ConfigDict(extra="ignore", frozen=True)

    user: str = Field(..., min_length=1)
    tweet_id: str = Field(..., min_length=1)
    text: str = ""
    is_retweet: bool = False
    n_emojis: int = Field(0, ge=0)
    n_urls: int = Field(0, ge=0)
    n_mentions: int = Field(0, ge=0)
    n_words: int = Field(0, ge=0)
    n_hashtags: int = Field(0, ge=0)
    embedding: Optional[list[float]] = None

    @field_validator("user", "tweet_id", mode="before")
    @classmethod
    def _id_como_texto(cls, valor: object) -> object:
        return str(valor) if isinstance(valor, int) and not isinstance(valor, bool) else valor


class LabelRecord(BaseModel):
    """Linha do arquivo lateral de rótulos `{user_id, label}`."""

    model_config = ConfigDict(extra="ignore", frozen=True)

    user_id: str = Field(..., min_length=1)
    label: ELabel

    @field_validator("user_id", mode="before")
    @classmethod
    def _id_como_texto(cls, valor: object) -> object:
        return str(valor) if isinstance(valor, int) and not isinstance(valor, bool) else valor
