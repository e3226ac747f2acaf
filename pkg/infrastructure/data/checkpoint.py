"""Formato de checkpoint: JSON com chaves ordenadas e tensores em base64.

Cada tensor é `{"shape": [...], "dtype": "<f8", "data": "<base64 row-major>"}`;
o conteúdo completo é validado por `CheckpointPayload`.
"""
from __future__ import annotations

import base64
import json
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from core.shared.exceptions import DataError

FORMATO = "conluio-checkpoint"
VERSAO = 1
_DTYPE = "<f8"


class TensorPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    shape: list[int]
    dtype: str = _DTYPE
    data: str

    @field_validator("dtype")
    @classmethod
    def _apenas_float64(cls, valor: str) -> str:
        if valor != _DTYPE:
            raise ValueError(f"dtype não suportado: {valor}.")
        return valor


class CheckpointPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    format: str = Field(FORMATO)
    version: int = Field(VERSAO)
    seed: int
    heads: int
    topics_k: int = Field(0, ge=0)
    relationships: list[str]
    hyperparameters: dict[str, Any]
    mu: float
    r2: Optional[float]
    center: TensorPayload
    feature_mean: TensorPayload
    feature_std: TensorPayload
    tensors: dict[str, TensorPayload]

    @field_validator("format")
    @classmethod
    def _formato(cls, valor: str) -> str:
        if valor != FORMATO:
            raise ValueError(f"Formato desconhecido: '{valor}'.")
        return valor


def encode_tensor(tensor: np.ndarray) -> TensorPayload:
    contiguo = np.ascontiguousarray(tensor, dtype=_DTYPE)
    return TensorPayload(
        shape=list(contiguo.shape),
        data=base64.b64encode(contiguo.tobytes(order="C")).decode("ascii"),
    )


def decode_tensor(payload: TensorPayload) -> np.ndarray:
    bruto = base64.b64decode(payload.data.encode("ascii"), validate=True)
    esperado = int(np.prod(payload.shape, dtype=np.int64)) * 8
    if len(bruto) != esperado:
        raise DataError(f"Tensor com {len(bruto)} bytes; esperado {esperado} para {payload.shape}.")
    return np.frombuffer(bruto, dtype=_DTYPE).reshape(payload.shape).astype(np.float64)


def dumps(payload: CheckpointPayload) -> str:
    return json.dumps(payload.model_dump(mode="json"), sort_keys=True, ensure_ascii=False, indent=1) + "\n"


def loads(texto: str, *, origem: str = "checkpoint") -> CheckpointPayload:
    try:
        return CheckpointPayload.model_validate(json.loads(texto))
    except json.JSONDecodeError as e:
        raise DataError(f"{origem}: JSON malformado ({e.msg}).") from e
    except ValidationError as e:
        primeiro = e.errors()[0]
        campo = ".".join(str(parte) for parte in primeiro.get("loc", ())) or "checkpoint"
        raise DataError(f"{origem}: campo '{campo}' inválido ({primeiro.get('msg')}).") from e
