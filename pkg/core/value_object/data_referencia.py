from __future__ import annotations

from datetime import date, datetime
from typing import Union

from core.shared.value_objects.normalizar_data import NormalizarData


class DataReferencia(NormalizarData):
    """Value Object do domínio para datas de calendário (criação de conta, data de referência `now`).

    - Herda validação e normalização ISO de NormalizarData.
    - A data de referência nunca vem do relógio: é sempre informada (CLI/config).
    """

    def __init__(self, *_args, **_kwargs) -> None:  # type: ignore[override]
        raise TypeError(
            "Use as fábricas da classe (ex.: DataReferencia.criar_de_texto ou criar_de_data)."
        )

    @classmethod
    def _criar_interno(cls, texto: str) -> "DataReferencia":
        base = NormalizarData(texto)
        instancia = object.__new__(cls)
        object.__setattr__(instancia, "data", base.data)
        object.__setattr__(instancia, "dia", base.dia)
        object.__setattr__(instancia, "mes", base.mes)
        object.__setattr__(instancia, "ano", base.ano)
        return instancia  # type: ignore[return-value]

    # Fábricas
    @classmethod
    def criar_de_texto(cls, texto: str) -> "DataReferencia":
        return cls._criar_interno(texto)

    @classmethod
    def criar_de_data(cls, valor_data: Union[date, datetime]) -> "DataReferencia":
        return cls._criar_interno(f"{valor_data.year:04d}-{valor_data.month:02d}-{valor_data.day:02d}")

    @classmethod
    def coagir(cls, valor: Union[str, date, datetime, "DataReferencia"]) -> "DataReferencia":
        if isinstance(valor, DataReferencia):
            return valor
        if isinstance(valor, (date, datetime)):
            return cls.criar_de_data(valor)
        return cls.criar_de_texto(str(valor))

    # Semântica
    def como_iso(self) -> str:
        return self.data

    def dias_ate(self, outra: Union[date, "DataReferencia"]) -> int:
        """Dias decorridos desta data até `outra` (negativo se `outra` for anterior)."""
        alvo = outra.as_date() if isinstance(outra, NormalizarData) else outra
        return (alvo - self.as_date()).days
