from __future__ import annotations

from dataclasses import dataclass
import re
from datetime import date

# Aceita "YYYY-MM-DD" isolado ou como prefixo de um datetime ISO-8601
_PADRAO_DATA_ISO = re.compile(r"^\s*(\d{4})-(\d{1,2})-(\d{1,2})(?:[T ][0-9:.+\-Z]*)?\s*$")


@dataclass(frozen=True, slots=True)
class NormalizarData:
    """Value Object para data de calendário no formato ISO (YYYY-MM-DD).

    - Aceita "2019-3-7", "2019-03-07" ou "2019-03-07T10:00:00Z" e normaliza para "2019-03-07".
    - Valida dia, mês e ano pelo calendário gregoriano (inclui anos bissextos).
    """

    data: str
    dia: int = 0
    mes: int = 0
    ano: int = 0

    def __post_init__(self) -> None:
        correspondencia = _PADRAO_DATA_ISO.match(self.data)
        if not correspondencia:
            raise ValueError(f"Data inválida: '{self.data}'. Esperado YYYY-MM-DD.")

        ano = int(correspondencia.group(1))
        mes = int(correspondencia.group(2))
        dia = int(correspondencia.group(3))

        try:
            data_validada = date(ano, mes, dia)
        except ValueError as erro:
            raise ValueError(f"Data inválida: {erro}") from None

        object.__setattr__(self, "data", data_validada.isoformat())
        object.__setattr__(self, "dia", dia)
        object.__setattr__(self, "mes", mes)
        object.__setattr__(self, "ano", ano)

    def __str__(self) -> str:  # pragma: no cover
        return self.data

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.ano, self.mes, self.dia)

    def as_date(self) -> date:
        return date(self.ano, self.mes, self.dia)
