from __future__ import annotations

from dataclasses import dataclass

from core.enums import ENodeKind


@dataclass(frozen=True, slots=True, order=True)
class NodeId:
    """Identificador tipado de nó da rede heterogênea: (tipo, índice denso por tipo)."""

    kind: ENodeKind
    index: int

    def __post_init__(self) -> None:
        if not isinstance(self.kind, ENodeKind):
            object.__setattr__(self, "kind", ENodeKind(self.kind))
        if isinstance(self.index, bool) or int(self.index) != self.index:
            raise ValueError(f"Índice de nó inválido: {self.index!r}.")
        if self.index < 0:
            raise ValueError(f"Índice de nó não pode ser negativo: {self.index}.")
        object.__setattr__(self, "index", int(self.index))

    @classmethod
    def usuario(cls, index: int) -> "NodeId":
        return cls(ENodeKind.USER, index)

    @classmethod
    def tweet(cls, index: int) -> "NodeId":
        return cls(ENodeKind.TWEET, index)

    @classmethod
    def topico(cls, index: int) -> "NodeId":
        return cls(ENodeKind.TOPIC, index)

    def __str__(self) -> str:  # pragma: no cover
        return f"{self.kind.name.lower()}:{self.index}"
