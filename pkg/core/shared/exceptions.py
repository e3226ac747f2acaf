from __future__ import annotations

from typing import Optional


class DataError(ValueError):
    """Entrada inválida: linha malformada, id pendente, id duplicado, dimensão inconsistente."""

    def __init__(
        self,
        mensagem: str,
        *,
        path: Optional[str] = None,
        line_number: Optional[int] = None,
    ) -> None:
        self.path = path
        self.line_number = line_number
        if line_number is not None:
            local = f"{path}:{line_number}" if path else f"linha {line_number}"
            mensagem = f"{local}: {mensagem}"
        super().__init__(mensagem)


class ShapeError(ValueError):
    """Formatos de tensores ou grafos incompatíveis."""


class ConfigError(ValueError):
    """Configuração ou hiperparâmetro inválido (arquivo, flag ou estado do modelo)."""


class NonFiniteLossError(ArithmeticError):
    """Perda ou tensor não finito durante o treino."""

    def __init__(self, epoch: int, tensor: str) -> None:
        self.epoch = epoch
        self.tensor = tensor
        super().__init__(f"Valor não finito na época {epoch} (tensor '{tensor}').")


class StageError(RuntimeError):
    """Falha de uma etapa do pipeline; preserva a causa original em __cause__."""

    def __init__(self, stage: str, mensagem: str) -> None:
        self.stage = stage
        super().__init__(f"{stage}: {mensagem}")
