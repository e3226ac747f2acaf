import json
import os
from dataclasses import dataclass
from typing import Iterator, Optional, TypeVar

from pydantic import BaseModel, ValidationError

from core.shared.exceptions import DataError

ModeloRegistro = TypeVar("ModeloRegistro", bound=BaseModel)


@dataclass
class JsonlWrapper:
    """Leitura de arquivos de registros delimitados por linha (um objeto JSON por linha)."""

    file_path: Optional[str] = None
    encoding: str = "utf-8"

    def _resolver_caminho(self, file_path: Optional[str]) -> str:
        path = file_path or self.file_path
        if not path:
            raise ValueError("Nenhum caminho de arquivo foi fornecido.")
        if not os.path.exists(path):
            raise FileNotFoundError(f"Arquivo não encontrado: {path}")
        return path

    def ler_linhas(self, file_path: Optional[str] = None) -> Iterator[tuple[int, dict]]:
        """Produz (número da linha, objeto) ignorando linhas em branco."""
        path = self._resolver_caminho(file_path)
        with open(path, "r", encoding=self.encoding) as arquivo:
            for numero_linha, linha in enumerate(arquivo, start=1):
                if not linha.strip():
                    continue
                try:
                    objeto = json.loads(linha)
                except json.JSONDecodeError as e:
                    raise DataError(
                        f"JSON malformado ({e.msg}).", path=path, line_number=numero_linha
                    ) from e
                if not isinstance(objeto, dict):
                    raise DataError(
                        "Registro deve ser um objeto JSON.", path=path, line_number=numero_linha
                    )
                yield numero_linha, objeto

    def ler_registros(
        self, modelo: type[ModeloRegistro], file_path: Optional[str] = None
    ) -> Iterator[tuple[int, ModeloRegistro]]:
        """Valida cada linha contra o schema pydantic `modelo`."""
        path = self._resolver_caminho(file_path)
        for numero_linha, objeto in self.ler_linhas(path):
            try:
                yield numero_linha, modelo.model_validate(objeto)
            except ValidationError as e:
                primeiro = e.errors()[0]
                campo = ".".join(str(parte) for parte in primeiro.get("loc", ())) or "registro"
                raise DataError(
                    f"Campo '{campo}' inválido: {primeiro.get('msg', 'erro de validação')}.",
                    path=path,
                    line_number=numero_linha,
                ) from e
