import json
from typing import Any

from pydantic import BaseModel, Field, model_validator

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

_CODIGOS = (EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC)


class Response(BaseModel):
    """Resultado de uma etapa do pipeline, ecoado como JSON no stdout.

    Atributos:
        code (int): Código de saída do processo (0 sucesso, 1 uso, 2 dados, 3 numérico).
        success (bool | None): Se None, é derivado de 'code'.
        stage (str): Nome da etapa (build, train, ...).
        message (str): Mensagem associada.
        data (Any): Resumo produzido pela etapa.
    """
    code: int = Field(default=EXIT_OK)
    success: bool | None = Field(default=None)
    stage: str = Field(default="")
    message: str = Field(default="")
    data: Any = Field(default=None)

    @model_validator(mode="after")
    def _derivar_sucesso(self) -> "Response":
        if self.code not in _CODIGOS:
            raise ValueError(f"Código de saída inválido: {self.code}. Utilize 0, 1, 2 ou 3.")
        if self.success is None:
            self.success = self.code == EXIT_OK
        return self

    @classmethod
    def sucesso(cls, stage: str, data: Any = None, message: str = "") -> "Response":
        """Cria uma resposta bem-sucedida.

        Exemplo:
            >>> Response.sucesso("build", data={"labeled": 3}, message="OK").code
            0
        """
        return cls(code=EXIT_OK, success=True, stage=stage, message=message, data=data)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(), ensure_ascii=False, default=str, sort_keys=True)
