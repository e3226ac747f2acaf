from __future__ import annotations

import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Mapping, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

from application.pipeline.run_config import RunConfig
from core.shared.exceptions import ConfigError, StageError
from infrastructure.data.artifact_context import DEFAULT_OUT_DIR

_logger = logging.getLogger("conluio.cli.settings")


def _sem_nulos(valores: Mapping[str, Any]) -> dict[str, Any]:
    """Remove flags não informadas (None), inclusive em seções aninhadas."""
    limpo: dict[str, Any] = {}
    for chave, valor in valores.items():
        if isinstance(valor, Mapping):
            aninhado = _sem_nulos(valor)
            if aninhado:
                limpo[chave] = aninhado
        elif valor is not None:
            limpo[chave] = valor
    return limpo


def mesclar(base: Mapping[str, Any], sobre: Mapping[str, Any]) -> dict[str, Any]:
    resultado = dict(base)
    for chave, valor in sobre.items():
        atual = resultado.get(chave)
        if isinstance(atual, Mapping) and isinstance(valor, Mapping):
            resultado[chave] = mesclar(atual, valor)
        else:
            resultado[chave] = valor
    return resultado


def ler_arquivo_config(caminho: Path | str) -> dict[str, Any]:
    arquivo = Path(caminho)
    if not arquivo.is_file():
        raise StageError("config", f"arquivo de configuração não encontrado: {arquivo}") from FileNotFoundError(str(arquivo))
    try:
        with open(arquivo, "rb") as f:
            return tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise StageError("config", f"TOML inválido em {arquivo}: {e}") from ConfigError(str(e))


def load_run_config(config_path: Optional[Path | str], overrides: Mapping[str, Any]) -> RunConfig:
    """flag > arquivo (--config ou CONLUIO_CONFIG) > CONLUIO_OUT > padrão."""
    load_dotenv()
    caminho = config_path or os.getenv("CONLUIO_CONFIG")
    base = ler_arquivo_config(caminho) if caminho else {}
    if "out_dir" not in base:
        base["out_dir"] = os.getenv("CONLUIO_OUT") or DEFAULT_OUT_DIR

    mesclado = mesclar(base, _sem_nulos(overrides))
    try:
        cfg = RunConfig.model_validate(mesclado)
    except ValidationError as e:
        detalhes = "; ".join(
            f"{'.'.join(str(p) for p in erro['loc'])}: {erro['msg']}" for erro in e.errors()
        )
        raise StageError("config", detalhes) from ConfigError(detalhes)
    _logger.debug("Configuration resolved", extra={"config_file": str(caminho) if caminho else None})
    return cfg
