from __future__ import annotations

import time
from typing import Callable

import typer

from application.pipeline.irepository import ArtifactRepositoryPort
from application.pipeline.run_config import RunConfig
from application.shared.response import Response
from cli.configurations.logging_config import logger
from infrastructure.data.artifact_context import resolve_out_dir
from infrastructure.repository.artifacts.repository import ArtifactRepository

EFFECTIVE_CONFIG = "effective_config.json"


def executar(stage: str, cfg: RunConfig, acao: Callable[[ArtifactRepositoryPort], Response]) -> Response:
    """Resolve o diretório de saída, ecoa a configuração efetiva e roda a etapa."""
    repositorio = ArtifactRepository(resolve_out_dir(cfg.out_dir))
    repositorio.write_json(EFFECTIVE_CONFIG, cfg.model_dump(mode="json"))

    logger.info("Stage started", extra={"stage": stage, "seed": cfg.seed, "out_dir": str(repositorio.root)})
    inicio = time.perf_counter()
    resposta = acao(repositorio)
    duration_ms = int((time.perf_counter() - inicio) * 1000)
    logger.info("Stage completed", extra={"stage": stage, "duration_ms": duration_ms, "exit_code": resposta.code})

    typer.echo(resposta.to_json())
    return resposta
