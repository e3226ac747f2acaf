from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

_logger = logging.getLogger("conluio.infrastructure.artifacts")

DEFAULT_OUT_DIR = "out"


def resolve_out_dir(out_dir: Optional[str] = None) -> Path:
    """Diretório de artefatos: argumento, depois CONLUIO_OUT (env/.env), depois `out`."""
    load_dotenv()
    caminho = Path(out_dir or os.getenv("CONLUIO_OUT") or DEFAULT_OUT_DIR)
    caminho.mkdir(parents=True, exist_ok=True)
    _logger.debug("Artifact directory resolved", extra={"out_dir": str(caminho)})
    return caminho
