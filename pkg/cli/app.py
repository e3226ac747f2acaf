from __future__ import annotations

from typing import Optional, Sequence

import typer

try:  # typer >= 0.26 vendors click; catch the exceptions it actually raises
    from typer import _click as click
except ImportError:
    import click

from application.shared.response import EXIT_DATA, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, Response
from cli.commands import evaluation, pipeline, synthetic
from cli.configurations.logging_config import configure_logging, generate_run_id, logger, set_run_id
from core.shared.exceptions import ConfigError, DataError, NonFiniteLossError, ShapeError, StageError

app = typer.Typer(
    name="conluio",
    help="Detecção de clientes colusivos de serviços de seguidores.",
    add_completion=False,
    no_args_is_help=True,
    pretty_exceptions_enable=False,
)
pipeline.register(app)
evaluation.register(app)
synthetic.register(app)


def exit_code_for(exc: BaseException) -> int:
    """0 sucesso, 1 uso, 2 dados ou configuração, 3 numérico; StageError é classificado pela causa."""
    causa = exc.__cause__ if isinstance(exc, StageError) and exc.__cause__ is not None else exc
    if isinstance(causa, NonFiniteLossError):
        return EXIT_NUMERIC
    if isinstance(causa, (ConfigError, DataError, ShapeError, FileNotFoundError)):
        return EXIT_DATA
    return EXIT_USAGE


def run(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    set_run_id(generate_run_id())
    try:
        resultado = app(
            args=list(argv) if argv is not None else None,
            prog_name="conluio",
            standalone_mode=False,
        )
    except click.exceptions.ClickException as e:
        e.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        typer.echo("Abortado.", err=True)
        return EXIT_USAGE
    except StageError as e:
        logger.exception("Stage failed", extra={"stage": e.stage})
        typer.echo(str(e), err=True)
        return exit_code_for(e)
    except (ConfigError, DataError, ShapeError, FileNotFoundError, NonFiniteLossError) as e:
        logger.exception("Unhandled domain error")
        typer.echo(f"cli: {e}", err=True)
        return exit_code_for(e)
    finally:
        set_run_id(None)

    if isinstance(resultado, Response):
        return resultado.code
    if isinstance(resultado, int):
        return resultado
    return EXIT_OK
