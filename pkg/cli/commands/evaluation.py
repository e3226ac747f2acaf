from typing import Annotated, Optional

import typer

from application.pipeline.handlers import EvalService
from application.shared.response import Response
from cli.configurations.settings import load_run_config
from cli.shared.options import (
    AttnOpt,
    ConfigOpt,
    EpochsOpt,
    FoldsOpt,
    HeadsOpt,
    HiddenOpt,
    LrOpt,
    MuOpt,
    OutOpt,
    SeedOpt,
    train_overrides,
)
from cli.shared.runner import executar
from core.enums import ELabel

PositiveOpt = Annotated[
    Optional[ELabel],
    typer.Option("--positive", help="Classe positiva do F1 (padrão: non_collusive)."),
]
SelectLrOpt = Annotated[
    Optional[bool],
    typer.Option("--select-lr/--no-select-lr", help="Escolhe a taxa de aprendizado na grade antes de avaliar."),
]


def _overrides(seed, out, folds, positive, select_lr, treino: dict) -> dict:
    return {
        "seed": seed,
        "out_dir": out,
        "train": treino,
        "eval": {
            "folds": folds,
            "positive_class": positive.value if positive is not None else None,
            "select_learning_rate": select_lr,
        },
    }


def register(app: typer.Typer) -> None:
    @app.command("eval", help="Validação cruzada em dobras sobre os usuários colusivos.")
    def evaluate(
        folds: FoldsOpt = None,
        positive: PositiveOpt = None,
        select_lr: SelectLrOpt = None,
        epochs: EpochsOpt = None,
        lr: LrOpt = None,
        mu: MuOpt = None,
        hidden: HiddenOpt = None,
        attn_dim: AttnOpt = None,
        heads: HeadsOpt = None,
        config: ConfigOpt = None,
        seed: SeedOpt = None,
        out: OutOpt = None,
    ) -> Response:
        treino = train_overrides(epochs, lr, mu, hidden, attn_dim, heads)
        cfg = load_run_config(config, _overrides(seed, out, folds, positive, select_lr, treino))
        return executar("eval", cfg, lambda repo: EvalService(repo).evaluate(cfg))

    @app.command("ablate", help="Avalia cada subgrafo isolado e o modelo completo.")
    def ablate(
        folds: FoldsOpt = None,
        positive: PositiveOpt = None,
        select_lr: SelectLrOpt = None,
        epochs: EpochsOpt = None,
        lr: LrOpt = None,
        config: ConfigOpt = None,
        seed: SeedOpt = None,
        out: OutOpt = None,
    ) -> Response:
        cfg = load_run_config(
            config, _overrides(seed, out, folds, positive, select_lr, train_overrides(epochs, lr))
        )
        return executar("ablate", cfg, lambda repo: EvalService(repo).ablate(cfg))

    @app.command("sweep", help="Sensibilidade a H, dimensão de atenção e número de cabeças.")
    def sweep(
        folds: FoldsOpt = None,
        epochs: EpochsOpt = None,
        lr: LrOpt = None,
        config: ConfigOpt = None,
        seed: SeedOpt = None,
        out: OutOpt = None,
    ) -> Response:
        cfg = load_run_config(
            config,
            {"seed": seed, "out_dir": out, "sweep": {"folds": folds}, "train": train_overrides(epochs, lr)},
        )
        return executar("sweep", cfg, lambda repo: EvalService(repo).sweep(cfg))
