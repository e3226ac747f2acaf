from typing import Annotated, Optional

import typer

from application.pipeline.handlers import BuildService, DetectService, ExportEmbeddingsService, TrainService
from application.shared.response import Response
from cli.configurations.settings import load_run_config
from cli.shared.options import (
    AttnOpt,
    ConfigOpt,
    EpochsOpt,
    FollowsOpt,
    HeadsOpt,
    HiddenOpt,
    LabelsOpt,
    LrOpt,
    MuOpt,
    NowOpt,
    OutOpt,
    SeedOpt,
    TweetsOpt,
    UsersOpt,
    train_overrides,
)
from cli.shared.runner import executar


def register(app: typer.Typer) -> None:
    @app.command("build", help="Rede heterogênea, tópicos, subgrafos Δ1..Δ4 e atributos brutos.")
    def build(
        users: UsersOpt = None,
        follows: FollowsOpt = None,
        tweets: TweetsOpt = None,
        labels: LabelsOpt = None,
        topics_k: Annotated[Optional[int], typer.Option("--topics-k", min=1)] = None,
        embedding_dim: Annotated[Optional[int], typer.Option("--embedding-dim", min=1)] = None,
        config: ConfigOpt = None,
        seed: SeedOpt = None,
        out: OutOpt = None,
        now: NowOpt = None,
    ) -> Response:
        cfg = load_run_config(
            config,
            {
                "users_path": users,
                "follows_path": follows,
                "tweets_path": tweets,
                "labels_path": labels,
                "topics_k": topics_k,
                "embedding_dim": embedding_dim,
                "seed": seed,
                "out_dir": out,
                "now": now,
            },
        )
        return executar("build", cfg, lambda repo: BuildService(repo).build(cfg))

    @app.command("train", help="Treina HSA + hiperesfera sobre os artefatos do build.")
    def train(
        epochs: EpochsOpt = None,
        lr: LrOpt = None,
        mu: MuOpt = None,
        hidden: HiddenOpt = None,
        attn_dim: AttnOpt = None,
        heads: HeadsOpt = None,
        validation_fraction: Annotated[Optional[float], typer.Option("--validation-fraction")] = None,
        config: ConfigOpt = None,
        seed: SeedOpt = None,
        out: OutOpt = None,
    ) -> Response:
        treino = train_overrides(epochs, lr, mu, hidden, attn_dim, heads)
        treino["validation_fraction"] = validation_fraction
        cfg = load_run_config(config, {"seed": seed, "out_dir": out, "train": treino})
        return executar("train", cfg, lambda repo: TrainService(repo).train(cfg))

    @app.command("detect", help="Pontua usuários: colusivo sse ||z - c||² <= r².")
    def detect(
        user: Annotated[Optional[list[str]], typer.Option("--user", help="Usuário a pontuar (repetível).")] = None,
        strict: Annotated[Optional[bool], typer.Option("--strict/--no-strict")] = None,
        config: ConfigOpt = None,
        seed: SeedOpt = None,
        out: OutOpt = None,
    ) -> Response:
        cfg = load_run_config(
            config,
            {"seed": seed, "out_dir": out, "detect": {"users": user or None, "strict": strict}},
        )
        return executar("detect", cfg, lambda repo: DetectService(repo).detect(cfg))

    @app.command("export-embeddings", help="Grava embeddings.csv (user_id + z0..zk).")
    def export_embeddings(
        config: ConfigOpt = None,
        seed: SeedOpt = None,
        out: OutOpt = None,
    ) -> Response:
        cfg = load_run_config(config, {"seed": seed, "out_dir": out})
        return executar("export-embeddings", cfg, lambda repo: ExportEmbeddingsService(repo).export(cfg))
