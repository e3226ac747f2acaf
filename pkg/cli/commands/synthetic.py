from typing import Annotated, Optional

import typer

from application.pipeline.handlers import SynthService
from application.shared.response import Response
from cli.configurations.settings import load_run_config
from cli.shared.options import ConfigOpt, OutOpt, SeedOpt
from cli.shared.runner import executar


def register(app: typer.Typer) -> None:
    @app.command("synth", help="Gera users/follows/tweets/labels com um serviço de créditos plantado.")
    def synth(
        n_collusive: Annotated[Optional[int], typer.Option("--n-collusive", min=0)] = None,
        n_organic: Annotated[Optional[int], typer.Option("--n-organic", min=0)] = None,
        n_intermediaries: Annotated[Optional[int], typer.Option("--n-intermediaries", min=0)] = None,
        topics: Annotated[Optional[int], typer.Option("--topics", min=1)] = None,
        tweets_per_user: Annotated[Optional[int], typer.Option("--tweets-per-user", min=0)] = None,
        config: ConfigOpt = None,
        seed: SeedOpt = None,
        out: OutOpt = None,
    ) -> Response:
        cfg = load_run_config(
            config,
            {
                "seed": seed,
                "out_dir": out,
                "synth": {
                    "n_collusive": n_collusive,
                    "n_organic": n_organic,
                    "n_intermediaries": n_intermediaries,
                    "K_topics": topics,
                    "tweets_per_user": tweets_per_user,
                },
            },
        )
        return executar("synth", cfg, lambda repo: SynthService(repo).synth(cfg))
