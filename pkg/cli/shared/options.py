from typing import Annotated, Optional

import typer

ConfigOpt = Annotated[
    Optional[str],
    typer.Option("--config", help="Arquivo TOML de configuração (padrão: CONLUIO_CONFIG)."),
]
SeedOpt = Annotated[Optional[int], typer.Option("--seed", help="Semente de todas as etapas aleatórias.")]
OutOpt = Annotated[
    Optional[str],
    typer.Option("--out", help="Diretório de artefatos (padrão: CONLUIO_OUT ou ./out)."),
]
NowOpt = Annotated[Optional[str], typer.Option("--now", help="Data de referência ISO (AAAA-MM-DD).")]

UsersOpt = Annotated[Optional[str], typer.Option("--users", help="users.jsonl")]
FollowsOpt = Annotated[Optional[str], typer.Option("--follows", help="follows.jsonl")]
TweetsOpt = Annotated[Optional[str], typer.Option("--tweets", help="tweets.jsonl")]
LabelsOpt = Annotated[Optional[str], typer.Option("--labels", help="labels.jsonl {user_id, label}")]

EpochsOpt = Annotated[Optional[int], typer.Option("--epochs", min=1)]
LrOpt = Annotated[Optional[float], typer.Option("--lr", help="Taxa de aprendizado do Adam.")]
MuOpt = Annotated[Optional[float], typer.Option("--mu", help="Fração de pontos fora da hiperesfera.")]
HiddenOpt = Annotated[Optional[int], typer.Option("--hidden", min=1)]
AttnOpt = Annotated[Optional[int], typer.Option("--attn-dim", min=1)]
HeadsOpt = Annotated[Optional[int], typer.Option("--heads", min=1)]
FoldsOpt = Annotated[Optional[int], typer.Option("--folds", min=2)]


def train_overrides(
    epochs: Optional[int] = None,
    lr: Optional[float] = None,
    mu: Optional[float] = None,
    hidden: Optional[int] = None,
    attn_dim: Optional[int] = None,
    heads: Optional[int] = None,
) -> dict:
    return {
        "epochs": epochs,
        "learning_rate": lr,
        "mu": mu,
        "hidden": hidden,
        "attn_dim": attn_dim,
        "heads": heads,
    }
