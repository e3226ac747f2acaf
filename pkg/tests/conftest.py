import json
from pathlib import Path
from typing import Iterable

import pytest

# Rede mínima: a, b, c, d rotulados; x, y intermediários.
#   follows: a->x, b->x, x->c, c->a, a->b, d->y, b->y
#   tópicos (embeddings 2-d): a [2, 1], b [1, 0], c [0, 3], d [1, 1], x [1, 0]
USUARIOS = ("a", "b", "c", "d", "x", "y")
SEGUE = (("a", "x"), ("b", "x"), ("x", "c"), ("c", "a"), ("a", "b"), ("d", "y"), ("b", "y"))
ROTULOS = {"a": "collusive", "b": "collusive", "c": "collusive", "d": "non_collusive"}
REFERENCIA = "2020-01-01"

_E0 = [1.0, 0.0]
_E1 = [0.0, 1.0]


def usuario(uid: str, **campos) -> dict:
    registro = {
        "id": uid,
        "followers_count": 10,
        "friends_count": 20,
        "statuses_count": 30,
        "favourites_count": 40,
        "description": "",
        "url_in_description": False,
        "location_present": False,
        "profile_image": True,
        "background_image": False,
        "created_at": "2019-01-01",
        "tweet_year_counts": {"2019": 1},
    }
    registro.update(campos)
    return registro


def tweet(user: str, tweet_id: str, embedding=None, **campos) -> dict:
    registro = {
        "user": user,
        "tweet_id": tweet_id,
        "text": f"texto de {user}",
        "is_retweet": False,
        "n_emojis": 0,
        "n_urls": 0,
        "n_mentions": 0,
        "n_words": 5,
        "n_hashtags": 0,
    }
    if embedding is not None:
        registro["embedding"] = embedding
    registro.update(campos)
    return registro


def escrever_jsonl(caminho: Path, registros: Iterable[dict]) -> str:
    with open(caminho, "w", encoding="utf-8") as arquivo:
        for registro in registros:
            arquivo.write(json.dumps(registro) + "\n")
    return str(caminho)


def _usuarios_minimos() -> list[dict]:
    return [
        usuario(
            "a",
            description="oi",
            created_at="2019-12-22",
            tweet_year_counts={"2018": 2, "2019": 3},
            url_in_description=True,
        ),
        usuario("b"),
        usuario("c", followers_count=0),
        usuario("d", location_present=True),
        usuario("x"),
        usuario("y"),
    ]


def _tweets_minimos() -> list[dict]:
    return [
        tweet("a", "t1", _E0, is_retweet=True, n_emojis=1, n_urls=0, n_mentions=1, n_words=10, n_hashtags=0),
        tweet("a", "t2", _E0, n_emojis=2, n_urls=0, n_mentions=1, n_words=20, n_hashtags=1),
        tweet("a", "t3", _E1, n_emojis=3, n_urls=3, n_mentions=1, n_words=30, n_hashtags=2),
        tweet("b", "t4", _E0),
        tweet("c", "t5", _E1),
        tweet("c", "t6", _E1),
        tweet("c", "t7", _E1),
        tweet("d", "t8", _E0),
        tweet("d", "t9", _E1),
        tweet("x", "t10", _E0),
    ]


@pytest.fixture
def dataset_minimo(tmp_path: Path) -> dict[str, str]:
    """Arquivos jsonl da rede mínima (caminhos por nome)."""
    return {
        "users": escrever_jsonl(tmp_path / "users.jsonl", _usuarios_minimos()),
        "follows": escrever_jsonl(tmp_path / "follows.jsonl", ({"src": s, "dst": d} for s, d in SEGUE)),
        "tweets": escrever_jsonl(tmp_path / "tweets.jsonl", _tweets_minimos()),
        "labels": escrever_jsonl(
            tmp_path / "labels.jsonl", ({"user_id": u, "label": r} for u, r in ROTULOS.items())
        ),
    }


@pytest.fixture
def rede_minima(dataset_minimo):
    from core.dataframe.hetnet_extrator import load_hetnet

    return load_hetnet(
        dataset_minimo["users"],
        dataset_minimo["follows"],
        dataset_minimo["tweets"],
        dataset_minimo["labels"],
    )
