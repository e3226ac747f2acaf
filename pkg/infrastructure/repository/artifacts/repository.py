from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Iterable

import numpy as np
import pandas as pd
import scipy.sparse as sp

from application.pipeline.dto import TrainedModel
from application.pipeline.irepository import ArtifactRepositoryPort
from core.dataframe.hetnet_extrator import COLUNAS_TWEET, load_hetnet as carregar_hetnet
from core.dataframe.jsonl_wrapper import JsonlWrapper
from core.entities.hetnet import HetNet
from core.entities.subgraph import Subgraph
from core.enums import ERelationship
from core.graph.topics import TopicModel
from core.model.detector import Hypersphere, TrainConfig
from core.model.hsa import HsaParams
from core.shared.exceptions import DataError
from infrastructure.data import checkpoint as codec

_logger = logging.getLogger("conluio.infrastructure.repository.artifacts")

CHECKPOINT = "checkpoint.json"
HETNET_DIR = "hetnet"


def _linha_json(registro: dict) -> str:
    return json.dumps(registro, sort_keys=True, ensure_ascii=False)


class ArtifactRepository(ArtifactRepositoryPort):
    """Repositório de artefatos em disco (jsonl, json, parquet/csv) sob um diretório de saída."""

    def __init__(self, out_dir: Path | str) -> None:
        self._raiz = Path(out_dir)
        self._raiz.mkdir(parents=True, exist_ok=True)

    @property
    def root(self) -> Path:
        return self._raiz

    def path(self, name: str) -> Path:
        return self._raiz / name

    def exists(self, name: str) -> bool:
        return self.path(name).exists()

    def _exigir(self, name: str) -> Path:
        caminho = self.path(name)
        if not caminho.exists():
            raise FileNotFoundError(f"Artefato ausente: {caminho}")
        return caminho

    # --- Formatos genéricos ------------------------------------------------
    def write_records(self, name: str, records: Iterable[dict]) -> Path:
        caminho = self.path(name)
        quantidade = 0
        with open(caminho, "w", encoding="utf-8", newline="\n") as arquivo:
            for registro in records:
                arquivo.write(_linha_json(registro) + "\n")
                quantidade += 1
        _logger.debug("Records written", extra={"artifact": name, "count": quantidade})
        return caminho

    def read_records(self, name: str) -> list[dict]:
        caminho = self._exigir(name)
        return [objeto for _, objeto in JsonlWrapper(str(caminho)).ler_linhas()]

    def write_json(self, name: str, payload: Any) -> Path:
        caminho = self.path(name)
        caminho.write_text(json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
        return caminho

    def read_json(self, name: str) -> Any:
        caminho = self._exigir(name)
        try:
            return json.loads(caminho.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise DataError(f"{caminho}: JSON malformado ({e.msg}).") from e

    def write_text(self, name: str, text: str) -> Path:
        caminho = self.path(name)
        caminho.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
        return caminho

    def write_frame(self, stem: str, frame: pd.DataFrame, *, csv: bool = True) -> Path:
        caminho = self.path(f"{stem}.parquet")
        frame.to_parquet(caminho, engine="pyarrow", index=False)
        if csv:
            frame.to_csv(self.path(f"{stem}.csv"), index=False, float_format="%.17g", lineterminator="\n")
        _logger.debug("Frame written", extra={"artifact": stem, "rows": len(frame)})
        return caminho

    def read_frame(self, stem: str) -> pd.DataFrame:
        return pd.read_parquet(self._exigir(f"{stem}.parquet"), engine="pyarrow")

    # --- Subgrafos ---------------------------------------------------------
    def save_subgraph(self, subgraph: Subgraph) -> Path:
        return self.write_records(
            f"subgraph_{subgraph.relationship.rotulo}.jsonl",
            ({"i": i, "j": j, "weight": peso} for i, j, peso in subgraph.edges()),
        )

    def load_subgraph(self, relationship: ERelationship, n: int) -> Subgraph:
        nome = f"subgraph_{relationship.rotulo}.jsonl"
        arestas: list[tuple[int, int, float]] = []
        for numero_linha, objeto in JsonlWrapper(str(self._exigir(nome))).ler_linhas():
            try:
                i, j, peso = int(objeto["i"]), int(objeto["j"]), float(objeto["weight"])
            except (KeyError, TypeError, ValueError) as e:
                raise DataError("Aresta malformada.", path=nome, line_number=numero_linha) from e
            if not (0 <= i < n and 0 <= j < n) or peso <= 0:
                raise DataError(f"Aresta fora do intervalo: ({i}, {j}, {peso}).", path=nome, line_number=numero_linha)
            arestas.append((i, j, peso))
        return Subgraph.from_edges(relationship, n, arestas)

    # --- Rede heterogênea --------------------------------------------------
    def save_hetnet(self, g: HetNet) -> Path:
        """Grava usuários, follows, tweets (Posts), Contains e rótulos em `hetnet/`."""
        pasta = self.path(HETNET_DIR)
        pasta.mkdir(parents=True, exist_ok=True)
        rotulados = {int(i) for i in g.labeled}
        self.write_records(
            f"{HETNET_DIR}/users.jsonl",
            (
                registro.model_copy(update={"labeled": i in rotulados}).model_dump(mode="json", exclude_none=True)
                for i, registro in enumerate(g.user_records)
            ),
        )
        origens, destinos = g.follows.nonzero()
        self.write_records(
            f"{HETNET_DIR}/follows.jsonl",
            ({"src": g.user_ids[int(i)], "dst": g.user_ids[int(j)]} for i, j in zip(origens, destinos)),
        )
        self.write_records(
            f"{HETNET_DIR}/tweets.jsonl",
            (_tweet_como_registro(g, linha) for linha in g.tweets.itertuples(index=False)),
        )
        if g.labels:
            self.write_records(
                f"{HETNET_DIR}/labels.jsonl",
                ({"user_id": g.user_ids[i], "label": g.labels[i].value} for i in sorted(g.labels)),
            )
        if g.contains is not None:
            tweets, topicos = g.contains.nonzero()
            self.write_records(
                f"{HETNET_DIR}/contains.jsonl",
                (
                    {"tweet_id": str(g.tweets["tweet_id"].iat[int(t)]), "topic": int(k)}
                    for t, k in zip(tweets, topicos)
                ),
            )
            self.write_json(f"{HETNET_DIR}/topics.json", {"topic_count": g.topic_count})
        _logger.info(
            "Heterogeneous network written",
            extra={"artifact": HETNET_DIR, "user_count": g.user_count, "tweet_count": g.tweet_count},
        )
        return pasta

    def load_hetnet(self) -> HetNet:
        rotulos = f"{HETNET_DIR}/labels.jsonl"
        g = carregar_hetnet(
            str(self._exigir(f"{HETNET_DIR}/users.jsonl")),
            str(self._exigir(f"{HETNET_DIR}/follows.jsonl")),
            str(self._exigir(f"{HETNET_DIR}/tweets.jsonl")),
            str(self.path(rotulos)) if self.exists(rotulos) else None,
        )
        if self.exists(f"{HETNET_DIR}/topics.json"):
            k = int(self.read_json(f"{HETNET_DIR}/topics.json")["topic_count"])
            contains = f"{HETNET_DIR}/contains.jsonl"
            linhas: list[int] = []
            colunas: list[int] = []
            for numero_linha, objeto in JsonlWrapper(str(self._exigir(contains))).ler_linhas():
                try:
                    linhas.append(g.tweet_index(str(objeto["tweet_id"])))
                    colunas.append(int(objeto["topic"]))
                except (KeyError, TypeError, ValueError) as e:
                    raise DataError("Aresta Contains malformada.", path=contains, line_number=numero_linha) from e
            try:
                matriz = sp.csr_matrix(
                    (np.ones(len(linhas), dtype=np.float64), (linhas, colunas)), shape=(g.tweet_count, k)
                )
                g.fixar_topicos(matriz, k)
            except ValueError as e:
                raise DataError(f"Contains inconsistente ({e}).", path=contains) from e
        return g

    # --- Modelo ------------------------------------------------------------
    def save_model(self, model: TrainedModel) -> Path:
        payload = codec.CheckpointPayload(
            seed=model.config.seed,
            heads=len(model.params.heads),
            topics_k=model.topics_k,
            relationships=[r.rotulo for r in model.relationships],
            hyperparameters=model.hiperparametros(),
            mu=model.sphere.mu,
            r2=model.sphere.r2,
            center=codec.encode_tensor(model.sphere.center),
            feature_mean=codec.encode_tensor(model.feature_mean),
            feature_std=codec.encode_tensor(model.feature_std),
            tensors={nome: codec.encode_tensor(t) for nome, t in model.params.tensors()},
        )
        caminho = self.path(CHECKPOINT)
        caminho.write_text(codec.dumps(payload), encoding="utf-8")
        _logger.info("Checkpoint written", extra={"artifact": CHECKPOINT, "tensor_count": len(payload.tensors)})
        return caminho

    def load_model(self) -> TrainedModel:
        caminho = self._exigir(CHECKPOINT)
        payload = codec.loads(caminho.read_text(encoding="utf-8"), origem=str(caminho))
        relacoes = tuple(ERelationship.criar_de_texto(r) for r in payload.relationships)
        params = HsaParams.from_named(
            {nome: codec.decode_tensor(t) for nome, t in payload.tensors.items()},
            heads=payload.heads,
            n_subgraphs=len(relacoes),
        )
        try:
            config = TrainConfig(**payload.hyperparameters)
        except (TypeError, ValueError) as e:
            raise DataError(f"{caminho}: hiperparâmetros inválidos ({e}).") from e
        return TrainedModel(
            params=params,
            sphere=Hypersphere(center=codec.decode_tensor(payload.center), mu=payload.mu, r2=payload.r2),
            config=config,
            relationships=relacoes,
            feature_mean=codec.decode_tensor(payload.feature_mean),
            feature_std=codec.decode_tensor(payload.feature_std),
            topics_k=payload.topics_k,
        )

    # --- Tópicos -----------------------------------------------------------
    def save_topics(self, model: TopicModel) -> Path:
        self.write_records("topic_assignments.jsonl", model.assignments())
        return self.write_json(
            "topic_centroids.json",
            {
                "k": model.k,
                "iterations": model.iterations,
                "objective": model.objective,
                "centroids": codec.encode_tensor(model.centroids).model_dump(),
            },
        )


def read_embeddings(path: Path | str) -> tuple[list[str], np.ndarray]:
    """Reimporta `embeddings.csv` (user_id + colunas z0..zk)."""
    frame = pd.read_csv(path, dtype={"user_id": str})
    if "user_id" not in frame.columns:
        raise DataError(f"{path}: coluna 'user_id' ausente.")
    return frame["user_id"].tolist(), frame.drop(columns=["user_id"]).to_numpy(dtype=np.float64)


def _tweet_como_registro(g: HetNet, linha) -> dict:
    registro = {coluna: getattr(linha, coluna) for coluna in COLUNAS_TWEET}
    registro["user"] = g.user_ids[int(registro["user"])]
    registro["tweet_id"] = str(registro["tweet_id"])
    registro["text"] = str(registro["text"])
    registro["is_retweet"] = bool(registro["is_retweet"])
    for coluna in COLUNAS_TWEET[4:]:
        registro[coluna] = int(registro[coluna])
    return registro
