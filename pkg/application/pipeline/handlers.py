from __future__ import annotations

import logging
import os
from contextlib import contextmanager
from dataclasses import dataclass, replace
from typing import Iterator, Optional

import numpy as np
import pandas as pd

from application.shared.response import Response
from core.dataframe.hetnet_extrator import load_hetnet
from core.entities.subgraph import Subgraph
from core.enums import ELabel, ERelationship
from core.evaluation.cross_validation import (
    Dataset,
    ablation,
    cross_validate,
    select_learning_rate,
    sensitivity_sweep,
)
from core.evaluation.metrics import COLLUSIVE, NON_COLLUSIVE, codigo_rotulo, report_table
from core.evaluation.synthetic import generate_synthetic
from core.graph.decompose import build_all, subgraph_stats
from core.graph.features import FEATURE_COLUMNS, build_feature_matrix, standardize
from core.graph.topics import HashingEmbedder, attach_topics, load_embeddings, spherical_kmeans
from core.model.detector import score, train
from core.model.hsa import hsa_forward
from core.shared.exceptions import DataError, NonFiniteLossError, ShapeError, StageError
from .dto import TrainedModel
from .irepository import ArtifactRepositoryPort
from .run_config import RunConfig

_logger = logging.getLogger("conluio.application.pipeline")

INPUT_NOT_FOUND = "input not found"


@contextmanager
def _etapa(stage: str) -> Iterator[None]:
    """Converte falhas de domínio em StageError preservando a causa."""
    try:
        yield
    except StageError:
        raise
    except (DataError, ShapeError, NonFiniteLossError, FileNotFoundError, ValueError, KeyError) as exc:
        mensagem = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        raise StageError(stage, str(mensagem)) from exc


def _exigir_arquivo(stage: str, caminho: Optional[str]) -> str:
    if not caminho or not os.path.exists(caminho):
        raise StageError(stage, INPUT_NOT_FOUND) from FileNotFoundError(caminho or "")
    return caminho


@dataclass(slots=True)
class BuildArtifacts:
    user_ids: list[str]
    labels: Optional[np.ndarray]
    subgraphs: dict[ERelationship, Subgraph]
    raw_features: np.ndarray
    topics_k: int = 0

    def train_rows(self) -> np.ndarray:
        """Apenas colusivos treinam; sem rótulos, todos os usuários rotulados."""
        if self.labels is None:
            return np.arange(len(self.user_ids))
        return np.flatnonzero(self.labels == COLLUSIVE)

    def dataset(self) -> Dataset:
        if self.labels is None:
            raise DataError("Avaliação exige rótulos de verdade (labels.jsonl).")
        return Dataset(
            subgraphs=self.subgraphs,
            raw_features=self.raw_features,
            labels=self.labels,
            user_ids=tuple(self.user_ids),
        )


def load_build_artifacts(repository: ArtifactRepositoryPort) -> BuildArtifacts:
    usuarios = repository.read_records("labeled_users.jsonl")
    user_ids = [str(u["user_id"]) for u in sorted(usuarios, key=lambda u: int(u["node"]))]
    n = len(user_ids)

    rotulos: Optional[np.ndarray] = None
    if repository.exists("labels.jsonl"):
        por_usuario = {str(r["user_id"]): ELabel(r["label"]) for r in repository.read_records("labels.jsonl")}
        rotulos = np.array(
            [COLLUSIVE if por_usuario.get(uid) is ELabel.COLLUSIVE else NON_COLLUSIVE for uid in user_ids],
            dtype=np.int64,
        )

    frame = repository.read_frame("features_raw")
    if frame["user_id"].astype(str).tolist() != user_ids:
        raise DataError("features_raw fora de ordem com labeled_users.")
    raw = frame[list(FEATURE_COLUMNS)].to_numpy(dtype=np.float64)
    subgrafos = {r: repository.load_subgraph(r, n) for r in ERelationship}
    topicos = int(repository.read_json("topic_centroids.json")["k"]) if repository.exists("topic_centroids.json") else 0
    return BuildArtifacts(
        user_ids=user_ids, labels=rotulos, subgraphs=subgrafos, raw_features=raw, topics_k=topicos
    )


@dataclass(slots=True)
class BuildService:
    """hetnet -> tópicos -> Δ1..Δ4 -> estatísticas -> atributos brutos."""

    repository: ArtifactRepositoryPort

    def build(self, cfg: RunConfig) -> Response:
        if cfg.now is None:
            raise StageError("features", "data de referência 'now' é obrigatória") from ValueError("now")
        users_path = _exigir_arquivo("hetnet", cfg.users_path)
        follows_path = _exigir_arquivo("hetnet", cfg.follows_path)
        tweets_path = _exigir_arquivo("topics", cfg.tweets_path)
        labels_path = _exigir_arquivo("hetnet", cfg.labels_path) if cfg.labels_path else None

        _logger.info("Build started", extra={"out_dir": cfg.out_dir, "seed": cfg.seed})
        with _etapa("hetnet"):
            g = load_hetnet(users_path, follows_path, tweets_path, labels_path)

        hist = None
        with _etapa("topics"):
            emb = load_embeddings(tweets_path, g)
            if emb.rows == 0:
                _logger.info("No precomputed embeddings, using hashing embedder", extra={"dim": cfg.embedding_dim})
                emb = HashingEmbedder(cfg.embedding_dim).embed_tweets(g)
            if emb.rows:
                modelo = spherical_kmeans(emb, cfg.topics_k, cfg.seed, cfg.kmeans_max_iter, cfg.kmeans_tol)
                hist = attach_topics(g, modelo)
                self.repository.save_topics(modelo)
            else:
                _logger.warning("No tweet could be embedded, Delta4 stays empty")

        with _etapa("hetnet"):
            self.repository.save_hetnet(g)

        with _etapa("decompose"):
            subgrafos = build_all(g, hist)
            estatisticas = [subgraph_stats(s).to_dict() for s in subgrafos.values()]
            for sub in subgrafos.values():
                self.repository.save_subgraph(sub)
            self.repository.write_records("subgraph_stats.jsonl", estatisticas)
            self.repository.write_text(
                "subgraph_stats.txt", pd.DataFrame(estatisticas).set_index("relationship").to_string()
            )

        with _etapa("features"):
            matriz = build_feature_matrix(g, cfg.now)
            self.repository.write_frame("features_raw", matriz.to_frame())

        self.repository.write_records(
            "labeled_users.jsonl",
            ({"node": posicao, "user_id": uid} for posicao, uid in enumerate(g.labeled_user_ids())),
        )
        if g.labels:
            self.repository.write_records(
                "labels.jsonl",
                ({"user_id": g.user_ids[int(i)], "label": g.labels[int(i)].value} for i in g.labeled if int(i) in g.labels),
            )

        resumo = {
            "users": g.user_count,
            "tweets": g.tweet_count,
            "labeled": int(g.labeled.size),
            "topics": g.topic_count,
            **{s["relationship"]: s["edge_count"] for s in estatisticas},
        }
        _logger.info("Build finished", extra=resumo)
        return Response.sucesso("build", data=resumo, message="Artefatos de construção gravados.")


@dataclass(slots=True)
class TrainService:
    repository: ArtifactRepositoryPort

    def train(self, cfg: RunConfig) -> Response:
        with _etapa("train"):
            artefatos = load_build_artifacts(self.repository)
            linhas_treino = artefatos.train_rows()
            linhas_val = None
            if cfg.train.validation_fraction > 0 and linhas_treino.size > 1:
                embaralhadas = np.random.default_rng(cfg.seed).permutation(linhas_treino)
                n_val = min(max(1, int(round(cfg.train.validation_fraction * embaralhadas.size))), embaralhadas.size - 1)
                linhas_val, linhas_treino = np.sort(embaralhadas[:n_val]), np.sort(embaralhadas[n_val:])

            X, media, desvio = standardize(artefatos.raw_features, linhas_treino)
            configuracao = cfg.train_config()
            relacoes = tuple(ERelationship)
            resultado = train(
                [artefatos.subgraphs[r] for r in relacoes], X, configuracao, linhas_treino, linhas_val
            )
            modelo = TrainedModel(
                params=resultado.params,
                sphere=resultado.sphere,
                config=configuracao,
                relationships=relacoes,
                feature_mean=media,
                feature_std=desvio,
                topics_k=artefatos.topics_k,
            )
            self.repository.save_model(modelo)
            self.repository.write_records("training_log.jsonl", resultado.log)

        resumo = {
            "train_rows": int(linhas_treino.size),
            "epochs": configuracao.epochs,
            "final_loss": resultado.log[-1]["loss"],
            "r2": resultado.sphere.r2,
        }
        return Response.sucesso("train", data=resumo, message="Checkpoint gravado.")


@dataclass(slots=True)
class DetectService:
    repository: ArtifactRepositoryPort

    def detect(self, cfg: RunConfig) -> Response:
        with _etapa("detect"):
            modelo = self.repository.load_model()
            artefatos = load_build_artifacts(self.repository)
            X = modelo.padronizar(artefatos.raw_features)
            subgrafos = [artefatos.subgraphs[r] for r in modelo.relationships]
            pontuacoes = score(subgrafos, X, modelo.params, modelo.sphere)

            indice = {uid: i for i, uid in enumerate(artefatos.user_ids)}
            pedidos = cfg.detect.users if cfg.detect.users is not None else artefatos.user_ids
            desconhecidos = [uid for uid in pedidos if uid not in indice]
            if desconhecidos:
                if cfg.detect.strict:
                    raise DataError(f"Usuários desconhecidos: {', '.join(desconhecidos)}.")
                _logger.warning("Unknown users skipped", extra={"unknown": desconhecidos})

            registros = []
            for uid in pedidos:
                if uid not in indice:
                    continue
                i = indice[uid]
                colusivo = bool(pontuacoes.collusive[i])
                registros.append(
                    {
                        "user_id": uid,
                        "distance2": float(pontuacoes.distance2[i]),
                        "r2": pontuacoes.r2,
                        "label": (ELabel.COLLUSIVE if colusivo else ELabel.NON_COLLUSIVE).value,
                    }
                )
            self.repository.write_records("scores.jsonl", registros)

        colusivos = sum(1 for r in registros if r["label"] == ELabel.COLLUSIVE.value)
        resumo = {"scored": len(registros), "collusive": colusivos, "skipped": len(desconhecidos)}
        _logger.info("Detection finished", extra=resumo)
        return Response.sucesso("detect", data=resumo, message="Pontuações gravadas.")


@dataclass(slots=True)
class EvalService:
    repository: ArtifactRepositoryPort

    def _configuracao(self, cfg: RunConfig, dataset: Dataset):
        configuracao = cfg.train_config()
        if cfg.eval.select_learning_rate:
            lr, registros = select_learning_rate(dataset, configuracao, cfg.eval.lr_grid)
            self.repository.write_records("lr_selection.jsonl", registros)
            configuracao = replace(configuracao, learning_rate=lr)
        return configuracao

    def _gravar(self, relatorios) -> dict:
        registros = [registro for relatorio in relatorios for registro in relatorio.to_records()]
        self.repository.write_records("eval_records.jsonl", registros)
        self.repository.write_text("eval_report.txt", report_table(relatorios))
        return {relatorio.variant: relatorio.resumo() for relatorio in relatorios}

    def evaluate(self, cfg: RunConfig) -> Response:
        with _etapa("eval"):
            dataset = load_build_artifacts(self.repository).dataset()
            configuracao = self._configuracao(cfg, dataset)
            relatorio = cross_validate(
                dataset, configuracao, cfg.eval.folds, positive=codigo_rotulo(cfg.eval.positive_class)
            )
            resumo = self._gravar([relatorio])
        return Response.sucesso("eval", data=resumo, message="Relatório de avaliação gravado.")

    def ablate(self, cfg: RunConfig) -> Response:
        with _etapa("ablate"):
            dataset = load_build_artifacts(self.repository).dataset()
            configuracao = self._configuracao(cfg, dataset)
            relatorios = ablation(
                dataset, configuracao, cfg.eval.folds, positive=codigo_rotulo(cfg.eval.positive_class)
            )
            resumo = self._gravar(list(relatorios.values()))
        return Response.sucesso("ablate", data=resumo, message="Relatório de ablação gravado.")

    def sweep(self, cfg: RunConfig) -> Response:
        with _etapa("sweep"):
            dataset = load_build_artifacts(self.repository).dataset()
            registros = sensitivity_sweep(
                dataset, cfg.train_config(), cfg.sweep.grades(), cfg.sweep.folds or cfg.eval.folds
            )
            self.repository.write_records("sweep_records.jsonl", registros)
        return Response.sucesso("sweep", data={"runs": len(registros)}, message="Varredura gravada.")


@dataclass(slots=True)
class SynthService:
    repository: ArtifactRepositoryPort

    def synth(self, cfg: RunConfig) -> Response:
        with _etapa("synth"):
            dataset = generate_synthetic(cfg.synth_config())
            self.repository.write_records("users.jsonl", (u.model_dump(mode="json", exclude_none=True) for u in dataset.users))
            self.repository.write_records("follows.jsonl", (f.model_dump(mode="json") for f in dataset.follows))
            self.repository.write_records("tweets.jsonl", (t.model_dump(mode="json") for t in dataset.tweets))
            self.repository.write_records("labels.jsonl", (r.model_dump(mode="json") for r in dataset.labels))
        resumo = {
            "users": len(dataset.users),
            "follows": len(dataset.follows),
            "tweets": len(dataset.tweets),
            "labeled": len(dataset.labels),
        }
        return Response.sucesso("synth", data=resumo, message="Conjunto sintético gravado.")


@dataclass(slots=True)
class ExportEmbeddingsService:
    repository: ArtifactRepositoryPort

    def export(self, cfg: RunConfig) -> Response:
        with _etapa("export-embeddings"):
            modelo = self.repository.load_model()
            artefatos = load_build_artifacts(self.repository)
            X = modelo.padronizar(artefatos.raw_features)
            Z, _ = hsa_forward([artefatos.subgraphs[r] for r in modelo.relationships], X, modelo.params)
            frame = pd.DataFrame(Z, columns=[f"z{j}" for j in range(Z.shape[1])])
            frame.insert(0, "user_id", artefatos.user_ids)
            self.repository.write_frame("embeddings", frame)
        return Response.sucesso(
            "export-embeddings", data={"rows": int(Z.shape[0]), "dim": int(Z.shape[1])}, message="Embeddings exportadas."
        )
