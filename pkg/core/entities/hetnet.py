from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
import pandas as pd
import scipy.sparse as sp

from core.entities.records import UserRecord
from core.enums import EEdgeKind, ELabel, ENodeKind
from core.value_object import NodeId


@dataclass(slots=True, eq=False)
class HetNet:
    """Rede heterogênea dirigida usuário-tweet-tópico.

    Cada tipo de aresta é guardado como uma matriz CSR (origem x destino); a transposta
    em CSR atende à iteração por vizinhos de entrada. Após `load_hetnet` e `attach_topics`
    a estrutura é tratada como imutável.
    """

    user_ids: list[str]
    user_records: list[UserRecord]
    tweets: pd.DataFrame
    follows: sp.csr_matrix
    posts: sp.csr_matrix
    labeled: np.ndarray
    labels: Mapping[int, ELabel] = field(default_factory=dict)
    contains: Optional[sp.csr_matrix] = None
    topic_count: int = 0
    _user_index: dict[str, int] = field(default_factory=dict, repr=False)
    _tweet_index: dict[str, int] = field(default_factory=dict, repr=False)
    _transpostas: dict[EEdgeKind, sp.csr_matrix] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not self._user_index:
            self._user_index = {uid: i for i, uid in enumerate(self.user_ids)}
        if not self._tweet_index and len(self.tweets):
            self._tweet_index = {tid: i for i, tid in enumerate(self.tweets["tweet_id"].tolist())}
        self.labeled = np.asarray(self.labeled, dtype=np.int64)

    # Contagens
    @property
    def user_count(self) -> int:
        return len(self.user_ids)

    @property
    def tweet_count(self) -> int:
        return int(len(self.tweets))

    @property
    def labeled_users(self) -> frozenset[NodeId]:
        return frozenset(NodeId.usuario(int(i)) for i in self.labeled)

    def contagem(self, kind: ENodeKind) -> int:
        if kind is ENodeKind.USER:
            return self.user_count
        if kind is ENodeKind.TWEET:
            return self.tweet_count
        return self.topic_count

    def edge_count(self, kind: EEdgeKind) -> int:
        matriz = self.adjacencia(kind)
        return 0 if matriz is None else int(matriz.nnz)

    # Índices
    def user_index(self, user_id: str) -> int:
        try:
            return self._user_index[user_id]
        except KeyError:
            raise KeyError(f"Usuário desconhecido: '{user_id}'.") from None

    def tweet_index(self, tweet_id: str) -> int:
        try:
            return self._tweet_index[tweet_id]
        except KeyError:
            raise KeyError(f"Tweet desconhecido: '{tweet_id}'.") from None

    def labeled_user_ids(self) -> list[str]:
        return [self.user_ids[int(i)] for i in self.labeled]

    # Adjacências
    def adjacencia(self, kind: EEdgeKind) -> Optional[sp.csr_matrix]:
        if kind is EEdgeKind.FOLLOWS:
            return self.follows
        if kind is EEdgeKind.POSTS:
            return self.posts
        return self.contains

    def _adjacencia_transposta(self, kind: EEdgeKind) -> Optional[sp.csr_matrix]:
        matriz = self.adjacencia(kind)
        if matriz is None:
            return None
        if kind not in self._transpostas:
            self._transpostas[kind] = matriz.T.tocsr()
        return self._transpostas[kind]

    def _validar_no(self, v: NodeId, esperado: ENodeKind) -> None:
        if v.kind is not esperado:
            raise ValueError(
                f"Nó {v} incompatível com a aresta (esperado tipo {esperado.name.lower()})."
            )
        if v.index >= self.contagem(v.kind):
            raise KeyError(f"Nó inexistente: {v}.")

    def out_neighbors(self, v: NodeId, kind: EEdgeKind) -> list[NodeId]:
        self._validar_no(v, kind.origem)
        matriz = self.adjacencia(kind)
        if matriz is None:
            return []
        return _vizinhos(matriz, v.index, kind.destino)

    def in_neighbors(self, v: NodeId, kind: EEdgeKind) -> list[NodeId]:
        self._validar_no(v, kind.destino)
        matriz = self._adjacencia_transposta(kind)
        if matriz is None:
            return []
        return _vizinhos(matriz, v.index, kind.origem)

    # Tópicos
    def fixar_topicos(self, contains: sp.csr_matrix, topic_count: int) -> None:
        """Registra as arestas Contains (tweet -> tópico). Só pode ser chamado uma vez."""
        if self.contains is not None:
            raise ValueError("Tópicos já anexados a esta rede.")
        if contains.shape != (self.tweet_count, topic_count):
            raise ValueError(
                f"Matriz Contains com formato {contains.shape}; esperado {(self.tweet_count, topic_count)}."
            )
        por_tweet = np.diff(contains.indptr)
        if np.any(por_tweet > 1):
            raise ValueError("Cada tweet pode conter no máximo um tópico.")
        self.contains = contains.tocsr()
        self.topic_count = int(topic_count)
        self._transpostas.pop(EEdgeKind.CONTAINS, None)


def _vizinhos(matriz: sp.csr_matrix, linha: int, kind: ENodeKind) -> list[NodeId]:
    inicio, fim = matriz.indptr[linha], matriz.indptr[linha + 1]
    destinos = np.sort(matriz.indices[inicio:fim])
    return [NodeId(kind, int(j)) for j in destinos]


def out_neighbors(g: HetNet, v: NodeId, kind: EEdgeKind) -> Sequence[NodeId]:
    return g.out_neighbors(v, kind)


def in_neighbors(g: HetNet, v: NodeId, kind: EEdgeKind) -> Sequence[NodeId]:
    return g.in_neighbors(v, kind)
