"""Decomposição da rede heterogênea nos subgrafos usuário-usuário Δ1..Δ4.

Todas as relações são avaliadas como produtos esparsos restritos aos usuários
rotulados (matriz de seleção S). Intermediários percorrem todos os usuários.
"""
from __future__ import annotations

import logging
from typing import Optional

import numpy as np
import scipy.sparse as sp

from core.entities.hetnet import HetNet
from core.entities.subgraph import Subgraph, SubgraphStats
from core.entities.topic_histogram import TopicHistogram
from core.enums import ERelationship
from core.shared.exceptions import ShapeError

_logger = logging.getLogger("conluio.core.decompose")


def _selecao(g: HetNet) -> sp.csr_matrix:
    n = int(g.labeled.size)
    return sp.csr_matrix(
        (np.ones(n, dtype=np.float64), (np.arange(n), g.labeled)), shape=(n, g.user_count)
    )


def _sem_diagonal(matriz: sp.spmatrix) -> sp.csr_matrix:
    matriz = sp.csr_matrix(matriz, dtype=np.float64)
    matriz = (matriz - sp.diags(matriz.diagonal())).tocsr()
    matriz.eliminate_zeros()
    return matriz


def build_delta1(g: HetNet) -> Subgraph:
    """Seguido em comum (u1 -> x <- u2): peso = número de x compartilhados."""
    seguidos = _selecao(g) @ g.follows
    comum = seguidos @ seguidos.T
    sub = Subgraph(ERelationship.DELTA1, _sem_diagonal(comum))
    _logger.debug("Delta1 built", extra={"edge_count": sub.edge_count})
    return sub


def build_delta2(g: HetNet) -> Subgraph:
    """Usuário de transição (u2 -> x -> u1), simetrizado pelo máximo das duas direções."""
    selecao = _selecao(g)
    # dirigido[b, a] = #{x : b -> x e x -> a}
    dirigido = _sem_diagonal((selecao @ g.follows) @ (g.follows @ selecao.T))
    sub = Subgraph(ERelationship.DELTA2, dirigido.maximum(dirigido.T))
    _logger.debug("Delta2 built", extra={"edge_count": sub.edge_count})
    return sub


def build_delta3(g: HetNet) -> Subgraph:
    """Conexão direta entre rotulados; peso 1 em qualquer direção."""
    selecao = _selecao(g)
    direto = _sem_diagonal(selecao @ g.follows @ selecao.T)
    direto.data[:] = 1.0
    sub = Subgraph(ERelationship.DELTA3, direto.maximum(direto.T))
    _logger.debug("Delta3 built", extra={"edge_count": sub.edge_count})
    return sub


def build_delta4(g: HetNet, hist: TopicHistogram) -> Subgraph:
    """Tópico em comum: peso = Σ_k min(o_k^i, o_k^j).

    Usa a identidade min(a, b) = Σ_{t>=1} [a >= t][b >= t] sobre camadas de limiar.
    """
    if hist.user_count != g.user_count:
        raise ShapeError(
            f"Histograma com {hist.user_count} usuários; a rede tem {g.user_count}."
        )
    if g.topic_count and hist.topic_count != g.topic_count:
        raise ShapeError(
            f"Histograma com {hist.topic_count} tópicos; a rede tem {g.topic_count}."
        )
    contagens = (_selecao(g) @ hist.counts).tocsr()
    n = contagens.shape[0]
    acumulado = sp.csr_matrix((n, n), dtype=np.float64)
    maximo = int(contagens.data.max()) if contagens.nnz else 0
    for limiar in range(1, maximo + 1):
        camada = (contagens >= limiar).astype(np.float64)
        acumulado = acumulado + camada @ camada.T
    sub = Subgraph(ERelationship.DELTA4, _sem_diagonal(acumulado))
    _logger.debug("Delta4 built", extra={"edge_count": sub.edge_count, "layers": maximo})
    return sub


def build_all(g: HetNet, hist: Optional[TopicHistogram]) -> dict[ERelationship, Subgraph]:
    """Os quatro subgrafos na ordem Δ1..Δ4 (Δ4 vazio quando não há histograma)."""
    if hist is None:
        n = int(g.labeled.size)
        delta4 = Subgraph(ERelationship.DELTA4, sp.csr_matrix((n, n), dtype=np.float64))
    else:
        delta4 = build_delta4(g, hist)
    subgrafos = {
        ERelationship.DELTA1: build_delta1(g),
        ERelationship.DELTA2: build_delta2(g),
        ERelationship.DELTA3: build_delta3(g),
        ERelationship.DELTA4: delta4,
    }
    _logger.info(
        "Network decomposed",
        extra={"labeled_count": int(g.labeled.size), **{r.rotulo: s.edge_count for r, s in subgrafos.items()}},
    )
    return subgrafos


def subgraph_stats(s: Subgraph) -> SubgraphStats:
    superior = sp.triu(s.adjacency, k=1)
    edge_count = int(superior.nnz)
    pares = s.n * (s.n - 1) / 2
    return SubgraphStats(
        relationship=s.relationship,
        n=s.n,
        edge_count=edge_count,
        weight_sum=float(superior.sum()) if edge_count else 0.0,
        max_weight=float(superior.max()) if edge_count else 0.0,
        density=edge_count / pares if pares > 0 else 0.0,
    )
