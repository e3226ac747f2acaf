import itertools

import numpy as np
import pandas as pd
import pytest
import scipy.sparse as sp

from core.dataframe.hetnet_extrator import COLUNAS_TWEET
from core.entities.hetnet import HetNet
from core.entities.subgraph import Subgraph
from core.entities.topic_histogram import TopicHistogram
from core.enums import ERelationship
from core.graph.decompose import (
    build_all,
    build_delta1,
    build_delta2,
    build_delta3,
    build_delta4,
    subgraph_stats,
)
from core.shared.exceptions import ShapeError


def _rede(follows: np.ndarray, labeled: np.ndarray) -> HetNet:
    n = follows.shape[0]
    return HetNet(
        user_ids=[f"u{i}" for i in range(n)],
        user_records=[],
        tweets=pd.DataFrame(columns=list(COLUNAS_TWEET)),
        follows=sp.csr_matrix(follows.astype(np.float64)),
        posts=sp.csr_matrix((n, 0)),
        labeled=labeled,
    )


def _arestas(sub: Subgraph) -> dict[tuple[int, int], float]:
    return {(i, j): w for i, j, w in sub.edges()}


def _oraculo(F: np.ndarray, hist: np.ndarray, labeled: np.ndarray) -> dict[ERelationship, dict]:
    """Enumeração ingênua de caminhos entre pares de rotulados."""
    esperado = {r: {} for r in ERelationship}
    usuarios = range(F.shape[0])
    for p, q in itertools.combinations(range(labeled.size), 2):
        u, v = int(labeled[p]), int(labeled[q])
        comum = sum(1 for z in usuarios if F[u, z] and F[v, z])
        ida = sum(1 for x in usuarios if F[u, x] and F[x, v])
        volta = sum(1 for x in usuarios if F[v, x] and F[x, u])
        direto = 1 if (F[u, v] or F[v, u]) else 0
        topico = int(np.minimum(hist[u], hist[v]).sum())
        for relacao, peso in (
            (ERelationship.DELTA1, comum),
            (ERelationship.DELTA2, max(ida, volta)),
            (ERelationship.DELTA3, direto),
            (ERelationship.DELTA4, topico),
        ):
            if peso:
                esperado[relacao][(p, q)] = float(peso)
    return esperado


@pytest.mark.parametrize("semente", range(100))
def test_subgrafos_iguais_ao_oraculo_de_caminhos(semente):
    rng = np.random.default_rng(semente)
    n_rotulados = int(rng.integers(2, 51))
    n_intermediarios = int(rng.integers(0, 21))
    n = n_rotulados + n_intermediarios
    F = rng.random((n, n)) < rng.uniform(0.02, 0.2)
    np.fill_diagonal(F, False)
    labeled = np.sort(rng.choice(n, size=n_rotulados, replace=False))
    k = int(rng.integers(1, 11))
    hist = rng.integers(0, 4, size=(n, k)) * (rng.random((n, k)) < 0.4)

    g = _rede(F, labeled)
    subgrafos = build_all(g, TopicHistogram(sp.csr_matrix(hist)))
    esperado = _oraculo(F, hist, labeled)
    for relacao in ERelationship:
        assert _arestas(subgrafos[relacao]) == esperado[relacao], relacao


def test_rede_minima_tem_pesos_calculados_a_mao(rede_minima):
    # ordem dos rotulados: a=0, b=1, c=2, d=3
    assert _arestas(build_delta1(rede_minima)) == {(0, 1): 1.0, (1, 3): 1.0}
    assert _arestas(build_delta2(rede_minima)) == {(0, 2): 1.0, (1, 2): 1.0}
    assert _arestas(build_delta3(rede_minima)) == {(0, 1): 1.0, (0, 2): 1.0}

    contagens = np.array([[2, 1], [1, 0], [0, 3], [1, 1], [1, 0], [0, 0]])
    delta4 = build_delta4(rede_minima, TopicHistogram(sp.csr_matrix(contagens)))
    assert _arestas(delta4) == {(0, 1): 1.0, (0, 2): 1.0, (0, 3): 2.0, (1, 3): 1.0, (2, 3): 1.0}


def test_subgrafos_simetricos_sem_diagonal(rede_minima):
    for sub in build_all(rede_minima, None).values():
        A = sub.adjacency.toarray()
        np.testing.assert_array_equal(A, A.T)
        assert np.all(np.diag(A) == 0)
        assert sub.n == 4


def test_sem_histograma_delta4_vazio(rede_minima):
    subgrafos = build_all(rede_minima, None)
    assert list(subgrafos) == list(ERelationship)
    assert subgrafos[ERelationship.DELTA4].edge_count == 0


def test_histograma_com_usuarios_errados(rede_minima):
    with pytest.raises(ShapeError):
        build_delta4(rede_minima, TopicHistogram(sp.csr_matrix(np.ones((3, 2)))))


def test_usuario_isolado_nao_gera_arestas():
    F = np.zeros((3, 3), dtype=bool)
    F[0, 1] = True
    g = _rede(F, np.array([0, 1, 2]))
    delta3 = build_delta3(g)
    assert delta3.degree.tolist() == [1, 1, 0]
    assert build_delta1(g).edge_count == 0


def test_estatisticas_dos_subgrafos(rede_minima):
    contagens = np.array([[2, 1], [1, 0], [0, 3], [1, 1], [1, 0], [0, 0]])
    estatisticas = subgraph_stats(build_delta4(rede_minima, TopicHistogram(sp.csr_matrix(contagens))))
    assert estatisticas.relationship is ERelationship.DELTA4
    assert estatisticas.n == 4
    assert estatisticas.edge_count == 5
    assert estatisticas.weight_sum == 6.0
    assert estatisticas.max_weight == 2.0
    assert estatisticas.density == pytest.approx(5 / 6)
    assert estatisticas.to_dict()["relationship"] == "delta4"


def test_subgraph_rejeita_matriz_assimetrica():
    with pytest.raises(ValueError):
        Subgraph(ERelationship.DELTA1, sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]])))


def _denso(sub: Subgraph) -> np.ndarray:
    return sub.adjacency.toarray()


@pytest.mark.parametrize("semente", range(20))
def test_adicionar_arestas_nunca_reduz_pesos(semente):
    rng = np.random.default_rng(semente)
    n = int(rng.integers(4, 25))
    F = rng.random((n, n)) < 0.15
    np.fill_diagonal(F, False)
    labeled = np.sort(rng.choice(n, size=int(rng.integers(2, n + 1)), replace=False))
    hist = rng.integers(0, 3, size=(n, 4)) * (rng.random((n, 4)) < 0.5)

    u, v = rng.choice(n, size=2, replace=False)
    F_mais = F.copy()
    F_mais[u, v] = True
    hist_mais = hist.copy()
    hist_mais[int(rng.integers(n)), int(rng.integers(4))] += 1

    antes, depois = _rede(F, labeled), _rede(F_mais, labeled)
    assert np.all(_denso(build_delta1(depois)) >= _denso(build_delta1(antes)))
    assert np.all(_denso(build_delta2(depois)) >= _denso(build_delta2(antes)))
    delta4 = build_delta4(antes, TopicHistogram(sp.csr_matrix(hist)))
    delta4_mais = build_delta4(antes, TopicHistogram(sp.csr_matrix(hist_mais)))
    assert np.all(_denso(delta4_mais) >= _denso(delta4))
