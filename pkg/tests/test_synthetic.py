from collections import Counter
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest
import scipy.sparse as sp

from core.dataframe.hetnet_extrator import COLUNAS_TWEET
from core.entities.hetnet import HetNet
from core.enums import ELabel
from core.evaluation.synthetic import SynthConfig, generate_synthetic
from core.graph.decompose import build_delta2
from core.shared.exceptions import DataError
from core.value_object import DataReferencia

PEQUENA = SynthConfig(
    n_collusive=20, n_organic=10, n_intermediaries=10, K_topics=5, tweets_per_user=3, initial_credit=10, seed=4
)


def _despejo(dataset) -> dict:
    return {
        nome: [registro.model_dump() for registro in getattr(dataset, nome)]
        for nome in ("users", "follows", "tweets", "labels")
    }


def test_gerador_deterministico_por_semente():
    assert _despejo(generate_synthetic(PEQUENA)) == _despejo(generate_synthetic(PEQUENA))


def test_semente_diferente_muda_o_grafo():
    outra = replace(PEQUENA, seed=5)
    assert _despejo(generate_synthetic(PEQUENA))["follows"] != _despejo(generate_synthetic(outra))["follows"]


def test_contagens_e_rotulos():
    dataset = generate_synthetic(PEQUENA)
    assert len(dataset.users) == 40
    assert len(dataset.tweets) == 40 * 3
    assert len(dataset.labels) == 30
    colusivos = [r for r in dataset.labels if r.label is ELabel.COLLUSIVE]
    assert len(colusivos) == 20
    assert len({u.id for u in dataset.users}) == 40


def test_follows_validos_sem_lacos_nem_duplicatas():
    dataset = generate_synthetic(PEQUENA)
    ids = {u.id for u in dataset.users}
    pares = [(f.src, f.dst) for f in dataset.follows]
    assert len(pares) == len(set(pares))
    assert all(src != dst for src, dst in pares)
    assert all(src in ids and dst in ids for src, dst in pares)


def test_contas_criadas_antes_da_referencia_e_embeddings_presentes():
    dataset = generate_synthetic(PEQUENA)
    referencia = DataReferencia.criar_de_texto(PEQUENA.reference_date)
    assert all(DataReferencia.criar_de_texto(u.created_at).dias_ate(referencia) > 0 for u in dataset.users)
    assert all(t.embedding is not None and len(t.embedding) == PEQUENA.embedding_dim for t in dataset.tweets)


@pytest.mark.parametrize(
    "campos",
    [
        {"n_collusive": 0, "n_organic": 0},
        {"credit_rate": 1.5},
        {"K_topics": 0},
        {"n_intermediaries": -1},
    ],
)
def test_configuracao_inviavel(campos):
    with pytest.raises(DataError):
        SynthConfig(**campos)


def _graus_delta2(dataset) -> tuple[np.ndarray, np.ndarray]:
    """Grau em Δ2 de colusivos e de orgânicos, montando só a camada de follows."""
    indice = {u.id: i for i, u in enumerate(dataset.users)}
    n = len(indice)
    origens = [indice[f.src] for f in dataset.follows]
    destinos = [indice[f.dst] for f in dataset.follows]
    rotulos = sorted((indice[r.user_id], r.label) for r in dataset.labels)
    g = HetNet(
        user_ids=list(indice),
        user_records=[],
        tweets=pd.DataFrame(columns=list(COLUNAS_TWEET)),
        follows=sp.csr_matrix((np.ones(len(origens)), (origens, destinos)), shape=(n, n)),
        posts=sp.csr_matrix((n, 0)),
        labeled=np.array([i for i, _ in rotulos], dtype=np.int64),
    )
    grau = build_delta2(g).degree
    colusivo = np.array([rotulo is ELabel.COLLUSIVE for _, rotulo in rotulos])
    return grau[colusivo], grau[~colusivo]


@pytest.mark.parametrize("semente", range(20))
def test_colusivos_tem_mais_usuarios_de_transicao(semente):
    # tweets não entram nos follows; zerá-los só encurta a geração
    colusivos, organicos = _graus_delta2(generate_synthetic(SynthConfig(seed=semente, tweets_per_user=0)))
    assert np.median(colusivos) > np.median(organicos)


def test_configuracao_nula_nao_distingue_os_papeis():
    # sem créditos, sem retorno e sem concentração de tópicos os dois papéis seguem pelo mesmo processo
    nula = SynthConfig(credit_rate=0.0, follow_back_prob=0.0, topic_concentration=0.0, tweets_per_user=0)
    colusivos, organicos = [], []
    for semente in range(20):
        dataset = generate_synthetic(replace(nula, seed=semente))
        saida = Counter(f.src for f in dataset.follows)
        assert set(saida.values()) == {nula.organic_follows}
        c, o = _graus_delta2(dataset)
        colusivos.append(c)
        organicos.append(o)
    razao = np.median(np.concatenate(colusivos)) / np.median(np.concatenate(organicos))
    assert 0.85 <= razao <= 1.15
