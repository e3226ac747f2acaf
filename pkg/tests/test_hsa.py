import math

import numpy as np
import pytest
import scipy.sparse as sp

from core.entities.subgraph import Subgraph
from core.enums import ERelationship
from core.model.detector import Hypersphere, svdd_loss, svdd_loss_grad
from core.model.hsa import (
    AttnParams,
    ConvParams,
    HsaParams,
    hsa_backward,
    hsa_forward,
    init_params,
    normalized_adjacency,
    subgraph_attention,
    subgraph_conv,
)
from core.shared.exceptions import ShapeError


def _adjacencia_densa(rng: np.random.Generator, n: int, densidade: float) -> np.ndarray:
    A = np.triu(rng.integers(1, 4, size=(n, n)) * (rng.random((n, n)) < densidade), k=1).astype(np.float64)
    return A + A.T


def _subgrafos(rng: np.random.Generator, n: int, densidade: float = 0.3) -> list[Subgraph]:
    return [Subgraph(r, sp.csr_matrix(_adjacencia_densa(rng, n, densidade))) for r in ERelationship]


def _conv_densa(A: np.ndarray, X: np.ndarray, p: ConvParams) -> np.ndarray:
    """H_i = ReLU(Σ_j K_ij / sqrt(|N_i||N_j|) x_j W + b)."""
    n = A.shape[0]
    grau = (A > 0).sum(axis=1)
    saida = np.zeros((n, p.W.shape[1]))
    for i in range(n):
        agregado = np.zeros(X.shape[1])
        for j in range(n):
            if A[i, j] > 0:
                agregado += A[i, j] / np.sqrt(grau[i] * grau[j]) * X[j]
        saida[i] = np.maximum(agregado @ p.W + p.b, 0.0)
    return saida


@pytest.mark.parametrize("semente", range(50))
def test_convolucao_esparsa_igual_a_densa(semente):
    rng = np.random.default_rng(semente)
    n = int(rng.integers(2, 51))
    entrada, oculto = int(rng.integers(1, 9)), int(rng.integers(1, 17))
    A = _adjacencia_densa(rng, n, float(rng.uniform(0.05, 0.5)))
    X = rng.normal(size=(n, entrada))
    p = ConvParams(W=rng.normal(size=(entrada, oculto)), b=rng.normal(size=oculto))
    sub = Subgraph(ERelationship.DELTA1, sp.csr_matrix(A))
    np.testing.assert_allclose(subgraph_conv(sub, X, p), _conv_densa(A, X, p), rtol=0, atol=1e-10)


def test_no_isolado_recebe_relu_do_vies():
    A = np.zeros((3, 3))
    A[0, 1] = A[1, 0] = 1.0
    p = ConvParams(W=np.ones((2, 2)), b=np.array([0.5, -0.5]))
    H = subgraph_conv(Subgraph(ERelationship.DELTA3, sp.csr_matrix(A)), np.ones((3, 2)), p)
    np.testing.assert_array_equal(H[2], [0.5, 0.0])


def test_adjacencia_normalizada_usa_grau_sem_pesos():
    A = np.array([[0.0, 2.0, 1.0], [2.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    a_hat = normalized_adjacency(Subgraph(ERelationship.DELTA2, sp.csr_matrix(A))).toarray()
    assert a_hat[0, 1] == pytest.approx(2.0 / np.sqrt(2 * 1))
    assert a_hat[0, 2] == pytest.approx(1.0 / np.sqrt(2 * 1))
    np.testing.assert_allclose(a_hat, a_hat.T)


def _atencao_aleatoria(rng: np.random.Generator, oculto: int, atencao: int) -> AttnParams:
    return AttnParams(
        W1=rng.normal(size=(oculto, atencao)),
        b1=rng.normal(size=atencao),
        W2=rng.normal(size=(atencao, 1)),
        b2=rng.normal(size=1),
    )


@pytest.mark.parametrize("lote", range(10))
def test_invariantes_da_atencao(lote):
    rng = np.random.default_rng(1000 + lote)
    for _ in range(100):
        n, oculto, atencao = int(rng.integers(1, 12)), int(rng.integers(1, 6)), int(rng.integers(1, 6))
        p = _atencao_aleatoria(rng, oculto, atencao)
        Hs = [np.abs(rng.normal(size=(n, oculto))) for _ in range(4)]

        Z, beta = subgraph_attention(Hs, p)
        assert abs(beta.sum() - 1.0) <= 1e-9
        np.testing.assert_allclose(Z, sum(b * H for b, H in zip(beta, Hs)), atol=1e-12)

        deslocado = AttnParams(W1=p.W1, b1=p.b1, W2=p.W2, b2=p.b2 + rng.normal() * 10)
        _, beta_deslocado = subgraph_attention(Hs, deslocado)
        np.testing.assert_allclose(beta_deslocado, beta, atol=1e-12)

        iguais = [Hs[0]] * 4
        Z_iguais, beta_iguais = subgraph_attention(iguais, p)
        np.testing.assert_allclose(beta_iguais, [0.25] * 4, atol=1e-12)
        np.testing.assert_allclose(Z_iguais, Hs[0], atol=1e-12)


def test_forward_denso_de_uma_cabeca():
    rng = np.random.default_rng(7)
    n = 12
    subs = _subgrafos(rng, n)
    X = rng.normal(size=(n, 5))
    params = init_params(5, 4, 3, heads=1, seed=2)
    cabeca = params.heads[0]

    Hs = [_conv_densa(s.adjacency.toarray(), X, conv) for s, conv in zip(subs, cabeca.conv)]
    w = np.array([np.mean(np.tanh(H @ cabeca.attn.W1 + cabeca.attn.b1) @ cabeca.attn.W2) for H in Hs])
    w = w + cabeca.attn.b2[0]
    beta = np.exp(w) / np.exp(w).sum()
    esperado = sum(b * H for b, H in zip(beta, Hs))

    Z, trace = hsa_forward(subs, X, params)
    np.testing.assert_allclose(Z, esperado, atol=1e-10)
    np.testing.assert_allclose(trace.betas[0], beta, atol=1e-12)


def test_cabecas_empilhadas_em_sequencia():
    rng = np.random.default_rng(0)
    subs = _subgrafos(rng, 10)
    X = rng.normal(size=(10, 6))
    params = init_params(6, [5, 3], 4, heads=2, seed=1)
    Z, trace = hsa_forward(subs, X, params)
    assert Z.shape == (10, 3)
    assert trace.betas.shape == (2, 4)
    np.testing.assert_array_equal(trace.heads[1].Z_in, trace.heads[0].Z)


def test_init_params_deterministico_e_glorot():
    primeiro = init_params(18, 32, 128, heads=2, seed=5)
    segundo = init_params(18, 32, 128, heads=2, seed=5)
    for (nome, a), (_, b) in zip(primeiro.tensors(), segundo.tensors()):
        np.testing.assert_array_equal(a, b, err_msg=nome)
    limite = np.sqrt(6.0 / (18 + 32))
    assert np.abs(primeiro.heads[0].conv[0].W).max() <= limite
    assert primeiro.heads[1].conv[0].W.shape == (32, 32)
    assert primeiro.heads[0].attn.W2.shape == (128, 1)
    assert np.all(primeiro.heads[0].conv[0].b == 0)


def test_erros_de_formato():
    rng = np.random.default_rng(0)
    subs = _subgrafos(rng, 6)
    params = init_params(3, 4, 2, heads=1, seed=0)
    with pytest.raises(ShapeError):
        hsa_forward(subs, rng.normal(size=(5, 3)), params)
    with pytest.raises(ShapeError):
        hsa_forward(subs, rng.normal(size=(6, 2)), params)
    with pytest.raises(ShapeError):
        hsa_forward(subs[:3], rng.normal(size=(6, 3)), params)
    with pytest.raises(ShapeError):
        subgraph_attention([np.ones((2, 4)), np.ones((3, 4))], params.heads[0].attn)


def test_from_named_exige_todos_os_tensores():
    params = init_params(3, 4, 2, heads=2, seed=0)
    nomeados = params.named()
    del nomeados["head1.attn.W2"]
    with pytest.raises(ShapeError):
        HsaParams.from_named(nomeados, heads=2, n_subgraphs=4)


# --- Verificação de gradientes por diferenças finitas -------------------------

def _perda_total(subs, X, params, esfera, linhas) -> float:
    Z, _ = hsa_forward(subs, X, params)
    return svdd_loss(Z[linhas], esfera)[0]


@pytest.fixture
def problema_gradiente():
    rng = np.random.default_rng(42)
    n = 20
    subs = _subgrafos(rng, n, densidade=0.35)
    X = rng.normal(size=(n, 5))
    params = init_params(5, 4, 3, heads=2, seed=3)
    for _, tensor in params.tensors():
        tensor += rng.normal(scale=0.1, size=tensor.shape)
    linhas = np.arange(0, n, 2)
    Z, _ = hsa_forward(subs, X, params)
    esfera = Hypersphere(center=Z[linhas].mean(axis=0) + 0.05, mu=0.2, r2=0.0)
    return subs, X, params, esfera, linhas


def _gradiente_analitico(subs, X, params, esfera, linhas):
    Z, trace = hsa_forward(subs, X, params)
    dZ = np.zeros_like(Z)
    dZ[linhas] = svdd_loss_grad(Z[linhas], esfera)
    return hsa_backward(trace, dZ, params)


def _proximos(analitico: float, numerico: float) -> bool:
    return abs(analitico - numerico) <= 1e-4 * max(abs(analitico), abs(numerico)) + 1e-8


def test_gradientes_dos_parametros_batem_com_diferencas_finitas(problema_gradiente):
    subs, X, params, esfera, linhas = problema_gradiente
    grads, _ = _gradiente_analitico(subs, X, params, esfera, linhas)
    passo = 1e-5
    analiticos = grads.named()
    for nome, tensor in params.tensors():
        for indice in np.ndindex(tensor.shape):
            original = tensor[indice]
            tensor[indice] = original + passo
            acima = _perda_total(subs, X, params, esfera, linhas)
            tensor[indice] = original - passo
            abaixo = _perda_total(subs, X, params, esfera, linhas)
            tensor[indice] = original
            numerico = (acima - abaixo) / (2 * passo)
            assert _proximos(analiticos[nome][indice], numerico), (nome, indice, analiticos[nome][indice], numerico)


def test_gradiente_da_entrada_bate_com_diferencas_finitas(problema_gradiente):
    subs, X, params, esfera, linhas = problema_gradiente
    _, dX = _gradiente_analitico(subs, X, params, esfera, linhas)
    passo = 1e-5
    for indice in np.ndindex(X.shape):
        perturbado = X.copy()
        perturbado[indice] += passo
        acima = _perda_total(subs, perturbado, params, esfera, linhas)
        perturbado[indice] -= 2 * passo
        abaixo = _perda_total(subs, perturbado, params, esfera, linhas)
        assert _proximos(dX[indice], (acima - abaixo) / (2 * passo)), indice


def test_gradiente_do_vies_da_atencao_e_nulo(problema_gradiente):
    subs, X, params, esfera, linhas = problema_gradiente
    grads, _ = _gradiente_analitico(subs, X, params, esfera, linhas)
    for cabeca in grads.heads:
        assert cabeca.attn.b2[0] == pytest.approx(0.0, abs=1e-12)


def test_atencao_calculada_a_mao_em_tres_nos():
    t = np.arctanh
    Hs = [
        np.array([[0.0, 1.0], [0.0, 2.0], [0.0, 3.0]]),
        np.array([[t(0.2), 1.0], [t(0.5), 0.0], [t(0.8), 1.0]]),
        np.array([[t(-0.5), 2.0], [t(-0.5), 2.0], [t(-0.5), 2.0]]),
        np.array([[t(0.1), 0.0], [t(0.4), 0.0], [t(-0.2), 4.0]]),
    ]
    # W1 projeta a primeira coluna; w^m = média de tanh dessa coluna + b2
    p = AttnParams(W1=np.array([[1.0], [0.0]]), b1=np.zeros(1), W2=np.array([[1.0]]), b2=np.array([0.3]))
    Z, beta = subgraph_attention(Hs, p)

    pesos = [math.exp(w) for w in (0.0, 0.5, -0.5, 0.1)]
    esperado = [peso / sum(pesos) for peso in pesos]
    np.testing.assert_allclose(beta, esperado, rtol=1e-12)
    assert Z[0, 1] == pytest.approx(esperado[0] * 1 + esperado[1] * 1 + esperado[2] * 2)
    assert Z[2, 1] == pytest.approx(esperado[0] * 3 + esperado[1] * 1 + esperado[2] * 2 + esperado[3] * 4)
    np.testing.assert_allclose(Z, sum(b * H for b, H in zip(esperado, Hs)), rtol=1e-12)
