"""Agregação hierárquica de subgrafos (HSA).

Por cabeça: convolução ponderada em cada subgrafo com normalização simétrica
D^{-1/2}(A∘K)D^{-1/2} e ReLU, depois atenção entre subgrafos (tanh + média +
softmax) e soma ponderada. Cabeças são empilhadas em sequência: Z^l = HSA(Z^{l-1}).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp

from core.entities.subgraph import Subgraph
from core.shared.exceptions import ConfigError, ShapeError


@dataclass(slots=True, eq=False)
class ConvParams:
    W: np.ndarray
    b: np.ndarray


@dataclass(slots=True, eq=False)
class AttnParams:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray


@dataclass(slots=True, eq=False)
class HeadParams:
    conv: list[ConvParams]
    attn: AttnParams

    @property
    def in_dim(self) -> int:
        return int(self.conv[0].W.shape[0])

    @property
    def hidden(self) -> int:
        return int(self.conv[0].W.shape[1])


@dataclass(slots=True, eq=False)
class HsaParams:
    heads: list[HeadParams]

    @property
    def n_subgraphs(self) -> int:
        return len(self.heads[0].conv)

    @property
    def in_dim(self) -> int:
        return self.heads[0].in_dim

    def tensors(self) -> Iterator[tuple[str, np.ndarray]]:
        """Tensores nomeados em ordem estável (referências, não cópias)."""
        for h, cabeca in enumerate(self.heads):
            for m, conv in enumerate(cabeca.conv):
                yield f"head{h}.conv{m}.W", conv.W
                yield f"head{h}.conv{m}.b", conv.b
            yield f"head{h}.attn.W1", cabeca.attn.W1
            yield f"head{h}.attn.b1", cabeca.attn.b1
            yield f"head{h}.attn.W2", cabeca.attn.W2
            yield f"head{h}.attn.b2", cabeca.attn.b2

    def named(self) -> dict[str, np.ndarray]:
        return dict(self.tensors())

    def copy(self) -> "HsaParams":
        return HsaParams.from_named(
            {nome: tensor.copy() for nome, tensor in self.tensors()},
            heads=len(self.heads),
            n_subgraphs=self.n_subgraphs,
        )

    def zeros_like(self) -> "HsaParams":
        return HsaParams.from_named(
            {nome: np.zeros_like(tensor) for nome, tensor in self.tensors()},
            heads=len(self.heads),
            n_subgraphs=self.n_subgraphs,
        )

    @classmethod
    def from_named(cls, tensores: dict[str, np.ndarray], *, heads: int, n_subgraphs: int) -> "HsaParams":
        try:
            cabecas = [
                HeadParams(
                    conv=[
                        ConvParams(W=tensores[f"head{h}.conv{m}.W"], b=tensores[f"head{h}.conv{m}.b"])
                        for m in range(n_subgraphs)
                    ],
                    attn=AttnParams(
                        W1=tensores[f"head{h}.attn.W1"],
                        b1=tensores[f"head{h}.attn.b1"],
                        W2=tensores[f"head{h}.attn.W2"],
                        b2=tensores[f"head{h}.attn.b2"],
                    ),
                )
                for h in range(heads)
            ]
        except KeyError as e:
            raise ShapeError(f"Tensor ausente nos parâmetros: {e.args[0]}.") from None
        params = cls(cabecas)
        params.validate()
        return params

    def validate(self) -> None:
        if not self.heads:
            raise ShapeError("HSA precisa de pelo menos uma cabeça.")
        entrada = self.in_dim
        for h, cabeca in enumerate(self.heads):
            if len(cabeca.conv) != self.n_subgraphs:
                raise ShapeError(f"Cabeça {h} com {len(cabeca.conv)} subgrafos; esperado {self.n_subgraphs}.")
            oculto = cabeca.hidden
            for m, conv in enumerate(cabeca.conv):
                if conv.W.shape != (entrada, oculto) or conv.b.shape != (oculto,):
                    raise ShapeError(
                        f"head{h}.conv{m}: W {conv.W.shape}, b {conv.b.shape}; esperado ({entrada}, {oculto})."
                    )
            atencao = cabeca.attn.W1.shape[1] if cabeca.attn.W1.ndim == 2 else -1
            if (
                cabeca.attn.W1.shape != (oculto, atencao)
                or cabeca.attn.b1.shape != (atencao,)
                or cabeca.attn.W2.shape != (atencao, 1)
                or cabeca.attn.b2.shape != (1,)
            ):
                raise ShapeError(f"head{h}.attn com formatos inconsistentes.")
            entrada = oculto


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limite = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limite, limite, size=(fan_in, fan_out))


def init_params(
    in_dim: int,
    hidden: Union[int, Sequence[int]],
    attn_dim: int,
    heads: int,
    seed: int,
    n_subgraphs: int = 4,
) -> HsaParams:
    """Inicialização uniforme de Glorot com semente fixa; vieses zerados."""
    if heads < 1:
        raise ConfigError("Número de cabeças deve ser >= 1.")
    ocultos = [int(hidden)] * heads if isinstance(hidden, int) else [int(h) for h in hidden]
    if len(ocultos) != heads:
        raise ShapeError(f"{len(ocultos)} dimensões ocultas para {heads} cabeças.")
    rng = np.random.default_rng(seed)
    cabecas: list[HeadParams] = []
    entrada = in_dim
    for oculto in ocultos:
        conv = [
            ConvParams(W=_glorot(rng, entrada, oculto), b=np.zeros(oculto))
            for _ in range(n_subgraphs)
        ]
        attn = AttnParams(
            W1=_glorot(rng, oculto, attn_dim),
            b1=np.zeros(attn_dim),
            W2=_glorot(rng, attn_dim, 1),
            b2=np.zeros(1),
        )
        cabecas.append(HeadParams(conv=conv, attn=attn))
        entrada = oculto
    return HsaParams(cabecas)


def normalized_adjacency(s: Union[Subgraph, sp.spmatrix]) -> sp.csr_matrix:
    """Â = D^{-1/2}(A∘K)D^{-1/2}, com D a contagem de vizinhos (sem pesos)."""
    adjacencia = s.adjacency if isinstance(s, Subgraph) else sp.csr_matrix(s, dtype=np.float64)
    grau = np.diff(adjacencia.indptr).astype(np.float64)
    inverso = np.zeros_like(grau)
    inverso[grau > 0] = 1.0 / np.sqrt(grau[grau > 0])
    escala = sp.diags(inverso)
    return (escala @ adjacencia @ escala).tocsr()


def _relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def _softmax(w: np.ndarray) -> np.ndarray:
    deslocado = np.exp(w - w.max())
    return deslocado / deslocado.sum()


def _checar_linhas(n: int, X: np.ndarray) -> None:
    if X.ndim != 2 or X.shape[0] != n:
        raise ShapeError(f"Entrada com formato {X.shape}; esperado {n} linhas.")


def subgraph_conv(s: Union[Subgraph, sp.spmatrix], X: np.ndarray, p: ConvParams) -> np.ndarray:
    """H = ReLU(Â X W + b); nó isolado recebe ReLU(b)."""
    a_hat = normalized_adjacency(s)
    _checar_linhas(a_hat.shape[0], X)
    if X.shape[1] != p.W.shape[0]:
        raise ShapeError(f"Entrada com {X.shape[1]} colunas; W espera {p.W.shape[0]}.")
    return _relu((a_hat @ X) @ p.W + p.b)


def _pontuacoes(Hs: Sequence[np.ndarray], p: AttnParams) -> tuple[list[np.ndarray], np.ndarray]:
    T = [np.tanh(H @ p.W1 + p.b1) for H in Hs]
    w = np.array([float((t @ p.W2).mean()) for t in T]) + float(p.b2[0])
    return T, w


def subgraph_attention(Hs: Sequence[np.ndarray], p: AttnParams) -> tuple[np.ndarray, np.ndarray]:
    """Z = Σ β^m H^m com β = softmax(w); devolve (Z, β)."""
    if not Hs:
        raise ShapeError("Atenção precisa de pelo menos um subgrafo.")
    formato = Hs[0].shape
    if any(H.shape != formato for H in Hs):
        raise ShapeError("Todos os H^m devem ter o mesmo formato.")
    if formato[1] != p.W1.shape[0]:
        raise ShapeError(f"H com {formato[1]} colunas; W1 espera {p.W1.shape[0]}.")
    _, w = _pontuacoes(Hs, p)
    beta = _softmax(w)
    Z = sum(b * H for b, H in zip(beta, Hs))
    return np.asarray(Z), beta


@dataclass(slots=True, eq=False)
class HeadTrace:
    Z_in: np.ndarray
    AX: list[np.ndarray]
    pre: list[np.ndarray]
    H: list[np.ndarray]
    T: list[np.ndarray]
    w: np.ndarray
    beta: np.ndarray
    Z: np.ndarray


@dataclass(slots=True, eq=False)
class ForwardTrace:
    a_hat: list[sp.csr_matrix]
    heads: list[HeadTrace] = field(default_factory=list)

    @property
    def output(self) -> np.ndarray:
        return self.heads[-1].Z

    @property
    def betas(self) -> np.ndarray:
        """β por cabeça (cabeças x subgrafos)."""
        return np.vstack([cabeca.beta for cabeca in self.heads])


def hsa_forward(
    subs: Sequence[Subgraph],
    X: np.ndarray,
    params: HsaParams,
    *,
    a_hat: Optional[Sequence[sp.csr_matrix]] = None,
) -> tuple[np.ndarray, ForwardTrace]:
    """Aplica as cabeças em sequência; `a_hat` permite reutilizar as adjacências normalizadas."""
    operadores = list(a_hat) if a_hat is not None else [normalized_adjacency(s) for s in subs]
    if len(operadores) != params.n_subgraphs:
        raise ShapeError(f"{len(operadores)} subgrafos para parâmetros com {params.n_subgraphs}.")
    X = np.asarray(X, dtype=np.float64)
    n = operadores[0].shape[0]
    for operador in operadores:
        if operador.shape != (n, n):
            raise ShapeError("Subgrafos com números de nós diferentes.")
    _checar_linhas(n, X)
    if X.shape[1] != params.in_dim:
        raise ShapeError(f"Entrada com {X.shape[1]} colunas; primeira cabeça espera {params.in_dim}.")

    trace = ForwardTrace(a_hat=operadores)
    Z = X
    for cabeca in params.heads:
        if Z.shape[1] != cabeca.in_dim:
            raise ShapeError(f"Cadeia de dimensões quebrada: {Z.shape[1]} != {cabeca.in_dim}.")
        AX = [operador @ Z for operador in operadores]
        pre = [ax @ conv.W + conv.b for ax, conv in zip(AX, cabeca.conv)]
        H = [_relu(p) for p in pre]
        T, w = _pontuacoes(H, cabeca.attn)
        beta = _softmax(w)
        Z_out = np.asarray(sum(b * h for b, h in zip(beta, H)))
        trace.heads.append(HeadTrace(Z_in=Z, AX=AX, pre=pre, H=H, T=T, w=w, beta=beta, Z=Z_out))
        Z = Z_out
    return Z, trace


def hsa_backward(
    trace: ForwardTrace, dZ: np.ndarray, params: HsaParams
) -> tuple[HsaParams, np.ndarray]:
    """Gradientes de modo reverso; devolve (gradientes no formato de `params`, dL/dX)."""
    if len(trace.heads) != len(params.heads):
        raise ShapeError("Trace e parâmetros com números de cabeças diferentes.")
    if dZ.shape != trace.output.shape:
        raise ShapeError(f"dZ com formato {dZ.shape}; esperado {trace.output.shape}.")

    grads = params.zeros_like()
    operadores = trace.a_hat
    delta = np.asarray(dZ, dtype=np.float64)

    for indice in range(len(params.heads) - 1, -1, -1):
        cabeca, registro, grad = params.heads[indice], trace.heads[indice], grads.heads[indice]
        n = registro.Z.shape[0]
        beta = registro.beta

        dH = [b * delta for b in beta]
        dbeta = np.array([float(np.sum(delta * H)) for H in registro.H])
        dw = beta * (dbeta - float(np.dot(beta, dbeta)))
        grad.attn.b2[0] = float(dw.sum())

        d_entrada = np.zeros_like(registro.Z_in)
        for m, conv in enumerate(cabeca.conv):
            escala = dw[m] / n
            grad.attn.W2 += escala * registro.T[m].sum(axis=0)[:, None]
            dT = np.broadcast_to(escala * cabeca.attn.W2[:, 0], registro.T[m].shape)
            dU = dT * (1.0 - registro.T[m] ** 2)
            grad.attn.W1 += registro.H[m].T @ dU
            grad.attn.b1 += dU.sum(axis=0)
            dH[m] = dH[m] + dU @ cabeca.attn.W1.T

            dpre = dH[m] * (registro.pre[m] > 0)
            grad.conv[m].b += dpre.sum(axis=0)
            grad.conv[m].W += registro.AX[m].T @ dpre
            d_entrada += operadores[m].T @ (dpre @ conv.W.T)
        delta = d_entrada

    return grads, delta
