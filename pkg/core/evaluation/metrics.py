from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np
import pandas as pd
from scipy.stats import rankdata
from sklearn.metrics import average_precision_score, confusion_matrix, f1_score

from core.enums import ELabel
from core.shared.exceptions import DataError

# codificação binária usada em todo o módulo: 1 = colusivo, 0 = não colusivo
COLLUSIVE = 1
NON_COLLUSIVE = 0


def codigo_rotulo(label: ELabel) -> int:
    return COLLUSIVE if label is ELabel.COLLUSIVE else NON_COLLUSIVE


def _binarios(labels: Iterable[int]) -> np.ndarray:
    rotulos = np.asarray(list(labels) if not isinstance(labels, np.ndarray) else labels)
    if rotulos.size and not np.isin(rotulos, (0, 1)).all():
        raise DataError("Rótulos devem ser binários (0/1).")
    return rotulos.astype(np.int64)


def auc_roc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """P(s_pos > s_neg) + ½P(s_pos = s_neg), via estatística U de Mann-Whitney."""
    pontuacoes = np.asarray(scores, dtype=np.float64)
    rotulos = _binarios(labels)
    if pontuacoes.shape != rotulos.shape:
        raise DataError("scores e labels com tamanhos diferentes.")
    positivos = int(rotulos.sum())
    negativos = int(rotulos.size - positivos)
    if positivos == 0 or negativos == 0:
        raise DataError("AUC-ROC exige as duas classes.")
    postos = rankdata(pontuacoes, method="average")
    u = float(postos[rotulos == 1].sum()) - positivos * (positivos + 1) / 2.0
    return u / (positivos * negativos)


def auc_pr(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Precisão média com limiares agrupados em empates."""
    pontuacoes = np.asarray(scores, dtype=np.float64)
    rotulos = _binarios(labels)
    if pontuacoes.shape != rotulos.shape:
        raise DataError("scores e labels com tamanhos diferentes.")
    if int(rotulos.sum()) == 0:
        raise DataError("AUC-PR exige pelo menos um positivo.")
    return float(average_precision_score(rotulos, pontuacoes))


def f1(labels_pred: Sequence[int], labels_true: Sequence[int], positive: int = NON_COLLUSIVE) -> float:
    """F1 da classe `positive` (padrão: não colusivo); sem positivos previstos vale 0."""
    previstos = _binarios(labels_pred)
    verdadeiros = _binarios(labels_true)
    if previstos.size == 0:
        raise DataError("F1 sobre entrada vazia.")
    if previstos.shape != verdadeiros.shape:
        raise DataError("Rótulos previstos e verdadeiros com tamanhos diferentes.")
    return float(f1_score(verdadeiros, previstos, pos_label=positive, zero_division=0))


@dataclass(frozen=True, slots=True)
class FoldMetrics:
    fold: int
    auc_roc: float
    auc_pr: float
    f1: float
    f1_collusive: float
    f1_non_collusive: float
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def support(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def evaluate_fold(
    fold: int,
    anomaly: Sequence[float],
    labels_true: Sequence[int],
    *,
    positive: int = NON_COLLUSIVE,
) -> FoldMetrics:
    """Métricas de uma dobra a partir de d² - r² (negativo = colusivo)."""
    anomalia = np.asarray(anomaly, dtype=np.float64)
    verdadeiros = _binarios(labels_true)
    previstos = (anomalia <= 0).astype(np.int64)
    # colusivo como classe positiva para as métricas sem limiar
    pontuacao = -anomalia
    tn, fp, fn, tp = confusion_matrix(verdadeiros, previstos, labels=[0, 1]).ravel()
    f1_colusivo = f1(previstos, verdadeiros, positive=COLLUSIVE)
    f1_nao_colusivo = f1(previstos, verdadeiros, positive=NON_COLLUSIVE)
    return FoldMetrics(
        fold=fold,
        auc_roc=auc_roc(pontuacao, verdadeiros),
        auc_pr=auc_pr(pontuacao, verdadeiros),
        f1=f1_colusivo if positive == COLLUSIVE else f1_nao_colusivo,
        f1_collusive=f1_colusivo,
        f1_non_collusive=f1_nao_colusivo,
        tp=int(tp),
        fp=int(fp),
        tn=int(tn),
        fn=int(fn),
    )


_METRICAS = ("auc_roc", "auc_pr", "f1", "f1_collusive", "f1_non_collusive")


@dataclass(slots=True)
class EvalReport:
    variant: str
    folds: list[FoldMetrics] = field(default_factory=list)

    def _coluna(self, nome: str) -> np.ndarray:
        return np.array([getattr(dobra, nome) for dobra in self.folds], dtype=np.float64)

    def mean(self, metrica: str) -> float:
        return float(self._coluna(metrica).mean()) if self.folds else float("nan")

    def std(self, metrica: str) -> float:
        return float(self._coluna(metrica).std()) if self.folds else float("nan")

    @property
    def auc_roc(self) -> float:
        return self.mean("auc_roc")

    @property
    def auc_pr(self) -> float:
        return self.mean("auc_pr")

    @property
    def f1(self) -> float:
        return self.mean("f1")

    def confusion(self) -> dict[str, int]:
        return {chave: int(sum(getattr(d, chave) for d in self.folds)) for chave in ("tp", "fp", "tn", "fn")}

    def to_records(self) -> list[dict]:
        return [{"variant": self.variant, **asdict(dobra)} for dobra in self.folds]

    def resumo(self) -> dict:
        return {
            "variant": self.variant,
            **{f"{m}_mean": self.mean(m) for m in _METRICAS},
            **{f"{m}_std": self.std(m) for m in _METRICAS},
        }


def report_table(reports: Iterable[EvalReport]) -> str:
    """Tabela legível (média ± desvio) no formato variante x métrica."""
    linhas = []
    for relatorio in reports:
        linha = {"variant": relatorio.variant}
        for metrica in _METRICAS:
            linha[metrica] = f"{relatorio.mean(metrica):.4f} ± {relatorio.std(metrica):.4f}"
        linhas.append(linha)
    if not linhas:
        return ""
    return pd.DataFrame(linhas).set_index("variant").to_string()
