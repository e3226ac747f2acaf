import json
import logging

import pytest

from cli.app import exit_code_for, run
from cli.configurations.logging_config import get_run_id
from core.shared.exceptions import ConfigError, DataError, NonFiniteLossError, StageError
from tests.conftest import REFERENCIA

TREINO_RAPIDO = ["--epochs", "3", "--hidden", "4", "--attn-dim", "4", "--heads", "1"]


@pytest.fixture(autouse=True)
def isolar_logging(monkeypatch, tmp_path):
    """`run` reconfigura o logging; devolve o estado anterior para o caplog dos demais testes."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("CONLUIO_CONFIG", raising=False)
    monkeypatch.delenv("CONLUIO_OUT", raising=False)
    raiz = logging.getLogger()
    handlers_raiz, nivel_raiz = list(raiz.handlers), raiz.level
    yield
    raiz.handlers[:] = handlers_raiz
    raiz.setLevel(nivel_raiz)
    conluio = logging.getLogger("conluio")
    conluio.handlers.clear()
    conluio.propagate = True
    conluio.setLevel(logging.NOTSET)


def _construir(dataset_minimo, saida) -> int:
    return run(
        [
            "build",
            "--users", dataset_minimo["users"],
            "--follows", dataset_minimo["follows"],
            "--tweets", dataset_minimo["tweets"],
            "--labels", dataset_minimo["labels"],
            "--topics-k", "2",
            "--now", REFERENCIA,
            "--out", str(saida),
        ]
    )


def _linhas(caminho) -> list[dict]:
    return [json.loads(linha) for linha in caminho.read_text(encoding="utf-8").splitlines() if linha.strip()]


def test_pipeline_completo(dataset_minimo, tmp_path):
    saida = tmp_path / "out"
    assert _construir(dataset_minimo, saida) == 0
    for nome in (
        "subgraph_delta1.jsonl",
        "subgraph_delta4.jsonl",
        "subgraph_stats.jsonl",
        "subgraph_stats.txt",
        "features_raw.parquet",
        "labeled_users.jsonl",
        "topic_assignments.jsonl",
        "topic_centroids.json",
        "hetnet/users.jsonl",
        "hetnet/contains.jsonl",
    ):
        assert (saida / nome).exists(), nome
    assert [r["user_id"] for r in _linhas(saida / "labeled_users.jsonl")] == ["a", "b", "c", "d"]

    assert run(["train", *TREINO_RAPIDO, "--out", str(saida)]) == 0
    assert len(_linhas(saida / "training_log.jsonl")) == 3
    efetiva = json.loads((saida / "effective_config.json").read_text(encoding="utf-8"))
    assert efetiva["train"]["epochs"] == 3
    assert efetiva["train"]["hidden"] == 4
    assert json.loads((saida / "checkpoint.json").read_text(encoding="utf-8"))["topics_k"] == 2

    assert run(["detect", "--out", str(saida)]) == 0
    pontuacoes = _linhas(saida / "scores.jsonl")
    assert [p["user_id"] for p in pontuacoes] == ["a", "b", "c", "d"]
    for p in pontuacoes:
        assert p["label"] == ("collusive" if p["distance2"] <= p["r2"] else "non_collusive")

    assert run(["export-embeddings", "--out", str(saida)]) == 0
    cabecalho = (saida / "embeddings.csv").read_text(encoding="utf-8").splitlines()[0]
    assert cabecalho == "user_id,z0,z1,z2,z3"


def test_detect_estrito_com_usuario_desconhecido(dataset_minimo, tmp_path, capsys):
    saida = tmp_path / "out"
    assert _construir(dataset_minimo, saida) == 0
    assert run(["train", *TREINO_RAPIDO, "--out", str(saida)]) == 0

    assert run(["detect", "--user", "a", "--user", "zz", "--out", str(saida)]) == 0
    assert [p["user_id"] for p in _linhas(saida / "scores.jsonl")] == ["a"]

    capsys.readouterr()
    assert run(["detect", "--user", "zz", "--strict", "--out", str(saida)]) == 2
    assert "detect:" in capsys.readouterr().err


def test_checkpoint_identico_entre_execucoes(dataset_minimo, tmp_path):
    saida = tmp_path / "out"
    assert _construir(dataset_minimo, saida) == 0
    assert run(["train", *TREINO_RAPIDO, "--seed", "3", "--out", str(saida)]) == 0
    primeiro = (saida / "checkpoint.json").read_bytes()
    assert run(["train", *TREINO_RAPIDO, "--seed", "3", "--out", str(saida)]) == 0
    assert (saida / "checkpoint.json").read_bytes() == primeiro


def test_build_sem_tweets_falha_na_etapa_de_topicos(dataset_minimo, tmp_path, capsys):
    codigo = run(
        [
            "build",
            "--users", dataset_minimo["users"],
            "--follows", dataset_minimo["follows"],
            "--tweets", str(tmp_path / "nao_existe.jsonl"),
            "--now", REFERENCIA,
            "--out", str(tmp_path / "out"),
        ]
    )
    assert codigo == 2
    assert "topics: input not found" in capsys.readouterr().err


def test_build_sem_data_de_referencia(dataset_minimo, tmp_path, capsys):
    codigo = run(
        [
            "build",
            "--users", dataset_minimo["users"],
            "--follows", dataset_minimo["follows"],
            "--tweets", dataset_minimo["tweets"],
            "--out", str(tmp_path / "out"),
        ]
    )
    assert codigo == 1
    assert "features:" in capsys.readouterr().err


def test_train_sem_build(tmp_path, capsys):
    assert run(["train", "--out", str(tmp_path / "vazio")]) == 2
    assert "train:" in capsys.readouterr().err


def test_opcao_desconhecida_e_uso(tmp_path):
    assert run(["train", "--nao-existe"]) == 1
    assert run(["nao-existe"]) == 1


def test_synth_com_arquivo_de_configuracao_e_flags(tmp_path):
    config = tmp_path / "conluio.toml"
    config.write_text(
        "seed = 3\n"
        f"out_dir = \"{(tmp_path / 'do_arquivo').as_posix()}\"\n"
        "[synth]\n"
        "n_collusive = 5\n"
        "n_organic = 3\n"
        "n_intermediaries = 2\n"
        "K_topics = 3\n"
        "tweets_per_user = 2\n"
        "initial_credit = 4\n",
        encoding="utf-8",
    )
    saida = tmp_path / "da_flag"
    assert run(["synth", "--config", str(config), "--n-collusive", "6", "--out", str(saida)]) == 0

    efetiva = json.loads((saida / "effective_config.json").read_text(encoding="utf-8"))
    assert efetiva["seed"] == 3
    assert efetiva["synth"]["n_collusive"] == 6
    assert efetiva["synth"]["n_organic"] == 3
    assert len(_linhas(saida / "users.jsonl")) == 6 + 3 + 2
    assert len(_linhas(saida / "labels.jsonl")) == 6 + 3
    assert not (tmp_path / "do_arquivo").exists()


def test_diretorio_de_saida_pelo_ambiente(tmp_path, monkeypatch):
    monkeypatch.setenv("CONLUIO_OUT", str(tmp_path / "env_out"))
    args = ["synth", "--n-collusive", "3", "--n-organic", "2", "--n-intermediaries", "1", "--topics", "2"]
    assert run([*args, "--tweets-per-user", "1"]) == 0
    assert (tmp_path / "env_out" / "follows.jsonl").exists()


def test_configuracao_invalida(tmp_path, capsys):
    config = tmp_path / "ruim.toml"
    config.write_text("[train]\nepochs = 0\n", encoding="utf-8")
    assert run(["synth", "--config", str(config)]) == 2
    assert "config:" in capsys.readouterr().err

    assert run(["synth", "--config", str(tmp_path / "ausente.toml")]) == 2


def test_run_id_limpo_ao_final(tmp_path):
    run(["synth", "--n-collusive", "2", "--n-organic", "1", "--n-intermediaries", "0", "--out", str(tmp_path)])
    assert get_run_id() is None


def test_codigos_de_saida_pela_causa():
    try:
        raise StageError("train", "divergiu") from NonFiniteLossError(4, "loss")
    except StageError as e:
        assert exit_code_for(e) == 3
    try:
        raise StageError("hetnet", "linha ruim") from DataError("x")
    except StageError as e:
        assert exit_code_for(e) == 2
    try:
        raise StageError("train", "sem raio") from ConfigError("Hiperesfera sem raio")
    except StageError as e:
        assert exit_code_for(e) == 2
    assert exit_code_for(ConfigError("K deve ser >= 1.")) == 2
    assert exit_code_for(ValueError("uso")) == 1


def test_avaliacao_ablacao_e_varredura_sobre_sintetico(tmp_path):
    dados = tmp_path / "dados"
    sintese = ["synth", "--n-collusive", "8", "--n-organic", "4", "--n-intermediaries", "3"]
    assert run([*sintese, "--topics", "2", "--tweets-per-user", "2", "--out", str(dados)]) == 0

    saida = tmp_path / "out"
    construcao = [
        "build",
        "--users", str(dados / "users.jsonl"),
        "--follows", str(dados / "follows.jsonl"),
        "--tweets", str(dados / "tweets.jsonl"),
        "--labels", str(dados / "labels.jsonl"),
        "--topics-k", "2",
        "--now", "2020-01-01",
        "--out", str(saida),
    ]
    assert run(construcao) == 0

    assert run(["eval", "--folds", "2", *TREINO_RAPIDO, "--out", str(saida)]) == 0
    registros = _linhas(saida / "eval_records.jsonl")
    assert len(registros) == 2
    assert {r["variant"] for r in registros} == {"full"}
    assert (saida / "eval_report.txt").exists()

    assert run(["ablate", "--folds", "2", "--epochs", "2", "--out", str(saida)]) == 0
    variantes = {r["variant"] for r in _linhas(saida / "eval_records.jsonl")}
    assert variantes == {"delta1", "delta2", "delta3", "delta4", "full"}

    config = tmp_path / "varredura.toml"
    config.write_text("[sweep]\nhidden = [4]\nattn_dim = [4]\nheads = [1]\n", encoding="utf-8")
    assert run(["sweep", "--config", str(config), "--folds", "2", "--epochs", "2", "--out", str(saida)]) == 0
    assert _linhas(saida / "sweep_records.jsonl")
