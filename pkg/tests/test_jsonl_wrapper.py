import pytest

from core.dataframe.jsonl_wrapper import JsonlWrapper
from core.entities.records import FollowRecord
from core.shared.exceptions import DataError


def _arquivo(tmp_path, conteudo: str):
    caminho = tmp_path / "registros.jsonl"
    caminho.write_text(conteudo, encoding="utf-8")
    return str(caminho)


def test_ler_linhas_ignora_linhas_em_branco(tmp_path):
    caminho = _arquivo(tmp_path, '{"src": "a", "dst": "b"}\n\n   \n{"src": "b", "dst": "c"}\n')
    linhas = list(JsonlWrapper(caminho).ler_linhas())
    assert [numero for numero, _ in linhas] == [1, 4]
    assert linhas[1][1] == {"src": "b", "dst": "c"}


def test_linha_malformada_informa_numero(tmp_path):
    caminho = _arquivo(tmp_path, '{"src": "a", "dst": "b"}\n{"src": \n')
    with pytest.raises(DataError) as erro:
        list(JsonlWrapper(caminho).ler_linhas())
    assert erro.value.line_number == 2
    assert erro.value.path == caminho
    assert f"{caminho}:2" in str(erro.value)


def test_linha_que_nao_e_objeto(tmp_path):
    caminho = _arquivo(tmp_path, '["a", "b"]\n')
    with pytest.raises(DataError) as erro:
        list(JsonlWrapper(caminho).ler_linhas())
    assert erro.value.line_number == 1


def test_ler_registros_valida_schema(tmp_path):
    caminho = _arquivo(tmp_path, '{"src": "a", "dst": "b"}\n{"src": 7, "dst": "a"}\n{"dst": "a"}\n')
    leitor = JsonlWrapper(caminho).ler_registros(FollowRecord)
    assert next(leitor) == (1, FollowRecord(src="a", dst="b"))
    assert next(leitor)[1].src == "7"
    with pytest.raises(DataError) as erro:
        next(leitor)
    assert erro.value.line_number == 3
    assert "src" in str(erro.value)


def test_arquivo_ausente_ou_sem_caminho(tmp_path):
    with pytest.raises(FileNotFoundError):
        list(JsonlWrapper(str(tmp_path / "nao_existe.jsonl")).ler_linhas())
    with pytest.raises(ValueError):
        list(JsonlWrapper().ler_linhas())
