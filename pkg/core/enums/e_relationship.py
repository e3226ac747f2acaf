from enum import Enum


class ERelationship(Enum):
    """Relações usuário-usuário extraídas da rede heterogênea."""
    DELTA1 = 1  # seguido em comum: u1 -> x <- u2
    DELTA2 = 2  # usuário de transição: u2 -> x -> u1
    DELTA3 = 3  # conexão direta: u1 -> u2
    DELTA4 = 4  # tópico em comum

    @property
    def rotulo(self) -> str:
        return f"delta{self.value}"

    @classmethod
    def criar_de_texto(cls, texto: str) -> "ERelationship":
        chave = texto.strip().lower().replace("_", "")
        for relacao in cls:
            if chave in (relacao.rotulo, str(relacao.value), relacao.name.lower()):
                return relacao
        opcoes = ", ".join(r.rotulo for r in cls)
        raise ValueError(f"Relação inválida: '{texto}'. Utilize uma das seguintes: {opcoes}.")
