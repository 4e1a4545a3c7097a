"""
Hierarquia de erros do lpembed e códigos de saída da CLI
"""

# Códigos de saída da CLI
EXIT_CODES = {
    'OK': 0,
    'VALIDATION': 1,
    'NUMERICAL': 2,
    'IO': 3,
}


class LpEmbedError(Exception):
    """Erro base do pacote"""
    exit_code = EXIT_CODES['VALIDATION']


# Validação (saída 1)
class InvalidInputError(LpEmbedError, ValueError):
    exit_code = EXIT_CODES['VALIDATION']


class UnsupportedPError(InvalidInputError):
    """p ímpar ou menor que 2"""


class DimensionMismatchError(InvalidInputError):
    pass


class CapacityError(InvalidInputError):
    """Número de monômios acima do limite configurado"""

    def __init__(self, D: int, cap: int):
        self.D = D
        self.cap = cap
        super().__init__(f"Número de monômios D={D} excede o limite configurado ({cap})")


class RankZeroError(InvalidInputError):
    pass


class ProvenanceError(InvalidInputError):
    """Embedding e espaço levantado não correspondem"""


# Numéricos (saída 2)
class NumericalError(LpEmbedError, ArithmeticError):
    exit_code = EXIT_CODES['NUMERICAL']


class SingularBarrierError(NumericalError):
    pass


class InfeasibleStepError(NumericalError):
    """Nenhum candidato admissível no passo do esparsificador"""

    def __init__(self, step: int, detail: str = ""):
        self.step = step
        msg = f"Nenhum candidato admissível no passo {step}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class RankDeficiencyError(NumericalError):
    pass


class CertificateMismatchError(NumericalError):
    pass


class CertificateFailure(NumericalError):
    """cert_upper acima de 1+eps"""


# Entrada/saída (saída 3)
class DataIOError(LpEmbedError, OSError):
    exit_code = EXIT_CODES['IO']
