from pydantic import BaseModel, ConfigDict, field_validator, model_validator
import math
import numpy as np

from ._arrays import frozen_array


def ceil_with_slack(value: float, slack: float = 1e-9) -> int:
    """Teto tolerante a ruído de ponto flutuante (9.000000000000002 -> 9)"""
    return math.ceil(value - slack * max(1.0, abs(value)))


class IsotropicSet(BaseModel):
    """Vetores v_1..v_M em R^r com Σ v_i v_iᵀ = I_r"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    vectors: np.ndarray
    tol: float = 1e-8

    @field_validator("vectors", mode="before")
    @classmethod
    def _freeze(cls, value):
        return frozen_array(value, ndim=2)

    @model_validator(mode="after")
    def _check_isotropy(self):
        M, r = self.vectors.shape
        if r < 1 or M < r:
            raise ValueError(f"conjunto isotrópico exige M >= r >= 1 (M={M}, r={r})")
        gram = self.vectors.T @ self.vectors
        err = np.linalg.norm(gram - np.eye(r)) / np.sqrt(r)
        if err > self.tol:
            raise ValueError(f"Σ v_i v_iᵀ difere da identidade (erro relativo {err:.3e})")
        return self

    @property
    def M(self) -> int:
        return self.vectors.shape[0]

    @property
    def r(self) -> int:
        return self.vectors.shape[1]


class SparsifierParams(BaseModel):
    """Parâmetros balanceados do método de barreiras"""
    model_config = ConfigDict(frozen=True)

    theta: float
    r: int
    d: float
    delta_L: float
    delta_U: float
    eps_L: float
    eps_U: float
    N: int

    @classmethod
    def from_theta(cls, theta: float, r: int, ceil_slack: float = 1e-9) -> "SparsifierParams":
        d = 1.0 / theta**2
        return cls(
            theta=theta,
            r=r,
            d=d,
            delta_L=1.0,
            delta_U=(1.0 + theta) / (1.0 - theta),
            eps_L=theta,
            eps_U=theta * (1.0 - theta) / (1.0 + theta),
            N=ceil_with_slack(d * r, ceil_slack),
        )

    @model_validator(mode="after")
    def _check(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta deve estar em (0, 1), recebido {self.theta}")
        if self.N < self.r:
            raise ValueError("N deve ser >= r")
        return self

    @property
    def kappa_bound(self) -> float:
        """((1+θ)/(1−θ))², o limite superior do quociente espectral"""
        return self.delta_U**2


class BarrierState(BaseModel):
    """Estado do esparsificador: Ã, barreiras (u, l), pesos e passo"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    A: np.ndarray
    u: float
    l: float
    s: np.ndarray
    step: int = 0
    last_index: int = -1
    last_weight: float = 0.0

    @field_validator("A", "s", mode="before")
    @classmethod
    def _freeze(cls, value):
        return frozen_array(value)

    @model_validator(mode="after")
    def _check(self):
        if self.A.ndim != 2 or self.A.shape[0] != self.A.shape[1]:
            raise ValueError("A deve ser quadrada")
        if self.s.ndim != 1:
            raise ValueError("s deve ser um vetor")
        if np.any(self.s < 0):
            raise ValueError("pesos acumulados devem ser não negativos")
        return self

    @classmethod
    def initial(cls, params: SparsifierParams, M: int) -> "BarrierState":
        r = params.r
        return cls(
            A=np.zeros((r, r)),
            u=r / params.eps_U,
            l=-r / params.eps_L,
            s=np.zeros(M),
            step=0,
        )


class SparseWeights(BaseModel):
    """Suporte σ (0-based, crescente), pesos positivos e certificado espectral"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    sigma: np.ndarray
    weights: np.ndarray
    rescale: float
    kappa: float
    lambda_min: float
    lambda_max: float
    theta: float
    steps: int

    @field_validator("sigma", mode="before")
    @classmethod
    def _freeze_sigma(cls, value):
        return frozen_array(value, dtype=np.int64, ndim=1)

    @field_validator("weights", mode="before")
    @classmethod
    def _freeze_weights(cls, value):
        return frozen_array(value, ndim=1)

    @model_validator(mode="after")
    def _check(self):
        if self.sigma.shape != self.weights.shape:
            raise ValueError("sigma e weights devem ter o mesmo tamanho")
        if np.any(np.diff(self.sigma) <= 0):
            raise ValueError("sigma deve ser estritamente crescente")
        if np.any(self.weights <= 0):
            raise ValueError("pesos devem ser positivos")
        if self.rescale <= 0:
            raise ValueError("fator de reescala deve ser positivo")
        return self

    @property
    def n(self) -> int:
        return int(self.sigma.size)
