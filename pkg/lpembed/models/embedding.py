from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Optional
import numpy as np

from ._arrays import frozen_array


class Embedding(BaseModel):
    """Mapa T: x ↦ (s_i^{1/p} x(i))_{i∈σ} com certificado de distorção"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    p: int
    eps: float
    eps_inner: float
    theta: float
    sigma: np.ndarray
    weights: np.ndarray
    cert_lower: float
    cert_upper: float
    k: int
    m: int
    D: int
    r: int

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
        if self.sigma.size and (self.sigma[0] < 0 or self.sigma[-1] >= self.m):
            raise ValueError("índices de sigma fora de {0..m-1}")
        if np.any(np.diff(self.sigma) <= 0):
            raise ValueError("sigma deve ser estritamente crescente")
        if np.any(self.weights <= 0):
            raise ValueError("pesos devem ser positivos")
        if self.cert_lower > self.cert_upper:
            raise ValueError("cert_lower > cert_upper")
        return self

    @property
    def n(self) -> int:
        return int(self.sigma.size)

    @property
    def passes(self) -> bool:
        return self.cert_upper <= 1.0 + self.eps

    def to_dict(self) -> dict:
        """Formato do arquivo JSON (índices 1-based)"""
        return {
            'p': self.p,
            'eps': self.eps,
            'eps_inner': self.eps_inner,
            'theta': self.theta,
            'sigma': [int(i) + 1 for i in self.sigma],
            'weights': [float(w) for w in self.weights],
            'cert_lower': self.cert_lower,
            'cert_upper': self.cert_upper,
            'k': self.k,
            'm': self.m,
            'D': self.D,
            'r': self.r,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Embedding":
        data = dict(data)
        data['sigma'] = np.asarray(data['sigma'], dtype=np.int64) - 1
        return cls(**data)


class DistortionReport(BaseModel):
    """Extremos amostrados de ‖Tx‖_p/‖x‖_p"""
    model_config = ConfigDict(frozen=True)

    trials: int
    seed: int
    min_ratio: float
    max_ratio: float
    within_cert: bool

    @model_validator(mode="after")
    def _check(self):
        if not (0 < self.min_ratio <= self.max_ratio < np.inf):
            raise ValueError("razões devem ser finitas, positivas e ordenadas")
        return self


class RunReport(BaseModel):
    """Relatório de uma execução do comando embed"""
    # entrada
    kind: str
    k: int
    m: int
    p: int
    eps: float
    seed: Optional[int] = None
    input_path: Optional[str] = None
    generator: str = "numpy.random.Generator(PCG64)"

    # saída
    n: int
    D: int
    r: int
    theta: float
    eps_inner: float
    cert_lower: float
    cert_upper: float
    empirical_min_ratio: float
    empirical_max_ratio: float
    trials: int
    size_bound: int
    asymptotic_bound: float
    naive_bound: int
    passed: bool
    wall_time_s: float = Field(ge=0)


class ScalingPoint(BaseModel):
    """Uma linha da varredura de escala"""
    k: int
    seed: int
    D: int
    r: int
    n: int
    cert_upper: float
