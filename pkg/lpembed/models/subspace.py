from pydantic import BaseModel, ConfigDict, field_validator, model_validator
import numpy as np

from ._arrays import frozen_array

# Vetor de expoentes (p_1, ..., p_k) com soma q = p/2
MonomialIndex = tuple[int, ...]


class Subspace(BaseModel):
    """Subespaço X de ℓ_p^m dado por uma base (colunas de uma matriz m×k)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    basis: np.ndarray

    @field_validator("basis", mode="before")
    @classmethod
    def _freeze_basis(cls, value):
        return frozen_array(value, ndim=2)

    @model_validator(mode="after")
    def _check_rank(self):
        m, k = self.basis.shape
        if not m >= k >= 1:
            raise ValueError(f"a base deve ter m >= k >= 1 (m={m}, k={k})")
        s = np.linalg.svd(self.basis, compute_uv=False)
        tau = max(m, k) * np.finfo(float).eps * (s[0] if s.size else 0.0)
        if s[0] == 0.0 or int(np.sum(s > tau)) < k:
            raise ValueError("as colunas da base não são linearmente independentes")
        return self

    @property
    def m(self) -> int:
        return self.basis.shape[0]

    @property
    def k(self) -> int:
        return self.basis.shape[1]


class LiftedSpace(BaseModel):
    """Espaço levantado X^{p/2}: colunas monomiais e uma base ortonormal"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    p: int
    k: int
    columns: np.ndarray
    ortho: np.ndarray
    monomials: tuple[MonomialIndex, ...]

    @field_validator("columns", "ortho", mode="before")
    @classmethod
    def _freeze(cls, value):
        return frozen_array(value, ndim=2)

    @model_validator(mode="after")
    def _check_shapes(self):
        if self.columns.shape[1] != len(self.monomials):
            raise ValueError("uma coluna por monômio")
        if self.ortho.shape[0] != self.columns.shape[0]:
            raise ValueError("columns e ortho devem ter o mesmo número de linhas")
        if self.r > min(self.m, self.D):
            raise ValueError(f"posto r={self.r} acima de min(m, D)")
        return self

    @property
    def m(self) -> int:
        return self.columns.shape[0]

    @property
    def D(self) -> int:
        return self.columns.shape[1]

    @property
    def r(self) -> int:
        return self.ortho.shape[1]
