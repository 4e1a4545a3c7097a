"""
Espaço levantado X^{p/2}: span dos monômios de grau p/2 (produto coordenada a
coordenada) numa base de X, e uma base ortonormal do seu espaço-coluna.
"""

from itertools import combinations_with_replacement
from math import comb
from typing import List, Optional, Tuple
import logging
import numpy as np
from scipy import linalg

from ..config import NumericPolicy, settings
from ..exceptions import (
    CapacityError,
    InvalidInputError,
    NumericalError,
    RankZeroError,
    UnsupportedPError,
)
from ..models.subspace import LiftedSpace, MonomialIndex, Subspace

logger = logging.getLogger(__name__)


def check_even_p(p: int) -> int:
    if isinstance(p, bool) or int(p) != p or p < 2 or p % 2:
        raise UnsupportedPError(f"p deve ser par e >= 2 (p must be even), recebido p={p}")
    return int(p)


def _combinations(k: int, q: int):
    # Multiconjuntos de {0..k-1} de tamanho q, na ordem lexicográfica dos expoentes
    return combinations_with_replacement(range(k), q)


def _to_exponents(combo: Tuple[int, ...], k: int) -> MonomialIndex:
    exponents = [0] * k
    for j in combo:
        exponents[j] += 1
    return tuple(exponents)


def enumerate_monomials(k: int, q: int, cap: Optional[int] = None) -> List[MonomialIndex]:
    """Lista de vetores de expoentes com soma q, em ordem lexicográfica decrescente"""
    if k < 1 or q < 1:
        raise InvalidInputError(f"enumerate_monomials exige k >= 1 e q >= 1 (k={k}, q={q})")
    cap = cap if cap is not None else settings.MONOMIAL_CAP
    D = comb(k + q - 1, q)
    if D > cap:
        raise CapacityError(D, cap)
    return [_to_exponents(c, k) for c in _combinations(k, q)]


def monomial_vector(basis: np.ndarray, idx: MonomialIndex) -> np.ndarray:
    """Coordenada i = Π_j basis[i, j]^{idx[j]}"""
    basis = np.asarray(basis, dtype=float)
    return np.prod(basis ** np.asarray(idx), axis=1)


def normalize_basis(basis: np.ndarray) -> np.ndarray:
    """
    Divide a base pela potência de 2 logo acima de max|basis|.

    O span levantado não depende da escala; a divisão por 2^e é exata e evita
    overflow/underflow nos produtos de grau p/2.
    """
    basis = np.asarray(basis, dtype=float)
    peak = float(np.max(np.abs(basis))) if basis.size else 0.0
    if peak == 0.0:
        return basis.copy()
    _, exponent = np.frexp(peak)
    return np.ldexp(basis, -int(exponent))


def _monomial_columns(basis: np.ndarray, q: int, chunk_size: int) -> np.ndarray:
    m, k = basis.shape
    factors = np.array(list(_combinations(k, q)), dtype=np.int64).reshape(-1, q)
    columns = np.empty((m, factors.shape[0]))
    for start in range(0, factors.shape[0], chunk_size):
        block = factors[start:start + chunk_size]
        # basis[:, block] tem forma m × bloco × q
        columns[:, start:start + block.shape[0]] = np.prod(basis[:, block], axis=2)
    return columns


def orthonormal_column_basis(Mx: np.ndarray, tau: Optional[float] = None) -> Tuple[np.ndarray, int]:
    """
    Base ortonormal do espaço-coluna via SVD.

    Descarta direções singulares abaixo de τ = max(m, D)·eps·σ_max (ou do τ
    informado) e devolve (ortho, r).
    """
    Mx = np.asarray(Mx, dtype=float)
    if Mx.ndim != 2 or Mx.size == 0:
        raise InvalidInputError("esperada uma matriz m×D não vazia")
    if not np.all(np.isfinite(Mx)):
        raise NumericalError("matriz com entradas não finitas")
    try:
        U, s, _ = linalg.svd(Mx, full_matrices=False, check_finite=False)
    except linalg.LinAlgError as e:
        raise NumericalError(f"SVD não convergiu: {e}") from e
    if s[0] == 0.0:
        raise RankZeroError("matriz nula: o espaço-coluna tem dimensão zero")
    if tau is None:
        tau = max(Mx.shape) * np.finfo(float).eps * s[0]
    r = int(np.sum(s > tau))
    if r == 0:
        raise RankZeroError(f"nenhum valor singular acima de τ={tau:.3e}")
    return U[:, :r], r


def build_lift(sub: Subspace, p: int, policy: Optional[NumericPolicy] = None,
               cap: Optional[int] = None) -> LiftedSpace:
    """Monta as colunas monomiais de X^{p/2} e sua base ortonormal"""
    policy = policy or settings.NUMERIC
    p = check_even_p(p)
    q = p // 2

    try:
        monomials = enumerate_monomials(sub.k, q, cap)
        columns = _monomial_columns(normalize_basis(sub.basis), q, settings.LIFT_CHUNK_SIZE)
        ortho, r = orthonormal_column_basis(columns)
    except Exception as e:
        logger.error(f"Erro ao montar o espaço levantado: {str(e)}")
        raise

    gram_err = np.abs(ortho.T @ ortho - np.eye(r)).max()
    if gram_err > policy.ortho_tol:
        logger.warning(f"Base levantada com erro de ortogonalidade {gram_err:.3e}")

    # Toda coluna monomial precisa estar no span da base ortonormal
    residual = _max_span_residual(ortho, columns)
    if residual > policy.span_tol:
        raise NumericalError(f"coluna monomial fora do span levantado (resíduo {residual:.3e})")

    logger.info(f"Espaço levantado: p={p}, k={sub.k}, m={sub.m}, D={len(monomials)}, r={r}")
    return LiftedSpace(p=p, k=sub.k, columns=columns, ortho=ortho, monomials=tuple(monomials))


def span_residual(ortho: np.ndarray, y: np.ndarray) -> float:
    """Resíduo relativo ‖y − OOᵀy‖/‖y‖ da projeção no span de `ortho`"""
    y = np.asarray(y, dtype=float)
    norm = np.linalg.norm(y)
    if norm == 0.0:
        return 0.0
    return float(np.linalg.norm(y - ortho @ (ortho.T @ y)) / norm)


def _max_span_residual(ortho: np.ndarray, Y: np.ndarray) -> float:
    # span_residual para todas as colunas de Y de uma vez
    norms = np.linalg.norm(Y, axis=0)
    nonzero = norms > 0
    if not np.any(nonzero):
        return 0.0
    Y = Y[:, nonzero]
    residuals = np.linalg.norm(Y - ortho @ (ortho.T @ Y), axis=0) / norms[nonzero]
    return float(residuals.max())


def dimension_bounds(k: int, p: int) -> Tuple[int, float, int]:
    """(C(k+p/2−1, p/2), (10k/p)^{p/2}, k^{p/2})"""
    p = check_even_p(p)
    if k < 1:
        raise InvalidInputError(f"k deve ser >= 1, recebido {k}")
    q = p // 2
    exact = comb(k + q - 1, q)
    asymptotic = (10.0 * k / p) ** q
    naive = k**q
    if p <= k:
        assert exact <= asymptotic, f"C({k + q - 1}, {q})={exact} > (10k/p)^(p/2)={asymptotic}"
    return exact, asymptotic, naive
