"""
Pipeline completo: levanta X para X^{p/2}, amostra coordenadas com o
esparsificador, restringe às potências diagonais e certifica o embedding
(1+ε) de X em ℓ_p^n.
"""

from math import comb
from typing import Optional, Tuple
import logging
import numpy as np
from scipy import linalg

from ..config import NumericPolicy, settings
from ..exceptions import DimensionMismatchError, InvalidInputError, NumericalError, ProvenanceError
from ..models.embedding import DistortionReport, Embedding
from ..models.sparsifier import IsotropicSet, SparseWeights, ceil_with_slack
from ..models.subspace import LiftedSpace, Subspace
from .bss_core import sparsify
from .lift import build_lift, check_even_p, normalize_basis, orthonormal_column_basis

logger = logging.getLogger(__name__)


def _check_eps(eps: float) -> float:
    if not 0.0 < eps < 1.0:
        raise InvalidInputError(f"eps deve estar em (0, 1), recebido {eps}")
    return float(eps)


def inner_accuracy(p: int, eps: float) -> Tuple[float, float]:
    """(ε'', θ) com ε'' = min(εp/4, 1/2) e θ = ε''/(2+ε'')"""
    eps_inner = min(eps * p / 4.0, 0.5)
    return eps_inner, eps_inner / (2.0 + eps_inner)


def size_bound(k: int, p: int, eps: float) -> int:
    """Tamanho garantido ⌈(2+ε'')²/ε''² · C(k+p/2−1, p/2)⌉"""
    p = check_even_p(p)
    eps_inner, _ = inner_accuracy(p, _check_eps(eps))
    q = p // 2
    factor = (2.0 + eps_inner) ** 2 / eps_inner**2
    return ceil_with_slack(factor * comb(k + q - 1, q), settings.NUMERIC.ceil_slack)


def sample_coordinates(basis: np.ndarray, eps: float,
                       policy: Optional[NumericPolicy] = None) -> SparseWeights:
    """
    Amostragem ponderada de coordenadas para um subespaço de ℓ_2^m.

    Garante ‖x‖₂ <= (Σ_{i∈σ} s_i x(i)²)^{1/2} <= (1+ε)‖x‖₂ para todo x no
    span de `basis`, com |σ| <= ⌈k(2+ε)²/ε²⌉.
    """
    policy = policy or settings.NUMERIC
    eps = _check_eps(eps)
    ortho, _ = orthonormal_column_basis(normalize_basis(basis))
    iso = IsotropicSet(vectors=ortho, tol=policy.isotropy_tol)
    return sparsify(iso, eps / (2.0 + eps), policy)


def certify(emb: Embedding, lifted: LiftedSpace) -> Tuple[float, float, float, float]:
    """
    Certificado no nível levantado: extremos de Σ_{i∈σ} s_i o_iᵀo_i, com o_i as
    linhas da base ortonormal. Vale para todo x ∈ X, não só para pontos amostrados.
    """
    if (emb.m, emb.D, emb.r, emb.p, emb.k) != (lifted.m, lifted.D, lifted.r, lifted.p, lifted.k):
        raise ProvenanceError(
            f"embedding (m={emb.m}, D={emb.D}, r={emb.r}, p={emb.p}, k={emb.k}) não corresponde ao "
            f"espaço levantado (m={lifted.m}, D={lifted.D}, r={lifted.r}, p={lifted.p}, k={lifted.k})"
        )
    rows = lifted.ortho[emb.sigma]
    gram = rows.T @ (emb.weights[:, None] * rows)
    lam = linalg.eigh(gram, eigvals_only=True, check_finite=False)
    lambda_min, lambda_max = float(lam[0]), float(lam[-1])
    if lambda_min <= 0:
        return lambda_min, lambda_max, 0.0, lambda_max ** (1.0 / emb.p)
    return lambda_min, lambda_max, lambda_min ** (1.0 / emb.p), lambda_max ** (1.0 / emb.p)


def embed(sub: Subspace, p: int, eps: float, policy: Optional[NumericPolicy] = None,
          n_jobs: Optional[int] = None) -> Embedding:
    """Constrói e certifica um embedding (1+ε) de X em ℓ_p^n"""
    policy = policy or settings.NUMERIC
    p = check_even_p(p)
    eps = _check_eps(eps)
    eps_inner, theta = inner_accuracy(p, eps)

    try:
        lifted = build_lift(sub, p, policy)
        iso = IsotropicSet(vectors=lifted.ortho, tol=policy.isotropy_tol)
        weights = sparsify(iso, theta, policy, n_jobs)
    except Exception as e:
        logger.error(f"Erro ao construir o embedding: {str(e)}")
        raise

    draft = Embedding(
        p=p,
        eps=eps,
        eps_inner=eps_inner,
        theta=theta,
        sigma=weights.sigma,
        weights=weights.weights,
        cert_lower=1.0,
        cert_upper=1.0,
        k=sub.k,
        m=sub.m,
        D=lifted.D,
        r=lifted.r,
    )
    _, _, cert_lower, cert_upper = certify(draft, lifted)
    emb = draft.model_copy(update={'cert_lower': cert_lower, 'cert_upper': cert_upper})

    status = "OK" if emb.passes else "FALHOU"
    logger.info(
        f"Embedding p={p}, eps={eps}: n={emb.n} de m={sub.m}, "
        f"certificado [{cert_lower:.9f}, {cert_upper:.9f}] ({status})"
    )
    return emb


def apply_embedding(emb: Embedding, x: np.ndarray) -> np.ndarray:
    """T x = (s_i^{1/p} x(i))_{i∈σ}, em ordem crescente de σ"""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != emb.m:
        raise DimensionMismatchError(f"vetor com {x.shape[-1]} coordenadas; esperado m={emb.m}")
    return emb.weights ** (1.0 / emb.p) * x[..., emb.sigma]


def _lp_norms(X: np.ndarray, p: int) -> np.ndarray:
    return np.sum(X**p, axis=-1) ** (1.0 / p)


# Lotes seguidos sem nenhuma amostra útil antes de desistir
MAX_EMPTY_BATCHES = 10


def empirical_distortion(emb: Embedding, sub: Subspace, trials: int, seed: int,
                         batch_size: Optional[int] = None) -> DistortionReport:
    """Extremos de ‖Tx‖_p/‖x‖_p sobre x = B·g com g normal padrão (semente fixa)"""
    if trials < 1:
        raise InvalidInputError(f"trials deve ser >= 1, recebido {trials}")
    if seed < 0:
        raise InvalidInputError(f"seed deve ser >= 0, recebido {seed}")
    if sub.m != emb.m or sub.k != emb.k:
        raise ProvenanceError("subespaço não corresponde ao embedding")

    batch_size = batch_size or settings.DISTORTION_BATCH_SIZE
    rng = np.random.default_rng(seed)
    lo, hi = np.inf, -np.inf
    done = empty = 0
    while done < trials:
        size = min(batch_size, trials - done)
        coeffs = rng.standard_normal((size, sub.k))
        X = coeffs @ sub.basis.T
        # A razão é homogênea de grau 0: cada linha vai para max|x(i)| = 1
        peaks = np.max(np.abs(X), axis=1)
        keep = peaks > 0
        X = X[keep] / peaks[keep, None]
        if not X.shape[0]:
            empty += 1
            if empty >= MAX_EMPTY_BATCHES:
                raise NumericalError(f"{empty} lotes seguidos sem amostra não nula")
            continue
        empty = 0
        ratios = _lp_norms(apply_embedding(emb, X), emb.p) / _lp_norms(X, emb.p)
        lo, hi = min(lo, float(ratios.min())), max(hi, float(ratios.max()))
        done += X.shape[0]

    tol = settings.NUMERIC.spectral_floor_tol
    within = emb.cert_lower - tol <= lo and hi <= emb.cert_upper + tol
    return DistortionReport(trials=trials, seed=seed, min_ratio=lo, max_ratio=hi, within_cert=within)


def capacity(n: int, p: int, eps: float) -> int:
    """Maior k com size_bound(k, p, eps) <= n; 0 se nem k = 1 cabe"""
    if n < 1:
        raise InvalidInputError(f"n deve ser >= 1, recebido {n}")
    if size_bound(1, p, eps) > n:
        return 0
    # size_bound é crescente em k: busca exponencial seguida de bisseção
    lo, hi = 1, 2
    while size_bound(hi, p, eps) <= n:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if size_bound(mid, p, eps) <= n:
            lo = mid
        else:
            hi = mid
    return lo


def realized_capacity_constant(n: int, p: int, eps: float) -> float:
    """c realizado em k_max = c·ε^{4/p}·p·n^{2/p}"""
    return capacity(n, p, eps) / (eps ** (4.0 / p) * p * n ** (2.0 / p))
