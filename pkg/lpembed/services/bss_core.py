"""
Seleção determinística de subconjunto ponderado pelo método de barreiras
(esparsificação espectral): dado um conjunto isotrópico, escolhe no máximo
⌈r/θ²⌉ vetores com pesos cuja soma ponderada de produtos externos aproxima
a identidade.
"""

from typing import Dict, List, Optional, Tuple
import logging
import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy import linalg

from ..config import NumericPolicy, settings
from ..exceptions import (
    InfeasibleStepError,
    InvalidInputError,
    NumericalError,
    RankDeficiencyError,
    SingularBarrierError,
)
from ..models.sparsifier import BarrierState, IsotropicSet, SparseWeights, SparsifierParams

logger = logging.getLogger(__name__)


def _eigvalsh(A: np.ndarray) -> np.ndarray:
    return linalg.eigh(A, eigvals_only=True, check_finite=False)


def _barrier_gap_ok(gap: np.ndarray, scale: float, policy: NumericPolicy) -> bool:
    return bool(np.all(gap > policy.barrier_tol * max(1.0, abs(scale))))


def upper_potential(A: np.ndarray, u: float, policy: Optional[NumericPolicy] = None) -> float:
    """Φ^u(A) = trace((uI − A)⁻¹)"""
    policy = policy or settings.NUMERIC
    gaps = u - _eigvalsh(np.asarray(A, dtype=float))
    if not _barrier_gap_ok(gaps, u, policy):
        raise SingularBarrierError(f"barreira superior u={u} não está acima de λ_max(A)={u - gaps.min()}")
    return float(np.sum(1.0 / gaps))


def lower_potential(A: np.ndarray, l: float, policy: Optional[NumericPolicy] = None) -> float:
    """Φ_l(A) = trace((A − lI)⁻¹)"""
    policy = policy or settings.NUMERIC
    gaps = _eigvalsh(np.asarray(A, dtype=float)) - l
    if not _barrier_gap_ok(gaps, l, policy):
        raise SingularBarrierError(f"barreira inferior l={l} não está abaixo de λ_min(A)={l + gaps.min()}")
    return float(np.sum(1.0 / gaps))


def _bounds_from_projection(P2: np.ndarray, lam: np.ndarray, state: BarrierState,
                            params: SparsifierParams) -> Tuple[np.ndarray, np.ndarray]:
    # P2[i, j] = (v_i · q_j)², q_j autovetores de A
    u_next = state.u + params.delta_U
    l_next = state.l + params.delta_L

    up = 1.0 / (u_next - lam)
    upper_drop = np.sum(1.0 / (state.u - lam)) - np.sum(up)
    U = (P2 @ up**2) / upper_drop + P2 @ up

    lo = 1.0 / (lam - l_next)
    lower_drop = np.sum(lo) - np.sum(1.0 / (lam - state.l))
    L = (P2 @ lo**2) / lower_drop - P2 @ lo
    return U, L


def _checked_spectrum(state: BarrierState, params: SparsifierParams,
                      policy: NumericPolicy) -> Tuple[np.ndarray, np.ndarray]:
    lam, Q = linalg.eigh(state.A, check_finite=False)
    l_next = state.l + params.delta_L
    if not _barrier_gap_ok(state.u - lam, state.u, policy):
        raise SingularBarrierError(f"λ_max(A)={lam[-1]} atingiu a barreira superior u={state.u}")
    if not _barrier_gap_ok(lam - l_next, l_next, policy):
        raise SingularBarrierError(
            f"λ_min(A)={lam[0]} não está acima da barreira deslocada l'={l_next}"
        )
    return lam, Q


def candidate_bounds(state: BarrierState, params: SparsifierParams, vectors: np.ndarray,
                     policy: Optional[NumericPolicy] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Calcula (U(v_i), L(v_i)) para todas as linhas de `vectors`"""
    policy = policy or settings.NUMERIC
    lam, Q = _checked_spectrum(state, params, policy)
    P2 = np.square(np.asarray(vectors, dtype=float) @ Q)
    return _bounds_from_projection(P2, lam, state, params)


def step_bounds(state: BarrierState, params: SparsifierParams, v: np.ndarray,
                policy: Optional[NumericPolicy] = None) -> Tuple[float, float]:
    """
    Funcionais de admissibilidade (U, L) de um candidato v.

    Qualquer peso t com U <= 1/t <= L mantém os dois potenciais não crescentes
    após somar t·vvᵀ e deslocar as barreiras.
    """
    v = np.asarray(v, dtype=float).reshape(1, -1)
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("candidato com entradas não finitas")
    U, L = candidate_bounds(state, params, v, policy)
    return float(U[0]), float(L[0])


def _scan_chunk(start: int, vectors: np.ndarray, Q: np.ndarray, lam: np.ndarray,
                state: BarrierState, params: SparsifierParams, tol: float):
    P2 = np.square(vectors @ Q)
    U, L = _bounds_from_projection(P2, lam, state, params)
    admissible = (L > 0) & (U > 0) & (U <= L + tol)
    sums = (float(U.sum()), float(L.sum()))
    if not np.any(admissible):
        return -np.inf, -1, np.nan, np.nan, sums
    gap = np.where(admissible, L - U, -np.inf)
    j = int(np.argmax(gap))
    return float(gap[j]), start + j, float(U[j]), float(L[j]), sums


def _best_candidate(state: BarrierState, iso: IsotropicSet, params: SparsifierParams,
                    policy: NumericPolicy, n_jobs: int) -> Tuple[int, float, float]:
    lam, Q = _checked_spectrum(state, params, policy)
    V = iso.vectors
    tol = policy.admissibility_tol

    if n_jobs == 1 or iso.M < settings.PARALLEL_MIN_CANDIDATES:
        results = [_scan_chunk(0, V, Q, lam, state, params, tol)]
    else:
        bounds = np.linspace(0, iso.M, num=abs(n_jobs) * 4 + 1, dtype=int)
        results = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(_scan_chunk)(a, V[a:b], Q, lam, state, params, tol)
            for a, b in zip(bounds[:-1], bounds[1:]) if b > a
        )

    # Redução por (gap, índice): independe do particionamento
    best = (-np.inf, -1, np.nan, np.nan)
    for gap, index, U, L, _ in results:
        if index >= 0 and (best[1] < 0 or gap > best[0] or (gap == best[0] and index < best[1])):
            best = (gap, index, U, L)

    if best[1] < 0:
        sum_U = sum(res[4][0] for res in results)
        sum_L = sum(res[4][1] for res in results)
        raise InfeasibleStepError(state.step, f"Σ U = {sum_U:.6g} > Σ L = {sum_L:.6g}")
    return best[1], best[2], best[3]


def select_and_add(state: BarrierState, iso: IsotropicSet, params: SparsifierParams,
                   policy: Optional[NumericPolicy] = None,
                   n_jobs: Optional[int] = None) -> BarrierState:
    """Executa um passo: escolhe o candidato de maior folga L − U e o adiciona"""
    policy = policy or settings.NUMERIC
    n_jobs = n_jobs if n_jobs is not None else settings.N_JOBS
    if state.step >= params.N:
        raise InvalidInputError(f"passo {state.step} além do total N={params.N}")

    index, U, L = _best_candidate(state, iso, params, policy, n_jobs)
    t = 1.0 / U if abs(U - L) <= policy.weight_tie_tol else 2.0 / (U + L)

    v = iso.vectors[index]
    s = state.s.copy()
    s[index] += t
    new_state = BarrierState(
        A=state.A + t * np.outer(v, v),
        u=state.u + params.delta_U,
        l=state.l + params.delta_L,
        s=s,
        step=state.step + 1,
        last_index=index,
        last_weight=t,
    )

    # Os potenciais não podem crescer
    before = (upper_potential(state.A, state.u, policy), lower_potential(state.A, state.l, policy))
    after = (upper_potential(new_state.A, new_state.u, policy),
             lower_potential(new_state.A, new_state.l, policy))
    if after[0] > before[0] + policy.potential_tol or after[1] > before[1] + policy.potential_tol:
        raise InfeasibleStepError(
            state.step,
            f"potenciais cresceram: superior {before[0]:.3e} -> {after[0]:.3e}, "
            f"inferior {before[1]:.3e} -> {after[1]:.3e}",
        )

    logger.debug(
        f"passo {new_state.step}/{params.N}: índice {index}, t={t:.4g}, "
        f"u={new_state.u:.4g}, l={new_state.l:.4g}"
    )
    return new_state


def rescale_to_unit_floor(state: BarrierState, iso: IsotropicSet,
                          policy: Optional[NumericPolicy] = None,
                          theta: Optional[float] = None) -> SparseWeights:
    """Divide os pesos por λ_min(Ã) para fixar o piso espectral em 1"""
    policy = policy or settings.NUMERIC
    sigma = np.flatnonzero(state.s > 0)
    V = iso.vectors[sigma]
    A_tilde = V.T @ (state.s[sigma][:, None] * V)
    lam = _eigvalsh(A_tilde)
    if lam[0] <= policy.spectral_floor_tol * max(lam[-1], 1.0):
        raise RankDeficiencyError(
            f"Ã singular após {state.step} passos (λ_min={lam[0]:.3e}); "
            "o laço deveria garantir λ_min > l_N > 0"
        )

    rescale = float(lam[0])
    kappa = float(lam[-1] / lam[0])
    return SparseWeights(
        sigma=sigma,
        weights=state.s[sigma] / rescale,
        rescale=rescale,
        kappa=kappa,
        lambda_min=1.0,
        lambda_max=kappa,
        theta=theta if theta is not None else float("nan"),
        steps=state.step,
    )


def sparsify(iso: IsotropicSet, theta: float, policy: Optional[NumericPolicy] = None,
             n_jobs: Optional[int] = None, trace: Optional[List[Dict]] = None) -> SparseWeights:
    """
    Esparsificador por barreiras.

    Executa N = ⌈r/θ²⌉ passos a partir de A = 0, u₀ = r/eps_U, l₀ = −r/eps_L e
    reescala o resultado: para todo x, ‖x‖² <= xᵀÃx <= ((1+θ)/(1−θ))²‖x‖².
    Se `trace` for uma lista, recebe um registro por passo (ver trace_frame).
    """
    policy = policy or settings.NUMERIC
    if not 0.0 < theta < 1.0:
        raise InvalidInputError(f"theta deve estar em (0, 1), recebido {theta}")

    params = SparsifierParams.from_theta(theta, iso.r, policy.ceil_slack)
    state = BarrierState.initial(params, iso.M)
    logger.info(f"Esparsificando: M={iso.M}, r={iso.r}, theta={theta:.4g}, N={params.N} passos")

    try:
        if trace is not None:
            trace.append(_trace_record(state, policy))
        while state.step < params.N:
            state = select_and_add(state, iso, params, policy, n_jobs)
            if trace is not None:
                trace.append(_trace_record(state, policy))
    except linalg.LinAlgError as e:
        logger.error(f"Erro no esparsificador: {str(e)}")
        raise NumericalError(f"decomposição espectral falhou no passo {state.step}: {e}") from e
    except Exception as e:
        logger.error(f"Erro no esparsificador: {str(e)}")
        raise

    result = rescale_to_unit_floor(state, iso, policy, theta=theta)
    if result.n > min(iso.M, params.N):
        raise NumericalError(f"|σ|={result.n} excede min(M, N)={min(iso.M, params.N)}")
    if result.kappa > params.kappa_bound + 1e-6:
        raise NumericalError(f"kappa={result.kappa:.9f} acima de ((1+θ)/(1−θ))²={params.kappa_bound:.9f}")

    logger.info(f"Esparsificador concluído: |σ|={result.n}, kappa={result.kappa:.6f}")
    return result


def _trace_record(state: BarrierState, policy: NumericPolicy) -> Dict:
    lam = _eigvalsh(state.A)
    return {
        'step': state.step,
        'u': state.u,
        'l': state.l,
        'upper_potential': upper_potential(state.A, state.u, policy),
        'lower_potential': lower_potential(state.A, state.l, policy),
        'lambda_min': float(lam[0]),
        'lambda_max': float(lam[-1]),
        'index': state.last_index,
        'weight': state.last_weight,
    }


def trace_frame(trace: List[Dict]) -> pd.DataFrame:
    """Converte o registro de passos em DataFrame"""
    return pd.DataFrame.from_records(trace)


def make_isotropic(vectors: np.ndarray, policy: Optional[NumericPolicy] = None) -> IsotropicSet:
    """Branqueamento V ↦ V (VᵀV)^{-1/2}, reduzindo A = Σ v_i v_iᵀ ao caso A = I"""
    policy = policy or settings.NUMERIC
    V = np.asarray(vectors, dtype=float)
    lam, Q = linalg.eigh(V.T @ V)
    if lam[0] <= V.shape[0] * np.finfo(float).eps * lam[-1]:
        raise RankDeficiencyError("os vetores não geram R^r; não é possível torná-los isotrópicos")
    inv_sqrt = (Q / np.sqrt(lam)) @ Q.T
    return IsotropicSet(vectors=V @ inv_sqrt, tol=policy.isotropy_tol)
