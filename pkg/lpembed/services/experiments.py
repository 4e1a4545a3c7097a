"""
Varredura de escala: n em função de k para p e eps fixos
"""

from typing import Optional
import logging
import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from ..config import settings
from ..exceptions import InvalidInputError
from ..models.embedding import ScalingPoint
from .embedder import embed
from .subspace_io import gen_subspace

logger = logging.getLogger(__name__)

SCALING_COLUMNS = ['k', 'seed', 'D', 'r', 'n', 'cert_upper']


def _scaling_point(k: int, seed: int, m: int, p: int, eps: float) -> ScalingPoint:
    sub = gen_subspace('gaussian', k, m, seed)
    # Paralelismo só no nível da varredura
    emb = embed(sub, p, eps, n_jobs=1)
    return ScalingPoint(k=k, seed=seed, D=emb.D, r=emb.r, n=emb.n, cert_upper=emb.cert_upper)


def run_scaling(p: int, eps: float, kmin: int, kmax: int, m: int, seed: int,
                seeds: int = 1, n_jobs: Optional[int] = None) -> pd.DataFrame:
    """Executa embed para cada (k, semente) e devolve as linhas em ordem de k"""
    if not 1 <= kmin <= kmax <= m:
        raise InvalidInputError(f"exige 1 <= kmin <= kmax <= m (kmin={kmin}, kmax={kmax}, m={m})")
    if seeds < 1:
        raise InvalidInputError(f"seeds deve ser >= 1, recebido {seeds}")

    n_jobs = n_jobs if n_jobs is not None else settings.N_JOBS
    tasks = [(k, seed + j) for k in range(kmin, kmax + 1) for j in range(seeds)]
    logger.info(f"Varredura de escala: p={p}, eps={eps}, k={kmin}..{kmax}, m={m}, {len(tasks)} execuções")

    points = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_scaling_point)(k, s, m, p, eps) for k, s in tasks
    )
    return pd.DataFrame([pt.model_dump() for pt in points], columns=SCALING_COLUMNS)


def growth_slope(df: pd.DataFrame) -> Optional[float]:
    """Inclinação de mínimos quadrados de log n contra log k (None com um único k)"""
    if df['k'].nunique() < 2:
        return None
    slope, _ = np.polyfit(np.log(df['k'].to_numpy(float)), np.log(df['n'].to_numpy(float)), 1)
    return float(slope)
