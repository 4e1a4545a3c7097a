"""
Geração de subespaços e leitura/escrita de arquivos (CSV de bases, JSON de
embeddings e relatórios)
"""

from pathlib import Path
from typing import Union
import json
import logging
import numpy as np
import pandas as pd
from pydantic import ValidationError

from ..exceptions import DataIOError, InvalidInputError
from ..models.embedding import Embedding
from ..models.subspace import Subspace

logger = logging.getLogger(__name__)

SUBSPACE_KINDS = ('gaussian', 'l2k', 'coordinate')
GENERATOR_NAME = "numpy.random.Generator(PCG64)"


def gen_subspace(kind: str, k: int, m: int, seed: int = 0) -> Subspace:
    """
    Gera um subespaço k-dimensional de ℓ_p^m.

    - gaussian: matriz m×k normal i.i.d.
    - l2k: gaussian com colunas ortonormalizadas em ℓ₂ (cópia quase isométrica de ℓ_2^k)
    - coordinate: e_1, ..., e_k
    """
    if kind not in SUBSPACE_KINDS:
        raise InvalidInputError(f"tipo de subespaço desconhecido: {kind} (use {', '.join(SUBSPACE_KINDS)})")
    if not 1 <= k <= m:
        raise InvalidInputError(f"exige 1 <= k <= m (k={k}, m={m})")
    if not 0 <= seed < 2**64:
        raise InvalidInputError(f"seed deve ser um inteiro de 64 bits sem sinal, recebido {seed}")

    if kind == 'coordinate':
        basis = np.eye(m, k)
    else:
        rng = np.random.default_rng(seed)
        basis = rng.standard_normal((m, k))
        if kind == 'l2k':
            basis, _ = np.linalg.qr(basis)
    return Subspace(basis=basis)


def read_subspace_csv(path: Union[str, Path]) -> Subspace:
    """Lê uma base: uma linha por coordenada, uma coluna por vetor, sem cabeçalho"""
    path = Path(path)
    if not path.exists():
        raise DataIOError(f"Arquivo não encontrado: {path}")
    try:
        df = pd.read_csv(path, header=None, dtype=float, skipinitialspace=True,
                         float_precision='round_trip')
    except (ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataIOError(f"CSV malformado em {path}: {e}") from e
    except OSError as e:
        raise DataIOError(f"Erro ao ler {path}: {e}") from e

    if df.isna().any().any():
        raise DataIOError(f"CSV malformado em {path}: valores ausentes")
    logger.info(f"Base carregada de {path}: m={df.shape[0]}, k={df.shape[1]}")
    try:
        return Subspace(basis=df.to_numpy())
    except ValidationError as e:
        raise InvalidInputError(f"base inválida em {path}: {e}") from e


def write_subspace_csv(sub: Subspace, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(sub.basis).to_csv(path, header=False, index=False, float_format='%.17g')
    return path


def write_json(data: dict, path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f, ensure_ascii=False, indent=2)
    except OSError as e:
        raise DataIOError(f"Erro ao gravar {path}: {e}") from e
    return path


def save_embedding(emb: Embedding, path: Union[str, Path]) -> Path:
    path = write_json(emb.to_dict(), path)
    logger.info(f"Embedding salvo em {path}")
    return path


def load_embedding(path: Union[str, Path]) -> Embedding:
    path = Path(path)
    if not path.exists():
        raise DataIOError(f"Arquivo não encontrado: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise DataIOError(f"JSON inválido em {path}: {e}") from e
    try:
        return Embedding.from_dict(data)
    except (KeyError, TypeError, ValidationError) as e:
        raise DataIOError(f"Embedding malformado em {path}: {e}") from e
