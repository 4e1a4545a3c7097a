import numpy as np


def frozen_array(value, dtype=np.float64, ndim: int | None = None) -> np.ndarray:
    """Copia para um ndarray somente-leitura, validando dimensão e finitude"""
    arr = np.array(value, dtype=dtype, copy=True)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"esperado array com {ndim} dimensões, recebido {arr.ndim}")
    if arr.dtype.kind == 'f' and not np.all(np.isfinite(arr)):
        raise ValueError("array contém valores não finitos")
    arr.setflags(write=False)
    return arr
