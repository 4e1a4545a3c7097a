from .subspace import Subspace, LiftedSpace, MonomialIndex
from .sparsifier import IsotropicSet, SparsifierParams, BarrierState, SparseWeights
from .embedding import Embedding, DistortionReport, RunReport, ScalingPoint

__all__ = [
    "Subspace",
    "LiftedSpace",
    "MonomialIndex",
    "IsotropicSet",
    "SparsifierParams",
    "BarrierState",
    "SparseWeights",
    "Embedding",
    "DistortionReport",
    "RunReport",
    "ScalingPoint",
]
