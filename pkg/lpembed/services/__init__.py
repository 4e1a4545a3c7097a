from .bss_core import (
    lower_potential,
    make_isotropic,
    rescale_to_unit_floor,
    select_and_add,
    sparsify,
    step_bounds,
    trace_frame,
    upper_potential,
)
from .lift import (
    build_lift,
    dimension_bounds,
    enumerate_monomials,
    monomial_vector,
    normalize_basis,
    orthonormal_column_basis,
)
from .embedder import (
    apply_embedding,
    capacity,
    certify,
    embed,
    empirical_distortion,
    sample_coordinates,
    size_bound,
)
from .subspace_io import gen_subspace, load_embedding, read_subspace_csv, save_embedding
from .experiments import growth_slope, run_scaling
