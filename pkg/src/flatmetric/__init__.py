"""Wasserstein-type and flat (bounded-Lipschitz) distances between discrete
measures on the real line."""
from .discretize import IntervalMeasureSource, discretization_error_bound, discretize
from .envelope import (
    ConcaveEnvelope,
    env_add_linear,
    env_clip_to_unit,
    env_max_filter,
    env_supremum,
)
from .flat import flat_distance
from .measure import (
    Atom,
    DiscreteMeasure,
    MeasureError,
    NegativeMass,
    NonFiniteInput,
    ParseError,
    SignedAtomList,
    canonicalize,
    difference,
    parse_measure,
    radon_distance,
    read_measure,
    scale_mass,
    total_mass,
    translate,
    write_measure,
)
from .oracle import DualConstraintSpec, dual_lp_oracle, transport_oracle_w1
from .wasserstein import (
    DistanceValue,
    centralized_w1,
    flat_upper_bound,
    normalized_w1,
    w1_distance,
)

__version__ = "0.1.0"
