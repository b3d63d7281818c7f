"""Exact computations with polynomial functors over prime fields on truncated additive categories."""

from .abgroups import AbGroup, AbHom, parse_group, stationarity, stationarity_index
from .category import GuardError, Skeleton, SkeletonSpec, build_skeleton, skeleton
from .doldpuppe import build_dcomplex, dold_report, dual_dcomplex
from .expr import ExprError, parse_functor
from .functors import (
    AdditiveTensor,
    Constant,
    DirectSum,
    DividedPower,
    Dual,
    ExteriorPower,
    Functor,
    GradedPiece,
    HomLinearization,
    NatTransform,
    ReducedLinearization,
    SymmetricPower,
    Tensor,
    TruncatedGroupAlgebra,
    natural_transformations,
)
from .groupalg import pol_space, s_graded_dims
from .homological import Resolution, comparison, derived_pd, excl_class_check, ext
from .koszul import build_koszul, classical_koszul_and_dual, verify_vanishing
from .linalg import ChainComplex, Echelon
from .polynomial import p_trunc, poly_degree, q_trunc

__version__ = "0.1.0"
