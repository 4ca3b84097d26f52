"""Differentiation index, order and transcendence bases of polynomial DAE systems."""

from .diffpoly import DiffPoly, JetVar
from .indexcore import (
    MuSequence,
    RankOptions,
    StabilizationError,
    differentiation_index,
    hat_index,
    modified_index,
    mu_sequence,
)
from .invariants import (
    check_order_bounds,
    greenspan_bound,
    hilbert_kolchin,
    ideal_order,
    jacobi_bound,
    ritt_bound,
)
from .relfind import RelationQuery, implicit_relation
from .sysmodel import DAESystem, localize, reduce_to_first_order, tilde_transform
from .sysparse import load_system, load_system_file, parse_expression
from .transbasis import differential_transcendence_basis, verify_order_preservation

__version__ = "0.1.0"
