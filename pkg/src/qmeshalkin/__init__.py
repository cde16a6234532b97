"""Exact q-analog Meshalkin/LYM computations over finite projective geometries."""

from .gfq import FieldSpec, make_field
from .meshalkin import (
    BoundMode,
    Family,
    LymMode,
    MeshalkinSequence,
    ProblemParams,
    SequenceMode,
    bound,
    chain_stats,
    check_chain_condition,
    enumerate_sequences,
    hkr_apply,
    is_meshalkin,
    lym_sum,
    rota_harper_lift,
)
from .projgeom import Flat, Lattice, canonicalize, complements, enumerate_flats, join, leq, meet
from .qnum import (
    balanced_composition,
    enumerate_compositions,
    gaussian_binomial,
    gaussian_multinomial,
    q_factorial,
    s2,
    weighted_count,
)

__version__ = "0.1.0"

__all__ = [
    "BoundMode",
    "Family",
    "FieldSpec",
    "Flat",
    "Lattice",
    "LymMode",
    "MeshalkinSequence",
    "ProblemParams",
    "SequenceMode",
    "balanced_composition",
    "bound",
    "canonicalize",
    "chain_stats",
    "check_chain_condition",
    "complements",
    "enumerate_compositions",
    "enumerate_flats",
    "enumerate_sequences",
    "gaussian_binomial",
    "gaussian_multinomial",
    "hkr_apply",
    "is_meshalkin",
    "join",
    "leq",
    "lym_sum",
    "make_field",
    "meet",
    "q_factorial",
    "rota_harper_lift",
    "s2",
    "weighted_count",
]
