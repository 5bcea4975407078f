"""Super convex spaces, the Giry monad on finite measurable spaces, barycenter
maps and checkers for the laws relating them."""

from .core import (
    DEFAULT_POLICY,
    INF,
    AlternatingWitness,
    DivergentWitness,
    EvalPolicy,
    FinitePrefix,
    FiniteSupport,
    Geometric,
    delta,
    points,
    rinf_mix,
)
from .giry import FinMeasurableSpace, Measure, dirac, measure_mix, multiply, pushforward
from .spaces import SJ, Disc, FinDist, InfUnitInterval, Product, RInfSpace, SemiDirect, generator_family, mix
from .algebra import BarycenterOf, Table, barycenter, check_laws, induced_mix, resolve_generalized_point
from .components import MonotoneMap, comp, disc_map, no_affine_to_two_witness

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_POLICY",
    "INF",
    "AlternatingWitness",
    "DivergentWitness",
    "EvalPolicy",
    "FinitePrefix",
    "FiniteSupport",
    "Geometric",
    "delta",
    "points",
    "rinf_mix",
    "FinMeasurableSpace",
    "Measure",
    "dirac",
    "measure_mix",
    "multiply",
    "pushforward",
    "SJ",
    "Disc",
    "FinDist",
    "InfUnitInterval",
    "Product",
    "RInfSpace",
    "SemiDirect",
    "generator_family",
    "mix",
    "BarycenterOf",
    "Table",
    "barycenter",
    "check_laws",
    "induced_mix",
    "resolve_generalized_point",
    "MonotoneMap",
    "comp",
    "disc_map",
    "no_affine_to_two_witness",
]
