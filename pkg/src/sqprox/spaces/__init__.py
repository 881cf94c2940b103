"""Hadamard model spaces and randomized checks of their geometry."""

from .base import RandomSampler, Space
from .checks import AxiomReport, CheckResult, check_cat0, check_hyperbolic_axioms, check_quasilin
from .euclidean import Euclidean
from .fixtures import BrokenGeodesic, LInfPlane
from .hyperboloid import Hyperboloid
from .product import Product
from .registry import load_tree_fixture, parse_point, parse_space, registered_spaces
from .tree import Tree, TreeBatch, TreePoint


def distance(space, x, y):
    return space.distance(x, y)


def geodesic(space, x, y, lam):
    """The point ``(1 - lam) x (+) lam y`` on the geodesic from ``x`` to ``y``."""
    return space.geodesic(x, y, lam)


def quasilin(space, x, y, u, v):
    return space.quasilin(x, y, u, v)


__all__ = [
    "AxiomReport",
    "BrokenGeodesic",
    "CheckResult",
    "Euclidean",
    "Hyperboloid",
    "LInfPlane",
    "Product",
    "RandomSampler",
    "Space",
    "Tree",
    "TreeBatch",
    "TreePoint",
    "check_cat0",
    "check_hyperbolic_axioms",
    "check_quasilin",
    "distance",
    "geodesic",
    "load_tree_fixture",
    "parse_point",
    "parse_space",
    "quasilin",
    "registered_spaces",
]
