"""Space descriptors (``euclidean:2``, ``tree:path3``, ...) and point literals."""

from __future__ import annotations

import os
from importlib import resources

import numpy as np

from ..errors import InvalidPoint, UnknownDescriptor
from .euclidean import Euclidean
from .fixtures import BrokenGeodesic, LInfPlane
from .hyperboloid import Hyperboloid
from .product import Product
from .tree import Tree, TreePoint

TREE_FIXTURES = ("path3", "spider")

_tree_cache = {}


def load_tree_fixture(name):
    if name not in _tree_cache:
        text = resources.files("sqprox.data").joinpath(f"{name}.tree").read_text()
        _tree_cache[name] = Tree.from_text(text, name=name)
    return _tree_cache[name]


def _dim(arg, desc):
    try:
        n = int(arg)
    except ValueError:
        raise UnknownDescriptor(f"bad dimension in space descriptor {desc!r}") from None
    if n < 1:
        raise UnknownDescriptor(f"dimension must be >= 1 in {desc!r}")
    return n


def parse_space(desc):
    """Build a space from its descriptor string."""
    desc = desc.strip()
    kind, _, arg = desc.partition(":")
    kind = kind.strip().lower()
    if kind == "product":
        parts = [p for p in arg.split("+") if p.strip()]
        if not parts:
            raise UnknownDescriptor("product needs at least one component")
        return Product([parse_space(p) for p in parts])
    if kind == "euclidean":
        return Euclidean(_dim(arg, desc))
    if kind == "hyperboloid":
        return Hyperboloid(_dim(arg, desc))
    if kind == "linf":
        return LInfPlane(_dim(arg, desc))
    if kind == "broken-euclidean":
        return BrokenGeodesic(_dim(arg, desc))
    if kind == "tree":
        arg = arg.strip()
        if arg in TREE_FIXTURES:
            return load_tree_fixture(arg)
        if arg and os.path.exists(arg):
            return Tree.from_file(arg)
        raise UnknownDescriptor(f"unknown tree {arg!r} (fixtures: {', '.join(TREE_FIXTURES)})")
    raise UnknownDescriptor(f"unknown space descriptor {desc!r}")


def registered_spaces():
    """Every space the suite checks, in registration order."""
    return [
        Euclidean(1),
        Euclidean(2),
        Euclidean(3),
        Hyperboloid(2),
        load_tree_fixture("path3"),
        load_tree_fixture("spider"),
        Product([Euclidean(1), Hyperboloid(2)]),
    ]


def _floats(text):
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise InvalidPoint(f"bad coordinate list {text!r}") from None


def parse_point(space, text):
    """Parse a point literal for ``space``.

    Euclidean: ``1,2``. Hyperboloid: spatial coordinates ``x1,..,xn`` (the
    time coordinate is solved for) or all ``n+1`` coordinates. Tree: ``v3``
    for a vertex or ``edge@offset``. Product: components joined by ``;``.
    ``origin`` is accepted everywhere.
    """
    text = str(text).strip()
    if text == "origin":
        return space.origin()
    if isinstance(space, Product):
        parts = text.split(";")
        if len(parts) != len(space.components):
            raise InvalidPoint(f"expected {len(space.components)} ';'-separated components in {text!r}")
        return space.validate(tuple(parse_point(c, p) for c, p in zip(space.components, parts)))
    if isinstance(space, Tree):
        if text.startswith("v"):
            try:
                return space.vertex_point(int(text[1:]))
            except ValueError:
                raise InvalidPoint(f"bad vertex literal {text!r}") from None
        edge, sep, off = text.partition("@")
        if not sep:
            raise InvalidPoint(f"tree points are 'v<id>' or '<edge>@<offset>', got {text!r}")
        try:
            return space.validate(TreePoint(int(edge), float(off)))
        except ValueError:
            raise InvalidPoint(f"bad tree point literal {text!r}") from None
    vals = _floats(text)
    if isinstance(space, Hyperboloid) and len(vals) == space.dim:
        return space.lift(vals)
    return space.validate(np.array(vals))
