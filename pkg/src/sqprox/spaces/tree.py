"""Finite metric trees (R-trees built from weighted graph trees).

A point is a position on an edge, ``TreePoint(edge, offset)``, where the
offset is measured from the first endpoint ``u`` of the edge as listed in
the tree description. Vertices have a canonical representative: the
lowest-numbered incident edge, at offset 0 when the vertex is that edge's
``u`` endpoint and at the edge length otherwise.

Internally the tree is rooted at vertex 0 and every point is stored as
``(w, a)``: ``w`` is the lower endpoint of the edge carrying the point and
``a`` the distance climbed from ``w`` towards its parent, with
``0 <= a < length(edge above w)``. Distances and geodesics are computed
from depths and a lowest-common-ancestor table, so they are exact up to
sums of edge lengths.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..errors import InvalidPoint, InvalidSpace, ParseError
from .base import Space, check_lambda_array


@dataclass(frozen=True)
class TreePoint:
    edge: int
    offset: float


class TreeBatch(NamedTuple):
    edges: np.ndarray
    offsets: np.ndarray


class Tree(Space):
    kind = "tree"

    def __init__(self, n_vertices, edges, name=None):
        n_vertices = int(n_vertices)
        if n_vertices < 2:
            raise InvalidSpace("a tree needs at least two vertices")
        edges = [(int(u), int(v), float(length)) for u, v, length in edges]
        if len(edges) != n_vertices - 1:
            raise InvalidSpace(
                f"a tree on {n_vertices} vertices has {n_vertices - 1} edges, got {len(edges)}"
            )
        adj = [[] for _ in range(n_vertices)]
        for e, (u, v, length) in enumerate(edges):
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise InvalidSpace(f"edge {e} references a vertex outside 0..{n_vertices - 1}")
            if u == v:
                raise InvalidSpace(f"edge {e} is a loop")
            if not (np.isfinite(length) and length > 0):
                raise InvalidSpace(f"edge {e} has non-positive length {length}")
            adj[u].append((v, e))
            adj[v].append((u, e))

        self.n_vertices = n_vertices
        self.edges = edges
        self.name = name
        self.adj = adj

        parent = np.full(n_vertices, -1, dtype=np.int64)
        parent_edge = np.full(n_vertices, -1, dtype=np.int64)
        depth = np.zeros(n_vertices)
        seen = np.zeros(n_vertices, dtype=bool)
        seen[0] = True
        order = [0]
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v, e in sorted(adj[u]):
                if seen[v]:
                    continue
                seen[v] = True
                parent[v] = u
                parent_edge[v] = e
                depth[v] = depth[u] + edges[e][2]
                order.append(v)
                queue.append(v)
        if not seen.all():
            raise InvalidSpace("tree description is not connected")

        self.parent = parent
        self.parent_edge = parent_edge
        self.depth = depth
        self.length = np.array([e[2] for e in edges])
        self.above = np.where(parent_edge >= 0, self.length[np.maximum(parent_edge, 0)], 0.0)
        self.child = np.array([v if parent[v] == u else u for u, v, _ in edges], dtype=np.int64)
        self.child_is_v = np.array([parent[v] == u for u, v, _ in edges], dtype=bool)

        # ancestor chains, padded with -1 / -inf
        chains = []
        for w in range(n_vertices):
            chain = [w]
            while parent[chain[-1]] >= 0:
                chain.append(int(parent[chain[-1]]))
            chains.append(chain)
        width = max(len(c) for c in chains)
        self.anc = np.full((n_vertices, width), -1, dtype=np.int64)
        self.anc_depth = np.full((n_vertices, width), -np.inf)
        for w, chain in enumerate(chains):
            self.anc[w, : len(chain)] = chain
            self.anc_depth[w, : len(chain)] = depth[chain]
        ancestor_sets = [set(c) for c in chains]
        lca = np.zeros((n_vertices, n_vertices), dtype=np.int64)
        for i in range(n_vertices):
            for j in range(n_vertices):
                for a in chains[i]:
                    if a in ancestor_sets[j]:
                        lca[i, j] = a
                        break
        self.lca = lca

        self.canon_edge = np.zeros(n_vertices, dtype=np.int64)
        self.canon_offset = np.zeros(n_vertices)
        for w in range(n_vertices):
            e = min(e for _, e in adj[w])
            self.canon_edge[w] = e
            self.canon_offset[w] = 0.0 if edges[e][0] == w else edges[e][2]

    # -- construction from text ---------------------------------------------
    @classmethod
    def from_text(cls, text, name=None):
        """Parse the ``tree <n>`` / ``u v length`` description format."""
        header = None
        edges = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if header is None:
                if len(parts) != 2 or parts[0] != "tree":
                    raise ParseError("first line must be 'tree <num_vertices>'", lineno)
                try:
                    header = int(parts[1])
                except ValueError:
                    raise ParseError(f"bad vertex count {parts[1]!r}", lineno) from None
                if header < 0:
                    raise ParseError("vertex count must be nonnegative", lineno)
                continue
            if len(parts) != 3:
                raise ParseError(f"expected 'u v length', got {line!r}", lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
                length = float(parts[2])
            except ValueError:
                raise ParseError(f"expected 'u v length', got {line!r}", lineno) from None
            if u < 0 or v < 0:
                raise ParseError("vertex ids must be nonnegative integers", lineno)
            if not length > 0:
                raise ParseError(f"edge length must be positive, got {parts[2]}", lineno)
            edges.append((u, v, length))
        if header is None:
            raise ParseError("empty tree description")
        return cls(header, edges, name=name)

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            return cls.from_text(fh.read(), name=str(path))

    def to_text(self):
        lines = [f"tree {self.n_vertices}"]
        lines += [f"{u} {v} {length!r}" for u, v, length in self.edges]
        return "\n".join(lines) + "\n"

    @property
    def descriptor(self):
        return f"tree:{self.name}" if self.name else "tree:<inline>"

    # -- conversions -----------------------------------------------------------
    def _internal(self, X):
        e = np.asarray(X.edges, dtype=np.int64)
        t = np.asarray(X.offsets, dtype=float)
        ell = self.length[e]
        w = self.child[e]
        a = np.clip(np.where(self.child_is_v[e], ell - t, t), 0.0, ell)
        top = a >= ell
        w = np.where(top, self.parent[w], w)
        a = np.where(top, 0.0, a)
        return w, a

    def _public(self, w, a):
        w = np.asarray(w, dtype=np.int64)
        a = np.asarray(a, dtype=float)
        vertex = (a <= 0.0) | (self.parent_edge[w] < 0)
        e = np.where(vertex, self.canon_edge[w], np.maximum(self.parent_edge[w], 0))
        ell = self.length[e]
        t = np.where(self.child_is_v[e], ell - a, a)
        t = np.where(vertex, self.canon_offset[w], np.clip(t, 0.0, ell))
        return TreeBatch(e, t)

    def vertex_point(self, v):
        v = int(v)
        if not 0 <= v < self.n_vertices:
            raise InvalidPoint(f"vertex {v} not in tree")
        return TreePoint(int(self.canon_edge[v]), float(self.canon_offset[v]))

    def vertex_batch(self):
        return self._public(np.arange(self.n_vertices), np.zeros(self.n_vertices))

    # -- point API -------------------------------------------------------------
    def validate(self, x):
        if isinstance(x, TreePoint):
            e, t = x.edge, x.offset
        elif isinstance(x, (tuple, list)) and len(x) == 2 and not hasattr(x[0], "__len__"):
            e, t = x
        else:
            raise InvalidPoint(f"{self.descriptor} expects TreePoint(edge, offset), got {x!r}")
        try:
            e_int = int(e)
            t = float(t)
        except (TypeError, ValueError):
            raise InvalidPoint(f"bad tree point {x!r}") from None
        if e_int != e or not 0 <= e_int < len(self.edges):
            raise InvalidPoint(f"edge id {e!r} not in tree")
        ell = self.length[e_int]
        if not (-1e-12 * ell <= t <= ell * (1 + 1e-12)):
            raise InvalidPoint(f"offset {t} outside [0, {ell}] on edge {e_int}")
        b = self._public(*self._internal(TreeBatch(np.array([e_int]), np.array([min(max(t, 0.0), ell)]))))
        return TreePoint(int(b.edges[0]), float(b.offsets[0]))

    def distance_batch(self, X, Y):
        wp, ap = self._internal(X)
        wq, aq = self._internal(Y)
        dp = self.depth[wp] - ap
        dq = self.depth[wq] - aq
        top = np.minimum(np.minimum(dp, dq), self.depth[self.lca[wp, wq]])
        return np.maximum(dp + dq - 2.0 * top, 0.0)

    def _on_chain(self, w, D):
        """Point at depth ``D`` on the root path of vertex ``w``."""
        D = np.minimum(D, self.depth[w])
        D = np.maximum(D, 0.0)
        cnt = np.sum(self.anc_depth[w] >= D[:, None], axis=1)
        u = self.anc[w, np.maximum(cnt - 1, 0)]
        a = np.maximum(self.depth[u] - D, 0.0)
        over = (a >= self.above[u]) & (self.parent[u] >= 0)
        u = np.where(over, self.parent[u], u)
        a = np.where(over, 0.0, a)
        return u, a

    def geodesic_batch(self, X, Y, lam):
        lam = check_lambda_array(lam)
        wp, ap = self._internal(X)
        wq, aq = self._internal(Y)
        dp = self.depth[wp] - ap
        dq = self.depth[wq] - aq
        top = np.minimum(np.minimum(dp, dq), self.depth[self.lca[wp, wq]])
        d = np.maximum(dp + dq - 2.0 * top, 0.0)
        s = lam * d
        up = dp - top
        on_p = s <= up
        D = np.where(on_p, dp - s, top + (s - up))
        w = np.where(on_p, wp, wq)
        u, a = self._on_chain(w, D)
        # exact endpoints
        u = np.where(lam == 0.0, wp, np.where(lam == 1.0, wq, u))
        a = np.where(lam == 0.0, ap, np.where(lam == 1.0, aq, a))
        return self._public(u, a)

    def sample(self, rng, n):
        e = rng.integers(0, len(self.edges), size=n)
        t = rng.uniform(size=n) * self.length[e]
        return self._public(*self._internal(TreeBatch(e, t)))

    def sample_ball(self, rng, n, center, radius):
        center = self.validate(center)
        parts_e, parts_t, have = [], [], 0
        for _ in range(1000):
            cand = self.sample(rng, max(4 * n, 64))
            keep = self.distance_batch(cand, self.repeat(center, len(cand.edges))) <= radius
            parts_e.append(cand.edges[keep])
            parts_t.append(cand.offsets[keep])
            have += int(keep.sum())
            if have >= n:
                break
        else:
            raise InvalidPoint("ball too small to sample by rejection")
        return TreeBatch(np.concatenate(parts_e)[:n], np.concatenate(parts_t)[:n])

    def take(self, X, i):
        return TreePoint(int(X.edges[i]), float(X.offsets[i]))

    def stack(self, points):
        pts = [self.validate(p) for p in points]
        return TreeBatch(
            np.array([p.edge for p in pts], dtype=np.int64),
            np.array([p.offset for p in pts], dtype=float),
        )

    def repeat(self, x, n):
        x = self.validate(x)
        return TreeBatch(np.full(n, x.edge, dtype=np.int64), np.full(n, x.offset))

    def batch_len(self, X):
        return len(X.edges)

    def origin(self):
        return self.vertex_point(0)

    # -- per-edge structure used by the prox solver ------------------------------
    def distances_to_vertices(self, z):
        z = self.validate(z)
        return self.distance_batch(self.vertex_batch(), self.repeat(z, self.n_vertices))

    def edge_profile(self, z, e, dv=None):
        """Distance from ``z`` to the point at offset ``t`` of edge ``e``.

        Returns ``(mode, value)``: ``("on", t0)`` means ``|t - t0|``;
        ``("u", du)`` means ``du + t``; ``("v", dv)`` means ``dv + length - t``.
        ``dv`` may carry precomputed vertex distances.
        """
        z = self.validate(z)
        u, v, ell = self.edges[e]
        if z.edge == e and 0.0 < z.offset < ell:
            return "on", z.offset
        if dv is None:
            dv = self.distances_to_vertices(z)
        if dv[u] <= dv[v]:
            return "u", float(dv[u])
        return "v", float(dv[v])

    @staticmethod
    def profile_distance(profile, ell, t):
        mode, val = profile
        if mode == "on":
            return np.abs(t - val)
        if mode == "u":
            return val + t
        return val + (ell - t)

    def edge_intervals(self, x, radius):
        """Offsets of each edge lying in the closed ball ``B(x, radius)``."""
        x = self.validate(x)
        dv = self.distances_to_vertices(x)
        out = []
        for e, (u, v, ell) in enumerate(self.edges):
            mode, val = self.edge_profile(x, e, dv)
            if mode == "on":
                lo, hi = max(0.0, val - radius), min(ell, val + radius)
            elif mode == "u":
                if val > radius:
                    continue
                lo, hi = 0.0, min(ell, radius - val)
            else:
                if val > radius:
                    continue
                lo, hi = max(0.0, ell - (radius - val)), ell
            out.append((e, lo, hi, (mode, val)))
        return out

    def ball_grid(self, x, radius, points_per_axis):
        x = self.validate(x)
        es, ts = [x.edge], [x.offset]
        spacing = 0.0
        for e, lo, hi, _ in self.edge_intervals(x, radius):
            m = int(points_per_axis)
            ticks = np.linspace(lo, hi, m) if hi > lo else np.array([lo])
            spacing = max(spacing, (hi - lo) / (m - 1))
            es.extend([e] * len(ticks))
            ts.extend(ticks.tolist())
        batch = self._public(*self._internal(TreeBatch(np.array(es), np.array(ts))))
        return batch, spacing

    def neighbors(self, p, h):
        p = self.validate(p)
        (w,), (a,) = self._internal(TreeBatch(np.array([p.edge]), np.array([p.offset])))
        out = []
        if a > 0.0:
            e = int(self.parent_edge[w])
            ell = self.length[e]
            for sign in (1.0, -1.0):
                t = min(max(p.offset + sign * h, 0.0), ell)
                out.append(self.validate(TreePoint(e, t)))
        else:
            for _, e in self.adj[w]:
                u, v, ell = self.edges[e]
                t = min(h, ell) if u == w else max(ell - h, 0.0)
                out.append(self.validate(TreePoint(e, t)))
        return out

    def point_to_json(self, x):
        x = self.validate(x)
        return {"edge": x.edge, "offset": x.offset}
