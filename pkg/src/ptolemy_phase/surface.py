"""Ideal triangulations of punctured surfaces and abstract cluster seeds.

A triangulation is stored as gluing data: each triangle is a triple of edge
labels listed counterclockwise, together with the punctures sitting at its
three corners.  Corner ``i`` of a triangle lies between side ``i`` and side
``i + 1``, so side ``i`` runs from corner ``i - 1`` to corner ``i``.

Orientation convention for the exchange matrix: at corner ``i`` the side
``i`` is on the left and side ``i + 1`` on the right (seen from the puncture
looking into the triangle).  Consequently a counterclockwise triangle
``(e, f, g)`` contributes +1 to each of eps[e][f], eps[f][g], eps[g][e].
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from .errors import InvalidTriangulation, SelfFoldedFlip

Label = Hashable


def _sort_key(x):
    return (type(x).__name__, x if isinstance(x, (int, str)) else repr(x))


@dataclass(frozen=True, eq=False)
class Triangulation:
    genus: int
    punctures: tuple
    edges: tuple
    triangles: tuple
    corners: tuple

    def __post_init__(self):
        object.__setattr__(self, "punctures", tuple(self.punctures))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "triangles", tuple(tuple(t) for t in self.triangles))
        object.__setattr__(self, "corners", tuple(tuple(c) for c in self.corners))
        self._validate()

    # -- validation -------------------------------------------------------
    def _validate(self):
        g, s = self.genus, len(self.punctures)
        if g < 0 or s < 1:
            raise InvalidTriangulation("need genus >= 0 and at least one puncture")
        if 2 - 2 * g - s >= 0:
            raise InvalidTriangulation("surface must have negative Euler characteristic")
        if len(self.edges) != 6 * g - 6 + 3 * s:
            raise InvalidTriangulation(f"expected {6 * g - 6 + 3 * s} edges, got {len(self.edges)}")
        if len(set(self.edges)) != len(self.edges):
            raise InvalidTriangulation("edge labels must be distinct")
        if len(set(self.punctures)) != s:
            raise InvalidTriangulation("puncture ids must be distinct")
        if len(self.triangles) != len(self.corners):
            raise InvalidTriangulation("one corner triple per triangle required")
        occ = self.occurrences()
        for e in self.edges:
            if len(occ.get(e, ())) != 2:
                raise InvalidTriangulation(f"edge {e!r} must appear in exactly two triangle slots")
        if set(occ) - set(self.edges):
            raise InvalidTriangulation("triangle refers to an unknown edge")
        pset = set(self.punctures)
        for c in self.corners:
            if len(c) != 3 or not set(c) <= pset:
                raise InvalidTriangulation("corners must name known punctures")
        for e, ((t1, i1), (t2, i2)) in occ.items():
            if self._start(t1, i1) != self._end(t2, i2) or self._end(t1, i1) != self._start(t2, i2):
                raise InvalidTriangulation(f"corner punctures inconsistent along edge {e!r}")
        classes = _vertex_classes(self.triangles)
        names = {}
        for cls, slots in classes.items():
            found = {self.corners[t][i] for t, i in slots}
            if len(found) != 1:
                raise InvalidTriangulation("one puncture carries two different names")
            names[cls] = found.pop()
        if len(set(names.values())) != len(names) or set(names.values()) != pset:
            raise InvalidTriangulation("corner gluing does not match the puncture list")

    def _start(self, t, i):
        return self.corners[t][(i - 1) % 3]

    def _end(self, t, i):
        return self.corners[t][i]

    # -- derived data -----------------------------------------------------
    def occurrences(self) -> dict:
        """edge -> list of (triangle index, side index)."""
        occ: dict = {}
        for ti, tri in enumerate(self.triangles):
            for i, e in enumerate(tri):
                occ.setdefault(e, []).append((ti, i))
        return occ

    def endpoints(self) -> dict:
        out = {}
        for e, slots in self.occurrences().items():
            t, i = slots[0]
            out[e] = (self._start(t, i), self._end(t, i))
        return out

    def is_self_folded(self, ti: int) -> bool:
        return len(set(self.triangles[ti])) < 3

    def has_self_folded(self) -> bool:
        return any(self.is_self_folded(i) for i in range(len(self.triangles)))

    def flippable(self, k) -> bool:
        (t1, _), (t2, _) = self.occurrences()[k]
        return t1 != t2 and not self.is_self_folded(t1) and not self.is_self_folded(t2)

    def canonical_key(self):
        tris = []
        for tri, cor in zip(self.triangles, self.corners):
            rots = [tuple((_sort_key(tri[(j + r) % 3]), _sort_key(cor[(j + r) % 3])) for j in range(3)) for r in range(3)]
            tris.append(min(rots))
        return (self.genus, tuple(sorted(map(_sort_key, self.punctures))), tuple(map(_sort_key, self.edges)), tuple(sorted(tris)))

    def __eq__(self, other):
        return isinstance(other, Triangulation) and self.canonical_key() == other.canonical_key()

    def __hash__(self):
        return hash(self.canonical_key())

    def __repr__(self):
        return f"Triangulation(genus={self.genus}, punctures={self.punctures}, triangles={self.triangles})"


def _vertex_classes(triangles) -> dict:
    """Union-find over corner slots (t, i); returns root -> list of slots."""
    parent = {(t, i): (t, i) for t in range(len(triangles)) for i in range(3)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    occ: dict = {}
    for ti, tri in enumerate(triangles):
        for i, e in enumerate(tri):
            occ.setdefault(e, []).append((ti, i))
    for slots in occ.values():
        if len(slots) != 2:
            continue
        (t1, i1), (t2, i2) = slots
        # start of one occurrence is glued to the end of the other
        for a, b in (((t1, (i1 - 1) % 3), (t2, i2)), ((t1, i1), (t2, (i2 - 1) % 3))):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    classes: dict = {}
    for slot in parent:
        classes.setdefault(find(slot), []).append(slot)
    return classes


# -- exchange matrix and incidences ---------------------------------------

def exchange_matrix(t: Triangulation) -> tuple:
    """Corner-count exchange matrix in the order of ``t.edges``."""
    idx = {e: i for i, e in enumerate(t.edges)}
    n = len(t.edges)
    eps = [[0] * n for _ in range(n)]
    for tri in t.triangles:
        for i in range(3):
            e, f = idx[tri[i]], idx[tri[(i + 1) % 3]]
            eps[e][f] += 1
            eps[f][e] -= 1
    return tuple(tuple(r) for r in eps)


def incidences(t: Triangulation) -> dict:
    """(edge, puncture) -> number of endpoints of the edge at the puncture."""
    ends = t.endpoints()
    return {(e, p): ends[e].count(p) for e in t.edges for p in t.punctures}


def mutate_epsilon(eps: Sequence[Sequence[int]], k: int) -> tuple:
    """Matrix mutation at position ``k`` (an index, not a label)."""
    n = len(eps)
    out = [[0] * n for _ in range(n)]
    for e in range(n):
        for f in range(n):
            if k in (e, f):
                out[e][f] = -eps[e][f]
            else:
                a, b = eps[e][k], eps[k][f]
                out[e][f] = eps[e][f] + (abs(a) * b + a * abs(b)) // 2
    return tuple(tuple(r) for r in out)


def permute_epsilon(eps, labels, sigma: Mapping) -> tuple:
    """Matrix with new[sigma(i)][sigma(j)] = eps[i][j]."""
    idx = {e: i for i, e in enumerate(labels)}
    n = len(labels)
    out = [[0] * n for _ in range(n)]
    for i, a in enumerate(labels):
        for j, b in enumerate(labels):
            out[idx[sigma[a]]][idx[sigma[b]]] = eps[i][j]
    return tuple(tuple(r) for r in out)


def check_permutation(labels, sigma: Mapping) -> dict:
    sigma = dict(sigma)
    for a in labels:
        sigma.setdefault(a, a)
    if set(sigma) != set(labels) or set(sigma.values()) != set(labels):
        raise ValueError("sigma must be a bijection of the label set")
    return sigma


# -- flips and relabelings -------------------------------------------------

def _rotate_to(tri, cor, i):
    return tuple(tri[(i + j) % 3] for j in range(3)), tuple(cor[(i + j) % 3] for j in range(3))


def flip(t: Triangulation, k) -> Triangulation:
    occ = t.occurrences()
    if k not in occ:
        raise KeyError(f"unknown edge {k!r}")
    (t1, i1), (t2, i2) = occ[k]
    if t1 == t2 or t.is_self_folded(t1) or t.is_self_folded(t2):
        raise SelfFoldedFlip(f"edge {k!r} is adjacent to a self-folded triangle")
    (_, a, b), q = _rotate_to(t.triangles[t1], t.corners[t1], i1)
    (_, c, d), r = _rotate_to(t.triangles[t2], t.corners[t2], i2)
    new1, cor1 = (k, b, c), (q[1], q[2], r[1])
    new2, cor2 = (k, d, a), (r[1], r[2], q[1])
    tris, cors = list(t.triangles), list(t.corners)
    tris[t1], cors[t1] = new1, cor1
    tris[t2], cors[t2] = new2, cor2
    return Triangulation(t.genus, t.punctures, t.edges, tris, cors)


def relabel(t: Triangulation, sigma: Mapping) -> Triangulation:
    """The edge labelled ``i`` becomes labelled ``sigma[i]``."""
    sigma = check_permutation(t.edges, sigma)
    tris = [tuple(sigma[e] for e in tri) for tri in t.triangles]
    return Triangulation(t.genus, t.punctures, t.edges, tris, t.corners)


# -- seeds ----------------------------------------------------------------

@dataclass(frozen=True)
class Seed:
    labels: tuple
    epsilon: tuple
    provenance: Triangulation | None = field(default=None, compare=True)

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "epsilon", tuple(tuple(int(x) for x in r) for r in self.epsilon))
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise ValueError("seed labels must be distinct")
        if len(self.epsilon) != n or any(len(r) != n for r in self.epsilon):
            raise ValueError("epsilon must be square with one row per label")
        for i in range(n):
            for j in range(n):
                if self.epsilon[i][j] != -self.epsilon[j][i]:
                    raise ValueError("epsilon must be skew-symmetric")
        if self.provenance is not None:
            if tuple(self.provenance.edges) != self.labels:
                raise ValueError("seed labels must match the triangulation edges")
            if exchange_matrix(self.provenance) != self.epsilon:
                raise ValueError("epsilon disagrees with the triangulation corner counts")

    @classmethod
    def from_triangulation(cls, t: Triangulation) -> "Seed":
        return cls(t.edges, exchange_matrix(t), t)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown label {label!r}") from None

    def eps(self, a, b) -> int:
        return self.epsilon[self.index(a)][self.index(b)]

    def can_mutate(self, k) -> bool:
        """Abstract seeds always mutate; triangulated ones need a regular flip.

        A flip is regular when neither the quadrilateral around k nor the
        flipped triangulation has a self-folded triangle; corner counts then
        follow matrix mutation.
        """
        self.index(k)
        if self.provenance is None:
            return True
        return self.provenance.flippable(k) and not flip(self.provenance, k).has_self_folded()

    def mutate(self, k) -> "Seed":
        i = self.index(k)
        eps = mutate_epsilon(self.epsilon, i)
        prov = None
        if self.provenance is not None:
            prov = flip(self.provenance, k)
            if prov.has_self_folded() or exchange_matrix(prov) != eps:
                raise SelfFoldedFlip(f"flip at {k!r} creates a self-folded triangle")
        return Seed(self.labels, eps, prov)

    def relabel(self, sigma: Mapping) -> "Seed":
        sigma = check_permutation(self.labels, sigma)
        prov = relabel(self.provenance, sigma) if self.provenance is not None else None
        return Seed(self.labels, permute_epsilon(self.epsilon, self.labels, sigma), prov)

    def forget(self) -> "Seed":
        """The same seed without its triangulation."""
        return Seed(self.labels, self.epsilon)


# -- standard surfaces ----------------------------------------------------

def thrice_punctured_sphere() -> Triangulation:
    return Triangulation(0, ("p1", "p2", "p3"), (1, 2, 3),
                         [(1, 2, 3), (3, 2, 1)],
                         [("p2", "p3", "p1"), ("p3", "p2", "p1")])


def once_punctured_torus() -> Triangulation:
    return Triangulation(1, ("p1",), (1, 2, 3), [(1, 2, 3), (3, 1, 2)], [("p1",) * 3] * 2)


def _closed_fan(g: int):
    """Fan triangulation of the 4g-gon with the word a1 b1 a1^-1 b1^-1 ... ."""
    m = 4 * g
    side_label = {}
    for j in range(g):
        side_label[4 * j] = side_label[4 * j + 2] = 2 * j + 1
        side_label[4 * j + 1] = side_label[4 * j + 3] = 2 * j + 2
    diag = {i: 2 * g + i - 1 for i in range(2, m - 1)}

    def seg(i, j):  # label of the segment v_i v_j for j = i+1 or i = 0
        if i == 0 and j == 1:
            return side_label[0]
        if i == m - 1 and j == 0:
            return side_label[m - 1]
        if j == i + 1:
            return side_label[i]
        return diag[j if i == 0 else i]

    tris = [(seg(0, i), seg(i, i + 1), seg(i + 1, 0) if i + 1 < m - 1 else seg(m - 1, 0)) for i in range(1, m - 1)]
    return tris


def add_puncture(t: Triangulation, ti: int, name, new_edges: Sequence) -> Triangulation:
    """Insert a puncture inside triangle ``ti`` and cone it to the three corners."""
    (e0, e1, e2), (p0, p1, p2) = t.triangles[ti], t.corners[ti]
    u = tuple(new_edges)
    sides, ps = (e0, e1, e2), (p0, p1, p2)
    new_tris, new_cors = [], []
    for i in range(3):
        new_tris.append((sides[i], u[i], u[i - 1]))
        new_cors.append((ps[i], name, ps[i - 1]))
    tris = list(t.triangles[:ti]) + new_tris + list(t.triangles[ti + 1:])
    cors = list(t.corners[:ti]) + new_cors + list(t.corners[ti + 1:])
    return Triangulation(t.genus, t.punctures + (name,), t.edges + u, tris, cors)


def standard_surface(genus: int, punctures: int) -> Triangulation:
    """A fixed triangulation of the surface of given genus with given punctures."""
    if genus < 0 or punctures < 1 or 2 - 2 * genus - punctures >= 0:
        raise InvalidTriangulation("need negative Euler characteristic and at least one puncture")
    if genus == 0:
        t, extra = thrice_punctured_sphere(), punctures - 3
    elif genus == 1:
        t, extra = once_punctured_torus(), punctures - 1
    else:
        tris = _closed_fan(genus)
        n = 6 * genus - 3
        t = Triangulation(genus, ("p1",), tuple(range(1, n + 1)), tris, [("p1",) * 3] * len(tris))
        extra = punctures - 1
    for _ in range(extra):
        n = len(t.edges)
        name = f"p{len(t.punctures) + 1}"
        t = add_puncture(t, len(t.triangles) - 1, name, (n + 1, n + 2, n + 3))
    return t


def random_flip_walk(t: Triangulation, steps: int, rng: random.Random) -> Triangulation:
    """Random sequence of flips that never creates a self-folded triangle."""
    for _ in range(steps):
        options = [k for k in t.edges if t.flippable(k) and not flip(t, k).has_self_folded()]
        if not options:
            break
        t = flip(t, rng.choice(options))
    return t


def four_punctured_sphere() -> Triangulation:
    return standard_surface(0, 4)


# -- JSON ------------------------------------------------------------------

def _corners_from_endpoints(triangles, endpoints: Mapping, punctures) -> list:
    classes = _vertex_classes(triangles)
    occ: dict = {}
    for ti, tri in enumerate(triangles):
        for i, e in enumerate(tri):
            occ.setdefault(e, []).append((ti, i))
    roots = {slot: root for root, slots in classes.items() for slot in slots}
    candidates = {root: set(punctures) for root in classes}
    for e, slots in occ.items():
        names = set(endpoints[e])
        t, i = slots[0]
        for slot in ((t, (i - 1) % 3), (t, i)):
            candidates[roots[slot]] &= names
    order = sorted(candidates, key=lambda r: len(candidates[r]))
    assignment: dict = {}

    def consistent():
        for e, slots in occ.items():
            t, i = slots[0]
            a, b = roots[(t, (i - 1) % 3)], roots[(t, i)]
            if a in assignment and b in assignment:
                if sorted(map(repr, (assignment[a], assignment[b]))) != sorted(map(repr, endpoints[e])):
                    return False
        return True

    def search(pos):
        if pos == len(order):
            return True
        root = order[pos]
        for name in sorted(candidates[root], key=_sort_key):
            if name in assignment.values():
                continue
            assignment[root] = name
            if consistent() and search(pos + 1):
                return True
            del assignment[root]
        return False

    if not search(0):
        raise InvalidTriangulation("endpoints are inconsistent with the triangle gluing")
    return [tuple(assignment[roots[(ti, i)]] for i in range(3)) for ti in range(len(triangles))]


def triangulation_from_json(data: Mapping) -> Triangulation:
    edges = list(data["edges"])
    by_str = {str(e): e for e in edges}
    triangles = [tuple(by_str.get(str(e), e) for e in tri) for tri in data["triangles"]]
    punctures = tuple(data["punctures"])
    if "corners" in data:
        corners = [tuple(c) for c in data["corners"]]
    else:
        endpoints = {by_str[str(k)]: tuple(v) for k, v in data["endpoints"].items()}
        corners = _corners_from_endpoints(triangles, endpoints, punctures)
    t = Triangulation(int(data["genus"]), punctures, edges, triangles, corners)
    if "endpoints" in data:
        ends = t.endpoints()
        for k, v in data["endpoints"].items():
            if sorted(map(repr, ends[by_str[str(k)]])) != sorted(map(repr, v)):
                raise InvalidTriangulation(f"endpoints of edge {k} disagree with the gluing")
    return t


def triangulation_to_json(t: Triangulation) -> dict:
    return {
        "genus": t.genus,
        "punctures": list(t.punctures),
        "edges": list(t.edges),
        "triangles": [list(tri) for tri in t.triangles],
        "endpoints": {str(e): list(v) for e, v in t.endpoints().items()},
        "corners": [list(c) for c in t.corners],
    }


def seed_from_json(data: Mapping) -> Seed:
    if "triangles" in data:
        return Seed.from_triangulation(triangulation_from_json(data))
    return Seed(tuple(data["labels"]), tuple(tuple(int(x) for x in r) for r in data["epsilon"]))


def seed_to_json(s: Seed) -> dict:
    return {"labels": list(s.labels), "epsilon": [list(r) for r in s.epsilon]}
