"""Skew-symmetric forms over Q: radicals, essential Lagrangians, symplectic
decompositions and the Kashiwara index."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from . import linalg as la
from .errors import DegenerateSpace, NotLagrangian, RadicalVector, RankMismatch
from .surface import Seed, Triangulation, exchange_matrix, incidences


@dataclass(frozen=True)
class SkewSpace:
    labels: tuple
    B: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "B", la.mat(self.B))
        n = len(self.labels)
        if len(self.B) != n or any(len(r) != n for r in self.B):
            raise ValueError("form must be square with one row per label")
        if any(self.B[i][j] != -self.B[j][i] for i in range(n) for j in range(n)):
            raise ValueError("form must be skew-symmetric")

    @classmethod
    def of_seed(cls, seed: Seed) -> "SkewSpace":
        return cls(seed.labels, seed.epsilon)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def form(self, u, v) -> Fraction:
        return la.bilinear(self.B, u, v)

    def basis_vector(self, label) -> tuple:
        return la.unit(self.dim, self.labels.index(label))


@dataclass(frozen=True)
class Subspace:
    """A subspace given by its reduced row echelon basis."""

    rows: tuple

    @classmethod
    def span(cls, vectors: Sequence[Sequence], dim: int | None = None) -> "Subspace":
        vectors = [la.vec(v) for v in vectors]
        rows = la.rref(vectors)[0] if vectors else ()
        return cls(rows)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def contains(self, v) -> bool:
        return la.span_contains(self.rows, v)

    def __contains__(self, v) -> bool:
        return self.contains(v)


@dataclass(frozen=True)
class SymplecticDecomposition:
    lagrangian: Subspace
    supplementary: tuple

    def __post_init__(self):
        object.__setattr__(self, "supplementary", tuple(la.vec(v) for v in self.supplementary))

    @property
    def rank(self) -> int:
        return len(self.supplementary)


@dataclass(frozen=True)
class CentralCharacter:
    """Real weights on a basis of the radical; extends linearly."""

    basis: tuple
    weights: tuple

    def __call__(self, z) -> float:
        c = la.solve_in_span(self.basis, z)
        if c is None:
            raise RadicalVector("vector is not in the radical")
        return float(sum(float(ci) * w for ci, w in zip(c, self.weights)))


@lru_cache(maxsize=4096)
def radical(V: SkewSpace) -> Subspace:
    return Subspace(la.nullspace(V.B, V.dim))


def puncture_elements(t: Triangulation) -> dict:
    """puncture -> x_p = sum_e sigma(e, p) x_e; checked to be a basis of the radical."""
    sig = incidences(t)
    xs = {p: la.vec(sig[(e, p)] for e in t.edges) for p in t.punctures}
    V = SkewSpace(t.edges, exchange_matrix(t))
    rad = radical(V)
    vs = list(xs.values())
    if la.rank(vs) != len(vs) or rad.dim != len(vs) or not all(rad.contains(v) for v in vs):
        raise RankMismatch("puncture elements do not form a basis of the radical")
    return xs


def central_character(t: Triangulation, lam: Mapping) -> CentralCharacter:
    xs = puncture_elements(t)
    return CentralCharacter(tuple(xs[p] for p in t.punctures), tuple(float(lam[p]) for p in t.punctures))


def zero_character(V: SkewSpace) -> CentralCharacter:
    rad = radical(V)
    return CentralCharacter(rad.rows, (0.0,) * rad.dim)


def is_isotropic(V: SkewSpace, vectors) -> bool:
    vs = tuple(vectors)
    if not vs:
        return True
    G = la.matmul(la.matmul(vs, V.B), la.transpose(vs))
    return all(x == 0 for r in G for x in r)


def is_essential_lagrangian(V: SkewSpace, L: Subspace) -> bool:
    rad = radical(V)
    r2 = V.dim - rad.dim
    return (
        2 * L.dim == r2
        and is_isotropic(V, L.rows)
        and la.intersection_dim(L.rows, rad.rows) == 0
    )


def validate_decomposition(V: SkewSpace, d: SymplecticDecomposition) -> None:
    """Raise NotLagrangian unless d is a symplectic decomposition of V."""
    problem = _decomposition_problem(V, d)
    if problem:
        raise NotLagrangian(problem)


@lru_cache(maxsize=65536)
def _decomposition_problem(V: SkewSpace, d: SymplecticDecomposition) -> str:
    try:
        _check_decomposition(V, d)
    except NotLagrangian as exc:
        return str(exc)
    return ""


def _check_decomposition(V: SkewSpace, d: SymplecticDecomposition) -> None:
    L, sup = d.lagrangian, list(d.supplementary)
    if not is_essential_lagrangian(V, L):
        raise NotLagrangian("lagrangian part is not an essential Lagrangian")
    if len(sup) != L.dim or la.rank(sup) != len(sup):
        raise NotLagrangian("supplementary basis has the wrong size or is dependent")
    if not is_essential_lagrangian(V, Subspace.span(sup)):
        raise NotLagrangian("supplementary span is not an essential Lagrangian")
    if la.intersection_dim(L.rows, sup) != 0:
        raise NotLagrangian("lagrangian meets the supplementary span")
    if la.rank(list(radical(V).rows) + list(L.rows) + sup) != V.dim:
        raise NotLagrangian("radical, lagrangian and supplementary do not span V")


def _symplectic_gram_schmidt(V: SkewSpace, candidates, start=()):
    """Pair off candidates into (w_i, v_i) with B(w_i, v_i) = 1, in order."""
    ws, vs = [], []
    pool = [la.vec(c) for c in candidates]

    def project(x, w, v):
        return la.add(la.sub(x, la.scale(V.form(x, v), w)), la.scale(V.form(x, w), v))

    for w, v in start:
        ws.append(w)
        vs.append(v)
        pool = [project(x, w, v) for x in pool]
    while True:
        pair = None
        for i, u in enumerate(pool):
            for j in range(len(pool)):
                if j != i and V.form(u, pool[j]) != 0:
                    pair = (i, j)
                    break
            if pair:
                break
        if pair is None:
            break
        i, j = pair
        w = pool[i]
        v = la.scale(1 / V.form(w, pool[j]), pool[j])
        ws.append(w)
        vs.append(v)
        pool = [project(x, w, v) for m, x in enumerate(pool) if m not in (i, j)]
    return ws, vs


def _decomposition_from(ws, vs) -> SymplecticDecomposition:
    return SymplecticDecomposition(Subspace.span(ws), tuple(vs))


def canonical_decomposition(V: SkewSpace) -> SymplecticDecomposition:
    """Symplectic Gram-Schmidt over the standard basis in label order."""
    if all(x == 0 for r in V.B for x in r):
        raise DegenerateSpace("the form vanishes identically")
    ws, vs = _symplectic_gram_schmidt(V, la.identity(V.dim))
    return _decomposition_from(ws, vs)


def constrained_decomposition(V: SkewSpace, must_contain) -> SymplecticDecomposition:
    """A decomposition whose Lagrangian contains the given vector."""
    m = la.vec(must_contain)
    if la.is_zero(la.matvec(V.B, m)):
        raise RadicalVector("vector lies in the radical")
    j = next(j for j in range(V.dim) if V.form(m, la.unit(V.dim, j)) != 0)
    v = la.scale(1 / V.form(m, la.unit(V.dim, j)), la.unit(V.dim, j))
    ws, vs = _symplectic_gram_schmidt(V, la.identity(V.dim), start=[(m, v)])
    return _decomposition_from(ws, vs)


def random_decomposition(V: SkewSpace, rng: random.Random, spread: int = 2) -> SymplecticDecomposition:
    """Gram-Schmidt applied to a random invertible integer basis."""
    if all(x == 0 for r in V.B for x in r):
        raise DegenerateSpace("the form vanishes identically")
    n = V.dim
    while True:
        cand = [[rng.randint(-spread, spread) for _ in range(n)] for _ in range(n)]
        if la.rank(cand) == n:
            break
    ws, vs = _symplectic_gram_schmidt(V, cand)
    # mix the supplementary basis by a random unimodular upper-triangular change
    r = len(vs)
    mixed = []
    for i in range(r):
        v = vs[i]
        for j in range(i + 1, r):
            v = la.add(v, la.scale(rng.randint(-1, 1), vs[j]))
        mixed.append(v)
    return _decomposition_from(ws, mixed)


def dual_basis(V: SkewSpace, d: SymplecticDecomposition) -> tuple:
    """The w_i in the Lagrangian with B(w_i, v_j) = delta_ij."""
    L = d.lagrangian.rows
    G = tuple(tuple(V.form(l, v) for v in d.supplementary) for l in L)
    C = la.inverse(G)
    return tuple(
        tuple(sum((C[i][a] * L[a][c] for a in range(len(L))), Fraction(0)) for c in range(V.dim))
        for i in range(len(L))
    )


def split_vector(V: SkewSpace, d: SymplecticDecomposition, x):
    """Write x = z + w + sum a_j v_j with z radical, w in the Lagrangian.

    Returns (z, w, a) with a the coefficient tuple on the supplementary basis.
    """
    x = la.vec(x)
    duals = dual_basis(V, d)
    # B(x, w_j) = -a_j since B(v_i, w_j) = -delta_ij
    a = tuple(-V.form(x, w) for w in duals)
    rest = la.sub(x, _lincomb(a, d.supplementary, V.dim))
    # B(rest, v_j) = t_j where w = sum t_j w_j
    t = tuple(V.form(rest, v) for v in d.supplementary)
    w = _lincomb(t, duals, V.dim)
    z = la.sub(rest, w)
    return z, w, a


def _lincomb(coeffs, vectors, n):
    out = (Fraction(0),) * n
    for c, v in zip(coeffs, vectors):
        out = la.add(out, la.scale(c, v))
    return out


def transport_decomposition(M, d: SymplecticDecomposition) -> SymplecticDecomposition:
    """Image of a decomposition under the linear map with matrix M."""
    return SymplecticDecomposition(
        Subspace.span([la.matvec(M, r) for r in d.lagrangian.rows]),
        tuple(la.matvec(M, v) for v in d.supplementary),
    )


# -- Maslov form and Kashiwara index ----------------------------------------

def maslov_form(V: SkewSpace, l1: Subspace, l2: Subspace, l3: Subspace) -> tuple:
    """Matrix of twice the Maslov quadratic form on l1 + l2 + l3 (direct sum).

    Q(x1 + x2 + x3) = B(x1, x2) + B(x2, x3) + B(x3, x1), and the returned
    symmetric matrix G satisfies Q(x) = x^T G x / 2 in the concatenated bases.
    """
    for L in (l1, l2, l3):
        if not is_essential_lagrangian(V, L):
            raise NotLagrangian("input is not an essential Lagrangian")
    return _maslov_matrix(V, l1.rows, l2.rows, l3.rows)


def _maslov_matrix(V, b1, b2, b3):
    blocks = [list(b1), list(b2), list(b3)]
    basis = [(k, v) for k, bl in enumerate(blocks) for v in bl]
    n = len(basis)
    G = [[Fraction(0)] * n for _ in range(n)]
    for i, (ki, u) in enumerate(basis):
        for j, (kj, v) in enumerate(basis):
            if kj == (ki + 1) % 3:
                G[i][j] = V.form(u, v)
            elif ki == (kj + 1) % 3:
                G[i][j] = V.form(v, u)
    return tuple(tuple(r) for r in G)


def signature(G: Sequence[Sequence]) -> int:
    """Signature of a rational symmetric matrix by congruence diagonalisation."""
    a = [list(map(la.frac, r)) for r in G]
    sig = 0
    while a:
        n = len(a)
        p = next((i for i in range(n) if a[i][i] != 0), None)
        if p is None:
            pair = next(((i, j) for i in range(n) for j in range(n) if a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # e_i -> e_i + e_j makes the diagonal entry 2 a_ij nonzero
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            p = i
        d = a[p][p]
        sig += 1 if d > 0 else -1
        keep = [k for k in range(n) if k != p]
        a = [[a[r][c] - a[r][p] * a[p][c] / d for c in keep] for r in keep]
    return sig


def kashiwara_index(V: SkewSpace, l1: Subspace, l2: Subspace, l3: Subspace) -> int:
    return signature(maslov_form(V, l1, l2, l3))


def kashiwara_index_full(V: SkewSpace, l1: Subspace, l2: Subspace, l3: Subspace) -> int:
    """Same index computed on the true Lagrangians l + radical."""
    rad = list(radical(V).rows)
    return signature(_maslov_matrix(V, list(l1.rows) + rad, list(l2.rows) + rad, list(l3.rows) + rad))


# -- JSON -------------------------------------------------------------------

def space_from_json(data) -> SkewSpace:
    if "B" in data:
        return SkewSpace(tuple(data.get("labels", range(1, len(data["B"]) + 1))), data["B"])
    return SkewSpace(tuple(data["labels"]), data["epsilon"])


def subspace_from_json(rows) -> Subspace:
    return Subspace.span([la.vec(r) for r in rows])


def decomposition_from_json(data) -> SymplecticDecomposition:
    return SymplecticDecomposition(subspace_from_json(data["lagrangian"]), tuple(la.vec(v) for v in data["supplementary"]))


def decomposition_to_json(d: SymplecticDecomposition) -> dict:
    return {"lagrangian": la.fmt_mat(d.lagrangian.rows), "supplementary": la.fmt_mat(d.supplementary)}
