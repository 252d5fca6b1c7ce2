"""Tropical (linear) cluster maps between the lattices V_T of seeds."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg as la
from .errors import PathMismatch
from .surface import Seed, check_permutation


def positive_part(a) -> Fraction:
    return (a + abs(a)) / 2 if isinstance(a, Fraction) else Fraction(a + abs(a), 2)


@dataclass(frozen=True)
class LinearMap:
    """Map V_source -> V_target; column j is the image of source basis vector j."""

    source: tuple
    target: tuple
    matrix: tuple

    def __post_init__(self):
        object.__setattr__(self, "matrix", la.mat(self.matrix))

    def __call__(self, v):
        return la.matvec(self.matrix, v)

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(other.source, self.target, la.matmul(self.matrix, other.matrix))

    def inverse(self) -> "LinearMap":
        return LinearMap(self.target, self.source, la.inverse(self.matrix))

    def is_identity(self) -> bool:
        return self.matrix == la.identity(len(self.matrix))

    def image_of(self, label):
        return tuple(r[self.source.index(label)] for r in self.matrix)

    def preserves(self, B_source, B_target) -> bool:
        """B_target(C u, C v) = B_source(u, v) for all u, v."""
        M = self.matrix
        return la.matmul(la.matmul(la.transpose(M), la.mat(B_target)), M) == la.mat(B_source)


def identity_map(labels) -> LinearMap:
    return LinearMap(tuple(labels), tuple(labels), la.identity(len(labels)))


def _sign(sign) -> int:
    if sign in (1, "+", "+1"):
        return 1
    if sign in (-1, "-", "-1", "−"):
        return -1
    raise ValueError(f"sign must be + or -, got {sign!r}")


def c_k(seed: Seed, k, sign) -> LinearMap:
    """Flip map V_{T'} -> V_T for T' = mutation of ``seed`` at k.

    x'_k -> -x_k and x'_e -> x_e + [sign * eps_ek]_+ x_k.
    """
    s = _sign(sign)
    n, ki = len(seed.labels), seed.index(k)
    M = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        if j == ki:
            M[ki][ki] = Fraction(-1)
        else:
            M[j][j] = Fraction(1)
            M[ki][j] = positive_part(s * seed.epsilon[j][ki])
    return LinearMap(seed.labels, seed.labels, M)


def c_k_inverse(seed: Seed, k, sign) -> LinearMap:
    """Inverse of c_k, by its closed form (same shape as c_k, with roles swapped)."""
    m = c_k(seed, k, sign)
    return LinearMap(m.target, m.source, m.matrix)


def c_sigma(labels, sigma: Mapping) -> LinearMap:
    """Relabeling map V_{T'} -> V_T sending x'_{sigma(e)} to x_e."""
    labels = tuple(labels)
    sigma = check_permutation(labels, sigma)
    n = len(labels)
    M = [[Fraction(0)] * n for _ in range(n)]
    for i, e in enumerate(labels):
        M[i][labels.index(sigma[e])] = Fraction(1)
    return LinearMap(labels, labels, M)


def c_neat(seed: Seed, k) -> LinearMap:
    """c_k^+ composed with (c_k^-)^{-1}, a map V_T -> V_T."""
    return c_k(seed, k, "+") @ c_k_inverse(seed, k, "-")


def c_neat_closed_form(seed: Seed, k) -> LinearMap:
    """x -> x + B(x, x_k) x_k."""
    n, ki = len(seed.labels), seed.index(k)
    M = [list(r) for r in la.identity(n)]
    for j in range(n):
        M[ki][j] += Fraction(seed.epsilon[j][ki])
    return LinearMap(seed.labels, seed.labels, M)


def compose_permutations(first: Mapping, second: Mapping) -> dict:
    """Relabel by ``first`` and then by ``second``: e -> second[first[e]].

    Labels missing from either map are fixed by it.
    """
    keys = list(first) + [e for e in second if e not in first]
    return {e: second.get(first.get(e, e), first.get(e, e)) for e in keys}


def invert_permutation(sigma: Mapping) -> dict:
    return {v: k for k, v in sigma.items()}


def parse_step(step):
    """Normalise a path step to ("flip", k, +-1) or ("perm", dict)."""
    if isinstance(step, Mapping):
        if "flip" in step:
            return ("flip", step["flip"], _sign(step.get("sign", "+")))
        if "perm" in step:
            return ("perm", dict(step["perm"]))
        raise ValueError(f"unrecognised path step {step!r}")
    if step[0] in ("flip", "perm"):
        return ("flip", step[1], _sign(step[2])) if step[0] == "flip" else ("perm", dict(step[1]))
    k, s = step
    return ("flip", k, _sign(s))


def compose_tropical(seed: Seed, path: Sequence) -> LinearMap:
    """Product C_1 C_2 ... C_n : V_{T_n} -> V_{T_0} along a path of flips/relabels."""
    total = identity_map(seed.labels)
    cur = seed
    for raw in path:
        step = parse_step(raw)
        if step[0] == "flip":
            _, k, s = step
            if k not in cur.labels or not cur.can_mutate(k):
                raise PathMismatch(f"flip at {k!r} is not regular on the intermediate seed")
            total = total @ c_k(cur, k, s)
            cur = cur.mutate(k)
        else:
            sigma = check_permutation(cur.labels, step[1])
            total = total @ c_sigma(cur.labels, sigma)
            cur = cur.relabel(sigma)
    return total


def end_seed(seed: Seed, path: Sequence) -> Seed:
    cur = seed
    for raw in path:
        step = parse_step(raw)
        cur = cur.mutate(step[1]) if step[0] == "flip" else cur.relabel(step[1])
    return cur


def map_to_json(m: LinearMap) -> dict:
    return {"source": list(m.source), "target": list(m.target), "matrix": la.fmt_mat(m.matrix)}
