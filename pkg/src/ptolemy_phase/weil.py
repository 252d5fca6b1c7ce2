"""Schrödinger-model operator symbols and numerical rank-one Weil intertwiners.

For a decomposition (l, v_1..v_r) the model space is L^2(R^r) in variables
t_1..t_r.  With the rescaling by i sqrt(2 pi hbar), an element of V + R c acts as

    w in l        ->  multiplication by -sqrt(2 pi hbar) sum_j t_j B(v_j, w)
    sum a_j v_j   ->  -sqrt(2 pi hbar) sum_j a_j (i d/dt_j)
    z in radical  ->  the scalar -sqrt(2 pi hbar) f(z)
    c             ->  the scalar +sqrt(2 pi hbar)

so that [x^, y^] = 2 pi i hbar B(x, y).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg as la
from .errors import GridTooCoarse, RankUnsupported
from .symplectic import (
    CentralCharacter,
    SkewSpace,
    SymplecticDecomposition,
    dual_basis,
    kashiwara_index,
    split_vector,
    zero_character,
)


@dataclass(frozen=True)
class OperatorSymbol:
    """-sqrt(2 pi hbar) (sum m_j t_j + sum d_j i d/dt_j) + scalar."""

    mult: tuple
    deriv: tuple
    scalar: complex
    hbar: float

    def commutator(self, other: "OperatorSymbol") -> Fraction:
        """kappa with [self, other] = 2 pi i hbar * kappa, exactly."""
        return sum((d * m2 - m * d2 for m, d, m2, d2 in zip(self.mult, self.deriv, other.mult, other.deriv)), Fraction(0))


def operator_symbol(V: SkewSpace, x, d: SymplecticDecomposition, lam: CentralCharacter | None = None,
                    hbar: float = 1.0, central=0) -> OperatorSymbol:
    lam = lam if lam is not None else zero_character(V)
    z, w, a = split_vector(V, d, x)
    mult = tuple(V.form(v, w) for v in d.supplementary)
    s = math.sqrt(2 * math.pi * hbar)
    scalar = complex(s * (float(la.frac(central)) - (lam(z) if not la.is_zero(z) else 0.0)))
    return OperatorSymbol(mult, tuple(a), scalar, hbar)


# -- numerical rank-one intertwiners ---------------------------------------------

@dataclass(frozen=True)
class Grid:
    L: float = 10.0
    n: int = 1024

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError("grid size n must be a power of two")
        if not self.L > 0:
            raise ValueError("grid half-width L must be positive")

    @property
    def x(self) -> np.ndarray:
        return -self.L + (2 * self.L / self.n) * np.arange(self.n)

    @property
    def dx(self) -> float:
        return 2 * self.L / self.n


@dataclass(frozen=True)
class GridTransform:
    matrix: np.ndarray
    grid: Grid

    def __call__(self, f: np.ndarray) -> np.ndarray:
        return self.matrix @ f

    def __matmul__(self, other: "GridTransform") -> "GridTransform":
        return GridTransform(self.matrix @ other.matrix, self.grid)


def _probes(grid: Grid):
    """Near-minimal-uncertainty wave packets, which linear canonical maps spread least."""
    x = grid.x
    for width, shift, momentum in ((1.0, 0.0, 0.0), (1.0, 0.3, 0.2), (0.9, -0.3, -0.2)):
        yield np.exp(-((x - shift) ** 2) / (2 * width**2)) * np.exp(1j * momentum * x)


def unitarity_defect(T: GridTransform) -> float:
    dx = T.grid.dx
    worst = 0.0
    for f in _probes(T.grid):
        g = T(f)
        worst = max(worst, abs(math.sqrt(np.sum(abs(g) ** 2) * dx / (np.sum(abs(f) ** 2) * dx)) - 1))
    return worst


def rank1_coordinates(V: SkewSpace, d1: SymplecticDecomposition, d2: SymplecticDecomposition, lam: CentralCharacter):
    """(p, q, r, s, fv, fw): v2 = p v1 + q w1 + z_v, w2 = r v1 + s w1 + z_w, fv = f(z_v), fw = f(z_w)."""
    (w1,), (v1,) = dual_basis(V, d1), d1.supplementary
    (w2,), (v2,) = dual_basis(V, d2), d2.supplementary

    def coords(x):
        a, b = -V.form(x, w1), V.form(x, v1)
        z = la.sub(x, la.add(la.scale(a, v1), la.scale(b, w1)))
        return a, b, (lam(z) if not la.is_zero(z) else 0.0)

    p, q, fv = coords(v2)
    r, s, fw = coords(w2)
    return p, q, r, s, fv, fw


def weil_transform_rank1(V: SkewSpace, d1: SymplecticDecomposition, d2: SymplecticDecomposition,
                         grid: Grid = Grid(), hbar: float = 1.0, lam: CentralCharacter | None = None,
                         tolerance: float = 1e-6) -> GridTransform:
    """Matrix of the Weil intertwiner from the d1 model to the d2 model.

    The kernel comes from the defining integral over the second Lagrangian
    with its unitary (positive) normalisation; no further phase convention
    enters.  The intertwiner does not depend on hbar.
    """
    if d1.rank != 1 or d2.rank != 1:
        raise RankUnsupported("only rank-one decompositions are supported")
    lam = lam if lam is not None else zero_character(V)
    p, q, r, s, fv, fw = (float(c) if isinstance(c, Fraction) else c for c in rank1_coordinates(V, d1, d2, lam))
    x = grid.x
    t = x[:, None]
    xx = x[None, :]
    if r != 0:
        phase = (s * xx**2 - 2 * xx * t + p * t**2) / (2 * r) - t * fv - fw * (xx - t * p) / r
        K = np.exp(1j * phase) * grid.dx / math.sqrt(2 * math.pi * abs(r))
    else:
        # same Lagrangian: phi2(t) = sqrt|p| e^{i p q t^2 / 2 - i t f(z_v)} phi1(p t)
        y = p * t
        K = np.sinc((y - xx) / grid.dx) * math.sqrt(abs(p)) * np.exp(1j * (p * q * t**2 / 2 - t * fv))
    T = GridTransform(K, grid)
    defect = unitarity_defect(T)
    if defect > tolerance:
        raise GridTooCoarse(f"unitarity defect {defect:.2e} exceeds {tolerance:.0e}")
    return T


def gaussian(grid: Grid) -> np.ndarray:
    return np.exp(-grid.x**2 / 2)


def triple_phase_check(V: SkewSpace, d1, d2, d3, grid: Grid = Grid(), hbar: float = 1.0,
                       lam: CentralCharacter | None = None) -> complex:
    """Scalar of F_{3,1} F_{2,3} F_{1,2} measured on a Gaussian in the first model."""
    f12 = weil_transform_rank1(V, d1, d2, grid, hbar, lam)
    f23 = weil_transform_rank1(V, d2, d3, grid, hbar, lam)
    f31 = weil_transform_rank1(V, d3, d1, grid, hbar, lam)
    g = gaussian(grid)
    out = f31(f23(f12(g)))
    return complex(np.vdot(g, out) / np.vdot(g, g))


def expected_triple_phase(V: SkewSpace, d1, d2, d3) -> complex:
    tau = kashiwara_index(V, d1.lagrangian, d2.lagrangian, d3.lagrangian)
    return cmath.exp(1j * math.pi * tau / 4)


def roundtrip_defect(V: SkewSpace, d1, d2, grid: Grid = Grid(), hbar: float = 1.0, lam=None) -> float:
    """max |F_{2,1} F_{1,2} g - g| on Gaussian probes, relative to max |g|."""
    f12 = weil_transform_rank1(V, d1, d2, grid, hbar, lam)
    f21 = weil_transform_rank1(V, d2, d1, grid, hbar, lam)
    worst = 0.0
    for g in _probes(grid):
        worst = max(worst, float(np.max(abs(f21(f12(g)) - g)) / np.max(abs(g))))
    return worst
