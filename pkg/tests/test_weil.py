import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from ptolemy_phase.errors import GridTooCoarse, RankUnsupported
from ptolemy_phase.surface import Seed, once_punctured_torus, standard_surface
from ptolemy_phase.symplectic import (
    SkewSpace,
    Subspace,
    SymplecticDecomposition,
    canonical_decomposition,
    kashiwara_index,
    random_decomposition,
)
from ptolemy_phase.weil import (
    Grid,
    expected_triple_phase,
    gaussian,
    operator_symbol,
    rank1_coordinates,
    roundtrip_defect,
    triple_phase_check,
    weil_transform_rank1,
)
from ptolemy_phase.symplectic import CentralCharacter, radical, zero_character

PLANE = SkewSpace(("e1", "e2"), ((0, 1), (-1, 0)))
GRID = Grid(10, 1024)


def decomp(w, v):
    return SymplecticDecomposition(Subspace.span([w]), (tuple(v),))


D1 = decomp((1, 0), (0, 1))
D2 = decomp((0, 1), (-1, 0))
D3 = decomp((1, 1), (0, 1))


def random_sl2_decomposition(rng):
    """w = g00 e1 + g10 e2, v = g01 e1 + g11 e2 for g in SL(2, Z) with entries in {-1, 0, 1}.

    Larger entries give transforms that spread the probes beyond the fixed grid.
    """
    while True:
        a, b, c = (rng.randint(-1, 1) for _ in range(3))
        if a != 0 and (1 + b * c) % a == 0 and abs((1 + b * c) // a) <= 1:
            return decomp((a, c), (b, (1 + b * c) // a))


def apply_symbol(sym, g, grid):
    """-sqrt(2 pi hbar) (m t + d i d/dt) g + scalar g, with a spectral derivative."""
    x = grid.x
    k = 2 * np.pi * np.fft.fftfreq(grid.n, d=grid.dx)
    dg = np.fft.ifft(1j * k * np.fft.fft(g))
    m, d = float(sym.mult[0]), float(sym.deriv[0])
    return -math.sqrt(2 * math.pi * sym.hbar) * (m * x * g + d * 1j * dg) + sym.scalar * g


@pytest.mark.parametrize("g,s", [(1, 1), (0, 4), (1, 2), (2, 1)])
def test_symbol_commutators_reproduce_the_exchange_matrix(g, s, rng):
    seed = Seed.from_triangulation(standard_surface(g, s))
    V = SkewSpace.of_seed(seed)
    for d in (canonical_decomposition(V), random_decomposition(V, rng)):
        syms = {e: operator_symbol(V, V.basis_vector(e), d, hbar=0.7) for e in seed.labels}
        for e in seed.labels:
            for f in seed.labels:
                kappa = syms[e].commutator(syms[f])
                assert isinstance(kappa, Fraction) and kappa == seed.eps(e, f)


def test_central_and_radical_symbols():
    h = 1.3
    sym = operator_symbol(PLANE, (0, 0), D1, hbar=h, central=1)
    assert abs(sym.scalar - math.sqrt(2 * math.pi * h)) < 1e-15
    V = SkewSpace.of_seed(Seed.from_triangulation(once_punctured_torus()))
    d = canonical_decomposition(V)
    zero = operator_symbol(V, (1, 1, 1), d, hbar=h)
    assert all(m == 0 for m in zero.mult) and all(a == 0 for a in zero.deriv) and zero.scalar == 0
    lam = CentralCharacter(radical(V).rows, (0.25,))
    x = radical(V).rows[0]
    charged = operator_symbol(V, x, d, lam=lam, hbar=h)
    assert abs(charged.scalar + math.sqrt(2 * math.pi * h) * 0.25) < 1e-14


def test_equal_decompositions_give_the_identity():
    F = weil_transform_rank1(PLANE, D1, D1, GRID)
    g = gaussian(GRID) * np.exp(0.3j * GRID.x)
    assert np.max(abs(F(g) - g)) < 1e-9


@pytest.mark.parametrize("pair", [(D1, D2), (D2, D3), (D1, D3), (D3, D1)])
def test_transforms_intertwine_the_operator_symbols(pair):
    a, b = pair
    F = weil_transform_rank1(PLANE, a, b, GRID)
    g = np.exp(-((GRID.x - 0.3) ** 2) / 1.2) * np.exp(0.4j * GRID.x)
    for x in ((1, 0), (0, 1), (1, 2)):
        lhs = F(apply_symbol(operator_symbol(PLANE, x, a), g, GRID))
        rhs = apply_symbol(operator_symbol(PLANE, x, b), F(g), GRID)
        assert np.max(abs(lhs - rhs)) < 1e-5


def test_swap_pair_is_the_fourier_transform():
    p, q, r, s, _, _ = rank1_coordinates(PLANE, D1, D2, zero_character(PLANE))
    assert (p, s) == (0, 0) and abs(r) == 1
    sigma = 1 / float(r)
    x, a = GRID.x, 0.2
    f = (x - a) * np.exp(-((x - a) ** 2) / 2)
    # closed form of (2 pi)^{-1/2} int f(x) e^{-i sigma x t} dx
    want = np.exp(-1j * sigma * a * x) * (-1j * sigma * x) * np.exp(-(x**2) / 2)
    got = weil_transform_rank1(PLANE, D1, D2, GRID)(f)
    assert np.max(abs(got - want)) < 1e-10


def test_gaussian_maps_to_the_predicted_gaussian(rng):
    for _ in range(5):
        a, b = random_sl2_decomposition(rng), random_sl2_decomposition(rng)
        p, q, r, s, _, _ = (float(c) for c in rank1_coordinates(PLANE, a, b, zero_character(PLANE)))
        if r == 0:
            continue
        t = GRID.x
        # closed-form Gaussian integral of the kernel against exp(-x^2 / 2)
        alpha_ = 1 - 1j * s / r
        want = np.exp(1j * p * t**2 / (2 * r)) * np.sqrt(2 * np.pi / alpha_) * np.exp(
            -((t / r) ** 2) / (2 * alpha_)
        ) / math.sqrt(2 * math.pi * abs(r))
        got = weil_transform_rank1(PLANE, a, b, GRID)(gaussian(GRID))
        assert np.max(abs(got - want)) < 1e-8


def test_worked_triple_and_its_reversal():
    got = triple_phase_check(PLANE, D1, D2, D3, GRID)
    assert kashiwara_index(PLANE, D1.lagrangian, D2.lagrangian, D3.lagrangian) == -1
    assert abs(got - cmath.exp(-1j * math.pi / 4)) < 1e-3
    rev = triple_phase_check(PLANE, D1, D3, D2, GRID)
    assert abs(rev - got.conjugate()) < 1e-3


def test_degenerate_triple_is_involutive():
    assert abs(triple_phase_check(PLANE, D1, D2, D1, GRID) - 1) < 1e-3
    assert roundtrip_defect(PLANE, D1, D2, GRID) < 1e-6


def test_random_triples_follow_the_kashiwara_law(rng):
    for _ in range(6):
        ds = [random_sl2_decomposition(rng) for _ in range(3)]
        got = triple_phase_check(PLANE, *ds, GRID)
        assert abs(got - expected_triple_phase(PLANE, *ds)) < 1e-3


def test_torus_rank_one_triple_with_a_radical():
    V = SkewSpace.of_seed(Seed.from_triangulation(once_punctured_torus()))
    rng = random.Random(5)
    ds = [canonical_decomposition(V)]
    # small-entry supplementary choices keep the kernels well resolved
    for w, v in (((1, 0, 0), (0, Fraction(1, 2), 0)), ((0, 1, 0), (0, 0, Fraction(1, 2)))):
        ds.append(SymplecticDecomposition(Subspace.span([w]), (v,)))
    for d in ds:
        assert d.rank == 1
    got = triple_phase_check(V, *ds, GRID)
    assert abs(got - expected_triple_phase(V, *ds)) < 1e-3


def test_unsupported_and_coarse_inputs():
    V = SkewSpace.of_seed(Seed.from_triangulation(standard_surface(0, 5)))
    d = canonical_decomposition(V)
    with pytest.raises(RankUnsupported):
        weil_transform_rank1(V, d, d, GRID)
    wild = decomp((7, 3), (2, 1))
    with pytest.raises(GridTooCoarse):
        weil_transform_rank1(PLANE, D1, wild, Grid(10, 64))
    with pytest.raises(ValueError):
        Grid(10, 1000)
