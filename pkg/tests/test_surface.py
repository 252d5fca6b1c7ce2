import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ptolemy_phase.errors import InvalidTriangulation, SelfFoldedFlip
from ptolemy_phase.surface import (
    Seed,
    Triangulation,
    exchange_matrix,
    flip,
    four_punctured_sphere,
    incidences,
    mutate_epsilon,
    once_punctured_torus,
    permute_epsilon,
    random_flip_walk,
    relabel,
    seed_from_json,
    seed_to_json,
    standard_surface,
    thrice_punctured_sphere,
    triangulation_from_json,
    triangulation_to_json,
)

SURFACES = [(g, s) for g in range(3) for s in range(1, 5) if 2 - 2 * g - s < 0]


def is_skew(m):
    n = len(m)
    return all(m[i][j] == -m[j][i] for i in range(n) for j in range(n))


def brute_mutation(eps, k):
    """Independent restatement of the mutation rule, entry by entry."""
    n = len(eps)
    out = [[0] * n for _ in range(n)]
    for e in range(n):
        for f in range(n):
            if k in (e, f):
                out[e][f] = -eps[e][f]
            else:
                a, b = eps[e][k], eps[k][f]
                out[e][f] = eps[e][f] + (abs(a) * b + a * abs(b)) // 2
    return out


def test_thrice_punctured_sphere_has_zero_matrix():
    eps = exchange_matrix(thrice_punctured_sphere())
    assert all(x == 0 for row in eps for x in row)


def test_once_punctured_torus_entries_are_plus_minus_two():
    eps = exchange_matrix(once_punctured_torus())
    assert is_skew(eps)
    assert all(abs(eps[i][j]) == 2 for i in range(3) for j in range(3) if i != j)


def test_once_punctured_torus_incidences_are_two():
    t = once_punctured_torus()
    sig = incidences(t)
    assert all(sig[(e, t.punctures[0])] == 2 for e in t.edges)


@pytest.mark.parametrize("g,s", SURFACES)
def test_standard_surfaces_are_valid(g, s):
    t = standard_surface(g, s)
    eps = exchange_matrix(t)
    assert len(t.edges) == 6 * g - 6 + 3 * s
    assert not t.has_self_folded()
    assert is_skew(eps)
    assert all(abs(x) <= 2 for row in eps for x in row)
    sig = incidences(t)
    for e in t.edges:
        assert sum(sig[(e, p)] for p in t.punctures) == 2
        a, b = t.endpoints()[e]
        if a != b:
            assert sig[(e, a)] == sig[(e, b)] == 1
        for p in t.punctures:
            if p not in (a, b):
                assert sig[(e, p)] == 0


def test_mutation_examples():
    assert mutate_epsilon([[0, 1], [-1, 0]], 0) == ((0, -1), (1, 0))
    assert mutate_epsilon([[0] * 3] * 3, 1) == ((0,) * 3,) * 3
    eps = [[0, 1, 0], [-1, 0, 1], [0, -1, 0]]
    assert mutate_epsilon(eps, 1)[0][2] == 1


skew = st.integers(2, 5).flatmap(
    lambda n: st.lists(st.integers(-2, 2), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2).map(
        lambda xs: _skew_from(n, xs)
    )
)


def _skew_from(n, xs):
    m = [[0] * n for _ in range(n)]
    it = iter(xs)
    for i, j in itertools.combinations(range(n), 2):
        m[i][j] = next(it)
        m[j][i] = -m[i][j]
    return m


@given(skew, st.data())
def test_mutation_is_an_involution_and_matches_brute_force(eps, data):
    k = data.draw(st.integers(0, len(eps) - 1))
    once = mutate_epsilon(eps, k)
    assert [list(r) for r in once] == brute_mutation(eps, k)
    assert is_skew(once)
    assert [list(r) for r in mutate_epsilon(once, k)] == eps


@pytest.mark.parametrize("g,s", SURFACES)
def test_flip_twice_returns_original(g, s):
    t = standard_surface(g, s)
    for k in t.edges:
        if t.flippable(k) and not flip(t, k).has_self_folded():
            assert flip(flip(t, k), k) == t


@given(st.sampled_from(SURFACES), st.integers(0, 10**6), st.integers(0, 6))
def test_flip_commutes_with_mutation_on_random_surfaces(gs, seed, steps):
    t = random_flip_walk(standard_surface(*gs), steps, random.Random(seed))
    eps = exchange_matrix(t)
    for k in t.edges:
        if not t.flippable(k):
            continue
        t2 = flip(t, k)
        if t2.has_self_folded():
            continue
        assert exchange_matrix(t2) == mutate_epsilon(eps, t.edges.index(k))


def test_once_punctured_torus_flips_stay_valid():
    t = once_punctured_torus()
    for k in t.edges:
        t2 = flip(t, k)
        assert len(t2.edges) == 3 and not t2.has_self_folded()


def _quadrilateral_ok(t, k):
    """Brute force: k borders two distinct triangles, neither self-folded."""
    slots = [(ti, i) for ti, tri in enumerate(t.triangles) for i, e in enumerate(tri) if e == k]
    tris = {ti for ti, _ in slots}
    return len(tris) == 2 and all(len(set(t.triangles[ti])) == 3 for ti in tris)


def test_thrice_punctured_sphere_flips_agree_with_brute_force():
    t = thrice_punctured_sphere()
    for k in t.edges:
        assert t.flippable(k) == _quadrilateral_ok(t, k)
        if t.flippable(k):
            t2 = flip(t, k)
            assert len(t2.edges) == 3
            # flipping the resulting self-folded configuration is refused
            for e in t2.edges:
                if not _quadrilateral_ok(t2, e):
                    with pytest.raises(SelfFoldedFlip):
                        flip(t2, e)


def test_relabel_permutes_the_exchange_matrix():
    t = once_punctured_torus()
    sigma = {1: 2, 2: 3, 3: 1}
    t2 = relabel(t, sigma)
    e, e2 = exchange_matrix(t), exchange_matrix(t2)
    idx = {l: i for i, l in enumerate(t.edges)}
    for a in t.edges:
        for b in t.edges:
            assert e2[idx[sigma[a]]][idx[sigma[b]]] == e[idx[a]][idx[b]]
    inv = {v: k for k, v in sigma.items()}
    assert relabel(t2, inv) == t
    assert relabel(t, {}) == t
    assert permute_epsilon(e, t.edges, sigma) == e2


def test_invalid_triangulations_are_rejected():
    with pytest.raises(InvalidTriangulation):
        Triangulation(0, ("p",), (1, 2, 3), ((1, 2, 3),), (("p", "p", "p"),))


def test_seed_with_provenance_refuses_self_folded_flips():
    s = Seed.from_triangulation(thrice_punctured_sphere())
    for k in s.labels:
        assert not s.can_mutate(k)
        with pytest.raises(SelfFoldedFlip):
            s.mutate(k)
    # the abstract seed has no such restriction
    assert s.forget().mutate(1).epsilon == s.epsilon


def test_seed_validates_skew_symmetry():
    with pytest.raises(ValueError):
        Seed(("a", "b"), ((0, 1), (1, 0)))


def test_four_punctured_sphere_has_unit_entries():
    eps = exchange_matrix(four_punctured_sphere())
    assert any(abs(x) == 1 for row in eps for x in row)


@pytest.mark.parametrize("g,s", [(1, 1), (0, 4), (1, 2)])
def test_json_round_trips(g, s):
    t = standard_surface(g, s)
    data = triangulation_to_json(t)
    assert triangulation_from_json(data) == t
    data.pop("corners", None)
    assert exchange_matrix(triangulation_from_json(data)) == exchange_matrix(t)
    seed = Seed.from_triangulation(t).forget()
    assert seed_from_json(seed_to_json(seed)) == seed
