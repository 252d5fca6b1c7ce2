"""Loops in the symplectic Ptolemy groupoid and their verification."""

from __future__ import annotations

import itertools
import os
import random
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import BrokenChain, DegenerateSpace, NotALoop, PtolemyError
from .phase import (
    DecompChange,
    Flip,
    Normalization,
    Perm,
    Phase,
    SPtObject,
    phase_of_loop_report,
    residual_to_json,
    space_of,
)
from .surface import Seed, Triangulation, check_permutation, flip
from .symplectic import (
    SymplecticDecomposition,
    canonical_decomposition,
    constrained_decomposition,
    decomposition_from_json,
    random_decomposition,
)
from .tropical import _sign, compose_permutations, invert_permutation


@dataclass(frozen=True)
class FlipStep:
    k: object
    sign: int = 1
    target: SymplecticDecomposition | None = None


@dataclass(frozen=True)
class PermStep:
    sigma: tuple
    target: SymplecticDecomposition | None = None

    @classmethod
    def of(cls, sigma: Mapping, target=None):
        return cls(tuple(sigma.items()), target)


@dataclass(frozen=True)
class DecompStep:
    target: SymplecticDecomposition


@dataclass(frozen=True)
class LoopSpec:
    base: SPtObject
    steps: tuple
    name: str = ""

    def signs(self) -> list:
        return [s.sign for s in self.steps if isinstance(s, FlipStep)]


def base_object(seed: Seed, decomp: SymplecticDecomposition | None = None) -> SPtObject:
    return SPtObject(seed, decomp if decomp is not None else canonical_decomposition(space_of(seed)))


def replay(spec: LoopSpec) -> list:
    """Objects visited by the loop; the last step lands back on the base."""
    objs = [spec.base]
    n = len(spec.steps)
    for i, step in enumerate(spec.steps):
        cur = objs[-1]
        try:
            if isinstance(step, FlipStep):
                if step.k not in cur.seed.labels or not cur.seed.can_mutate(step.k):
                    raise BrokenChain(f"step {i}: flip at {step.k!r} is not regular")
                seed = cur.seed.mutate(step.k)
            elif isinstance(step, PermStep):
                seed = cur.seed.relabel(check_permutation(cur.seed.labels, dict(step.sigma)))
            elif isinstance(step, DecompStep):
                seed = cur.seed
            else:
                raise BrokenChain(f"step {i}: unknown step {step!r}")
        except (KeyError, ValueError) as exc:
            raise BrokenChain(f"step {i}: {exc}") from None
        target = getattr(step, "target", None)
        if target is None and i == n - 1 and seed == spec.base.seed:
            objs.append(spec.base)
            continue
        try:
            decomp = target if target is not None else canonical_decomposition(space_of(seed))
            objs.append(SPtObject(seed, decomp))
        except PtolemyError as exc:
            raise BrokenChain(f"step {i}: {exc}") from None
    if objs[-1] != spec.base:
        raise NotALoop("loop does not return to its base object")
    return objs


def morphisms(spec: LoopSpec, signs: Sequence | None = None) -> list:
    objs = replay(spec)
    it = iter(signs) if signs is not None else None
    out = []
    for step, a, b in zip(spec.steps, objs, objs[1:]):
        if isinstance(step, FlipStep):
            s = next(it) if it is not None else step.sign
            out.append(Flip(a, b, step.k, s))
        elif isinstance(step, PermStep):
            out.append(Perm(a, b, step.sigma))
        else:
            out.append(DecompChange(a, b))
    return out


def loop_report(spec: LoopSpec) -> Normalization:
    return phase_of_loop_report(morphisms(spec))


# -- standard relations -------------------------------------------------------

def _flips(seq):
    return tuple(FlipStep(k, s) for k, s in seq)


def twice_flip_loop(base: SPtObject, k) -> LoopSpec:
    return LoopSpec(base, _flips([(k, 1), (k, -1)]), f"twice-flip {k}")


def square_loop(base: SPtObject, i, j) -> LoopSpec:
    return LoopSpec(base, _flips([(i, 1), (j, 1), (i, -1), (j, -1)]), f"square {i},{j}")


def pentagon_loop(base: SPtObject, i, j, signs=(1, 1, -1, -1, -1)) -> LoopSpec:
    flips = _flips(zip([i, j, i, j, i], signs))
    return LoopSpec(base, flips + (PermStep.of({i: j, j: i}),), f"pentagon {i},{j}")


def ff_triangle_loop(seed: Seed, d1, d2, d3) -> LoopSpec:
    """Loop whose phase is exp(i pi tau(l1, l2, l3) / 4)."""
    return LoopSpec(SPtObject(seed, d1), (DecompStep(d3), DecompStep(d2), DecompStep(d1)), "F triangle")


def perm_composition_loop(base: SPtObject, sigma: Mapping, gamma: Mapping) -> LoopSpec:
    total = compose_permutations(sigma, gamma)
    return LoopSpec(base, (PermStep.of(sigma), PermStep.of(gamma), PermStep.of(invert_permutation(total))), "perm composition")


def perm_conjugation_loop(base: SPtObject, sigma: Mapping, k) -> LoopSpec:
    inv = invert_permutation(sigma)
    steps = (PermStep.of(sigma), FlipStep(sigma[k], 1), PermStep.of(inv), FlipStep(k, -1))
    return LoopSpec(base, steps, f"perm conjugation {k}")


def flip_weil_square(base: SPtObject, k, other: SymplecticDecomposition, other_mut: SymplecticDecomposition) -> LoopSpec:
    """Flip, change decomposition, flip back, change back."""
    steps = (FlipStep(k, 1), DecompStep(other_mut), FlipStep(k, -1, target=other), DecompStep(base.decomp))
    return LoopSpec(base, steps, f"flip/F square {k}")


def perm_weil_square(base: SPtObject, sigma: Mapping, other: SymplecticDecomposition, other_perm: SymplecticDecomposition) -> LoopSpec:
    steps = (PermStep.of(sigma), DecompStep(other_perm), PermStep.of(invert_permutation(sigma), target=other), DecompStep(base.decomp))
    return LoopSpec(base, steps, "perm/F square")


def _closes(spec: LoopSpec) -> bool:
    try:
        replay(spec)
        return True
    except (BrokenChain, NotALoop):
        return False


def standard_relation_loops(seed: Seed, kinds=("twice", "square", "pentagon", "perm", "ff", "compat"), rng_seed: int = 0) -> list:
    """Every instantiable relation loop of the listed kinds at this seed."""
    base = base_object(seed)
    V = space_of(seed)
    labels = seed.labels
    loops = []
    if "twice" in kinds:
        loops += [twice_flip_loop(base, k) for k in labels]
    if "square" in kinds:
        loops += [square_loop(base, i, j) for i, j in itertools.combinations(labels, 2) if seed.eps(i, j) == 0]
    if "pentagon" in kinds:
        for i, j in itertools.permutations(labels, 2):
            if seed.eps(i, j) == 1:
                loops.append(pentagon_loop(base, i, j))
            elif seed.eps(i, j) == -1 and labels.index(i) < labels.index(j):
                spec = pentagon_loop(base, i, j, (1, 1, 1, -1, -1))
                loops.append(LoopSpec(spec.base, spec.steps, f"pentagon- {i},{j}"))
    if "perm" in kinds and len(labels) >= 2:
        swap = {labels[0]: labels[1], labels[1]: labels[0]}
        shift = {a: labels[(m + 1) % len(labels)] for m, a in enumerate(labels)}
        loops.append(perm_composition_loop(base, swap, shift))
        loops += [perm_conjugation_loop(base, shift, k) for k in labels]
    rng = random.Random(rng_seed)
    if "ff" in kinds:
        decs = [random_decomposition(V, rng) for _ in range(3)]
        loops.append(ff_triangle_loop(seed, *decs))
        cons = []
        for k in labels:
            try:
                cons.append(constrained_decomposition(V, V.basis_vector(k)))
            except PtolemyError:
                pass
        for a, b, c in zip(cons, cons[1:], cons[2:]):
            loops.append(ff_triangle_loop(seed, a, b, c))
    if "compat" in kinds:
        for k in labels:
            if not seed.can_mutate(k):
                continue
            V2 = space_of(seed.mutate(k))
            loops.append(flip_weil_square(base, k, random_decomposition(V, rng), random_decomposition(V2, rng)))
        if len(labels) >= 2:
            shift = {a: labels[(m + 1) % len(labels)] for m, a in enumerate(labels)}
            V2 = space_of(seed.relabel(shift))
            loops.append(perm_weil_square(base, shift, random_decomposition(V, rng), random_decomposition(V2, rng)))
    return [spec for spec in loops if _closes(spec)]


# -- verification ------------------------------------------------------------

@dataclass
class LoopResult:
    name: str
    phase: Phase | None
    residual: list = field(default_factory=list)
    error: str | None = None
    log: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"loop": self.name}
        if self.phase is not None:
            out.update(self.phase.to_json())
        out["residual"] = residual_to_json(self.residual)
        if self.error:
            out["error"] = self.error
        return out


def _verify_one(spec: LoopSpec) -> LoopResult:
    try:
        r = loop_report(spec)
        return LoopResult(spec.name, r.phase, r.residual, None, r.log)
    except PtolemyError as exc:
        residual = getattr(exc, "residual", None) or []
        return LoopResult(spec.name, getattr(exc, "phase", None), residual, f"{type(exc).__name__}: {exc}")


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("PTOLEMY_PHASE_THREADS", "1")))
    except ValueError:
        return 1


def verify_loops(loops: Sequence[LoopSpec]) -> list:
    workers = thread_cap()
    if workers == 1:
        return [_verify_one(s) for s in loops]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_verify_one, loops))


def verify_relations(seed: Seed, kinds=("twice", "square", "pentagon", "perm", "ff", "compat")) -> list:
    """Phase report for every standard relation loop at the seed."""
    try:
        loops = standard_relation_loops(seed, kinds)
    except DegenerateSpace:
        return []
    return verify_loops(loops)


def relabel_loop(spec: LoopSpec, pi: Mapping) -> LoopSpec:
    """Conjugate a whole loop by a global relabeling pi of the labels."""
    from .symplectic import transport_decomposition
    from .tropical import c_sigma

    seed = spec.base.seed
    new_seed = seed.relabel(pi)
    # C_pi maps V_new -> V_old; its inverse carries decompositions forward
    carry = c_sigma(seed.labels, pi).inverse().matrix

    def move(d):
        return None if d is None else transport_decomposition(carry, d)

    steps = []
    for s in spec.steps:
        if isinstance(s, FlipStep):
            steps.append(FlipStep(pi[s.k], s.sign, move(s.target)))
        elif isinstance(s, PermStep):
            sig = dict(s.sigma)
            steps.append(PermStep(tuple((pi[a], pi[b]) for a, b in sig.items()), move(s.target)))
        else:
            steps.append(DecompStep(move(s.target)))
    return LoopSpec(SPtObject(new_seed, move(spec.base.decomp)), tuple(steps), spec.name + " (relabeled)")


# -- JSON loops and path finding ---------------------------------------------

def loop_from_json(base: SPtObject, data: Sequence) -> LoopSpec:
    by_str = {str(l): l for l in base.seed.labels}

    def lab(x):
        return by_str.get(str(x), x)

    steps = []
    for item in data:
        target = decomposition_from_json(item["target"]) if "target" in item else None
        if "flip" in item:
            steps.append(FlipStep(lab(item["flip"]), _sign(item.get("sign", "+")), target))
        elif "perm" in item:
            steps.append(PermStep(tuple((lab(a), lab(b)) for a, b in item["perm"].items()), target))
        elif "decomp_change" in item:
            steps.append(DecompStep(decomposition_from_json(item["decomp_change"])))
        else:
            raise ValueError(f"unrecognised loop step {item!r}")
    return LoopSpec(base, tuple(steps), "loop")


def flip_path(start: Triangulation, goal: Triangulation, max_depth: int = 6):
    """Bounded breadth-first search for a flip sequence from start to goal."""
    seen = {start: []}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        if t == goal:
            return seen[t]
        if len(seen[t]) >= max_depth:
            continue
        for k in t.edges:
            if not t.flippable(k):
                continue
            n = flip(t, k)
            if n not in seen:
                seen[n] = seen[t] + [k]
                queue.append(n)
    return None
