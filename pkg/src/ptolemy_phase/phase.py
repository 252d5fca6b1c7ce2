"""Symbolic normalisation of intertwiner words over the symplectic Ptolemy
groupoid.

A word is a list of factors read as an operator product (the leftmost factor
is applied last).  Factors are scalar phases, quantum dilogarithms of a
linear form, Weil intertwiners F between two decompositions of one seed, and
relabeling maps R between decompositions related by a linear isomorphism.
``normalize`` rewrites a word to a scalar phase times an irreducible residual.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from . import linalg as la
from .errors import IrreducibleResidual, NonComposable, NotAFlip, NotARelabel
from .surface import Seed, check_permutation
from .symplectic import (
    SkewSpace,
    Subspace,
    SymplecticDecomposition,
    kashiwara_index,
    transport_decomposition,
    validate_decomposition,
)
from .tropical import LinearMap, c_k, c_sigma, _sign


@lru_cache(maxsize=None)
def space_of(seed: Seed) -> SkewSpace:
    return SkewSpace.of_seed(seed)


# -- phases -----------------------------------------------------------------

@dataclass(frozen=True)
class Phase:
    """alpha^alpha_pow * exp(i pi eighth_pow / 4); eighth_pow None = indeterminate."""

    alpha_pow: int = 0
    eighth_pow: int | None = 0

    def __post_init__(self):
        if self.eighth_pow is not None:
            object.__setattr__(self, "eighth_pow", self.eighth_pow % 8)

    def __mul__(self, other: "Phase") -> "Phase":
        e = None if self.eighth_pow is None or other.eighth_pow is None else self.eighth_pow + other.eighth_pow
        return Phase(self.alpha_pow + other.alpha_pow, e)

    @property
    def indeterminate(self) -> bool:
        return self.eighth_pow is None

    def value(self, hbar: float) -> complex:
        import cmath

        if self.eighth_pow is None:
            raise ValueError("phase has an indeterminate eighth root of unity")
        alpha = cmath.exp(1j * cmath.pi * (hbar + 1 / hbar) / 24)
        return alpha ** self.alpha_pow * cmath.exp(1j * cmath.pi * self.eighth_pow / 4)

    def to_json(self) -> dict:
        return {"alpha_pow": self.alpha_pow, "eighth_pow": "indeterminate" if self.eighth_pow is None else self.eighth_pow}


INDETERMINATE = Phase(0, None)


# -- objects and factors --------------------------------------------------

@dataclass(frozen=True)
class SPtObject:
    seed: Seed
    decomp: SymplecticDecomposition

    def __post_init__(self):
        validate_decomposition(space_of(self.seed), self.decomp)

    @property
    def space(self) -> SkewSpace:
        return space_of(self.seed)


@dataclass(frozen=True)
class LinearForm:
    """Coefficients over the seed labels plus a multiple of the central symbol."""

    labels: tuple
    coefficients: tuple
    constant: Fraction = Fraction(0)

    def to_json(self) -> dict:
        out = {str(l): la.fmt(c) for l, c in zip(self.labels, self.coefficients) if c != 0}
        if self.constant:
            out["c"] = la.fmt(self.constant)
        return out


@dataclass(frozen=True)
class PhaseFactor:
    phase: Phase


@dataclass(frozen=True)
class PhiFactor:
    argument: tuple
    exponent: int
    obj: SPtObject

    @property
    def dom(self):
        return self.obj

    @property
    def cod(self):
        return self.obj

    def form(self) -> LinearForm:
        return LinearForm(self.obj.seed.labels, self.argument)


@dataclass(frozen=True)
class FFactor:
    """Weil intertwiner H_src -> H_dst between two decompositions of one seed."""

    src: SPtObject
    dst: SPtObject

    def __post_init__(self):
        if self.src.seed != self.dst.seed:
            raise NonComposable("F relates decompositions of a single seed")

    @property
    def dom(self):
        return self.src

    @property
    def cod(self):
        return self.dst


@dataclass(frozen=True)
class RFactor:
    """Relabeling H_src -> H_dst; ``via`` maps V_src onto V_dst, src onto dst."""

    src: SPtObject
    dst: SPtObject
    via: LinearMap

    def __post_init__(self):
        if transport_decomposition(self.via.matrix, self.src.decomp) != self.dst.decomp:
            raise NonComposable("R requires via(src) = dst")
        if not self.via.preserves(self.src.space.B, self.dst.space.B):
            raise NonComposable("R requires via to preserve the forms")

    @property
    def dom(self):
        return self.src

    @property
    def cod(self):
        return self.dst


Factor = PhaseFactor | PhiFactor | FFactor | RFactor


def check_composable(word: Sequence) -> None:
    ops = [f for f in word if not isinstance(f, PhaseFactor)]
    for left, right in zip(ops, ops[1:]):
        if right.cod != left.dom:
            raise NonComposable(f"codomain of {type(right).__name__} does not match domain of {type(left).__name__}")


# -- elementary words ---------------------------------------------------------

def elementary_flip_word(frm: SPtObject, to: SPtObject, k, sign) -> list:
    """alpha^s Phi(s x_k)^s F R for the flip morphism [frm, to] at k."""
    s = _sign(sign)
    if k not in frm.seed.labels or not frm.seed.can_mutate(k) or frm.seed.mutate(k) != to.seed:
        raise NotAFlip(f"objects are not related by a flip at {k!r}")
    C = c_k(frm.seed, k, s)
    mid = SPtObject(frm.seed, transport_decomposition(C.matrix, to.decomp))
    xk = frm.space.basis_vector(k)
    return [
        PhaseFactor(Phase(s, 0)),
        PhiFactor(la.scale(s, xk), s, frm),
        FFactor(mid, frm),
        RFactor(to, mid, C),
    ]


def elementary_perm_word(frm: SPtObject, to: SPtObject, sigma: Mapping) -> list:
    """F R for the relabeling morphism [frm, to] by sigma."""
    try:
        sigma = check_permutation(frm.seed.labels, sigma)
    except ValueError as exc:
        raise NotARelabel(str(exc)) from None
    if frm.seed.relabel(sigma) != to.seed:
        raise NotARelabel("objects are not related by this relabeling")
    C = c_sigma(frm.seed.labels, sigma)
    mid = SPtObject(frm.seed, transport_decomposition(C.matrix, to.decomp))
    return [FFactor(mid, frm), RFactor(to, mid, C)]


def decomposition_change_word(frm: SPtObject, to: SPtObject) -> list:
    if frm.seed != to.seed:
        raise NonComposable("decomposition change keeps the seed")
    return [FFactor(to, frm)]


@dataclass(frozen=True)
class Flip:
    src: SPtObject
    dst: SPtObject
    k: object
    sign: int

    def word(self):
        return elementary_flip_word(self.src, self.dst, self.k, self.sign)


@dataclass(frozen=True)
class Perm:
    src: SPtObject
    dst: SPtObject
    sigma: tuple  # sorted items of the permutation

    def word(self):
        return elementary_perm_word(self.src, self.dst, dict(self.sigma))


@dataclass(frozen=True)
class DecompChange:
    src: SPtObject
    dst: SPtObject

    def word(self):
        return decomposition_change_word(self.src, self.dst)


Morphism = Flip | Perm | DecompChange


def loop_word(morphisms: Sequence) -> list:
    word = []
    for m in morphisms:
        word.extend(m.word())
    check_composable(word)
    return word


# -- normalisation ---------------------------------------------------------

@dataclass
class Normalization:
    phase: Phase
    residual: list
    phi_trace: list = field(default_factory=list)
    log: list = field(default_factory=list)

    @property
    def is_scalar(self) -> bool:
        return not self.residual


def _conjugate(m, phi: PhiFactor) -> PhiFactor:
    """m Phi(a) = Phi(a') m for a monomial factor m whose domain carries phi."""
    if isinstance(m, FFactor):
        return PhiFactor(phi.argument, phi.exponent, m.dst)
    return PhiFactor(m.via(phi.argument), phi.exponent, m.dst)


def _rewrite_monomials(tail: list, log: list) -> tuple[Phase, list]:
    phase = Phase()
    changed = True
    while changed:
        changed = False
        for i, f in enumerate(tail):  # (e)
            if f.src == f.dst and (isinstance(f, FFactor) or f.via.is_identity()):
                del tail[i]
                log.append(f"(e) drop {type(f).__name__}")
                changed = True
                break
        if changed:
            continue
        for i in range(len(tail) - 1):
            a, b = tail[i], tail[i + 1]
            if isinstance(a, RFactor) and isinstance(b, RFactor):  # (c)
                tail[i : i + 2] = [RFactor(b.src, a.dst, a.via @ b.via)]
                log.append("(c) R.R -> R")
                changed = True
                break
            if isinstance(a, FFactor) and isinstance(b, RFactor):  # (b)
                M = b.via
                W = SPtObject(b.src.seed, transport_decomposition(M.inverse().matrix, a.dst.decomp))
                tail[i : i + 2] = [RFactor(W, a.dst, M), FFactor(b.src, W)]
                log.append("(b) F.R -> R.F")
                changed = True
                break
            if isinstance(a, FFactor) and isinstance(b, FFactor):  # (d)
                A, B, C = b.src, b.dst, a.dst
                tau = kashiwara_index(A.space, A.decomp.lagrangian, B.decomp.lagrangian, C.decomp.lagrangian)
                phase = phase * Phase(0, tau)
                tail[i : i + 2] = [FFactor(A, C)]
                log.append(f"(d) F.F -> phase(tau={tau}) F")
                changed = True
                break
    return phase, tail


_PENTAGON = [(1, 0, 1), (0, 1, 1), (1, 0, -1), (1, 1, -1), (0, 1, -1)]
_PENTAGON_INV = [(0, 1, 1), (1, 1, 1), (1, 0, 1), (0, 1, -1), (1, 0, -1)]
_TEMPLATES = [tpl[r:] + tpl[:r] for tpl in (_PENTAGON, _PENTAGON_INV) for r in range(5)]


def _match_pentagon(window, B) -> bool:
    """Is the window a cyclic rotation of the pentagon relator (or its inverse)?

    The relator Phi(P)Phi(Q)Phi(P)^-1Phi(P+Q)^-1Phi(Q)^-1 equals the identity
    when B(P, Q) = 1; it is the pentagon identity
    Phi(P)Phi(Q) = Phi(Q)Phi(P+Q)Phi(P) moved to one side.
    """
    for tpl in _TEMPLATES:
        iP = next(i for i, t in enumerate(tpl) if t[:2] == (1, 0))
        iQ = next(i for i, t in enumerate(tpl) if t[:2] == (0, 1))
        P, Q = window[iP][0], window[iQ][0]
        if la.bilinear(B, P, Q) != 1:
            continue
        if all(
            window[m][1] == e and window[m][0] == la.add(la.scale(cp, P), la.scale(cq, Q))
            for m, (cp, cq, e) in enumerate(tpl)
        ):
            return True
    return False


def _reduce_phis(phis: list, B, log: list) -> list:
    phis = list(phis)
    while True:
        # (f) adjacent inverse pairs
        hit = next((i for i in range(len(phis) - 1) if phis[i][0] == phis[i + 1][0] and phis[i][1] == -phis[i + 1][1]), None)
        if hit is not None:
            del phis[hit : hit + 2]
            log.append("(f) cancel inverse pair")
            continue
        # (h) pentagon relator in a window of five
        hit = next((i for i in range(len(phis) - 4) if _match_pentagon(phis[i : i + 5], B)), None)
        if hit is not None:
            del phis[hit : hit + 5]
            log.append("(h) pentagon identity, then (f) cancellations")
            continue
        # (g) commute a factor next to its inverse
        moved = False
        for i, j in itertools.combinations(range(len(phis)), 2):
            a, b = phis[i], phis[j]
            if a[0] == b[0] and a[1] == -b[1] and all(la.bilinear(B, phis[m][0], b[0]) == 0 for m in range(i + 1, j)):
                phis.insert(i + 1, phis.pop(j))
                log.append("(g) commute factors")
                moved = True
                break
        if moved:
            continue
        # (g) commute to expose a pentagon window
        if len(phis) >= 5 and _commute_to_pentagon(phis, B, log):
            continue
        return phis


def _commute_to_pentagon(phis: list, B, log: list) -> bool:
    n = len(phis)
    for idx in itertools.combinations(range(n), 5):
        window = [phis[i] for i in idx]
        if not _match_pentagon(window, B):
            continue
        # every other factor inside the span must commute with all five
        others = [m for m in range(idx[0], idx[-1] + 1) if m not in idx]
        ok = all(la.bilinear(B, phis[m][0], phis[i][0]) == 0 for m in others for i in idx)
        if ok:
            for i in reversed(idx):
                phis.pop(i)
            log.append("(g) commute factors, then (h) pentagon identity")
            return True
    return False


def normalize_report(word: Sequence) -> Normalization:
    """Full normalisation with the conjugated Phi arguments and a rule log."""
    check_composable(word)
    log: list = []
    phase = Phase()
    items = []
    for f in word:
        if isinstance(f, PhaseFactor):
            phase = phase * f.phase
        else:
            items.append(f)
    # (a) push monomial factors right past Phi factors
    phis, tail = [], []
    for f in reversed(items):
        if isinstance(f, PhiFactor):
            phis.insert(0, f)
        else:
            phis = [_conjugate(f, p) for p in phis]
            tail.insert(0, f)
            if phis:
                log.append(f"(a) conjugate {len(phis)} Phi factor(s) through {type(f).__name__}")
    # the leftmost factor now carries everything; all Phi act on one object
    mono_phase, tail = _rewrite_monomials(tail, log)
    phase = phase * mono_phase
    trace = [(p.argument, p.exponent) for p in phis]
    B = phis[0].obj.space.B if phis else None
    reduced = _reduce_phis(trace, B, log) if phis else []
    base = phis[0].obj if phis else None
    residual = [PhiFactor(a, e, base) for a, e in reduced] + tail
    return Normalization(phase, residual, trace, log)


def normalize(word: Sequence) -> tuple[Phase, list]:
    r = normalize_report(word)
    return r.phase, r.residual


def residual_to_json(residual: Sequence) -> list:
    out = []
    for f in residual:
        if isinstance(f, PhiFactor):
            out.append({"phi": f.form().to_json(), "exponent": f.exponent})
        elif isinstance(f, FFactor):
            out.append({"F": "weil intertwiner"})
        else:
            out.append({"R": la.fmt_mat(f.via.matrix)})
    return out


# -- loops -------------------------------------------------------------------

def _with_signs(morphisms: Sequence, signs: Sequence) -> list:
    out, it = [], iter(signs)
    for m in morphisms:
        out.append(replace(m, sign=next(it)) if isinstance(m, Flip) else m)
    return out


def phase_of_loop_report(morphisms: Sequence, max_swaps: int = 3) -> Normalization:
    """Normalise a loop; if stuck, retry with sign-swapped flips.

    Swapping the sign of a flip uses the equality of the two signed mutation
    intertwiners, which only holds up to an unknown eighth root of unity, so
    any such result carries an indeterminate eighth power.
    """
    morphisms = list(morphisms)
    if morphisms and morphisms[0].src != morphisms[-1].dst:
        raise NonComposable("loop must start and end at the same object")
    first = normalize_report(loop_word(morphisms))
    if first.is_scalar:
        return first
    flips = [i for i, m in enumerate(morphisms) if isinstance(m, Flip)]
    signs = [m.sign for m in morphisms if isinstance(m, Flip)]
    for size in range(1, min(max_swaps, len(flips)) + 1):
        for combo in itertools.combinations(range(len(flips)), size):
            new = [-s if i in combo else s for i, s in enumerate(signs)]
            r = normalize_report(loop_word(_with_signs(morphisms, new)))
            if r.is_scalar:
                r.phase = Phase(r.phase.alpha_pow, None)
                r.log.append(f"sign swap at flips {list(combo)} (eighth root indeterminate)")
                return r
    raise IrreducibleResidual("loop does not reduce to a scalar", first.residual, first.phase)


def phase_of_loop(morphisms: Sequence) -> Phase:
    return phase_of_loop_report(morphisms).phase
