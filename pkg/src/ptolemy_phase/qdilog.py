"""Numerical non-compact quantum dilogarithm.

    Phi(z) = exp( -1/4 * int_Omega exp(-i p z) / (sinh(pi p) sinh(pi hbar p)) dp / p )

where Omega runs along the real line and passes above the origin on a small
half circle.  The integral converges for |Im z| < pi (1 + hbar); outside the
strip the value is continued with the two difference relations.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergentParameter, PoleProximity, QuadratureFailure


@dataclass(frozen=True)
class QDParams:
    hbar: float
    tolerance: float = 1e-12
    nodes: int = 24  # Gauss-Legendre nodes per panel
    detour: float | None = None  # radius of the half circle; default 0.5 * min(1, 1/hbar)

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")


def alpha(hbar: float) -> complex:
    return cmath.exp(1j * math.pi * (hbar + 1 / hbar) / 24)


def _radius(p: QDParams) -> float:
    r = p.detour if p.detour is not None else 0.5 * min(1.0, 1.0 / p.hbar)
    if not 0 < r < min(1.0, 1.0 / p.hbar):
        raise ValueError("detour radius must stay below the first nonzero pole of the integrand")
    return r


def _log_phi(z: complex, p: QDParams, nodes: int) -> complex:
    """The exponent -1/4 * integral, by Gauss-Legendre panels."""
    h = p.hbar
    r = _radius(p)
    x, w = np.polynomial.legendre.leggauss(nodes)
    decay = math.pi * (1 + h) - abs(z.imag)
    # integrand on [r, R] decays like exp(-decay * p); stop where it is negligible
    R = r + (40.0 + math.log1p(abs(z))) / decay
    width = min(1.0, 2.0 / decay) if decay > 0 else 1.0
    edges = np.arange(r, R + width, width)
    a, b = edges[:-1, None], edges[1:, None]
    t = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
    wt = (0.5 * (b - a) * w).ravel()
    # f(t) + f(-t) = -2i sin(t z) / (t sinh(pi t) sinh(pi h t))
    with np.errstate(over="ignore", invalid="ignore"):
        line = -2j * np.sin(t * z) / (t * np.sinh(np.pi * t) * np.sinh(np.pi * h * t))
    line = np.where(np.isfinite(line), line, 0.0)
    total = np.sum(wt * line)
    # half circle p = r e^{i theta}, theta from pi down to 0
    th, tw = np.polynomial.legendre.leggauss(4 * nodes)
    theta = 0.5 * math.pi * (th + 1)  # [0, pi]
    pc = r * np.exp(1j * theta)
    fc = np.exp(-1j * pc * z) / (np.sinh(np.pi * pc) * np.sinh(np.pi * h * pc) * pc)
    arc = -np.sum(0.5 * math.pi * tw * fc * 1j * pc)
    return -0.25 * (total + arc)


def _phi_strip(z: complex, p: QDParams) -> tuple[complex, float]:
    """Value in the strip and an estimate of its absolute error (n vs 2n nodes)."""
    n = p.nodes
    a = _log_phi(z, p, n)
    b = _log_phi(z, p, 2 * n)
    if abs(a - b) > max(p.tolerance, 1e-13) * max(1.0, abs(b)):
        raise QuadratureFailure(f"quadrature error estimate {abs(a - b):.2e} exceeds tolerance")
    value = cmath.exp(b)
    return value, abs(a - b) * abs(value)


def phi(z: complex, p: QDParams, direct: bool = False) -> complex:
    """Phi^hbar(z); points outside the strip are reached by difference relations.

    With ``direct=True`` no shift is applied and z must lie in the strip.
    """
    return phi_estimate(z, p, direct)[0]


def phi_estimate(z: complex, p: QDParams, direct: bool = False) -> tuple[complex, float]:
    """Phi^hbar(z) together with an estimate of the absolute error."""
    z = complex(z)
    h = p.hbar
    half = math.pi * (1 + h)
    if direct:
        if abs(z.imag) >= half:
            raise ValueError("direct evaluation needs |Im z| < pi (1 + hbar)")
        return _phi_strip(z, p)
    factor = 1.0 + 0j
    guard = max(1e-9, 100 * p.tolerance)
    # shifts by 2 pi i hbar and by 2 pi i, with their multipliers
    shifts = (
        (2 * math.pi * h, lambda w: 1 + cmath.exp(1j * math.pi * h) * cmath.exp(w)),
        (2 * math.pi, lambda w: 1 + cmath.exp(1j * math.pi / h) * cmath.exp(w / h)),
    )
    # keep the quadrature well inside the strip
    while abs(z.imag) > 0.5 * half:
        s, mult = min(shifts, key=lambda sm: abs(abs(z.imag) - sm[0]))
        if z.imag > 0:
            w = z - 1j * s
            factor *= mult(w)  # Phi(w + i s) = mult(w) Phi(w)
        else:
            m = mult(z)
            if abs(m) < guard:
                raise PoleProximity("argument is too close to a pole")
            factor /= m
            w = z + 1j * s
        z = w
    value, err = _phi_strip(z, p)
    return factor * value, abs(factor) * err


# -- identity defects ------------------------------------------------------

def unitarity_defect(x: float, p: QDParams) -> float:
    """| |Phi(x)| - 1 | at a real point."""
    return abs(abs(phi(complex(x), p)) - 1)


def reflexivity_defect(z: complex, p: QDParams) -> float:
    """|Phi(z) Phi(-z) alpha^2 exp(-z^2 / (4 pi i hbar)) - 1|."""
    z = complex(z)
    lhs = phi(z, p) * phi(-z, p) * alpha(p.hbar) ** 2 * cmath.exp(-(z * z) / (4j * math.pi * p.hbar))
    return abs(lhs - 1)


def difference_defect(z: complex, p: QDParams, step: str = "hbar", direct: bool = False) -> float:
    """Defect of Phi(z + 2 pi i s) = (1 + e^{i pi s} e^{z s'}) Phi(z).

    step "hbar": s = hbar, s' = 1; step "one": s = 1, with e^{i pi / hbar} e^{z / hbar}.
    With ``direct=True`` both values come from quadrature, so the relation is
    tested rather than used; z and the shifted point must lie in the strip.
    """
    z = complex(z)
    h = p.hbar
    if step == "hbar":
        shift, mult = 2j * math.pi * h, 1 + cmath.exp(1j * math.pi * h) * cmath.exp(z)
    elif step == "one":
        shift, mult = 2j * math.pi, 1 + cmath.exp(1j * math.pi / h) * cmath.exp(z / h)
    else:
        raise ValueError("step must be 'hbar' or 'one'")
    return abs(phi(z + shift, p, direct) / phi(z, p, direct) - mult)


def psi_compact(z: complex, q: complex, terms: int = 200) -> tuple[complex, float]:
    """prod_{i>=1} (1 + q^{2i-1} z)^{-1}, truncated, with a bound on the tail.

    The bound estimates |log| of the omitted factors.
    """
    if abs(q) >= 1:
        raise DivergentParameter("|q| must be < 1")
    val = 1.0 + 0j
    for i in range(1, terms + 1):
        factor = 1 + q ** (2 * i - 1) * z
        if abs(factor) < 1e-14:
            raise PoleProximity(f"z is a pole of factor {i}")
        val /= factor
    aq = abs(q)
    tail_term = abs(z) * aq ** (2 * terms + 1)
    tail = 2 * tail_term / (1 - aq * aq) if tail_term < 0.5 else math.inf
    return val, tail
