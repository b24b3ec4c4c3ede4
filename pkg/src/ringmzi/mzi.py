"""Mach-Zehnder interferometer transfer matrices.

The MZI is two directional couplers with a common coupling angle theta and an
internal phase phi.  theta = pi/4 is the balanced 50:50 case; a splitting
fraction of sin(theta)**2 maps a 35:65 coupler to theta = arccos(sqrt(0.65)).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InfeasibleError

__all__ = [
    "MziModel",
    "EffectiveSplitter",
    "mzi_unitary",
    "variable_bs_unitary",
    "effective_rt",
    "fringe_extrema_phase",
]


@dataclass(frozen=True)
class MziModel:
    theta: float = math.pi / 4
    phi: float = 0.0

    def with_phi(self, phi: float) -> "MziModel":
        return MziModel(self.theta, phi)


@dataclass(frozen=True)
class EffectiveSplitter:
    """Variable-beamsplitter parameters equivalent to the MZI."""

    R: float
    T: float
    eta_eff: float
    Phi: float


def _coupler(theta: float) -> np.ndarray:
    s, c = math.sin(theta), math.cos(theta)
    return np.array([[s, c], [c, -s]], dtype=complex)


def mzi_unitary(model: MziModel) -> np.ndarray:
    """2x2 transfer matrix: coupler * internal phase * coupler."""
    phase = np.diag([cmath.exp(1j * model.phi), 1.0])
    b = _coupler(model.theta)
    return b @ phase @ b


def variable_bs_unitary(model: MziModel) -> np.ndarray:
    """Equivalent variable-beamsplitter decomposition of the MZI.

    Agrees with mzi_unitary up to a global phase; the input/output phase Phi
    uses the principal branch of the log.
    """
    th, phi = model.theta, model.phi
    s2t = math.sin(2.0 * th)
    arg = math.sin(phi / 2.0) * s2t
    eta = 2.0 * math.asin(max(-1.0, min(1.0, arg)))
    t2 = math.tan(th) ** 2
    num = 1.0 + cmath.exp(1j * phi) * t2
    den = t2 + cmath.exp(1j * phi)
    big_phi = (-0.5j * cmath.log(num / den)).real if abs(den) > 0 else 0.0

    def assemble(phase):
        ce, se = math.cos(eta / 2.0), math.sin(eta / 2.0)
        core = np.array([[-1j * ce, -se], [se, 1j * ce]], dtype=complex)
        out_phase = np.diag([cmath.exp(0.5j * phase), cmath.exp(-0.5j * phase)])
        in_phase = np.diag(
            [1j * cmath.exp(0.5j * phase), -1j * cmath.exp(-0.5j * phase)]
        )
        return cmath.exp(0.5j * phi) * (out_phase @ core @ in_phase)

    # The log's principal branch leaves Phi ambiguous by pi (a diagonal sign
    # flip); pick the branch matching the direct-product bar amplitude.
    u = assemble(big_phi)
    u11 = math.sin(th) ** 2 * cmath.exp(1j * phi) + math.cos(th) ** 2
    if abs(u[0, 0] - u11) > abs(u[0, 0] + u11):
        u = assemble(big_phi + math.pi)
    return u


def effective_rt(model: MziModel) -> EffectiveSplitter:
    """Effective reflection/transmission of the MZI seen as one beamsplitter."""
    th, phi = model.theta, model.phi
    r = math.sin(phi / 2.0) ** 2 * math.sin(2.0 * th) ** 2
    arg = math.sin(phi / 2.0) * math.sin(2.0 * th)
    eta = 2.0 * math.asin(max(-1.0, min(1.0, arg)))
    t2 = math.tan(th) ** 2
    num = 1.0 + cmath.exp(1j * phi) * t2
    den = t2 + cmath.exp(1j * phi)
    big_phi = (-0.5j * cmath.log(num / den)).real
    return EffectiveSplitter(R=r, T=1.0 - r, eta_eff=eta, Phi=big_phi)


def _p4f_ind_imperfect(phi: float, theta: float) -> float:
    r = math.sin(phi / 2.0) ** 2 * math.sin(2.0 * theta) ** 2
    return (2.0 * r - 1.0) ** 2


def fringe_extrema_phase(theta: float) -> float:
    """Phase of the four-fold fringe minimum for coupler angle theta.

    Found by numeric minimization of the closed-form indistinguishable fringe
    over phi in [0, pi].  When 2 sin(2 theta)**2 >= 1 the minimum sits where
    the effective splitting is balanced (R = T = 1/2) and the fringe is zero.
    """
    s2t = math.sin(2.0 * theta)
    if abs(s2t) < 1e-12:
        raise InfeasibleError("sin(2 theta) = 0: MZI acts as identity")
    res = minimize_scalar(
        _p4f_ind_imperfect,
        bounds=(0.0, math.pi),
        args=(theta,),
        method="bounded",
        options={"xatol": 1e-12},
    )
    phi_star = float(res.x)
    # The analytic balanced-splitting point is exact when reachable.
    if 2.0 * s2t**2 >= 1.0:
        phi_star = 2.0 * math.asin(1.0 / (math.sqrt(2.0) * abs(s2t)))
    return phi_star
