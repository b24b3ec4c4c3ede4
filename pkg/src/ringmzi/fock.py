"""Fock-basis representation of twin-beam squeezed pair sources.

Each source is a multi-mode twin-beam squeezer: per spectral (Schmidt) mode k
the photon-pair number follows a geometric distribution
p(n) = (1 - x_k) x_k**n, with squeezing strength x_k.  The module builds the
joint pre-interference pair-number distribution for two such sources under a
global truncation on the total pair count.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .errors import ConfigError, HeraldError, InfeasibleError

__all__ = [
    "SchmidtSpectrum",
    "SourceModel",
    "OccupationState",
    "TruncationPolicy",
    "pair_number_pmf",
    "squeezing_from_nbar",
    "schmidt_from_purity",
    "enumerate_joint_states",
    "enumerate_source_states",
]

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Normalized Schmidt weights of the biphoton amplitude, sorted descending."""

    lambdas: tuple[float, ...]

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lambdas)
        if not lam:
            raise InfeasibleError("at least one Schmidt mode required")
        if any(v < 0 for v in lam):
            raise InfeasibleError("Schmidt weights must be non-negative")
        if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
            raise InfeasibleError("Schmidt weights must be sorted descending")
        if abs(sum(lam) - 1.0) > _NORM_TOL:
            raise InfeasibleError(f"Schmidt weights must sum to 1, got {sum(lam)!r}")
        object.__setattr__(self, "lambdas", lam)

    @property
    def count(self) -> int:
        return len(self.lambdas)

    def purity(self) -> float:
        """Heralded single-photon purity sum(lambda_k**2)."""
        return sum(v * v for v in self.lambdas)


@dataclass(frozen=True)
class SourceModel:
    """Twin-beam squeezer with per-Schmidt-mode squeezing strengths.

    ``xk`` is derived from ``nbar`` (mean pairs per pulse) by allocating
    per-mode mean pairs proportionally to the Schmidt weights.
    """

    schmidt: SchmidtSpectrum
    nbar: float
    xk: tuple[float, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.nbar < 0:
            raise InfeasibleError("nbar must be non-negative")
        if self.xk is None:
            object.__setattr__(
                self, "xk", tuple(squeezing_from_nbar(self.nbar, self.schmidt))
            )
        else:
            xk = tuple(float(v) for v in self.xk)
            if len(xk) != self.schmidt.count:
                raise ConfigError("xk length must match Schmidt mode count")
            if any(not (0.0 <= x < 1.0) for x in xk):
                raise InfeasibleError("squeezing strengths must lie in [0, 1)")
            mean = sum(x / (1.0 - x) for x in xk)
            if abs(mean - self.nbar) > 1e-9:
                raise ConfigError(
                    f"xk imply mean pairs {mean!r}, inconsistent with nbar {self.nbar!r}"
                )
            object.__setattr__(self, "xk", xk)


@dataclass(frozen=True)
class TruncationPolicy:
    """Cap on the total photon-pair count across both sources."""

    max_total_pairs: int = 10

    def __post_init__(self):
        if self.max_total_pairs < 1:
            raise ConfigError("max_total_pairs must be >= 1")


@dataclass(frozen=True)
class OccupationState:
    """Pair occupations per (source, Schmidt mode) slot with a probability weight."""

    s1: tuple[int, ...]
    s2: tuple[int, ...]
    weight: float

    @property
    def occupations(self) -> dict[tuple[str, int], int]:
        occ = {("S1", k): n for k, n in enumerate(self.s1)}
        occ.update({("S2", k): n for k, n in enumerate(self.s2)})
        return occ

    @property
    def total_pairs(self) -> int:
        return sum(self.s1) + sum(self.s2)


def pair_number_pmf(x: float, n_max: int) -> list[float]:
    """Truncated geometric pair-number distribution (1 - x) x**n, n = 0..n_max."""
    if not (0.0 <= x < 1.0):
        raise InfeasibleError(f"squeezing strength must lie in [0, 1), got {x!r}")
    if n_max < 0:
        raise InfeasibleError("n_max must be >= 0")
    return [(1.0 - x) * x**n for n in range(n_max + 1)]


def squeezing_from_nbar(nbar: float, schmidt: SchmidtSpectrum) -> list[float]:
    """Per-mode squeezing strengths whose summed geometric means equal nbar.

    Mode k receives mean pairs lambda_k * nbar; inverting n = x/(1-x) gives
    x_k = lambda_k nbar / (1 + lambda_k nbar).
    """
    if nbar < 0:
        raise InfeasibleError("nbar must be non-negative")
    xs = []
    for lam in schmidt.lambdas:
        mean_k = lam * nbar
        xs.append(mean_k / (1.0 + mean_k))
    return xs


def schmidt_from_purity(purity: float, modes: int) -> SchmidtSpectrum:
    """Schmidt spectrum achieving a target purity sum(lambda**2).

    For two modes the closed form is lambda_1 = (1 + sqrt(2 purity - 1)) / 2.
    For K > 2 a thermal-like geometric profile is solved numerically.
    """
    if modes < 1:
        raise InfeasibleError("mode count must be >= 1")
    if not 1.0 / modes <= purity <= 1.0:
        raise InfeasibleError(
            f"purity must lie in [1/{modes}, 1], got {purity!r}"
        )
    if modes == 1 or purity == 1.0:
        lam = (1.0,) + (0.0,) * (modes - 1)
        return SchmidtSpectrum(lam)
    if modes == 2:
        l1 = 0.5 * (1.0 + math.sqrt(2.0 * purity - 1.0))
        return SchmidtSpectrum((l1, 1.0 - l1))
    # Geometric profile lambda_k ~ r**k; bisect on r in (0, 1).
    def _purity(r: float) -> float:
        w = [r**k for k in range(modes)]
        s = sum(w)
        return sum((v / s) ** 2 for v in w)

    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _purity(mid) > purity:
            lo = mid
        else:
            hi = mid
    r = 0.5 * (lo + hi)
    w = [r**k for k in range(modes)]
    s = sum(w)
    return SchmidtSpectrum(tuple(v / s for v in w))


def enumerate_source_states(
    source: SourceModel, trunc: TruncationPolicy
) -> list[tuple[tuple[int, ...], float]]:
    """All per-mode occupations of one source with total pairs <= cap.

    Weights are exact products of the untruncated geometric pmf terms, so
    they sum to 1 minus the truncation tail.
    """
    cap = trunc.max_total_pairs
    k = source.schmidt.count
    pmfs = [pair_number_pmf(x, cap) for x in source.xk]
    out = []
    for occ in itertools.product(range(cap + 1), repeat=k):
        if sum(occ) > cap:
            continue
        w = 1.0
        for x_pmf, n in zip(pmfs, occ):
            w *= x_pmf[n]
        if w > 0.0:
            out.append((occ, w))
    return out


def enumerate_joint_states(
    s1: SourceModel, s2: SourceModel, trunc: TruncationPolicy
) -> list[OccupationState]:
    """Joint occupation states for two independent sources, total pairs capped."""
    if s1.schmidt.count != s2.schmidt.count:
        raise ConfigError("both sources must retain the same Schmidt mode count")
    cap = trunc.max_total_pairs
    states = []
    for occ1, w1 in enumerate_source_states(s1, trunc):
        n1 = sum(occ1)
        for occ2, w2 in enumerate_source_states(s2, trunc):
            if n1 + sum(occ2) > cap:
                continue
            states.append(OccupationState(occ1, occ2, w1 * w2))
    return states
