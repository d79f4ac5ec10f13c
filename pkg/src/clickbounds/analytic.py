"""Closed-form bounds for Hanbury Brown-Twiss configurations: two on/off
detectors per mode behind a balanced splitter.

Single mode: the measured pair (p_0, q_0) with q_0 = sum_n p_n / 2^n bounds
the single-photon probability from both sides. Two modes: the no-click
correlations of a symmetric state bound the photon-pair probability p_{1,1}
from below. All three bounds are tight and double as executable optimality
proofs for the LP machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleDataError, InvalidParameterError
from .states import PhotonDistribution

_FEAS_SLACK = 1e-12
_D_CLAMP = 1e-10


@dataclass(frozen=True)
class HbtSingleModeData:
    """Measured vacuum probability p0 and half-transmission vacuum sum q0."""

    p0: float
    q0: float

    def __post_init__(self):
        for name, v in (("p0", self.p0), ("q0", self.q0)):
            if not 0.0 <= v <= 1.0:
                raise InvalidParameterError(f"{name} must lie in [0, 1], got {v}")
        # realizability: p0 <= q0 <= (1 + p0)/2 for some distribution
        if self.q0 < self.p0 - _FEAS_SLACK or self.q0 > (1.0 + self.p0) / 2.0 + _FEAS_SLACK:
            raise InfeasibleDataError(
                f"(p0={self.p0}, q0={self.q0}) is not realizable by any "
                "photon number distribution"
            )


@dataclass(frozen=True)
class HbtTwoModeData:
    """No-click probabilities of the two-mode Hanbury Brown-Twiss setup.

    Index convention: p0A integrates out mode B, q0A halves mode B while
    projecting mode A on vacuum, q00 halves both modes.
    """

    p0A: float
    p0B: float
    p00: float
    qA: float
    qB: float
    q0A: float
    q0B: float
    q00: float

    def __post_init__(self):
        for name in ("p0A", "p0B", "p00", "qA", "qB", "q0A", "q0B", "q00"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidParameterError(f"{name} must lie in [0, 1], got {v}")

    def d_coefficients(self) -> tuple[float, float, float]:
        """Vacuum-free combinations D1, D2, D3; nonnegative for physical data."""
        d1 = 1.0 - self.p0A - self.p0B + self.p00
        d2 = self.q00 - self.q0A - self.q0B + self.p00
        d3 = (self.qA + self.qB - self.q0A - self.q0B
              - self.p0A - self.p0B + 2.0 * self.p00)
        out = []
        for name, d in (("D1", d1), ("D2", d2), ("D3", d3)):
            if d < -_D_CLAMP:
                raise InfeasibleDataError(
                    f"{name} = {d} is negative; data not realizable by a "
                    "symmetric two-mode state"
                )
            out.append(max(d, 0.0))
        return tuple(out)


def p1_lower(data: HbtSingleModeData) -> float:
    """Tight lower bound max(4 q0 - 3 p0 - 1, 0) on the single-photon
    probability; saturated by a distribution supported on {0, 1, 2}."""
    return max(4.0 * data.q0 - 3.0 * data.p0 - 1.0, 0.0)


def p1_upper(data: HbtSingleModeData) -> float:
    """Tight upper bound 2 (q0 - p0); saturated in the limit of mass escaping
    to infinite photon number."""
    return 2.0 * (data.q0 - data.p0)


def p11_lower(data: HbtTwoModeData) -> float:
    """Lower bound max(12 D2 - 2 D3, 0) on the photon-pair probability of a
    symmetric two-mode state; optimal whenever 12 D2 - 2 D3 >= 0."""
    _, d2, d3 = data.d_coefficients()
    return max(12.0 * d2 - 2.0 * d3, 0.0)


def p11_applicable(data: HbtTwoModeData) -> bool:
    """True when the closed form is tight (12 D2 - 2 D3 >= 0)."""
    _, d2, d3 = data.d_coefficients()
    return 12.0 * d2 - 2.0 * d3 >= 0.0


def hbt_single_from_distribution(dist: PhotonDistribution) -> HbtSingleModeData:
    """Evaluate (p0, q0) for a known distribution (tail treated as mass the
    half-transmission sum cannot see, which keeps q0 conservative)."""
    halves = 0.5 ** np.arange(dist.cutoff + 1)
    return HbtSingleModeData(p0=float(dist.probs[0]), q0=float(halves @ dist.probs))


def symmetrize(joint: np.ndarray) -> np.ndarray:
    """Average a joint photon-number grid with its transpose."""
    joint = np.asarray(joint, dtype=float)
    if joint.ndim != 2 or joint.shape[0] != joint.shape[1]:
        raise InvalidParameterError("joint distribution must be a square grid")
    return (joint + joint.T) / 2.0


def hbt_two_mode_from_joint(joint: np.ndarray) -> HbtTwoModeData:
    """Evaluate all eight no-click probabilities for a symmetric joint grid
    p[m, n] (m photons in mode A, n in mode B). The grid is symmetrized
    first; it must sum to at most 1."""
    p = symmetrize(joint)
    if p.min() < 0:
        raise InvalidParameterError(f"negative joint probability {p.min()}")
    total = p.sum()
    if total > 1.0 + 1e-9:
        raise InvalidParameterError(f"joint probabilities sum to {total} > 1")
    halves = 0.5 ** np.arange(p.shape[0])
    return HbtTwoModeData(
        p0A=float(p[0, :].sum()),
        p0B=float(p[:, 0].sum()),
        p00=float(p[0, 0]),
        qA=float(halves @ p.sum(axis=1)),
        qB=float(halves @ p.sum(axis=0)),
        q0A=float(halves @ p[0, :]),
        q0B=float(halves @ p[:, 0]),
        q00=float(halves @ p @ halves),
    )


def hbt_two_mode_from_product(dist: PhotonDistribution) -> HbtTwoModeData:
    """Two-mode data for the product state dist x dist (symmetric by
    construction)."""
    joint = np.outer(dist.probs, dist.probs)
    return hbt_two_mode_from_joint(joint)
