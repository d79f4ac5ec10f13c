"""Balanced M-channel multiplexed on/off detector model.

Provides the click-response matrix C[m][n] (probability that n photons
produce exactly m clicks), the equivalent vacuum-projection probabilities
q_{0,k} at transmittances T_k = eta*k/M, and the exact conversion between
the two representations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import binom as _binom_dist

from .errors import ClickboundsError, InvalidParameterError
from .states import PhotonDistribution

TAIL_WARN_THRESHOLD = 1e-6
_CLICK_SUM_TOL = 1e-10
_CLICK_NEG_TOL = 1e-12


@dataclass(frozen=True)
class DetectorConfig:
    """Channel count M and per-channel detection efficiency eta."""

    channels: int
    efficiency: float = 1.0

    def __post_init__(self):
        if self.channels < 1:
            raise InvalidParameterError(f"channels must be >= 1, got {self.channels}")
        if not 0.0 < self.efficiency <= 1.0:
            raise InvalidParameterError(
                f"efficiency must lie in (0, 1], got {self.efficiency}"
            )
        # Pascal-triangle table binom(i, j) for i, j <= M; exact in floats
        # for every M this detector model is used at.
        m = self.channels
        table = np.zeros((m + 1, m + 1))
        table[:, 0] = 1.0
        for i in range(1, m + 1):
            table[i, 1 : i + 1] = table[i - 1, : i] + table[i - 1, 1 : i + 1]
        table.setflags(write=False)
        object.__setattr__(self, "_binom", table)

    def binom(self, i: int, j: int) -> float:
        return float(self._binom[i, j]) if 0 <= j <= i else 0.0

    def transmittances(self) -> np.ndarray:
        """T_k = eta*k/M for k = 0..M."""
        return self.efficiency * np.arange(self.channels + 1) / self.channels


@dataclass(frozen=True)
class ClickStatistics:
    """Probabilities c_0..c_M that exactly m detectors click.

    ``deficit`` is the known truncation shortfall: statistics computed from a
    truncated distribution sum to 1 - tail_mass rather than 1, and the
    constructor accounts for exactly that much missing mass.
    """

    clicks: np.ndarray
    deficit: float = 0.0

    def __post_init__(self):
        clicks = np.asarray(self.clicks, dtype=float)
        if clicks.ndim != 1 or clicks.size < 2:
            raise InvalidParameterError("clicks must be a vector c_0..c_M with M >= 1")
        if clicks.min() < -_CLICK_NEG_TOL:
            raise InvalidParameterError(f"negative click probability {clicks.min()}")
        clicks = np.clip(clicks, 0.0, None)
        total = clicks.sum() + self.deficit
        if abs(total - 1.0) > _CLICK_SUM_TOL:
            raise InvalidParameterError(
                f"click probabilities sum to {clicks.sum()!r}, expected "
                f"{1.0 - self.deficit!r}"
            )
        clicks.setflags(write=False)
        object.__setattr__(self, "clicks", clicks)

    @property
    def channels(self) -> int:
        return self.clicks.size - 1


@dataclass(frozen=True)
class VacuumProbabilities:
    """Vacuum-projection probabilities q_{0,k} after transmittances T_k.

    q_{0,0} = 1 holds exactly by normalization of the underlying state.
    """

    q: np.ndarray
    transmittances: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        t = np.asarray(self.transmittances, dtype=float)
        if q.shape != t.shape or q.ndim != 1:
            raise InvalidParameterError("q and transmittances must match in shape")
        if q[0] != 1.0:
            raise InvalidParameterError(f"q_00 must equal 1 exactly, got {q[0]!r}")
        if q.min() < -1e-12 or q.max() > 1.0 + 1e-12:
            raise InvalidParameterError("vacuum probabilities must lie in [0, 1]")
        if np.any(np.diff(q) > 1e-12):
            raise InvalidParameterError("q_{0,k} must be non-increasing in k")
        q.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "transmittances", t)


def _occupancy_table(channels: int, cutoff: int) -> np.ndarray:
    """O[k, i] = P(exactly i of M channels occupied | k photons split evenly).

    Markov recurrence over photons: each lands in an occupied channel with
    probability i/M or opens a new one with probability (M-i)/M. All terms are
    nonnegative, so the table is accurate to machine precision at any M.
    """
    m = channels
    occ = np.zeros((cutoff + 1, m + 1))
    occ[0, 0] = 1.0
    stay = np.arange(m + 1) / m
    grow = (m - np.arange(m)) / m
    for k in range(1, cutoff + 1):
        occ[k] = occ[k - 1] * stay
        occ[k, 1:] += occ[k - 1, :-1] * grow
    return occ


def click_matrix(cfg: DetectorConfig, cutoff: int) -> np.ndarray:
    """Click-response matrix C of shape (M+1, cutoff+1).

    Equals the alternating-sum expression
    C[m][n] = binom(M,m) * sum_j (-1)^j binom(m,j) (1 - eta + (m-j)eta/M)^n,
    but is evaluated as an occupancy recurrence mixed over binomial photon
    loss. The direct alternating sum cancels catastrophically for M above
    roughly 16; this route keeps every intermediate nonnegative and the
    columns stochastic to machine precision.
    """
    if cutoff < 0:
        raise InvalidParameterError(f"cutoff must be >= 0, got {cutoff}")
    occ = _occupancy_table(cfg.channels, cutoff)
    if cfg.efficiency == 1.0:
        mat = occ.T.copy()
    else:
        k = np.arange(cutoff + 1)
        # survivors[k, n] = P(k of n photons survive loss eta)
        survivors = _binom_dist.pmf(k[None, :], k[:, None], cfg.efficiency).T
        mat = occ.T @ survivors
    colsum_err = np.abs(mat.sum(axis=0) - 1.0).max()
    if colsum_err > 1e-10:
        raise ClickboundsError(
            f"click matrix columns deviate from stochasticity by {colsum_err}"
        )
    return np.clip(mat, 0.0, 1.0)


def _warn_on_tail(dist: PhotonDistribution) -> None:
    if dist.tail_mass > TAIL_WARN_THRESHOLD:
        warnings.warn(
            f"tail mass {dist.tail_mass:.3e} above {TAIL_WARN_THRESHOLD}; "
            "click statistics are only approximate at this truncation",
            stacklevel=3,
        )


def click_statistics(cfg: DetectorConfig, dist: PhotonDistribution) -> ClickStatistics:
    """Click statistics c_m = sum_n C[m][n] p_n over the stored truncation."""
    _warn_on_tail(dist)
    clicks = click_matrix(cfg, dist.cutoff) @ dist.probs
    return ClickStatistics(clicks, deficit=dist.tail_mass)


def vacuum_probabilities(
    cfg: DetectorConfig, dist: PhotonDistribution
) -> VacuumProbabilities:
    """Vacuum-projection probabilities q_{0,k} = sum_n (1 - T_k)^n p_n.

    q_{0,0} is pinned to 1 exactly: normalization of the true state is known
    a priori and does not suffer truncation.
    """
    _warn_on_tail(dist)
    t = cfg.transmittances()
    powers = (1.0 - t)[:, None] ** np.arange(dist.cutoff + 1)[None, :]
    q = powers @ dist.probs
    q[0] = 1.0
    return VacuumProbabilities(q, t)


def clicks_from_vacuum(
    vp: VacuumProbabilities, cfg: DetectorConfig
) -> ClickStatistics:
    """Recover c_m from vacuum probabilities:
    c_m = binom(M,m) sum_j (-1)^j binom(m,j) q_{0,M-m+j}.

    The alternating sum is evaluated in exact rational arithmetic over the
    float inputs, so no roundoff is added beyond the final conversion. The
    identity itself still amplifies input noise combinatorially in M.
    """
    m_ch = cfg.channels
    if vp.q.size != m_ch + 1:
        raise InvalidParameterError(
            f"vacuum probabilities have length {vp.q.size}, expected {m_ch + 1}"
        )
    q = [Fraction(x) for x in vp.q.tolist()]
    binom = cfg._binom
    clicks = np.empty(m_ch + 1)
    for m in range(m_ch + 1):
        acc = Fraction(0)
        for j in range(m + 1):
            w = int(binom[m_ch, m]) * int(binom[m, j])
            term = w * q[m_ch - m + j]
            acc += -term if j % 2 else term
        clicks[m] = float(acc)
    clicks[np.abs(clicks) < _CLICK_NEG_TOL] = 0.0
    return ClickStatistics(clicks)
