"""Photon-number distributions: exact generators for the four studied state
families, the detection-loss transform, and parsing of CLI state specs."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom as _binom_dist

from .errors import InvalidParameterError

_NORM_TOL = 1e-12

THERMAL = "thermal"
COHERENT = "coherent"
SQUEEZED = "squeezed"
SUBTRACTED = "subtracted"


@dataclass(frozen=True)
class PhotonDistribution:
    """Truncated photon-number probability vector p_0..p_N.

    ``tail_mass`` records the probability the untruncated distribution puts
    above the cutoff, so ``probs.sum() + tail_mass == 1`` always holds.
    ``family``/``nbar`` are optional provenance tags set by the generators;
    they enable exact tail corrections downstream and are dropped whenever a
    transform invalidates them.
    """

    probs: np.ndarray
    cutoff: int
    tail_mass: float
    family: str | None = None
    nbar: float | None = None

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size != self.cutoff + 1:
            raise InvalidParameterError(
                f"probs must have length cutoff+1={self.cutoff + 1}, got {probs.size}"
            )
        if self.cutoff < 0:
            raise InvalidParameterError("cutoff must be >= 0")
        if probs.min() < -_NORM_TOL:
            raise InvalidParameterError(f"negative probability {probs.min()}")
        probs = np.clip(probs, 0.0, None)
        if self.tail_mass < -_NORM_TOL:
            raise InvalidParameterError(f"negative tail_mass {self.tail_mass}")
        total = probs.sum() + self.tail_mass
        if abs(total - 1.0) > _NORM_TOL:
            raise InvalidParameterError(
                f"probs + tail_mass must sum to 1, got {total!r}"
            )
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "tail_mass", max(float(self.tail_mass), 0.0))

    def mean(self) -> float:
        """Mean photon number of the truncated block (tail excluded)."""
        return float(np.arange(self.cutoff + 1) @ self.probs)

    def truncated(self, cutoff: int) -> "PhotonDistribution":
        """Re-truncate to a new cutoff; mass dropped on shrinking moves into
        tail_mass, padding with zeros on growing leaves it untouched."""
        if cutoff == self.cutoff:
            return self
        if cutoff > self.cutoff:
            probs = np.concatenate([self.probs, np.zeros(cutoff - self.cutoff)])
            tail = self.tail_mass
        else:
            probs = self.probs[: cutoff + 1].copy()
            tail = self.tail_mass + float(self.probs[cutoff + 1 :].sum())
        return PhotonDistribution(probs, cutoff, tail, self.family, self.nbar)


def thermal(nbar: float, cutoff: int) -> PhotonDistribution:
    """Bose-Einstein distribution p_n = (nbar/(nbar+1))^n / (nbar+1).

    The tail above the cutoff is the exact geometric remainder
    (nbar/(nbar+1))^(cutoff+1).
    """
    if nbar <= 0:
        raise InvalidParameterError(f"thermal requires nbar > 0, got {nbar}")
    q = nbar / (nbar + 1.0)
    probs = np.cumprod(np.full(cutoff + 1, q)) / q / (nbar + 1.0)
    tail = q ** (cutoff + 1)
    return PhotonDistribution(probs, cutoff, tail, THERMAL, nbar)


def coherent(nbar: float, cutoff: int) -> PhotonDistribution:
    """Poisson distribution p_n = nbar^n e^-nbar / n!, built by the stable
    term recurrence p_n = p_{n-1} * nbar / n."""
    if nbar < 0:
        raise InvalidParameterError(f"coherent requires nbar >= 0, got {nbar}")
    probs = np.empty(cutoff + 1)
    probs[0] = math.exp(-nbar)
    for n in range(1, cutoff + 1):
        probs[n] = probs[n - 1] * nbar / n
    tail = max(0.0, 1.0 - probs.sum())
    return PhotonDistribution(probs, cutoff, tail, COHERENT, nbar)


def squeezed_vacuum(nbar: float, cutoff: int) -> PhotonDistribution:
    """Squeezed vacuum: only even photon numbers populated.

    Uses the recurrence p_{2n} = p_{2n-2} * tanh^2(r) * (2n-1)/(2n) with
    nbar = sinh^2(r), which keeps every coefficient finite far beyond the
    overflow point of the factorial form.
    """
    if nbar <= 0:
        raise InvalidParameterError(f"squeezed_vacuum requires nbar > 0, got {nbar}")
    r = math.asinh(math.sqrt(nbar))
    t2 = math.tanh(r) ** 2
    probs = np.zeros(cutoff + 1)
    probs[0] = 1.0 / math.cosh(r)
    term = probs[0]
    for n in range(1, cutoff // 2 + 1):
        term *= t2 * (2 * n - 1) / (2 * n)
        probs[2 * n] = term
    tail = max(0.0, 1.0 - probs.sum())
    return PhotonDistribution(probs, cutoff, tail, SQUEEZED, nbar)


def subtracted_squeezed(nbar: float, cutoff: int) -> PhotonDistribution:
    """Single-photon subtracted squeezed vacuum: only odd photon numbers.

    nbar = 1 + 3 sinh^2(r); the odd-term weights follow the recurrence
    a_n = a_{n-1} * tanh^2(r) * (2n-1) / (2(n-1)) starting from
    a_1 = tanh^2(r), normalized by sinh^2(r) cosh(r).
    """
    if nbar <= 1:
        raise InvalidParameterError(
            f"subtracted_squeezed requires nbar > 1, got {nbar}"
        )
    s2 = (nbar - 1.0) / 3.0  # sinh^2 r
    r = math.asinh(math.sqrt(s2))
    t2 = math.tanh(r) ** 2
    norm = s2 * math.cosh(r)
    probs = np.zeros(cutoff + 1)
    term = t2  # a_1
    if cutoff >= 1:
        probs[1] = term / norm
    for n in range(2, (cutoff + 1) // 2 + 1):
        term *= t2 * (2 * n - 1) / (2 * (n - 1))
        probs[2 * n - 1] = term / norm
    tail = max(0.0, 1.0 - probs.sum())
    return PhotonDistribution(probs, cutoff, tail, SUBTRACTED, nbar)


def apply_loss(dist: PhotonDistribution, eta: float) -> PhotonDistribution:
    """Binomial loss channel: each photon survives independently with
    probability eta.

    The binomial sum is truncated at the stored cutoff, so tail photons are
    not redistributed into low n; tail_mass is carried over unchanged as a
    conservative envelope. Supply a generous cutoff when loss fidelity
    matters.
    """
    if not 0.0 <= eta <= 1.0:
        raise InvalidParameterError(f"eta must lie in [0, 1], got {eta}")
    n = np.arange(dist.cutoff + 1)
    # loss kernel L[m, k] = P(k survive | m present) = Binom(m, eta).pmf(k)
    kernel = _binom_dist.pmf(n[None, :], n[:, None], eta)
    probs = kernel.T @ dist.probs
    return PhotonDistribution(probs, dist.cutoff, dist.tail_mass)


_GENERATORS = {
    THERMAL: thermal,
    COHERENT: coherent,
    SQUEEZED: squeezed_vacuum,
    SUBTRACTED: subtracted_squeezed,
}


def from_probabilities(values, cutoff: int | None = None) -> PhotonDistribution:
    """Build a distribution from raw probabilities; any missing mass (sum < 1)
    is booked as tail_mass."""
    probs = np.asarray(list(values), dtype=float)
    if probs.size == 0:
        raise InvalidParameterError("empty probability list")
    if probs.min() < 0:
        raise InvalidParameterError(f"negative probability {probs.min()}")
    total = probs.sum()
    if total > 1.0 + 1e-9:
        raise InvalidParameterError(f"probabilities sum to {total} > 1")
    if cutoff is not None and cutoff + 1 > probs.size:
        probs = np.concatenate([probs, np.zeros(cutoff + 1 - probs.size)])
    tail = max(0.0, 1.0 - probs.sum())
    return PhotonDistribution(probs, probs.size - 1, tail)


def load_state_file(path: str | os.PathLike) -> PhotonDistribution:
    """Read a whitespace-separated probability list (index = photon number)."""
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens:
        raise InvalidParameterError(f"state file {path} is empty")
    try:
        values = [float(t) for t in tokens]
    except ValueError as exc:
        raise InvalidParameterError(f"state file {path}: {exc}") from None
    return from_probabilities(values)


def parse_state_spec(spec: str, cutoff: int = 80) -> PhotonDistribution:
    """Parse a CLI state spec.

    Accepted forms: ``thermal:nbar=<x>``, ``coherent:nbar=<x>``,
    ``squeezed:nbar=<x>``, ``subtracted:nbar=<x>`` and ``file:<path>``.
    Generated states are truncated at ``cutoff``; file states keep their own
    length unless it is below ``cutoff``, in which case they are zero-padded.
    """
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "file":
        if not arg:
            raise InvalidParameterError("file: spec requires a path")
        dist = load_state_file(arg)
        return dist.truncated(cutoff) if dist.cutoff < cutoff else dist
    if kind in _GENERATORS:
        key, _, value = arg.partition("=")
        if key.strip() != "nbar" or not value:
            raise InvalidParameterError(
                f"state spec {spec!r} must look like '{kind}:nbar=<x>'"
            )
        try:
            nbar = float(value)
        except ValueError:
            raise InvalidParameterError(f"bad nbar in state spec {spec!r}") from None
        return _GENERATORS[kind](nbar, cutoff)
    raise InvalidParameterError(
        f"unknown state spec {spec!r}; expected one of "
        f"{sorted(_GENERATORS)} or 'file:<path>'"
    )
