"""Linear mean-photon-number estimator n_est = sum_m D_m c_m.

The coefficients D_m are fixed by requiring exactness on every Fock state up
to M photons; expressed in the photon basis the estimator has coefficients
G_n = sum_m D_m C[m][n] with G_n = n for n <= M and G_n < n above, so it
never overestimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .detector import ClickStatistics, DetectorConfig, click_matrix
from .errors import InvalidParameterError, SingularSystemError
from .states import PhotonDistribution

_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class MeanPhotonEstimator:
    d_coeffs: np.ndarray
    g_coeffs: np.ndarray
    config: DetectorConfig

    def __post_init__(self):
        self.d_coeffs.setflags(write=False)
        self.g_coeffs.setflags(write=False)


def build_estimator(cfg: DetectorConfig, cutoff: int = 80) -> MeanPhotonEstimator:
    """Solve sum_m D_m C[m][n] = n for n = 0..M and tabulate G_n to cutoff.

    The (M+1)x(M+1) system is regular for any eta > 0 and solved by
    partial-pivot LU; the residual is checked against 1e-9.
    """
    m = cfg.channels
    if cutoff < m:
        raise InvalidParameterError(f"cutoff {cutoff} below channel count {m}")
    c = click_matrix(cfg, cutoff)
    system = c[:, : m + 1].T  # rows n, columns m
    target = np.arange(m + 1, dtype=float)
    try:
        d = np.linalg.solve(system, target)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"estimator system singular: {exc}") from None
    residual = float(np.abs(system @ d - target).max())
    if residual > _RESIDUAL_TOL:
        raise SingularSystemError(
            f"estimator system residual {residual} exceeds {_RESIDUAL_TOL}"
        )
    g = c.T @ d
    return MeanPhotonEstimator(d_coeffs=d, g_coeffs=g, config=cfg)


def estimate(est: MeanPhotonEstimator, clicks: ClickStatistics) -> float:
    """Apply the estimator to measured click statistics."""
    if clicks.clicks.size != est.d_coeffs.size:
        raise InvalidParameterError(
            f"click vector length {clicks.clicks.size} does not match "
            f"estimator with M={est.d_coeffs.size - 1}"
        )
    return float(est.d_coeffs @ clicks.clicks)


def estimate_from_distribution(
    est: MeanPhotonEstimator, dist: PhotonDistribution
) -> float:
    """Evaluate the photon-basis form sum_n G_n p_n over the truncation."""
    n = min(dist.cutoff, est.g_coeffs.size - 1)
    return float(est.g_coeffs[: n + 1] @ dist.probs[: n + 1])
