"""Certified interval bounds on linear observables of the photon number
distribution, computed from the click statistics of a multiplexed detector.

Every bound is a pair of LP solves (minimize / maximize) whose optimality is
proved by dual certificates, plus a tail correction covering the truncated
part of the distribution.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import lpcore, states
from .detector import DetectorConfig, click_matrix
from .errors import CertificateError, InfeasibleDataError, InvalidParameterError
from .lpcore import CertificateReport, LinearProgram
from .states import PhotonDistribution

DEFAULT_CUTOFF = 80
VACUUM_FORM = "vacuum"
CLICK_FORM = "click"
FORMS = (VACUUM_FORM, CLICK_FORM)

THREADS_ENV = "CLICKBOUNDS_THREADS"


@dataclass(frozen=True)
class LinearObservable:
    """Observable Z = sum_n coeffs[n] p_n with |coeffs[n]| <= bound.

    ``tail_low``/``tail_high`` are added to the truncated LP optima to account
    for photon numbers above the cutoff; they coincide when the tail value is
    known exactly and straddle zero when only |tail| <= bound * tail_mass is
    available.
    """

    name: str
    coeffs: np.ndarray
    bound: float | None
    tail_low: float = 0.0
    tail_high: float = 0.0
    cutoff_conditional: bool = False

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if self.bound is not None and np.abs(coeffs).max(initial=0.0) > self.bound + 1e-12:
            raise InvalidParameterError(
                f"observable {self.name}: coefficients exceed stated bound {self.bound}"
            )
        if self.tail_low > self.tail_high:
            raise InvalidParameterError("tail_low must not exceed tail_high")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)


@dataclass(frozen=True)
class BoundContext:
    """Echo of everything needed to reproduce a bound computation."""

    channels: int
    efficiency: float
    cutoff: int
    form: str
    target: str
    family: str | None = None
    nbar: float | None = None
    cutoff_conditional: bool = False


@dataclass(frozen=True)
class BoundResult:
    """Certified interval with its extremal distributions.

    Each side is backed either by a float duality certificate or by an
    exact-arithmetic solve (Bland termination with exactly nonnegative
    reduced costs), whichever the solver needed; the exact route is the
    stronger guarantee and is used when the instance is too ill-conditioned
    for a float dual vector to exist.
    """

    z_min: float
    z_max: float
    primal_min: np.ndarray
    primal_max: np.ndarray
    cert_min: CertificateReport
    cert_max: CertificateReport
    context: BoundContext
    true_value: float | None = None
    exact_min: bool = False
    exact_max: bool = False

    def __post_init__(self):
        if not (self.cert_min.ok or self.exact_min):
            raise CertificateError(
                f"bound {self.context.target}: certificate failed "
                f"{self.cert_min.failures}"
            )
        if not (self.cert_max.ok or self.exact_max):
            raise CertificateError(
                f"bound {self.context.target}: certificate failed "
                f"{self.cert_max.failures}"
            )
        if self.z_min > self.z_max + 1e-9:
            raise CertificateError(
                f"bound {self.context.target}: z_min {self.z_min} > z_max {self.z_max}"
            )

    @property
    def width(self) -> float:
        return self.z_max - self.z_min


def _exact_dot(row: np.ndarray, ratios: list[tuple[int, int]]) -> Fraction:
    """Exact sum of row[n] * p_n over float entries.

    ``ratios`` holds (numerator, exponent) pairs with p_n = num * 2^-exp;
    the accumulation runs on integers over a common power-of-two scale.
    """
    total = 0
    scale = 0
    for a, (pnum, pexp) in zip(row.tolist(), ratios):
        if a == 0.0 or pnum == 0:
            continue
        anum, aden = a.as_integer_ratio()
        exp = aden.bit_length() - 1 + pexp
        num = anum * pnum
        if exp > scale:
            total <<= exp - scale
            scale = exp
        else:
            num <<= scale - exp
        total += num
    return Fraction(total, 1 << scale)


@dataclass(frozen=True)
class ConstraintSystem:
    """Equality system A x = b plus the exact rational value of b."""

    matrix: np.ndarray
    rhs: np.ndarray
    rhs_exact: tuple[Fraction, ...]
    form: str

    def __iter__(self):
        return iter((self.matrix, self.rhs))

    def linear_program(self, coeffs: np.ndarray, sense: str) -> LinearProgram:
        return LinearProgram(coeffs, self.matrix, self.rhs, sense,
                             rhs_exact=self.rhs_exact)


def assemble_constraints(
    cfg: DetectorConfig,
    dist: PhotonDistribution,
    cutoff: int,
    form: str = VACUUM_FORM,
) -> ConstraintSystem:
    """Equality constraints A x = b encoding the click statistics of ``dist``.

    vacuum form: A[k][n] = (1 - eta*k/M)^n with b the vacuum probabilities;
    row k=0 is all ones and carries normalization. click form: A is the click
    matrix with b the click statistics. b is built as the exact rational
    value of A @ p over the truncation (float image correctly rounded), so
    the truncated true distribution is feasible by construction down to the
    last bit and both forms bound identically.

    The result iterates as the pair (A, b).
    """
    if form not in FORMS:
        raise InvalidParameterError(f"unknown constraint form {form!r}")
    dist = dist.truncated(cutoff)
    if form == VACUUM_FORM:
        t = cfg.transmittances()
        a = (1.0 - t)[:, None] ** np.arange(cutoff + 1)[None, :]
    else:
        a = click_matrix(cfg, cutoff)
    ratios = []
    for p in dist.probs.tolist():
        num, den = p.as_integer_ratio()
        ratios.append((num, den.bit_length() - 1))
    rhs_exact = tuple(_exact_dot(a[k], ratios) for k in range(a.shape[0]))
    rhs = np.array([float(v) for v in rhs_exact])
    return ConstraintSystem(matrix=a, rhs=rhs, rhs_exact=rhs_exact, form=form)


def _parity_class(dist: PhotonDistribution) -> str | None:
    """'even'/'odd' when the truncated support has strict definite parity."""
    probs = dist.probs
    odd_mass = probs[1::2].sum()
    even_mass = probs[0::2].sum()
    if odd_mass == 0.0 and even_mass > 0.0:
        return "even"
    if even_mass == 0.0 and odd_mass > 0.0:
        return "odd"
    return None


def _wigner_tail(dist: PhotonDistribution, cutoff: int) -> tuple[float, float]:
    """Tail correction for the parity observable (-1)^n / pi.

    Exact closed forms exist for the tagged thermal/coherent families and for
    definite-parity supports; otherwise the conservative envelope
    +-tail_mass/pi is used, which can only widen the interval.
    """
    dist = dist.truncated(cutoff)
    tail = dist.tail_mass
    if tail == 0.0:
        return 0.0, 0.0
    signs = np.where(np.arange(cutoff + 1) % 2 == 0, 1.0, -1.0)
    if dist.family == states.THERMAL and dist.nbar is not None:
        q = dist.nbar / (dist.nbar + 1.0)
        delta = (-q) ** (cutoff + 1) / ((dist.nbar + 1.0) * (1.0 + q)) / math.pi
        return delta, delta
    if dist.family == states.COHERENT and dist.nbar is not None:
        delta = (math.exp(-2.0 * dist.nbar) - float(signs @ dist.probs)) / math.pi
        return delta, delta
    parity = _parity_class(dist)
    if parity == "even":
        return tail / math.pi, tail / math.pi
    if parity == "odd":
        return -tail / math.pi, -tail / math.pi
    return -tail / math.pi, tail / math.pi


def _solve_sense(
    system: ConstraintSystem, coeffs: np.ndarray, sense: str
) -> tuple[lpcore.LPSolution, CertificateReport]:
    lp = system.linear_program(coeffs, sense)
    sol = lpcore.solve(lp)
    if sol.status == lpcore.INFEASIBLE:
        raise InfeasibleDataError(
            "constraint system infeasible; click data is inconsistent with "
            "any photon number distribution at this cutoff"
        )
    if sol.status == lpcore.UNBOUNDED:
        raise InfeasibleDataError("bound problem unbounded; observable grows "
                                  "faster than the constraints can pin")
    return sol, lpcore.verify_certificate(lp, sol)


def bound_observable(
    cfg: DetectorConfig,
    dist: PhotonDistribution,
    obs: LinearObservable,
    cutoff: int = DEFAULT_CUTOFF,
    form: str = VACUUM_FORM,
    true_value: float | None = None,
) -> BoundResult:
    """Certified interval [z_min, z_max] for ``obs`` under the click
    statistics generated by ``dist`` on detector ``cfg``."""
    if obs.coeffs.size != cutoff + 1:
        raise InvalidParameterError(
            f"observable {obs.name} defined to {obs.coeffs.size - 1}, need cutoff {cutoff}"
        )
    work = dist.truncated(cutoff)
    if obs.bound is not None:
        limit = obs.bound * work.tail_mass + 1e-15
        if not (-limit <= obs.tail_low and obs.tail_high <= limit):
            raise InvalidParameterError(
                f"observable {obs.name}: tail correction exceeds bound * tail_mass"
            )
    system = assemble_constraints(cfg, work, cutoff, form)
    sol_min, cert_min = _solve_sense(system, obs.coeffs, lpcore.MINIMIZE)
    sol_max, cert_max = _solve_sense(system, obs.coeffs, lpcore.MAXIMIZE)
    context = BoundContext(
        channels=cfg.channels,
        efficiency=cfg.efficiency,
        cutoff=cutoff,
        form=form,
        target=obs.name,
        family=dist.family,
        nbar=dist.nbar,
        cutoff_conditional=obs.cutoff_conditional,
    )
    return BoundResult(
        z_min=sol_min.optimum + obs.tail_low,
        z_max=sol_max.optimum + obs.tail_high,
        primal_min=sol_min.primal,
        primal_max=sol_max.primal,
        cert_min=cert_min,
        cert_max=cert_max,
        context=context,
        true_value=true_value,
        exact_min=sol_min.exact_arithmetic,
        exact_max=sol_max.exact_arithmetic,
    )


def probability_observable(n: int, cutoff: int) -> LinearObservable:
    """Unit selector for p_n; the tail correction vanishes identically."""
    if not 0 <= n <= cutoff:
        raise InvalidParameterError(f"photon number {n} outside 0..{cutoff}")
    coeffs = np.zeros(cutoff + 1)
    coeffs[n] = 1.0
    return LinearObservable(f"p{n}", coeffs, bound=1.0)


def wigner_observable(dist: PhotonDistribution, cutoff: int) -> LinearObservable:
    """Wigner function at the phase-space origin: W = sum_n (-1)^n p_n / pi."""
    coeffs = np.where(np.arange(cutoff + 1) % 2 == 0, 1.0, -1.0) / math.pi
    lo, hi = _wigner_tail(dist, cutoff)
    return LinearObservable("wigner", coeffs, bound=1.0 / math.pi,
                            tail_low=lo, tail_high=hi)


def mean_photon_observable(cutoff: int) -> LinearObservable:
    """Mean photon number, valid only under the assumption p_n = 0 above the
    cutoff; the coefficients are unbounded so no tail correction exists."""
    return LinearObservable(
        "nbar", np.arange(cutoff + 1, dtype=float), bound=None,
        cutoff_conditional=True,
    )


def probability_bounds(
    cfg: DetectorConfig,
    dist: PhotonDistribution,
    n: int,
    cutoff: int = DEFAULT_CUTOFF,
    form: str = VACUUM_FORM,
) -> BoundResult:
    work = dist.truncated(cutoff)
    true = float(work.probs[n])
    return bound_observable(cfg, dist, probability_observable(n, cutoff),
                            cutoff, form, true_value=true)


def true_wigner(dist: PhotonDistribution) -> float:
    """Best available value of the true Wigner function at the origin."""
    if dist.family == states.THERMAL and dist.nbar is not None:
        return 1.0 / (math.pi * (1.0 + 2.0 * dist.nbar))
    if dist.family == states.COHERENT and dist.nbar is not None:
        return math.exp(-2.0 * dist.nbar) / math.pi
    parity = _parity_class(dist)
    if parity == "even":
        return 1.0 / math.pi
    if parity == "odd":
        return -1.0 / math.pi
    signs = np.where(np.arange(dist.cutoff + 1) % 2 == 0, 1.0, -1.0)
    return float(signs @ dist.probs) / math.pi


def wigner_origin_bounds(
    cfg: DetectorConfig,
    dist: PhotonDistribution,
    cutoff: int = DEFAULT_CUTOFF,
    form: str = VACUUM_FORM,
) -> BoundResult:
    return bound_observable(cfg, dist, wigner_observable(dist, cutoff),
                            cutoff, form, true_value=true_wigner(dist))


def mean_photon_bounds(
    cfg: DetectorConfig,
    dist: PhotonDistribution,
    cutoff: int = DEFAULT_CUTOFF,
    form: str = VACUUM_FORM,
) -> BoundResult:
    """Cutoff-conditional bounds on the mean photon number.

    The unconditional upper bound is infinite: vanishing probability at a
    sufficiently high Fock state adds arbitrary mean. Results are therefore
    tagged cutoff_conditional and grow with the cutoff instead of saturating.
    """
    work = dist.truncated(cutoff)
    return bound_observable(cfg, dist, mean_photon_observable(cutoff),
                            cutoff, form, true_value=work.mean())


@dataclass(frozen=True)
class FeasibilityPolygon:
    """Support points of the (p_j, p_k) feasibility region, in angular order."""

    j: int
    k: int
    phis: np.ndarray
    pj: np.ndarray
    pk: np.ndarray


def feasibility_region(
    cfg: DetectorConfig,
    dist: PhotonDistribution,
    j: int,
    k: int,
    angles: int = 100,
    cutoff: int = DEFAULT_CUTOFF,
    form: str = VACUUM_FORM,
) -> FeasibilityPolygon:
    """Convex region of (p_j, p_k) pairs compatible with the click statistics,
    traced by maximizing p_j cos(phi) + p_k sin(phi) over a grid of angles.

    Support points closer than 1e-9 to an already emitted one are dropped.
    """
    if j == k:
        raise InvalidParameterError("feasibility region needs two distinct indices")
    if angles < 3:
        raise InvalidParameterError("need at least 3 angles")
    if not (0 <= j <= cutoff and 0 <= k <= cutoff):
        raise InvalidParameterError("pair indices outside cutoff range")
    system = assemble_constraints(cfg, dist, cutoff, form)
    phis, pjs, pks = [], [], []
    for i in range(angles):
        phi = 2.0 * math.pi * i / angles
        coeffs = np.zeros(cutoff + 1)
        coeffs[j] = math.cos(phi)
        coeffs[k] = math.sin(phi)
        sol, cert = _solve_sense(system, coeffs, lpcore.MAXIMIZE)
        if not (cert.ok or sol.exact_arithmetic):
            raise CertificateError(f"feasibility region at phi={phi}: {cert.failures}")
        point = (float(sol.primal[j]), float(sol.primal[k]))
        if any(math.hypot(point[0] - x, point[1] - y) < 1e-9
               for x, y in zip(pjs, pks)):
            continue
        phis.append(phi)
        pjs.append(point[0])
        pks.append(point[1])
    return FeasibilityPolygon(j, k, np.asarray(phis), np.asarray(pjs), np.asarray(pks))


# ---------------------------------------------------------------------------
# parameter sweeps


@dataclass(frozen=True)
class SweepPoint:
    family: str
    nbar: float
    channels: int
    efficiency: float
    cutoff: int


@dataclass(frozen=True)
class SweepRow:
    family: str
    nbar: float
    channels: int
    eta: float
    cutoff: int
    target: str
    z_min: float
    z_max: float
    true_value: float
    gap_min: float
    gap_max: float
    cutoff_conditional: bool
    error: str | None = None


def _evaluate_point(args: tuple[SweepPoint, str, str]) -> SweepRow:
    point, target, form = args
    try:
        dist = states.parse_state_spec(
            f"{point.family}:nbar={point.nbar}", point.cutoff
        )
        cfg = DetectorConfig(point.channels, point.efficiency)
        result = compute_target(cfg, dist, target, point.cutoff, form)
        return SweepRow(
            family=point.family,
            nbar=point.nbar,
            channels=point.channels,
            eta=point.efficiency,
            cutoff=point.cutoff,
            target=target,
            z_min=result.z_min,
            z_max=result.z_max,
            true_value=result.true_value if result.true_value is not None else float("nan"),
            gap_min=result.cert_min.duality_gap,
            gap_max=result.cert_max.duality_gap,
            cutoff_conditional=result.context.cutoff_conditional,
        )
    except Exception as exc:  # per-point failure must not kill the sweep
        return SweepRow(
            family=point.family, nbar=point.nbar, channels=point.channels,
            eta=point.efficiency, cutoff=point.cutoff, target=target,
            z_min=float("nan"), z_max=float("nan"), true_value=float("nan"),
            gap_min=float("nan"), gap_max=float("nan"),
            cutoff_conditional=False, error=f"{type(exc).__name__}: {exc}",
        )


def compute_target(
    cfg: DetectorConfig,
    dist: PhotonDistribution,
    target: str,
    cutoff: int = DEFAULT_CUTOFF,
    form: str = VACUUM_FORM,
) -> BoundResult:
    """Dispatch on a target descriptor: 'pn:<k>', 'wigner' or 'nbar'."""
    if target.startswith("pn:"):
        return probability_bounds(cfg, dist, int(target[3:]), cutoff, form)
    if target == "wigner":
        return wigner_origin_bounds(cfg, dist, cutoff, form)
    if target == "nbar":
        return mean_photon_bounds(cfg, dist, cutoff, form)
    raise InvalidParameterError(f"unknown target {target!r}")


def sweep_workers() -> int:
    """Worker count from CLICKBOUNDS_THREADS (0 = all cores, unset = serial)."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise InvalidParameterError(f"{THREADS_ENV} must be an integer, got {raw!r}")
    if n == 0:
        return os.cpu_count() or 1
    return max(1, n)


def sweep(
    points: list[SweepPoint],
    target: str,
    form: str = VACUUM_FORM,
    workers: int | None = None,
) -> list[SweepRow]:
    """Evaluate ``target`` at every grid point, in grid order.

    Points are independent; with workers > 1 they run in a process pool but
    rows are still returned in input order. A failing point yields a row with
    NaN bounds and the error message instead of aborting the sweep.
    """
    if workers is None:
        workers = sweep_workers()
    jobs = [(p, target, form) for p in points]
    if workers <= 1 or len(jobs) <= 1:
        return [_evaluate_point(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate_point, jobs, chunksize=4))
