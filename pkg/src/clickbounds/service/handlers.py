"""Pure request -> response handlers shared by the HTTP routes and the CLI."""

from __future__ import annotations

import math

import numpy as np

from .. import __version__, analytic, bounds, detector, estimator, states, tables
from ..errors import InvalidParameterError
from . import schemas


def _run_info(command: str, request) -> schemas.RunInfo:
    return schemas.RunInfo(
        version=__version__,
        timestamp=tables.current_timestamp(),
        command=command,
        params=request.model_dump(),
    )


def parse_targets(spec: str, cutoff: int) -> list[str]:
    """Expand a target descriptor list: 'pn:0-14,wigner,nbar' etc."""
    out = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if part in ("wigner", "nbar"):
            out.append(part)
        elif part.startswith("pn:"):
            body = part[3:]
            if "-" in body:
                lo_s, _, hi_s = body.partition("-")
                try:
                    lo, hi = int(lo_s), int(hi_s)
                except ValueError:
                    raise InvalidParameterError(f"bad target range {part!r}") from None
                if not 0 <= lo <= hi <= cutoff:
                    raise InvalidParameterError(f"target range {part!r} outside 0..{cutoff}")
                out.extend(f"pn:{n}" for n in range(lo, hi + 1))
            else:
                try:
                    n = int(body)
                except ValueError:
                    raise InvalidParameterError(f"bad target {part!r}") from None
                if not 0 <= n <= cutoff:
                    raise InvalidParameterError(f"target {part!r} outside 0..{cutoff}")
                out.append(part)
        else:
            raise InvalidParameterError(
                f"unknown target {part!r}; expected pn:<k>, pn:<a>-<b>, wigner or nbar"
            )
    if not out:
        raise InvalidParameterError("empty target list")
    return out


def _bound_row(result: bounds.BoundResult) -> schemas.BoundRow:
    ctx = result.context
    return schemas.BoundRow(
        family=ctx.family or "custom",
        nbar=ctx.nbar if ctx.nbar is not None else float("nan"),
        channels=ctx.channels,
        eta=ctx.efficiency,
        cutoff=ctx.cutoff,
        target=ctx.target,
        z_min=result.z_min,
        z_max=result.z_max,
        true_value=(result.true_value
                    if result.true_value is not None else float("nan")),
        gap_min=result.cert_min.duality_gap,
        gap_max=result.cert_max.duality_gap,
        cutoff_conditional=ctx.cutoff_conditional,
    )


def run_state(req: schemas.StateRequest) -> schemas.StateResponse:
    dist = states.parse_state_spec(req.state, req.cutoff)
    return schemas.StateResponse(
        run=_run_info("state", req),
        probabilities=dist.probs.tolist(),
        tail_mass=dist.tail_mass,
        mean=dist.mean(),
        family=dist.family,
        nbar=dist.nbar,
    )


def run_clicks(req: schemas.ClicksRequest) -> schemas.ClicksResponse:
    dist = states.parse_state_spec(req.state, req.cutoff)
    cfg = detector.DetectorConfig(req.channels, req.eta)
    stats = detector.click_statistics(cfg, dist)
    vp = detector.vacuum_probabilities(cfg, dist)
    matrix = None
    if req.include_matrix:
        matrix = detector.click_matrix(cfg, dist.cutoff).tolist()
    return schemas.ClicksResponse(
        run=_run_info("clicks", req),
        clicks=stats.clicks.tolist(),
        deficit=stats.deficit,
        transmittances=vp.transmittances.tolist(),
        vacuum_probabilities=vp.q.tolist(),
        click_matrix=matrix,
    )


def run_bounds(req: schemas.BoundsRequest) -> schemas.BoundsResponse:
    dist = states.parse_state_spec(req.state, req.cutoff)
    cfg = detector.DetectorConfig(req.channels, req.eta)
    rows = []
    for target in parse_targets(req.targets, req.cutoff):
        result = bounds.compute_target(cfg, dist, target, req.cutoff, req.form)
        rows.append(_bound_row(result))
    return schemas.BoundsResponse(run=_run_info("bounds", req), rows=rows)


def run_region(req: schemas.RegionRequest) -> schemas.RegionResponse:
    dist = states.parse_state_spec(req.state, req.cutoff)
    cfg = detector.DetectorConfig(req.channels, req.eta)
    poly = bounds.feasibility_region(
        cfg, dist, req.j, req.k, req.angles, req.cutoff, req.form
    )
    points = [
        schemas.RegionPoint(phi=phi, pj=pj, pk=pk)
        for phi, pj, pk in zip(poly.phis, poly.pj, poly.pk)
    ]
    return schemas.RegionResponse(
        run=_run_info("region", req), j=req.j, k=req.k, points=points
    )


def run_sweep(req: schemas.SweepRequest) -> schemas.SweepResponse:
    points = [
        bounds.SweepPoint(req.family, nbar, m, eta, cutoff)
        for nbar in req.nbars
        for m in req.channels
        for eta in req.etas
        for cutoff in req.cutoffs
    ]
    rows = []
    for row in bounds.sweep(points, req.target, req.form):
        rows.append(
            schemas.BoundRow(
                family=row.family,
                nbar=row.nbar,
                channels=row.channels,
                eta=row.eta,
                cutoff=row.cutoff,
                target=row.target,
                z_min=row.z_min,
                z_max=row.z_max,
                true_value=row.true_value,
                gap_min=row.gap_min,
                gap_max=row.gap_max,
                cutoff_conditional=row.cutoff_conditional,
                error=row.error,
            )
        )
    return schemas.SweepResponse(run=_run_info("sweep", req), rows=rows)


def run_estimator(req: schemas.EstimatorRequest) -> schemas.EstimatorResponse:
    cfg = detector.DetectorConfig(req.channels, req.eta)
    est = estimator.build_estimator(cfg, req.cutoff)
    return schemas.EstimatorResponse(
        run=_run_info("estimator", req),
        d_coeffs=est.d_coeffs.tolist(),
        g_coeffs=est.g_coeffs.tolist(),
    )


def run_hbt1(req: schemas.Hbt1Request) -> schemas.Hbt1Response:
    if req.state is not None:
        dist = states.parse_state_spec(req.state, req.cutoff)
        data = analytic.hbt_single_from_distribution(dist)
    elif req.p0 is not None and req.q0 is not None:
        data = analytic.HbtSingleModeData(p0=req.p0, q0=req.q0)
    else:
        raise InvalidParameterError("hbt1 needs either --state or both --p0 and --q0")
    return schemas.Hbt1Response(
        run=_run_info("hbt1", req),
        p0=data.p0,
        q0=data.q0,
        p1_lower=analytic.p1_lower(data),
        p1_upper=analytic.p1_upper(data),
    )


def run_hbt2(req: schemas.Hbt2Request) -> schemas.Hbt2Response:
    raw = (req.p0a, req.p0b, req.p00, req.qa, req.qb, req.q0a, req.q0b, req.q00)
    if req.state is not None:
        dist = states.parse_state_spec(req.state, req.cutoff)
        data = analytic.hbt_two_mode_from_product(dist)
    elif all(v is not None for v in raw):
        data = analytic.HbtTwoModeData(*raw)
    else:
        raise InvalidParameterError(
            "hbt2 needs either --state or all eight probabilities"
        )
    d1, d2, d3 = data.d_coefficients()
    return schemas.Hbt2Response(
        run=_run_info("hbt2", req),
        d1=d1,
        d2=d2,
        d3=d3,
        p11_lower=analytic.p11_lower(data),
        applicable=analytic.p11_applicable(data),
    )


def run_selftest(req: schemas.SelftestRequest) -> schemas.SelftestResponse:
    from .. import selftest

    results = selftest.run(criteria=req.criteria, seed=req.seed)
    return schemas.SelftestResponse(
        run=_run_info("selftest", req),
        results=[
            schemas.CriterionOutcome(
                criterion=r.criterion,
                name=r.name,
                passed=r.passed,
                detail=r.detail,
                seconds=r.seconds,
                certificate_related=r.certificate_related,
            )
            for r in results
        ],
        all_passed=all(r.passed for r in results),
    )
