"""Command-line frontend.

The CLI is a thin client: each subcommand builds the same pydantic request
the HTTP service accepts, executes it (in process by default, or against a
running service via --server), and renders the response as CSV with an
optional JSON mirror. No computation happens here.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__, tables
from .errors import (
    CertificateError,
    ClickboundsError,
    InfeasibleDataError,
    InvalidParameterError,
)
from .service import handlers, schemas

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_CERTIFICATE = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit with code 1, not argparse's 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise _UsageError(message)


def _parse_float_grid(text: str) -> list[float]:
    """'2' | '1,2,3' | '0.5:5:10' (inclusive linspace with count)."""
    values = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            pieces = part.split(":")
            if len(pieces) != 3:
                raise InvalidParameterError(f"bad grid spec {part!r}")
            start, stop, count = float(pieces[0]), float(pieces[1]), int(pieces[2])
            if count < 1:
                raise InvalidParameterError(f"grid count must be >= 1 in {part!r}")
            if count == 1:
                values.append(start)
            else:
                step = (stop - start) / (count - 1)
                values.extend(start + i * step for i in range(count))
        else:
            values.append(float(part))
    return values


def _parse_int_grid(text: str) -> list[int]:
    """'10' | '4,10,16' | '2-30' (inclusive integer range)."""
    values = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part.lstrip("-"):
            lo_s, _, hi_s = part.partition("-")
            values.extend(range(int(lo_s), int(hi_s) + 1))
        else:
            values.append(int(part))
    return values


def _post_remote(server: str, command: str, request, response_model):
    import httpx

    url = server.rstrip("/") + "/v1/" + command
    reply = httpx.post(url, json=request.model_dump(), timeout=3600.0)
    if reply.status_code == 422:
        raise InfeasibleDataError(reply.json().get("detail", reply.text))
    if reply.status_code >= 500:
        raise CertificateError(reply.json().get("detail", reply.text))
    reply.raise_for_status()
    return response_model.model_validate(reply.json())


def _dispatch(args, command: str, request, response_model, local):
    if args.server:
        return _post_remote(args.server, command, request, response_model)
    return local(request)


def _emit(args, response, csv_text: str) -> None:
    tables.write_text(args.out, csv_text)
    if args.json_out:
        tables.write_text(args.json_out, tables.render_json(response.model_dump()))


def _bound_rows_csv(rows) -> str:
    header = ["family", "nbar", "M", "eta", "N", "target", "z_min", "z_max",
              "true_value", "gap_min", "gap_max", "cutoff_conditional"]
    return tables.render_csv(header, [
        [r.family, r.nbar, r.channels, r.eta, r.cutoff, r.target, r.z_min,
         r.z_max, r.true_value, r.gap_min, r.gap_max, r.cutoff_conditional]
        for r in rows
    ])


def _cmd_state(args) -> int:
    req = schemas.StateRequest(state=args.state, cutoff=args.cutoff)
    resp = _dispatch(args, "state", req, schemas.StateResponse, handlers.run_state)
    csv_text = tables.render_csv(
        ["n", "p_n"], [[n, p] for n, p in enumerate(resp.probabilities)]
    )
    _emit(args, resp, csv_text)
    return EXIT_OK


def _cmd_clicks(args) -> int:
    req = schemas.ClicksRequest(
        state=args.state, channels=args.channels, eta=args.eta,
        cutoff=args.cutoff, include_matrix=args.matrix_out is not None,
    )
    resp = _dispatch(args, "clicks", req, schemas.ClicksResponse, handlers.run_clicks)
    csv_text = tables.render_csv(
        ["m", "c_m"], [[m, c] for m, c in enumerate(resp.clicks)]
    )
    vacuum_text = tables.render_csv(
        ["k", "T_k", "q_0k"],
        [
            [k, t, q]
            for k, (t, q) in enumerate(
                zip(resp.transmittances, resp.vacuum_probabilities)
            )
        ],
    )
    _emit(args, resp, csv_text)
    if args.vacuum_out:
        tables.write_text(args.vacuum_out, vacuum_text)
    elif args.out in (None, "-"):
        sys.stdout.write("\n" + vacuum_text)
    if args.matrix_out and resp.click_matrix is not None:
        ncols = len(resp.click_matrix[0])
        matrix_text = tables.render_csv(
            ["m"] + [f"n{n}" for n in range(ncols)],
            [[m] + row for m, row in enumerate(resp.click_matrix)],
        )
        tables.write_text(args.matrix_out, matrix_text)
    return EXIT_OK


def _cmd_bounds(args) -> int:
    req = schemas.BoundsRequest(
        state=args.state, channels=args.channels, eta=args.eta,
        cutoff=args.cutoff, form=args.form, targets=args.target,
    )
    resp = _dispatch(args, "bounds", req, schemas.BoundsResponse, handlers.run_bounds)
    _emit(args, resp, _bound_rows_csv(resp.rows))
    return EXIT_OK


def _cmd_region(args) -> int:
    try:
        j_str, _, k_str = args.pair.partition(",")
        j, k = int(j_str), int(k_str)
    except ValueError:
        raise InvalidParameterError(f"--pair must be 'j,k', got {args.pair!r}") from None
    req = schemas.RegionRequest(
        state=args.state, channels=args.channels, eta=args.eta,
        cutoff=args.cutoff, form=args.form, j=j, k=k, angles=args.angles,
    )
    resp = _dispatch(args, "region", req, schemas.RegionResponse, handlers.run_region)
    csv_text = tables.render_csv(
        ["phi", "pj", "pk"], [[p.phi, p.pj, p.pk] for p in resp.points]
    )
    _emit(args, resp, csv_text)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    req = schemas.SweepRequest(
        family=args.family,
        nbars=_parse_float_grid(args.nbar),
        channels=_parse_int_grid(args.channels),
        etas=_parse_float_grid(args.eta),
        cutoffs=_parse_int_grid(args.cutoff),
        target=args.target,
        form=args.form,
    )
    resp = _dispatch(args, "sweep", req, schemas.SweepResponse, handlers.run_sweep)
    _emit(args, resp, _bound_rows_csv(resp.rows))
    failed = [r for r in resp.rows if r.error]
    for r in failed:
        sys.stderr.write(
            f"sweep point nbar={r.nbar} M={r.channels} eta={r.eta} "
            f"N={r.cutoff} failed: {r.error}\n"
        )
    return EXIT_INVALID if failed else EXIT_OK


def _cmd_estimator(args) -> int:
    req = schemas.EstimatorRequest(
        channels=args.channels, eta=args.eta, cutoff=args.cutoff
    )
    resp = _dispatch(
        args, "estimator", req, schemas.EstimatorResponse, handlers.run_estimator
    )
    csv_text = tables.render_csv(
        ["m", "D_m"], [[m, d] for m, d in enumerate(resp.d_coeffs)]
    )
    _emit(args, resp, csv_text)
    g_text = tables.render_csv(
        ["n", "G_n", "n_minus_G_n"],
        [[n, g, n - g] for n, g in enumerate(resp.g_coeffs)],
    )
    if args.g_out:
        tables.write_text(args.g_out, g_text)
    elif args.out in (None, "-"):
        sys.stdout.write("\n" + g_text)
    return EXIT_OK


def _cmd_hbt1(args) -> int:
    req = schemas.Hbt1Request(
        p0=args.p0, q0=args.q0, state=args.state, cutoff=args.cutoff
    )
    resp = _dispatch(args, "hbt1", req, schemas.Hbt1Response, handlers.run_hbt1)
    csv_text = tables.render_csv(
        ["p0", "q0", "p1_min", "p1_max"],
        [[resp.p0, resp.q0, resp.p1_lower, resp.p1_upper]],
    )
    _emit(args, resp, csv_text)
    return EXIT_OK


def _cmd_hbt2(args) -> int:
    req = schemas.Hbt2Request(
        p0a=args.p0a, p0b=args.p0b, p00=args.p00, qa=args.qa, qb=args.qb,
        q0a=args.q0a, q0b=args.q0b, q00=args.q00,
        state=args.state, cutoff=args.cutoff,
    )
    resp = _dispatch(args, "hbt2", req, schemas.Hbt2Response, handlers.run_hbt2)
    csv_text = tables.render_csv(
        ["D1", "D2", "D3", "p11_min", "applicable"],
        [[resp.d1, resp.d2, resp.d3, resp.p11_lower, resp.applicable]],
    )
    _emit(args, resp, csv_text)
    return EXIT_OK


def _cmd_selftest(args) -> int:
    criteria = None
    if args.criteria:
        criteria = [int(c) for c in args.criteria.split(",")]
    req = schemas.SelftestRequest(criteria=criteria, seed=args.seed)
    resp = _dispatch(
        args, "selftest", req, schemas.SelftestResponse, handlers.run_selftest
    )
    for r in resp.results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} criterion {r.criterion}: {r.name} "
              f"[{r.seconds:.2f}s] {r.detail}")
    if args.json_out:
        tables.write_text(args.json_out, tables.render_json(resp.model_dump()))
    if resp.all_passed:
        return EXIT_OK
    if any(r.certificate_related and not r.passed for r in resp.results):
        return EXIT_CERTIFICATE
    return EXIT_INVALID


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="clickbounds", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, state=True, detector=True):
        p.add_argument("--server", default=None,
                       help="base URL of a running clickbounds service")
        p.add_argument("--timestamp", default=None,
                       help="pin the output timestamp (for byte-identical runs)")
        p.add_argument("--out", default=None, help="CSV output path (default stdout)")
        p.add_argument("--json-out", default=None, help="JSON mirror output path")
        if state:
            p.add_argument("--state", required=False, default=None,
                           help="thermal:nbar=<x> | coherent:nbar=<x> | "
                                "squeezed:nbar=<x> | subtracted:nbar=<x> | file:<path>")
        p.add_argument("--cutoff", type=int, default=80,
                       help="photon number cutoff N (default 80)")
        if detector:
            p.add_argument("--channels", type=int, required=True,
                           help="number of detector channels M")
            p.add_argument("--eta", type=float, default=1.0,
                           help="detection efficiency (default 1)")

    p = sub.add_parser("state", help="emit the photon number distribution")
    common(p, detector=False)
    p.set_defaults(func=_cmd_state, needs_state=True)

    p = sub.add_parser("clicks", help="emit click statistics and vacuum probabilities")
    common(p)
    p.add_argument("--vacuum-out", default=None, help="CSV path for the q_0k table")
    p.add_argument("--matrix-out", default=None, help="CSV path for the C matrix")
    p.set_defaults(func=_cmd_clicks, needs_state=True)

    p = sub.add_parser("bounds", help="certified bounds for pn/wigner/nbar targets")
    common(p)
    p.add_argument("--target", default="pn:0-14",
                   help="comma list of pn:<k>, pn:<a>-<b>, wigner, nbar")
    p.add_argument("--form", choices=["vacuum", "click"], default="vacuum")
    p.set_defaults(func=_cmd_bounds, needs_state=True)

    p = sub.add_parser("region", help="feasibility polygon for a (p_j, p_k) pair")
    common(p)
    p.add_argument("--pair", required=True, help="pair of photon numbers, e.g. 5,6")
    p.add_argument("--angles", type=int, default=100)
    p.add_argument("--form", choices=["vacuum", "click"], default="vacuum")
    p.set_defaults(func=_cmd_region, needs_state=True)

    p = sub.add_parser("sweep", help="bound tables over a parameter grid")
    p.add_argument("--server", default=None)
    p.add_argument("--timestamp", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--json-out", default=None)
    p.add_argument("--family", required=True,
                   choices=["thermal", "coherent", "squeezed", "subtracted"])
    p.add_argument("--nbar", required=True, help="grid: 2 | 1,2,3 | 0.5:5:10")
    p.add_argument("--channels", default="10", help="grid: 10 | 4,10,16 | 2-30")
    p.add_argument("--eta", default="1", help="grid of efficiencies")
    p.add_argument("--cutoff", default="80", help="grid of cutoffs")
    p.add_argument("--target", default="pn:5", help="single target descriptor")
    p.add_argument("--form", choices=["vacuum", "click"], default="vacuum")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("estimator", help="mean photon estimator tables D_m and G_n")
    common(p, state=False)
    p.add_argument("--g-out", default=None, help="CSV path for the G_n table")
    p.set_defaults(func=_cmd_estimator)

    p = sub.add_parser("hbt1", help="analytic single-mode p1 bounds from (p0, q0)")
    p.add_argument("--server", default=None)
    p.add_argument("--timestamp", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--json-out", default=None)
    p.add_argument("--p0", type=float, default=None)
    p.add_argument("--q0", type=float, default=None)
    p.add_argument("--state", default=None)
    p.add_argument("--cutoff", type=int, default=80)
    p.set_defaults(func=_cmd_hbt1)

    p = sub.add_parser("hbt2", help="analytic two-mode p11 lower bound")
    p.add_argument("--server", default=None)
    p.add_argument("--timestamp", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--json-out", default=None)
    for flag in ("p0a", "p0b", "p00", "qa", "qb", "q0a", "q0b", "q00"):
        p.add_argument(f"--{flag}", type=float, default=None)
    p.add_argument("--state", default=None,
                   help="derive the joint data from the product state spec x spec")
    p.add_argument("--cutoff", type=int, default=80)
    p.set_defaults(func=_cmd_hbt2)

    p = sub.add_parser("selftest", help="run the acceptance criteria")
    p.add_argument("--server", default=None)
    p.add_argument("--timestamp", default=None)
    p.add_argument("--json-out", default=None)
    p.add_argument("--criteria", default=None, help="comma list, e.g. 1,2,3")
    p.add_argument("--seed", type=int, default=20240801,
                   help="seed for the randomized property criteria")
    p.set_defaults(func=_cmd_selftest)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError:
        return EXIT_USAGE
    if getattr(args, "timestamp", None):
        os.environ[tables.TIMESTAMP_ENV] = args.timestamp
    if getattr(args, "needs_state", False) and not args.state:
        sys.stderr.write("clickbounds: error: --state is required\n")
        return EXIT_USAGE
    try:
        return args.func(args)
    except CertificateError as exc:
        sys.stderr.write(f"certificate failure: {exc}\n")
        return EXIT_CERTIFICATE
    except (InvalidParameterError, InfeasibleDataError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except ClickboundsError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
