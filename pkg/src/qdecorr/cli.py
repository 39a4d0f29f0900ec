"""Command-line entry point: ``qdecorr surface | twinbeam | verify``.

Exit codes: 0 success, 1 an invariant failed (verify), 2 bad configuration.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from qdecorr import gaussian as gs
from qdecorr.qubit_decorrelator import SurfaceRow, eta_surface
from qdecorr.verify import VerifyConfig, run_all

OUTPUT_DIR_ENV = "QDECORR_OUTPUT_DIR"

SURFACE_HEADER = ["kappa", "lambda", "feasible", "eta_prime", "a", "b", "c", "residual"]
TWINBEAM_HEADER = [
    "lambda",
    "eps",
    "d_out",
    "n_bar",
    "min_noise_trace",
    "offblock_residual",
    "n_bar_min",
]


class ConfigError(Exception):
    pass


def fmt(x: float) -> str:
    """12 significant digits, locale independent, no negative zero."""
    x = float(x)
    if x == 0.0:
        x = 0.0
    return format(x, ".12g")


def parse_grid(spec: str) -> list[float]:
    """``start:end:count`` (inclusive) or a comma-separated list."""
    try:
        if ":" in spec:
            start, end, count = spec.split(":")
            n = int(count)
            if n < 1:
                raise ConfigError(f"grid count must be >= 1 in {spec!r}")
            if n == 1:
                return [float(start)]
            return [float(v) for v in np.linspace(float(start), float(end), n)]
        return [float(v) for v in spec.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse grid {spec!r}: {exc}") from None


def _output_path(path: str | None, default_name: str) -> Path:
    if path is None:
        path = str(Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / default_name)
    out = Path(path)
    parent = out.parent if str(out.parent) else Path(".")
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise ConfigError(f"output directory {parent} is not writable")
    return out


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    # write next to the target and rename, so a failure leaves no partial file
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def surface_rows(rows: list[SurfaceRow]) -> list[list[str]]:
    out = []
    for row in rows:
        if row.result is None:
            out.append([fmt(row.kappa), fmt(row.lam), "invalid_state"] + ["nan"] * 5)
            continue
        r = row.result
        out.append(
            [
                fmt(row.kappa),
                fmt(row.lam),
                "true" if r.feasible else "false",
                fmt(r.eta_prime),
                fmt(r.mix.a),
                fmt(r.mix.b),
                fmt(r.mix.c),
                fmt(r.residual),
            ]
        )
    return out


def twinbeam_row(lam: float, eps: float) -> list[str]:
    p = gs.TwinBeamParams(lam)
    out, n_bar = gs.decorrelate_paper(p, eps)
    m = gs.twin_beam_covariance(p)
    n_min = gs.minimal_decorrelating_noise(m)
    m_min = gs.apply_additive_noise(m, n_min)
    return [
        fmt(lam),
        fmt(eps),
        fmt(float(np.mean(np.diag(out)))),
        fmt(n_bar),
        fmt(np.trace(n_min)),
        fmt(np.max(np.abs(gs.off_block(out)))),
        fmt(gs.mean_photon_number(float(np.mean(np.diag(m_min))))),
    ]


def cmd_surface(args) -> int:
    kappas = parse_grid(args.kappa)
    lams = parse_grid(args.lam)
    if not kappas or not lams:
        raise ConfigError("empty grid")
    path = _output_path(args.output, "surface.csv")
    t0 = time.perf_counter()
    rows = eta_surface(kappas, lams, workers=args.jobs)
    _write_csv(path, SURFACE_HEADER, surface_rows(rows))
    valid = [r for r in rows if r.valid]
    feasible = [r for r in valid if r.result.feasible]
    max_eta = max((r.result.eta_prime for r in feasible), default=float("nan"))
    print(f"grid {len(kappas)}x{len(lams)} = {len(rows)} points -> {path}")
    print(f"valid {len(valid)}  feasible {len(feasible)}  max eta' {fmt(max_eta)}")
    print(f"wall time {time.perf_counter() - t0:.2f} s")
    return 0


def cmd_twinbeam(args) -> int:
    lams = parse_grid(args.lam)
    epss = parse_grid(args.eps)
    if not lams or not epss:
        raise ConfigError("empty lambda or eps list")
    for lam in lams:
        if not 0.0 <= lam < 1.0:
            raise ConfigError(f"lambda must lie in [0, 1), got {lam}")
    for eps in epss:
        if not eps > 0:
            raise ConfigError(f"eps must be > 0, got {eps}")
    path = _output_path(args.output, "twinbeam.csv")
    t0 = time.perf_counter()
    rows = [twinbeam_row(lam, eps) for lam in lams for eps in epss]
    _write_csv(path, TWINBEAM_HEADER, rows)
    print(f"{len(rows)} rows -> {path}")
    for r in rows:
        print(f"lambda={r[0]} eps={r[1]} n_bar={r[3]} n_bar_min={r[6]}")
    print(f"wall time {time.perf_counter() - t0:.2f} s")
    return 0


def cmd_verify(args) -> int:
    for name in ("tol_cp", "tol", "tol_decorr"):
        if getattr(args, name) < 0:
            raise ConfigError(f"--{name.replace('_', '-')} must be non-negative")
    if args.cases < 1 or args.grid_steps < 2:
        raise ConfigError("--cases must be >= 1 and --grid-steps >= 2")
    cfg = VerifyConfig(
        seed=args.seed,
        tol_cp=args.tol_cp,
        tol=args.tol,
        tol_decorr=args.tol_decorr,
        random_cases=args.cases,
        grid_steps=args.grid_steps,
    )
    t0 = time.perf_counter()
    results = run_all(cfg)
    lines = [r.line() for r in results]
    passed = all(r.passed for r in results)
    lines.append(f"{'ALL PASS' if passed else 'FAILED'} ({sum(r.passed for r in results)}/{len(results)})")
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    if args.output:
        path = _output_path(args.output, "verify.txt")
        path.write_text(report)
    # timing goes to stderr so the report itself stays reproducible
    print(f"wall time {time.perf_counter() - t0:.2f} s", file=sys.stderr)
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdecorr", description="Covariant decorrelation of qubit pairs and two-mode Gaussian states."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("surface", help="optimal eta' over a (kappa, lambda) grid")
    p.add_argument("--kappa", default="0:1:21", help="start:end:count or comma list")
    p.add_argument("--lambda", dest="lam", default="-1:1:21", help="start:end:count or comma list")
    p.add_argument("-o", "--output", help=f"CSV path (default ${OUTPUT_DIR_ENV}/surface.csv)")
    p.add_argument("-j", "--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("twinbeam", help="decorrelate twin beams by additive noise")
    p.add_argument("--lambda", dest="lam", default="0:0.9:10", help="start:end:count or comma list")
    p.add_argument("--eps", default="1e-6", help="start:end:count or comma list, each > 0")
    p.add_argument("-o", "--output", help=f"CSV path (default ${OUTPUT_DIR_ENV}/twinbeam.csv)")
    p.set_defaults(func=cmd_twinbeam)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol-cp", type=float, default=1e-10, help="Choi eigenvalue tolerance")
    p.add_argument("--tol", type=float, default=1e-10, help="equality tolerance")
    p.add_argument("--tol-decorr", type=float, default=1e-9, help="product-form tolerance")
    p.add_argument("--cases", type=int, default=1000, help="random covariance cases")
    p.add_argument("--grid-steps", type=int, default=21, help="kappa/lambda grid size")
    p.add_argument("-o", "--output", help="also write the report to this file")
    p.set_defaults(func=cmd_verify)
    return parser


_GRID_FLAGS = ("--kappa", "--lambda", "--eps")


def _attach_grid_values(argv: list[str]) -> list[str]:
    """Turn ``--lambda -1:1:21`` into ``--lambda=-1:1:21``.

    argparse would otherwise read a leading minus as an option.
    """
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _GRID_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_attach_grid_values(argv))
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
