"""Command-line surface: eval, grid, compare and errormap.

    python -m logopole_core eval --family logopole --n 0 --m 0 --rho 1 --z 0
    python -m logopole_core grid --family logopole --n 0 --m 1 --rho-range 0 3 101 \
        --z-range -1 2 101 --out l01.csv
    python -m logopole_core compare --n 0 --m 0 --rho 2 --z 0 --n-max 60 \
        --methods ForwardRecurrence,BackwardRecurrence --allow-unstable
    python -m logopole_core errormap --n 5 --m 2 --rho-range 0.1 3 40 --z-range -1 2 40 \
        --methods Quadrature,auto --out err.csv

Exit codes: 0 success, 2 bad input, 3 singular point, 4 no convergence, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import os
import statistics
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.stats import qmc

from .config import current_selection, get_settings, reset_settings, use_settings
from .coords import FieldPoint, make_point, singular_distance
from .errors import InvalidInput, LogopoleError, OutputError, SingularityError
from .harmonics import EvalResult, Focal, pssh, ssh_exterior, ssh_second_kind
from .logopoles import LogopoleSpec, Method, MethodPolicy, logopole

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
GRID_HEADER = ["rho", "z", "phi", "re", "im", "method", "err"]
COMPARE_HEADER = ["rho", "z", "n", "m", "method_a", "method_b", "rel_dev"]
ERRORMAP_HEADER = ["rho", "z", "log10_dev"]
SINGULAR = "SINGULAR"


class Family(str, Enum):
    LOGOPOLE = "logopole"
    PSSH = "pssh"
    PSSH_OFFSET = "pssh-offset"
    SSH1 = "ssh1"
    SSH2 = "ssh2"


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise InvalidInput(f"A grid axis needs at least 2 points, got {self.count}")
        if not self.lo < self.hi:
            raise InvalidInput(f"A grid axis needs min < max, got [{self.lo}, {self.hi}]")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class GridSpec:
    rho: Axis
    z: Axis
    phi: float = 0.0
    R: float = 1.0
    family: Family = Family.LOGOPOLE
    n: int = 0
    m: int = 0
    method: str = Method.AUTO.value
    allow_unstable: bool = False
    arcsinh: float | None = None

    def lattice(self) -> list[tuple[float, float]]:
        """(rho, z) pairs, z-major then rho."""
        return [(float(rho), float(z)) for z in self.z.values() for rho in self.rho.values()]


def fmt(x: float) -> str:
    return "%.17g" % x


# --- evaluation -------------------------------------------------------------------------


def evaluate(
    family: Family,
    n: int,
    m: int,
    p: FieldPoint,
    method: str = Method.AUTO.value,
    allow_unstable: bool = False,
) -> EvalResult:
    """One value of the requested family at ``p``."""
    family = Family(family)
    if family is Family.LOGOPOLE:
        policy = MethodPolicy(Method(method), allow_unstable)
        return logopole(LogopoleSpec(n, m), p, policy)
    if family is Family.PSSH:
        return pssh(n, m, p, Focal.CENTRED)
    if family is Family.PSSH_OFFSET:
        return pssh(n, m, p, Focal.OFFSET)
    if family is Family.SSH1:
        return ssh_exterior(n, m, p)
    return ssh_second_kind(n, m, p)


def _grid_row(task: tuple[GridSpec, float, float]) -> list[str]:
    spec, rho, z = task
    p = make_point(rho, z, spec.phi, spec.R)
    head = [fmt(rho), fmt(z), fmt(spec.phi)]
    try:
        value = evaluate(spec.family, spec.n, spec.m, p, spec.method, spec.allow_unstable)
    except SingularityError as e:
        logger.debug(f"Singular at rho={rho}, z={z}: {e}")
        row = head + ["", "", SINGULAR, ""]
        return row + [""] if spec.arcsinh is not None else row
    row = head + [
        fmt(value.value.real),
        fmt(value.value.imag),
        value.method,
        fmt(value.est_error),
    ]
    if spec.arcsinh is not None:
        row.append(fmt(math.asinh(spec.arcsinh * value.value.real)))
    return row


def grid_rows(spec: GridSpec, workers: int = 1) -> list[list[str]]:
    """All grid rows in lattice order; parallel runs keep that order."""
    tasks = [(spec, rho, z) for rho, z in spec.lattice()]
    if workers <= 1:
        return [_grid_row(t) for t in tasks]
    logger.info(f"Evaluating {len(tasks)} grid points on {workers} workers")
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_worker_settings, initargs=current_selection()
    ) as pool:
        return list(pool.map(_grid_row, tasks, chunksize=max(1, len(tasks) // (8 * workers))))


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    """Write through a temporary file in the target directory, renamed on success."""
    path = Path(path)
    tmp_name = None
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(
            "w", newline="", dir=path.parent, prefix=f".{path.name}.", suffix=".tmp", delete=False
        ) as f:
            tmp_name = f.name
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        os.replace(tmp_name, path)
    except OSError as e:
        if tmp_name and os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise OutputError(f"Could not write {path}: {e}") from e
    logger.info(f"Wrote {path}")


# --- comparison -------------------------------------------------------------------------


def relative_deviation(a: complex, b: complex) -> float:
    scale = abs(b)
    if scale == 0.0:
        return abs(a)
    return abs(a - b) / scale


def sample_points(
    samples: int,
    seed: int,
    rho_range: tuple[float, float],
    z_range: tuple[float, float],
    R: float = 1.0,
    min_distance: float = 0.05,
) -> list[tuple[float, float]]:
    """Halton points in the (rho, z) box, keeping those at least min_distance*R from the segment."""
    sampler = qmc.Halton(d=2, scramble=True, seed=seed)
    out: list[tuple[float, float]] = []
    while len(out) < samples:
        batch = qmc.scale(sampler.random(samples), [rho_range[0], z_range[0]], [rho_range[1], z_range[1]])
        for rho, z in batch:
            p = make_point(float(rho), float(z), 0.0, R)
            if singular_distance(p) > min_distance * R:
                out.append((float(rho), float(z)))
                if len(out) == samples:
                    break
    return out


def compare_rows(
    points: Sequence[tuple[float, float]],
    degrees: Sequence[int],
    m: int,
    methods: Sequence[str],
    R: float = 1.0,
    allow_unstable: bool = False,
) -> list[tuple[float, float, int, str, str, float]]:
    """Pairwise relative deviations of logopole routes; routes that refuse a point are skipped."""
    rows = []
    for rho, z in points:
        p = make_point(rho, z, 0.0, R)
        for n in degrees:
            values = {}
            for method in methods:
                try:
                    values[method] = evaluate(Family.LOGOPOLE, n, m, p, method, allow_unstable)
                except LogopoleError as e:
                    logger.debug(f"{method} skipped L_{n}^{m} at rho={rho}, z={z}: {e}")
            for i, a in enumerate(methods):
                for b in methods[i + 1:]:
                    if a in values and b in values:
                        dev = relative_deviation(values[a].value, values[b].value)
                        rows.append((rho, z, n, a, b, dev))
    return rows


def _summary(devs: Sequence[float]) -> str:
    if not devs:
        return "no comparable pairs"
    return f"max_rel_dev={max(devs):.3e} median_rel_dev={statistics.median(devs):.3e} pairs={len(devs)}"


# --- commands ---------------------------------------------------------------------------


def _point(args) -> FieldPoint:
    return make_point(args.rho, args.z, args.phi, args.R)


def cmd_eval(args) -> int:
    value = evaluate(
        Family(args.family), args.n, args.m, _point(args), args.method, args.allow_unstable
    )
    print(",".join([fmt(value.value.real), fmt(value.value.imag), value.method, fmt(value.est_error)]))
    return 0


def _grid_spec(args) -> GridSpec:
    return GridSpec(
        rho=Axis(args.rho_range[0], args.rho_range[1], int(args.rho_range[2])),
        z=Axis(args.z_range[0], args.z_range[1], int(args.z_range[2])),
        phi=args.phi,
        R=args.R,
        family=Family(args.family),
        n=args.n,
        m=args.m,
        method=args.method,
        allow_unstable=args.allow_unstable,
        arcsinh=args.arcsinh,
    )


def cmd_grid(args) -> int:
    spec = _grid_spec(args)
    workers = args.workers or get_settings().workers
    rows = grid_rows(spec, workers)
    header = GRID_HEADER + (["asinh"] if spec.arcsinh is not None else [])
    write_csv(args.out, header, rows)
    singular = sum(1 for row in rows if row[5] == SINGULAR)
    logger.info(f"Grid {spec.rho.count}x{spec.z.count}: {singular} singular points")
    return 0


def _compare_points(args) -> list[tuple[float, float]]:
    if args.samples:
        return sample_points(
            args.samples, args.seed, tuple(args.rho_box), tuple(args.z_box), args.R,
            args.min_distance,
        )
    if args.rho is None or args.z is None:
        raise InvalidInput("compare needs --rho/--z or --samples")
    return [(args.rho, args.z)]


def cmd_compare(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if len(methods) < 2:
        raise InvalidInput("compare needs at least two methods")
    for method in methods:
        Method(method)
    degrees = list(range(args.n, (args.n_max if args.n_max is not None else args.n) + 1))
    rows = compare_rows(
        _compare_points(args), degrees, args.m, methods, args.R, args.allow_unstable
    )
    formatted = [[fmt(rho), fmt(z), str(n), str(args.m), a, b, fmt(dev)] for rho, z, n, a, b, dev in rows]
    summary = _summary([row[-1] for row in rows])
    if args.out:
        write_csv(args.out, COMPARE_HEADER, formatted)
        print(summary)
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(COMPARE_HEADER)
        writer.writerows(formatted)
        print(summary, file=sys.stderr)
    return 0


def errormap_rows(spec: GridSpec, method_a: str, method_b: str) -> list[list[str]]:
    rows = []
    for rho, z in spec.lattice():
        p = make_point(rho, z, spec.phi, spec.R)
        try:
            a = evaluate(Family.LOGOPOLE, spec.n, spec.m, p, method_a, spec.allow_unstable)
            b = evaluate(Family.LOGOPOLE, spec.n, spec.m, p, method_b, spec.allow_unstable)
        except LogopoleError as e:
            logger.debug(f"No deviation at rho={rho}, z={z}: {e}")
            rows.append([fmt(rho), fmt(z), ""])
            continue
        dev = relative_deviation(a.value, b.value)
        rows.append([fmt(rho), fmt(z), fmt(math.log10(max(dev, 1e-17)))])
    return rows


def cmd_errormap(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if len(methods) != 2:
        raise InvalidInput("errormap compares exactly two methods")
    for method in methods:
        Method(method)
    spec = _grid_spec(args)
    write_csv(args.out, ERRORMAP_HEADER, errormap_rows(spec, methods[0], methods[1]))
    return 0


# --- parser -----------------------------------------------------------------------------


def _add_index_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", choices=[f.value for f in Family], default=Family.LOGOPOLE.value)
    parser.add_argument("--n", type=int, required=True, help="Degree")
    parser.add_argument("--m", type=int, default=0, help="Order")
    parser.add_argument("--phi", type=float, default=0.0, help="Azimuth in radians")
    parser.add_argument("--R", type=float, default=1.0, help="Segment length")
    parser.add_argument(
        "--method", default=Method.AUTO.value, choices=[m.value for m in Method],
        help="Logopole route (default: auto policy)",
    )
    parser.add_argument("--tol", type=float, default=None, help="Oracle tolerance")
    parser.add_argument(
        "--allow-unstable", action="store_true", help="Run recurrences outside their stable region"
    )


def _add_grid_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rho-range", type=float, nargs=3, required=True, metavar=("MIN", "MAX", "COUNT"))
    parser.add_argument("--z-range", type=float, nargs=3, required=True, metavar=("MIN", "MAX", "COUNT"))
    parser.add_argument("--arcsinh", type=float, default=None, metavar="S", help="Append asinh(S*re)")
    parser.add_argument("--out", required=True, help="Output CSV path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logopole_core", description="Evaluate logopoles and related harmonics"
    )
    parser.add_argument("--config", default=None, help="JSON settings file")
    parser.add_argument("--verbose", "-v", action="count", default=0, help="More logging")
    subparsers = parser.add_subparsers(dest="command")

    eval_parser = subparsers.add_parser("eval", help="Evaluate at one point")
    _add_index_args(eval_parser)
    eval_parser.add_argument("--rho", type=float, required=True)
    eval_parser.add_argument("--z", type=float, required=True)

    grid_parser = subparsers.add_parser("grid", help="Evaluate on a (rho, z) lattice")
    _add_index_args(grid_parser)
    _add_grid_args(grid_parser)
    grid_parser.add_argument("--workers", type=int, default=None, help="Worker processes")

    compare_parser = subparsers.add_parser("compare", help="Pairwise deviations between routes")
    _add_index_args(compare_parser)
    compare_parser.add_argument("--methods", required=True, help="Comma-separated route names")
    compare_parser.add_argument("--rho", type=float, default=None)
    compare_parser.add_argument("--z", type=float, default=None)
    compare_parser.add_argument("--n-max", type=int, default=None, help="Sweep degrees n..n-max")
    compare_parser.add_argument("--samples", type=int, default=0, help="Quasi-random point count")
    compare_parser.add_argument("--seed", type=int, default=0)
    compare_parser.add_argument("--rho-box", type=float, nargs=2, default=[0.0, 3.0])
    compare_parser.add_argument("--z-box", type=float, nargs=2, default=[-1.0, 2.0])
    compare_parser.add_argument("--min-distance", type=float, default=0.05)
    compare_parser.add_argument("--out", default=None, help="Output CSV path (default stdout)")

    errormap_parser = subparsers.add_parser("errormap", help="log10 deviation of two routes on a grid")
    _add_index_args(errormap_parser)
    _add_grid_args(errormap_parser)
    errormap_parser.add_argument("--methods", required=True, help="Two comma-separated route names")

    return parser


@contextmanager
def settings_overrides(config: str | None, tol: float | None) -> Iterator[None]:
    """Apply --config and --tol for the duration of one command."""
    overrides = {} if tol is None else {"tol": tol}
    try:
        use_settings(config or None, overrides)
        yield
    finally:
        reset_settings()


def _worker_settings(path: str | Path | None, overrides: dict) -> None:
    use_settings(path, overrides)


def _configure_logging(verbose: int) -> None:
    level_name = os.getenv("LOGOPOLE_LOG_LEVEL") or get_settings().log_level
    level = logging.DEBUG if verbose else getattr(logging, level_name.upper(), logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 2

    try:
        with settings_overrides(args.config, getattr(args, "tol", None)):
            _configure_logging(args.verbose)
            if args.command == "eval":
                return cmd_eval(args)
            elif args.command == "grid":
                return cmd_grid(args)
            elif args.command == "compare":
                return cmd_compare(args)
            elif args.command == "errormap":
                return cmd_errormap(args)
    except LogopoleError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except ValueError as e:
        # enum lookups of unknown route names
        logger.error(f"Invalid input: {e}")
        return 2
    return 2
