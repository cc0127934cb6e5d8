"""Command line: certify, cover, verify, reduce, fourier.

Exit codes: 0 success, 1 semantic failure (not certified, check failed,
inconclusive), 2 input error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from .certify import CertifierConfig, DirectionCertificate, delta_star, direction_search
from .cover import CapExceeded, CoverCertificate, LevelNotReached, UncertifiedError, build_cover, required_level
from .digits import DigitSystem, DigitSystemError
from .fourier import DEFAULT_DEPTH, DEFAULT_THRESHOLD, Measure, check_scaling_invariance, nonvanishing_scan
from .projection import Direction, DirectionError, axis_and_diagonal_directions
from .reduction import GDSError, GraphDirectedSystem, Inconclusive, reduce_to_digit_system
from .verify import verify_all

log = logging.getLogger("tubenull")

OK, FAILED, BAD_INPUT, CAP = 0, 1, 2, 3


class InputError(Exception):
    pass


def _load_json(path: str) -> object:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _dumps(obj: object) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, target)


def _load_system(path: str) -> DigitSystem:
    data = _load_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path} must hold a JSON object with d, N, digits")
    return DigitSystem.from_dict(data)


def _load_directions(path: str) -> list[Direction]:
    data = _load_json(path)
    if isinstance(data, dict):
        data = data.get("directions", data.get("V"))
    if not isinstance(data, list) or not data:
        raise InputError(f"{path} must hold a non-empty list of direction vectors")
    return [Direction(v) for v in data]


def cmd_certify(args: argparse.Namespace) -> int:
    system = _load_system(args.system)
    config = CertifierConfig(seed=args.seed)
    if args.directions == "auto":
        cert = direction_search(system, args.rmax, config)
    else:
        V = _load_directions(args.directions)
        if any(len(v.v) != system.d for v in V):
            raise InputError(f"directions must have {system.d} coordinates")
        cert = delta_star(system, V, config)
    _write(args.out, _dumps(cert.to_dict()))
    if not cert.certified:
        log.error("not certified: delta*=%.3g gap=%.3g", cert.delta_star, cert.gap)
        return FAILED
    log.info("certified: delta*=%.6g with %d directions", cert.delta_star, len(cert.directions))
    return OK


def cmd_cover(args: argparse.Namespace) -> int:
    data = _load_json(args.certificate)
    if not isinstance(data, dict):
        raise InputError("certificate must be a JSON object")
    cert = DirectionCertificate.from_dict(data)
    system = cert.system if args.system is None else _load_system(args.system)
    if system != cert.system:
        raise InputError("certificate was issued for a different digit system")
    if args.level is not None:
        cover = build_cover(system, cert, args.level, args.mode)
    else:
        if args.epsilon <= 0:
            raise InputError("epsilon must be positive")
        cover = required_level(system, cert, Fraction(args.epsilon).limit_denominator(10**12), args.nmax)
        if args.mode == "exact":
            cover = build_cover(system, cert, cover.n, "exact")
    _write(args.out, _dumps(cover.to_dict()))
    if args.svg:
        if system.d != 2:
            log.warning("SVG output is planar only; skipped for d=%d", system.d)
        elif cover.slabs is None:
            log.warning("aggregated covers list no slabs; SVG skipped")
        else:
            from .svg import render_cover

            _write(args.svg, render_cover(cover))
    log.info("level %d, total width bound %.6g", cover.n, float(cover.total_width_bound))
    return OK


def cmd_verify(args: argparse.Namespace) -> int:
    data = _load_json(args.cover)
    if not isinstance(data, dict):
        raise InputError("cover must be a JSON object")
    try:
        CoverCertificate.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed cover certificate: {exc}") from None
    report = verify_all(data, args.samples, args.depth, args.seed)
    sys.stdout.write(_dumps(report.to_dict()))
    return OK if report.passed else FAILED


def cmd_reduce(args: argparse.Namespace) -> int:
    data = _load_json(args.gds)
    if not isinstance(data, dict):
        raise InputError("graph-directed system must be a JSON object")
    g = GraphDirectedSystem.from_dict(data)
    try:
        system, q = reduce_to_digit_system(g, args.qmax)
    except Inconclusive as exc:
        log.error("inconclusive: %s", exc)
        return FAILED
    log.info("reduced at q=%d to base %d with %d digits", q, system.N, system.size)
    _write(args.out, _dumps(system.to_dict()))
    return OK


def _parse_weights(spec: str, system: DigitSystem) -> Measure:
    if spec == "uniform":
        return Measure.uniform(system)
    try:
        weights = [float(x) for x in spec.split(",")]
    except ValueError:
        raise InputError(f"weights must be 'uniform' or a comma-separated list, got {spec!r}") from None
    if len(weights) != system.size:
        raise InputError(f"need {system.size} weights, got {len(weights)}")
    return Measure.on(system, weights)


def cmd_fourier(args: argparse.Namespace) -> int:
    system = _load_system(args.system)
    try:
        mu = _parse_weights(args.p, system)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    V = _load_directions(args.directions) if args.directions else axis_and_diagonal_directions(system.d)
    scan = nonvanishing_scan(mu, V, args.zmax, args.depth, args.threshold)
    checks = [check_scaling_invariance(mu, v, z, args.depth) for v in V for z in range(1, args.zmax + 1)]
    out = {
        "depth": args.depth,
        "threshold": args.threshold,
        "scan": [{"v": list(v.v), "z": z, "modulus": m} for v, z, m in scan],
        "invariance": [
            {"v": list(c.direction.v), "z": c.z, "difference": c.difference, "bound": c.bound} for c in checks
        ],
    }
    sys.stdout.write(_dumps(out))
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tubenull", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="certify an entropy gap for a direction set")
    p.add_argument("--system", required=True)
    p.add_argument("--directions", default="auto", help="JSON list of vectors, or 'auto' to search")
    p.add_argument("--rmax", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("cover", help="build a level-n tube cover")
    p.add_argument("--system")
    p.add_argument("--certificate", required=True)
    level = p.add_mutually_exclusive_group(required=True)
    level.add_argument("--level", type=int)
    level.add_argument("--epsilon", type=float)
    p.add_argument("--mode", choices=("exact", "aggregated"), default="exact")
    p.add_argument("--nmax", type=int, default=16, help="scan limit for --epsilon")
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("verify", help="check a cover certificate")
    p.add_argument("--cover", required=True)
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--depth", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce", help="reduce a graph-directed system to a digit system")
    p.add_argument("--gds", required=True)
    p.add_argument("--qmax", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("fourier", help="Fourier diagnostics of a self-similar measure")
    p.add_argument("--system", required=True)
    p.add_argument("--p", default="uniform")
    p.add_argument("--directions")
    p.add_argument("--zmax", type=int, default=5)
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.set_defaults(func=cmd_fourier)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (CapExceeded,) as exc:
        log.error("%s", exc)
        return CAP
    except LevelNotReached as exc:
        log.error("%s", exc)
        return FAILED
    except (InputError, DigitSystemError, DirectionError, GDSError, UncertifiedError, ValueError, KeyError) as exc:
        log.error("%s", exc)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
