"""Command-line entry point: iterate / splitting / oracle / jump-search /
ellipsoid / selftest, with JSON or CSV output.

Exit codes: 0 success (a search with no hits is a success), 1 input
validation failure, 2 internal invariant violation.  Output is
deterministic for a fixed configuration and seed: JSON keys are sorted,
numbers are formatted identically, and the jump search result does not
depend on the worker count.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .ellipsoid import EllipsoidError, EllipsoidSpec, PipelineParams, run_pipeline
from .iteration import (
    DecompositionError,
    PathIndexData,
    index_iterate,
    mean_index,
    nullity_iterate,
    splitting_numbers,
    unit_spectrum,
    validate,
)
from .jump import (
    JumpError,
    build_jump_vector,
    default_delta,
    default_eps,
    search_N,
    theorem211_report,
    varrho,
)
from .normal_forms import NormalFormError
from .oracle import (
    OracleError,
    cz_index,
    estimate_splitting,
    iterate_path,
    path_from_quadratic_hamiltonian,
    path_from_samples,
)
from .scalars import PrecisionError, Scalar, get_precision, parse_scalar, set_precision
from . import selftest as selftest_mod

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    input_path: str | None = None
    output_path: str | None = None
    precision: int = 50
    eps: float | None = None
    delta: str | None = None
    rank_tol: float = 1e-9
    n_max: int = 10 ** 6
    m_max: int = 50
    seed: int = 0
    workers: int = 1
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.precision < 30:
            raise InputError(f"precision must be >= 30, got {self.precision}")
        if self.m_max < 1:
            raise InputError("m-max must be >= 1")
        if self.n_max < 1:
            raise InputError("n-max must be >= 1")
        if self.workers < 1:
            raise InputError("workers must be >= 1")


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"input file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(
            f"malformed JSON in {path}: {exc.msg} at line {exc.lineno} column {exc.colno}") from exc


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(obj, out_path: str | None):
    _emit(json.dumps(obj, sort_keys=True, indent=2) + "\n", out_path)


def _parse_omega_complex(text: str) -> complex:
    """1, -1, or an angle literal x meaning e^(i pi x)."""
    s = text.strip()
    if s == "1":
        return complex(1.0)
    if s == "-1":
        return complex(-1.0)
    x = float(parse_scalar(s))
    return cmath.exp(1j * math.pi * x)


def _parse_omega_tagged(text: str):
    """+-1 as integers, otherwise a tagged Scalar angle theta/pi."""
    s = text.strip()
    if s == "1":
        return 1
    if s == "-1":
        return -1
    return parse_scalar(s)


def _load_path_data(obj) -> PathIndexData:
    try:
        data = PathIndexData.from_json(obj)
        data.decomp.check()
        return data
    except (KeyError, ValueError, DecompositionError) as exc:
        raise InputError(f"invalid path data: {exc}") from exc


def _load_generator(obj):
    try:
        n = int(obj["n"])
        tau = float(obj["tau"])
        steps = int(obj.get("steps", 2048))
        if "B" in obj:
            B = np.array(obj["B"], dtype=float)
            return path_from_quadratic_hamiltonian(B, tau, steps=steps)
        if "samples" in obj:
            ts = [float(s["t"]) for s in obj["samples"]]
            mats = [np.array(s["mat"], dtype=float) for s in obj["samples"]]
            return path_from_samples(ts, mats, n=n, tau=tau)
        raise InputError("generator file needs a 'B' matrix or a 'samples' list")
    except (KeyError, ValueError, OracleError) as exc:
        raise InputError(f"invalid generator file: {exc}") from exc


def _mean_times_m(mi, m: int) -> str:
    if mi.is_rational:
        fr = mi.fraction * m
        return f"{fr.numerator}/{fr.denominator}"
    with mpmath.mp.workdps(get_precision()):
        return mpmath.nstr(mi.mpf() * m, 30)


# ----- subcommand handlers ----------------------------------------------------


def _cmd_iterate(cfg: RunConfig) -> int:
    data = _load_path_data(_load_json(cfg.input_path))
    mi = mean_index(data)
    lines = ["m,i,nu,mean_index_times_m"]
    for m in range(1, cfg.m_max + 1):
        lines.append(f"{m},{index_iterate(data, m)},{nullity_iterate(data, m)},"
                     f"{_mean_times_m(mi, m)}")
    _emit("\n".join(lines) + "\n", cfg.output_path)
    return EXIT_OK


def _cmd_splitting(cfg: RunConfig) -> int:
    data = _load_path_data(_load_json(cfg.input_path))
    d = data.decomp
    omega_text = cfg.extra.get("omega")
    out = {"validation": validate(data).to_json()}
    if omega_text is not None:
        omega = _parse_omega_tagged(omega_text)
        pair = splitting_numbers(d, omega)
        out["omega"] = omega_text
        out["splitting"] = {"s_plus": pair.s_plus, "s_minus": pair.s_minus}
    else:
        table = []
        for ang, mult in unit_spectrum(d):
            if ang == Scalar.rational(0):
                pair = splitting_numbers(d, 1)
                label = "1"
            else:
                pair = splitting_numbers(d, ang)
                label = f"{ang.fraction}" if ang.is_rational else repr(float(ang))
            table.append({"angle_over_pi": label, "multiplicity": mult,
                          "s_plus": pair.s_plus, "s_minus": pair.s_minus})
        out["spectrum"] = table
    _dump_json(out, cfg.output_path)
    return EXIT_OK


def _cmd_oracle(cfg: RunConfig) -> int:
    path = _load_generator(_load_json(cfg.input_path))
    omega = _parse_omega_complex(cfg.extra.get("omega", "1"))
    m = int(cfg.extra.get("m", 1))
    if m < 1:
        raise InputError("m must be >= 1")
    eps = cfg.eps if cfg.eps is not None else 1e-4
    iterated = iterate_path(path, m)
    i_val, nu_val = cz_index(iterated, omega, eps=eps, rank_tol=cfg.rank_tol)
    out = {"omega": cfg.extra.get("omega", "1"), "m": m, "i": i_val, "nu": nu_val}
    if cfg.extra.get("splitting"):
        sp, sm = estimate_splitting(iterated, omega)
        out["splitting_estimate"] = {"s_plus": sp, "s_minus": sm}
    _dump_json(out, cfg.output_path)
    return EXIT_OK


def _parse_chi(text: str, h: int):
    if text == "auto":
        if h > 12:
            raise InputError(
                f"chi auto enumerates vertices only up to h = 12, got h = {h}; pass explicit bits")
        return "auto"
    bits = text.strip()
    if not all(c in "01" for c in bits):
        raise InputError(f"chi must be 'auto' or a 0/1 string, got {text!r}")
    if len(bits) != h:
        raise InputError(f"chi needs exactly h = {h} bits, got {len(bits)}")
    return tuple(int(c) for c in bits)


def _cmd_jump_search(cfg: RunConfig) -> int:
    obj = _load_json(cfg.input_path)
    raw_paths = obj["paths"] if isinstance(obj, dict) and "paths" in obj else obj
    if not isinstance(raw_paths, list) or not raw_paths:
        raise InputError("paths file must hold a non-empty list of path data objects")
    paths = [_load_path_data(p) for p in raw_paths]
    try:
        v = build_jump_vector(paths, M=cfg.extra.get("m_scale"), M0=cfg.extra.get("m0"))
        chi = _parse_chi(cfg.extra.get("chi", "auto"), v.h)
        delta = Fraction(cfg.delta) if cfg.delta else default_delta(paths)
        eps = cfg.eps if cfg.eps is not None else default_eps(paths, v.M, delta)
        result = search_N(v, chi, eps=eps, N_max=cfg.n_max, paths=paths,
                          delta=delta, workers=cfg.workers)
    except JumpError as exc:
        raise InputError(str(exc)) from exc
    n = max(p.decomp.n for p in paths)
    reports = [theorem211_report(sol, paths, n).to_json()
               for sol in result.solutions[:int(cfg.extra.get("report_solutions", 25))]]
    out = {
        "schema_version": 1,
        "jump_vector": v.to_json(),
        "varrho_n": varrho(paths, n),
        "search": result.to_json(),
        "theorem211": reports,
    }
    _dump_json(out, cfg.output_path)
    return EXIT_OK


def _cmd_ellipsoid(cfg: RunConfig) -> int:
    alphas = [a for a in cfg.extra.get("alphas", "").split(",") if a]
    if not alphas:
        raise InputError("--alphas requires a comma-separated list, e.g. 1,sqrt2")
    try:
        spec = EllipsoidSpec(alphas=tuple(alphas), mode=cfg.extra.get("mode", "convex"))
        params = PipelineParams(
            m_max=cfg.m_max,
            N_max=cfg.n_max,
            chi=cfg.extra.get("chi", "auto"),
            eps=cfg.eps,
            delta=Fraction(cfg.delta) if cfg.delta else None,
            workers=cfg.workers,
        )
        report = run_pipeline(spec, params)
    except (EllipsoidError, JumpError) as exc:
        raise InputError(str(exc)) from exc
    _dump_json(report.to_json(), cfg.output_path)
    return EXIT_OK


def _cmd_selftest(cfg: RunConfig) -> int:
    results = selftest_mod.run_all(seed=cfg.seed)
    ok_all = True
    lines = []
    for name, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        ok_all &= ok
        lines.append(f"selftest {name}: {status} ({detail})")
    _emit("\n".join(lines) + "\n", cfg.output_path)
    return EXIT_OK if ok_all else EXIT_INTERNAL


_HANDLERS = {
    "iterate": _cmd_iterate,
    "splitting": _cmd_splitting,
    "oracle": _cmd_oracle,
    "jump-search": _cmd_jump_search,
    "ellipsoid": _cmd_ellipsoid,
    "selftest": _cmd_selftest,
}


def dispatch(cfg: RunConfig) -> int:
    """Run one subcommand; deterministic for a fixed config (and seed)."""
    cfg.validate()
    set_precision(cfg.precision)
    handler = _HANDLERS.get(cfg.subcommand)
    if handler is None:
        raise InputError(f"unknown subcommand {cfg.subcommand!r}")
    return handler(cfg)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="symindex",
        description="Index iteration for symplectic paths: exact formulas, "
                    "a geometric crossing-count oracle, and the common-index-jump search.")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--out", dest="out", default=None, help="output file (default stdout)")
        p.add_argument("--precision", type=int,
                       default=int(os.environ.get("SYMINDEX_PRECISION", "50")),
                       help="working precision in decimal digits (>= 30)")

    p = sub.add_parser("iterate", help="CSV table m, i, nu, mean_index*m from path data")
    p.add_argument("--data", dest="input", required=True)
    p.add_argument("--m-max", type=int, default=50)
    common(p)

    p = sub.add_parser("splitting", help="splitting numbers of a decomposition")
    p.add_argument("--data", dest="input", required=True)
    p.add_argument("--omega", default=None,
                   help="1, -1, or an angle literal theta/pi; omit for the whole spectrum")
    common(p)

    p = sub.add_parser("oracle", help="geometric (i, nu) of a generator path")
    p.add_argument("--generator", dest="input", required=True)
    p.add_argument("--omega", default="1")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--eps", type=float, default=None, help="endpoint perturbation scale")
    p.add_argument("--rank-tol", type=float, default=1e-9)
    p.add_argument("--splitting", action="store_true",
                   help="also estimate the splitting pair at omega")
    common(p)

    p = sub.add_parser("jump-search", help="common-index-jump search over a path collection")
    p.add_argument("--paths", dest="input", required=True)
    p.add_argument("--chi", default="auto", help="'auto' or an h-bit 0/1 string")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--delta", default=None, help="threshold as a fraction, e.g. 1/8")
    p.add_argument("--n-max", type=int, default=10 ** 6)
    p.add_argument("--m-scale", type=int, default=None, help="the M multiplier (default: lcm rule)")
    p.add_argument("--m0", type=int, default=None, help="required divisor of N (default: M)")
    p.add_argument("--workers", type=int,
                   default=int(os.environ.get("SYMINDEX_WORKERS", "1")))
    p.add_argument("--report-solutions", type=int, default=25)
    common(p)

    p = sub.add_parser("ellipsoid", help="full pipeline on a model ellipsoid")
    p.add_argument("--alphas", required=True, help="comma-separated, e.g. 1,sqrt2")
    p.add_argument("--mode", choices=["quadratic", "convex"], default="convex")
    p.add_argument("--m-max", type=int, default=50)
    p.add_argument("--n-max", type=int, default=10 ** 6)
    p.add_argument("--chi", default="auto")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--delta", default=None)
    p.add_argument("--workers", type=int,
                   default=int(os.environ.get("SYMINDEX_WORKERS", "1")))
    common(p)

    p = sub.add_parser("selftest", help="run the built-in property suites")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    return ap


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    extra = {}
    for key in ("omega", "m", "chi", "alphas", "mode", "m_scale", "m0",
                "splitting", "report_solutions"):
        if hasattr(args, key) and getattr(args, key) is not None:
            extra[key] = getattr(args, key)
    return RunConfig(
        subcommand=args.subcommand,
        input_path=getattr(args, "input", None),
        output_path=getattr(args, "out", None),
        precision=getattr(args, "precision", 50),
        eps=getattr(args, "eps", None),
        delta=getattr(args, "delta", None),
        rank_tol=getattr(args, "rank_tol", 1e-9),
        n_max=getattr(args, "n_max", 10 ** 6),
        m_max=getattr(args, "m_max", 50),
        seed=getattr(args, "seed", 0),
        workers=getattr(args, "workers", 1),
        extra=extra,
    )


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    cfg = _config_from_args(args)
    try:
        return dispatch(cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NormalFormError, DecompositionError, JumpError, EllipsoidError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OracleError, PrecisionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
