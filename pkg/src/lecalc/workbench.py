"""Command line front end and end-to-end pipelines.

Input files are line oriented::

    ring x0 x1 x2 x3 x4
    poly x0*x1
    param d=2 N=4 seed=7

Stratum tables use one block per stratum::

    stratum S
    dim: 2
    parents: R
    chiF: 0
    csm: 3 3 1

Reports are JSON trees whose rationals are strings such as ``"-1/2"``; the
output is byte-identical for identical input, seed and version.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Any, Optional, Sequence

from . import __version__
from . import classcalc as cc
from .classcalc import ClassVector, Stratum, StratumTable
from .errors import ConsistencyError, InputError, LecalcError
from .ideals import DEFAULT_CAPS, Caps
from .lecycles import GermInput, euler_char_milnor_fiber, le_analysis, projective_le_classes
from .polyring import Ring, format_poly, parse_poly


# --------------------------------------------------------------------------
# input parsing


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a rational number: {text!r}") from None


def parse_vector(text: str) -> list[Fraction]:
    parts = text.replace(",", " ").split()
    if not parts:
        raise InputError("empty vector")
    return [parse_rational(p) for p in parts]


def parse_matrix(text: str) -> list[list[Fraction]]:
    return [parse_vector(row) for row in text.split(";") if row.strip()]


def parse_job(text: str) -> dict[str, Any]:
    """Read ``ring``/``poly``/``param``/``vector`` lines into a dict."""
    job: dict[str, Any] = {"params": {}, "vectors": []}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "ring":
            job["ring"] = rest.split()
        elif head == "poly":
            job["poly"] = rest
        elif head == "order":
            job["order"] = rest
        elif head == "vector":
            job["vectors"].append(parse_vector(rest))
        elif head == "coords":
            job["coords"] = parse_matrix(rest)
        elif head == "param":
            for item in rest.split():
                key, eq, value = item.partition("=")
                if not eq:
                    raise InputError(f"line {lineno}: expected key=value, got {item!r}")
                job["params"][key] = value
        else:
            raise InputError(f"line {lineno}: unknown directive {head!r}")
    return job


_STRATUM_FIELDS = {
    "dim": "int",
    "parents": "ids",
    "mu": "rational",
    "chiF": "int",
    "eta": "rational",
    "csm": "vector",
    "polar": "vector",
    "mu_perp": "rational",
    "degree": "rational",
    "chi_stalk": "rational",
    "chi_stratum": "rational",
}
_FIELD_ATTR = {"csm": "csm_closure", "polar": "polar_degrees"}


def parse_stratum_table(text: str) -> tuple[StratumTable, dict[str, str]]:
    """Parse a stratum table file; returns the table and any ``param`` entries."""
    blocks: list[dict[str, Any]] = []
    params: dict[str, str] = {}
    current: Optional[dict[str, Any]] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("param "):
            for item in line[6:].split():
                key, eq, value = item.partition("=")
                if not eq:
                    raise InputError(f"line {lineno}: expected key=value, got {item!r}")
                params[key] = value
            continue
        if line.startswith("stratum"):
            sid = line[len("stratum") :].strip()
            if not sid:
                raise InputError(f"line {lineno}: stratum needs an id")
            current = {"id": sid, "_line": lineno}
            blocks.append(current)
            continue
        if current is None:
            raise InputError(f"line {lineno}: field outside a stratum block")
        key, colon, value = line.partition(":")
        key = key.strip()
        if not colon or key not in _STRATUM_FIELDS:
            raise InputError(f"line {lineno}: unknown field {key!r} in stratum {current['id']!r}")
        kind = _STRATUM_FIELDS[key]
        value = value.strip()
        try:
            if kind == "int":
                parsed: Any = int(value)
            elif kind == "rational":
                parsed = parse_rational(value)
            elif kind == "vector":
                parsed = tuple(parse_vector(value))
            else:
                parsed = tuple(value.replace(",", " ").split())
        except ValueError:
            raise InputError(f"line {lineno}: field {key!r} of stratum {current['id']!r}: bad value {value!r}") from None
        current[_FIELD_ATTR.get(key, key)] = parsed
    strata = []
    for b in blocks:
        if "dim" not in b:
            raise InputError(f"line {b['_line']}: stratum {b['id']!r}: missing field 'dim'")
        b.pop("_line")
        strata.append(Stratum(**b))
    N = int(params["N"]) if "N" in params else None
    dim_z = int(params["dimZ"]) if "dimZ" in params else None
    return StratumTable(tuple(strata), N, dim_z), params


# --------------------------------------------------------------------------
# report helpers


def _q(x) -> str:
    return str(Fraction(x))


def _vec(v: ClassVector) -> list[str]:
    return [_q(c) for c in v.coeffs]


def _matrix(m) -> list[list[int]]:
    return [[int(x) for x in row] for row in m]


def _certificate(cert) -> dict[str, Any]:
    if cert is None:
        return {}
    return {
        "accepted": cert.accepted,
        "attempts": cert.attempts,
        "matrix": _matrix(cert.matrix),
        "checks": [
            {"name": c.name, "k": c.k, "expected": c.expected, "observed": c.observed, "ok": c.ok} for c in cert.checks
        ],
        "notes": list(cert.notes),
    }


def _report(command: str, inputs: dict[str, Any], results: dict[str, Any], **extra) -> dict[str, Any]:
    out = {"command": command, "version": __version__, "input": inputs, "results": results}
    out.update(extra)
    return out


# --------------------------------------------------------------------------
# commands


def cmd_le_numbers(
    ring: Ring,
    poly: str,
    seed: int = 0,
    coords: Optional[Sequence[Sequence[Fraction]]] = None,
    caps: Caps = DEFAULT_CAPS,
    randomize: bool = False,
) -> dict[str, Any]:
    h = parse_poly(poly, ring)
    polar, le, cert = le_analysis(GermInput(h, coords, seed, caps, randomize))
    n = ring.nvars - 1
    results = {
        "le_numbers": list(le.le_numbers),
        "sigma_dimension": le.sigma_dimension,
        "le_cycle_degrees": list(le.lambda_degrees),
        "polar_varieties": [
            {"k": e.k, "ideal": [format_poly(g) for g in e.ideal.groebner().elements], "dimension": e.dimension, "degree": e.degree}
            for e in polar.gamma
        ],
        "euler_char_milnor_fiber": euler_char_milnor_fiber(le, n),
    }
    inputs = {"ring": list(ring.names), "poly": format_poly(h), "seed": seed}
    if coords is not None:
        inputs["coords"] = [[_q(x) for x in row] for row in coords]
    return _report("le-numbers", inputs, results, certificate=_certificate(cert))


def analyze_hypersurface(ring: Ring, poly: str, seed: int = 0, caps: Caps = DEFAULT_CAPS) -> dict[str, Any]:
    """Full pipeline for Z = V(H) ⊂ P^N; returns raw objects plus gate flags."""
    H = parse_poly(poly, ring)
    N = ring.nvars - 1
    res = projective_le_classes(H, N, seed, caps)
    d = res.degree
    dim_z = N - 1
    r = res.sing_dimension
    le = res.classes
    if r < 0:
        m_c = m_p = ClassVector.zero(N)
    else:
        m_c = cc.milnor_from_le(le, d, r)
        m_p = cc.milnor_from_le_projective(le, d, dim_z)
    fj = cc.fj_degrees(N, d)
    csm = cc.csm_from_fj_milnor(fj, m_c, dim_z)
    alpha = cc.aluffi_from_milnor(m_c, d)
    gates = {
        "route_agreement": m_c == m_p,
        "support_bound": m_c.support_dim <= r and le.support_dim <= r,
        "le_round_trip": r < 0 or cc.le_from_milnor(m_c, d, r) == le,
    }
    if r == 0:
        gates["isolated_m0_equals_sum_mu"] = m_c[0] == res.chart_milnor_total
    return {
        "H": H,
        "N": N,
        "d": d,
        "dim_z": dim_z,
        "r": r,
        "le": le,
        "milnor_c": m_c,
        "milnor_projective": m_p,
        "fj": fj,
        "csm": csm,
        "aluffi": alpha,
        "gates": gates,
        "projective": res,
    }


def cmd_analyze_hypersurface(
    ring: Ring, poly: str, seed: int = 0, caps: Caps = DEFAULT_CAPS, strict: bool = False
) -> dict[str, Any]:
    a = analyze_hypersurface(ring, poly, seed, caps)
    failed = [k for k, ok in a["gates"].items() if not ok]
    if strict and failed:
        raise ConsistencyError(f"consistency gates failed: {', '.join(failed)}")
    res = a["projective"]
    results = {
        "N": a["N"],
        "degree": a["d"],
        "dim_Z": a["dim_z"],
        "dim_Z_sing": a["r"],
        "le_classes": _vec(a["le"]),
        "milnor_classes": _vec(a["milnor_c"]),
        "milnor_classes_projective_route": _vec(a["milnor_projective"]),
        "fulton_johnson": _vec(a["fj"]),
        "schwartz_macpherson": _vec(a["csm"]),
        "euler_characteristic": _q(a["csm"][0]),
        "aluffi": _vec(a["aluffi"]),
    }
    if res.chart is not None:
        results["chart"] = format_poly(res.chart)
    if res.chart_milnor_total is not None:
        results["sum_milnor_numbers"] = res.chart_milnor_total
    inputs = {"ring": list(ring.names), "poly": format_poly(a["H"]), "seed": seed}
    return _report("analyze", inputs, results, checks=a["gates"], certificate=_certificate(res.certificate))


TRANSFORM_KINDS = ("milnor-from-le", "le-from-milnor", "legacy", "projective", "aluffi", "fj", "csm-from-fj")


def _coefficient_table(fn, r: int, d: int) -> dict[str, str]:
    return {f"{k},{s}": _q(fn(k, s, d)) for k in range(r + 1) for s in range(r - k + 1)}


def cmd_transform(
    kind: str,
    vectors: Sequence[Sequence[Fraction]] = (),
    d: Optional[int] = None,
    N: Optional[int] = None,
    r: Optional[int] = None,
    dim_z: Optional[int] = None,
) -> dict[str, Any]:
    if kind not in TRANSFORM_KINDS:
        raise InputError(f"unknown transform {kind!r}; choose from {', '.join(TRANSFORM_KINDS)}")
    needed = {"fj": 0, "csm-from-fj": (1, 2)}.get(kind, 1)
    counts = needed if isinstance(needed, tuple) else (needed,)
    if len(vectors) not in counts:
        raise InputError(f"transform {kind!r} takes {' or '.join(map(str, counts))} vector(s), got {len(vectors)}")
    if d is None:
        raise InputError("parameter d is required")
    if N is None:
        if not vectors:
            raise InputError("parameter N is required")
        N = max(len(v) for v in vectors) - 1
    vecs = [ClassVector.of(N, v) for v in vectors]
    if r is None and vecs:
        r = max(vecs[0].support_dim, 0)
    if dim_z is None:
        dim_z = N - 1
    inputs: dict[str, Any] = {"kind": kind, "vectors": [_vec(v) for v in vecs], "d": d, "N": N}
    tables: dict[str, Any] = {}
    if kind == "milnor-from-le":
        inputs["r"] = r
        out = cc.milnor_from_le(vecs[0], d, r)
        tables["C"] = _coefficient_table(cc.coeff_C, r, d)
    elif kind == "le-from-milnor":
        inputs["r"] = r
        out = cc.le_from_milnor(vecs[0], d, r)
        tables["B"] = _coefficient_table(cc.coeff_B, r, d)
    elif kind == "legacy":
        inputs["r"] = r
        out = cc.milnor_from_le_legacy(vecs[0], d, r)
    elif kind == "projective":
        inputs["dim_Z"] = dim_z
        out = cc.milnor_from_le_projective(vecs[0], d, dim_z)
    elif kind == "aluffi":
        out = cc.aluffi_from_milnor(vecs[0], d)
    elif kind == "fj":
        out = cc.fj_degrees(N, d)
    else:
        inputs["dim_Z"] = dim_z
        fj = vecs[0] if len(vecs) == 2 else cc.fj_degrees(N, d)
        out = cc.csm_from_fj_milnor(fj, vecs[-1], dim_z)
    return _report("transform", inputs, {"output": _vec(out)}, coefficients=tables)


STRATA_KINDS = ("pp-milnor", "csm-from-polar", "gamma", "top-class", "chi")


def cmd_strata(
    kind: str,
    table: StratumTable,
    d: Optional[int] = None,
    N: Optional[int] = None,
    r: Optional[int] = None,
    dim_z: Optional[int] = None,
) -> dict[str, Any]:
    if kind not in STRATA_KINDS:
        raise InputError(f"unknown strata transform {kind!r}; choose from {', '.join(STRATA_KINDS)}")
    N = N if N is not None else table.ambient_dim
    dim_z = dim_z if dim_z is not None else table.dim_z
    if dim_z is None and N is not None:
        dim_z = N - 1
    inputs: dict[str, Any] = {"kind": kind, "strata": [s.id for s in table.strata], "N": N, "d": d, "dim_Z": dim_z}
    if kind in ("pp-milnor", "csm-from-polar", "top-class") and N is None:
        raise InputError("parameter N is required")
    if kind == "pp-milnor":
        if d is None:
            raise InputError("parameter d is required")
        gamma = cc.gamma_from_mu(table, dim_z)
        out = cc.pp_milnor(table, d, N, dim_z)
        results = {"gamma": {k: _q(v) for k, v in gamma.items()}, "output": _vec(out)}
    elif kind == "csm-from-polar":
        results = {"output": _vec(cc.csm_from_polar(table, N))}
    elif kind == "gamma":
        results = {"gamma": {k: _q(v) for k, v in cc.gamma_from_mu(table, dim_z).items()}}
    elif kind == "top-class":
        if r is None:
            r = max(s.dim for s in table.strata if s.mu_perp is not None)
        inputs["r"] = r
        results = {"output": _vec(cc.top_milnor_class(table, r, N))}
    else:
        results = {"output": _q(cc.chi_from_strata(table))}
    return _report("strata", inputs, results)


def cmd_identities(kmax: int = 32, lmax: int = 32) -> dict[str, Any]:
    reports = cc.identity_checks(kmax, lmax)
    results = {
        r.name: {"checked": r.checked, "passed": r.passed, "first_counterexample": r.failures[0] if r.failures else None}
        for r in reports
    }
    return _report("identities", {"kmax": kmax, "lmax": lmax}, results)


# --------------------------------------------------------------------------
# output


def to_json(report: dict[str, Any]) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def _flatten(prefix: str, value, rows: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(value, list) and value and all(isinstance(x, (dict, list)) for x in value):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, rows)
    elif isinstance(value, list):
        rows.append((prefix, "  ".join(f"{str(x):>6}" for x in value)))
    else:
        rows.append((prefix, str(value)))


def to_table(report: dict[str, Any]) -> str:
    rows: list[tuple[str, str]] = []
    _flatten("", report, rows)
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows) + "\n"


# --------------------------------------------------------------------------
# CLI


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--table", action="store_true", help="print an aligned plain-text table instead of JSON")
    p.add_argument("--timing", action="store_true", help="add wall-clock timing (breaks byte determinism)")
    p.add_argument("--strict", action="store_true", help="treat failed consistency gates as errors (exit 5)")
    p.add_argument("--max-pairs", type=int, default=DEFAULT_CAPS.max_pairs)
    p.add_argument("--max-saturation-steps", type=int, default=DEFAULT_CAPS.max_saturation_steps)
    p.add_argument("--max-power", type=int, default=DEFAULT_CAPS.max_power, help="cap on N in the m^N truncation")
    p.add_argument("--attempts", type=int, default=DEFAULT_CAPS.attempts, help="genericity attempts")


def _add_poly_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="job file with ring/poly/param lines")
    p.add_argument("--ring", nargs="+", help="variable names")
    p.add_argument("--poly", help="polynomial text")
    p.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lecalc", description="Lê numbers, Lê classes and Milnor classes, exactly.")
    parser.add_argument("--version", action="version", version=f"lecalc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("le-numbers", help="Lê numbers of a germ at the origin")
    _add_poly_input(p)
    p.add_argument("--coords", help="coordinate matrix, rows separated by ';'")
    p.add_argument("--randomize", action="store_true", help="start directly with random frames")
    _add_common(p)

    p = sub.add_parser("analyze", help="global Lê/Milnor/CSM/Aluffi classes of a projective hypersurface")
    _add_poly_input(p)
    _add_common(p)

    p = sub.add_parser("transform", help="class-vector transforms")
    p.add_argument("kind", choices=TRANSFORM_KINDS)
    p.add_argument("--vector", action="append", default=[], help="a_0,a_1,... (repeatable)")
    p.add_argument("--input", help="job file with vector/param lines")
    p.add_argument("--d", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--dim-z", type=int)
    _add_common(p)

    p = sub.add_parser("strata", help="transforms on stratum tables")
    p.add_argument("kind", choices=STRATA_KINDS)
    p.add_argument("--table-file", "-t", required=True, dest="table_file")
    p.add_argument("--d", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--dim-z", type=int)
    _add_common(p)

    p = sub.add_parser("identities", help="check the binomial identities")
    p.add_argument("--kmax", type=int, default=32)
    p.add_argument("--lmax", type=int, default=32)
    _add_common(p)
    return parser


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _int_param(params: dict, key: str, cli_value):
    if cli_value is not None:
        return cli_value
    if key in params:
        try:
            return int(params[key])
        except ValueError:
            raise InputError(f"parameter {key} must be an integer") from None
    return None


def _poly_job(args) -> tuple[Ring, str, int, dict]:
    job = parse_job(_read(args.input)) if args.input else {"params": {}, "vectors": []}
    names = args.ring or job.get("ring")
    text = args.poly or job.get("poly")
    if not names or not text:
        raise InputError("need a ring and a polynomial (--ring/--poly or --input)")
    seed = _int_param(job["params"], "seed", args.seed) or 0
    return Ring(tuple(names)), text, seed, job


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, str]:
    """Execute the CLI; returns (exit code, text written to stdout)."""
    args = build_parser().parse_args(argv)
    caps = Caps(args.max_pairs, args.max_saturation_steps, args.max_power, args.attempts)
    start = time.perf_counter()
    if args.command == "le-numbers":
        ring, text, seed, job = _poly_job(args)
        coords = parse_matrix(args.coords) if args.coords else job.get("coords")
        report = cmd_le_numbers(ring, text, seed, coords, caps, args.randomize)
    elif args.command == "analyze":
        ring, text, seed, _ = _poly_job(args)
        report = cmd_analyze_hypersurface(ring, text, seed, caps, args.strict)
    elif args.command == "transform":
        job = parse_job(_read(args.input)) if args.input else {"params": {}, "vectors": []}
        vectors = [parse_vector(v) for v in args.vector] or job["vectors"]
        prm = job["params"]
        report = cmd_transform(
            args.kind,
            vectors,
            _int_param(prm, "d", args.d),
            _int_param(prm, "N", args.N),
            _int_param(prm, "r", args.r),
            _int_param(prm, "dimZ", args.dim_z),
        )
    elif args.command == "strata":
        table, prm = parse_stratum_table(_read(args.table_file))
        report = cmd_strata(
            args.kind,
            table,
            _int_param(prm, "d", args.d),
            _int_param(prm, "N", args.N),
            _int_param(prm, "r", args.r),
            _int_param(prm, "dimZ", args.dim_z),
        )
    else:
        report = cmd_identities(args.kmax, args.lmax)
        if args.strict and not all(v["passed"] for v in report["results"].values()):
            raise ConsistencyError("binomial identity check failed")
    if args.timing:
        report["timing_seconds"] = f"{time.perf_counter() - start:.3f}"
    return 0, to_table(report) if args.table else to_json(report)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        code, text = run(argv)
    except LecalcError as exc:
        print(f"lecalc: error: {exc}", file=sys.stderr)
        return exc.exit_code
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
