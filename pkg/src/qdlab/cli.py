"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 quadrature or truncation failure,
4 inconclusive mass-condition certification. Numbers are printed with ten
significant digits; --json and --pretty emit the same numbers.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Optional

from .errors import Inconclusive, NoConvergence, QDLabError, TailTooLarge
from .families import control_family, efficiency_sweep, geometric_family, polygon_family, sweep_to_csv
from .limit_models import (
    ThinModel,
    choose_inner_radius,
    detect_thick_scaling,
    find_concentration_annulus,
    limit_model_distance,
    mass_condition_check,
    s_n_eval,
    s_n_sup_deviation,
)
from .orbits import orbit_diagram, teich_dimension, validate_portrait
from .pushforward import (
    CosineMap,
    TruncationPolicy,
    cos_pushforward_density,
    cos_pushforward_mass,
    efficiency,
    restricted_cos_pushforward_mass,
)
from .qd_core import AffineMap, RationalQD
from .quadrature import QuadratureConfig, annulus_log_mass, annulus_modulus, mass_on_region, plane_mass_partition
from .regions import Annulus, Disk, Plane, region_from_json

COMMANDS = ("mass", "push", "eff", "sweep", "annulus", "limit", "portrait", "mass-condition")


@dataclass
class RunManifest:
    command: str
    options: dict[str, Any] = field(default_factory=dict)
    out: Optional[str] = None
    seed: int = 0


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# formatting


def _g(x: float) -> str:
    # ten significant digits, trailing zeros kept
    return f"{x:#.10g}" if math.isfinite(x) else f"{x}"


def _num(x) -> str:
    if isinstance(x, complex):
        if x.imag == 0:
            return _g(x.real)
        sign = "+" if x.imag >= 0 or math.isnan(x.imag) else "-"
        return f"{_g(x.real)}{sign}{_g(abs(x.imag))}j"
    if isinstance(x, float):
        return _g(x)
    return str(x)


def _jsonable(x):
    if isinstance(x, complex):
        return [float(f"{x.real:.10g}"), float(f"{x.imag:.10g}")]
    if isinstance(x, float):
        return float(f"{x:.10g}") if math.isfinite(x) else None
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


def _render(result: dict, mode: str, line: str) -> str:
    if mode == "json":
        return json.dumps(_jsonable(result), sort_keys=False)
    if mode == "pretty":
        return "\n".join(f"{k}: {_pretty(v)}" for k, v in result.items())
    return line


def _pretty(v) -> str:
    if isinstance(v, dict):
        return " ".join(f"{k}={_pretty(x)}" for k, x in v.items())
    if isinstance(v, (list, tuple)):
        sep = "\n  " if any(isinstance(x, dict) for x in v) else ", "
        return ("\n  " if sep != ", " else "") + sep.join(_pretty(x) for x in v)
    return _num(v)


# ---------------------------------------------------------------------------
# input parsing


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise InputError(f"not a complex number: {text!r}") from exc


def _load_json(text: str) -> Any:
    try:
        if text.lstrip().startswith(("{", "[")):
            return json.loads(text)
        if not os.path.exists(text):
            raise InputError(f"input file not found: {text}")
        with open(text, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {text!r}: {exc}") from exc


def _qd(text: str) -> RationalQD:
    try:
        return RationalQD.from_json(_load_json(text))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed differential: {exc}") from exc


def _range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise InputError(f"bad index range {text!r}") from exc


def _cfg(o: dict) -> QuadratureConfig:
    kw = {}
    if o.get("tol") is not None:
        kw["rel_tol"] = o["tol"]
    if o.get("max_depth") is not None:
        kw["max_depth"] = o["max_depth"]
    return QuadratureConfig(**kw)


def _policy(o: dict) -> TruncationPolicy:
    kw = {}
    if o.get("trunc_k") is not None:
        kw["K"] = o["trunc_k"]
    if o.get("strip_y") is not None:
        kw["Y"] = o["strip_y"]
    if o.get("tail_tol") is not None:
        kw["tail_tol"] = o["tail_tol"]
    return TruncationPolicy(**kw)


# ---------------------------------------------------------------------------
# commands


def _cmd_mass(o):
    q = _qd(o["qd"])
    region = region_from_json(_load_json(o["region"])) if o.get("region") else Plane()
    cfg = _cfg(o)
    if o.get("method") == "partition":
        if not isinstance(region, Plane):
            raise InputError("the partition method integrates the whole plane only")
        res = plane_mass_partition(q, cfg)
    else:
        res = mass_on_region(q, region, cfg)
    if o.get("svg"):
        from .svg import write_svg

        write_svg(q, o["svg"])
    out = {"mass": res.value, "error_estimate": res.error_estimate, "cells": res.cells_evaluated}
    return out, f"{_num(res.value)} ± {_num(res.error_estimate)}"


def _cmd_push(o):
    q = _qd(o["qd"])
    w = _complex(o["w"])
    lam = _complex(o.get("lam") or "1")
    exact = complex(CosineMap(lam).pushforward_density(q, w))
    out = {"w": w, "density": exact}
    line = _num(exact)
    if lam == 1 and o.get("truncated"):
        dv = cos_pushforward_density(q, w, _policy(o))
        out.update(truncated=dv.value, tail_bound=dv.tail_bound, K=dv.K)
        line += f" truncated {_num(dv.value)} (K={dv.K}, tail <= {_num(dv.tail_bound)})"
    return out, line


def _cmd_eff(o):
    q = _qd(o["qd"])
    cfg, policy = _cfg(o), _policy(o)
    if o.get("method") == "wplane":
        mass = mass_on_region(q, Plane(), cfg)
        push = cos_pushforward_mass(q, cfg, policy, method="wplane")
        ratio = push.value / mass.value
        err = (push.error_estimate + ratio * mass.error_estimate) / mass.value
    else:
        res = efficiency(q, cfg, policy)
        mass, push, ratio, err = res.mass, res.pushforward, res.ratio, res.error_estimate
    if o.get("svg"):
        from .svg import write_svg

        write_svg(q, o["svg"])
    out = {"mass": mass.value, "pushforward_mass": push.value, "ratio": ratio, "error_estimate": err}
    return out, f"ratio {_num(ratio)} ± {_num(err)} (mass {_num(mass.value)}, push-forward {_num(push.value)})"


def _cmd_sweep(o):
    family = o.get("family", "ex42")
    schedule = o.get("schedule", "geometric")
    if family == "ex42":
        fam = control_family() if schedule == "control" else geometric_family()
        if schedule not in ("geometric", "control"):
            raise InputError(f"unknown schedule {schedule!r}")
    elif family == "ex41":
        fam = polygon_family()
    else:
        raise InputError(f"unknown family {family!r}")
    rows = efficiency_sweep(fam, _range(o.get("n", "1..8")), _cfg(o), _policy(o))
    out = {
        "rows": [
            {
                "index": r.index,
                "mass": r.mass,
                "pushforward_mass": r.pushforward_mass,
                "ratio": r.ratio,
                "concentration_fraction": r.concentration_fraction,
                "error_estimate": r.error_estimate,
                "error": r.error,
            }
            for r in rows
        ]
    }
    for r in rows:
        if not r.ok:
            print(f"row {r.index}: {r.error}", file=sys.stderr)
    return out, sweep_to_csv(rows).rstrip("\n")


def _cmd_annulus(o):
    r, R = o["r"], o["R"]
    center = _complex(o.get("center") or "0")
    out = {"modulus": annulus_modulus(r, R), "log_mass": annulus_log_mass(r, R)}
    line = f"modulus {_num(out['modulus'])} log_mass {_num(out['log_mass'])}"
    if o.get("qd"):
        q = _qd(o["qd"])
        cfg, policy = _cfg(o), _policy(o)
        region = Annulus(center, r, R)
        m = mass_on_region(q, region, cfg)
        p = restricted_cos_pushforward_mass(q, region, cfg, policy)
        out.update(mass=m.value, pushforward_mass=p.value, alpha=p.value / m.value,
                   error_estimate=m.error_estimate + p.error_estimate)
        line += f" mass {_num(m.value)} pushforward {_num(p.value)} alpha {_num(out['alpha'])}"
    return out, line


def _cmd_limit(o):
    sub = o.get("limit_command")
    if sub == "detect":
        S = detect_thick_scaling(_qd(o["qd"]))
        return {"a": S.a, "b": S.b}, f"a {_num(S.a)} b {_num(S.b)}"
    if sub == "distance":
        q_n, model = _qd(o["qd"]), _qd(o["model"])
        if o.get("a") is not None:
            M = AffineMap(_complex(o["a"]), _complex(o.get("b") or "0"))
        else:
            M = detect_thick_scaling(q_n).M
        d = limit_model_distance(q_n, M, model, _cfg(o))
        return {"a": M.a, "b": M.b, "distance": d}, _num(d)
    if sub == "sn":
        a, b = _complex(o["a"]), _complex(o["b"])
        if o.get("z") is not None:
            v = s_n_eval(a, b, _complex(o["z"]))
            return {"value": v}, _num(v)
        dev = s_n_sup_deviation(a, b, o.get("R") or 1.0)
        return {"sup_deviation": dev}, _num(dev)
    if sub == "concentrate":
        q = _qd(o["qd"])
        if o.get("delta") is not None:
            model = ThinModel(_complex(o.get("center") or "0"), o["r"], o["R"])
            rs = choose_inner_radius(q, model, o["delta"], _cfg(o))
            return {"R_star": rs}, _num(rs)
        res = find_concentration_annulus(q, o.get("M") or 1.0)
        if res is None:
            return {"found": False}, "none"
        out = {
            "found": True,
            "center": res.center,
            "inner_radius": res.inner_radius,
            "outer_radius": res.outer_radius,
            "modulus": res.modulus,
            "poles_inside": list(res.poles_inside),
        }
        return out, (f"center {_num(res.center)} inner {_num(res.inner_radius)} outer {_num(res.outer_radius)} "
                     f"modulus {_num(res.modulus)} poles {len(res.poles_inside)}")
    if sub == "mass-condition":
        return _cmd_mass_condition(o)
    raise InputError(f"unknown limit subcommand {sub!r}")


def _cmd_mass_condition(o):
    D = Disk(_complex(o.get("center") or "0"), o["radius"])
    lambdas = [_complex(t) for t in (o.get("lambdas") or "").split(",") if t.strip()]
    res = mass_condition_check(D, lambdas, o.get("k_window"))
    out = {"holds": res.holds, "witness": list(res.witness) if res.witness else None, "margin": res.margin}
    line = "true" if res.holds else f"false witness s={res.witness[0]} k={res.witness[1]}"
    return out, line


def _cmd_portrait(o):
    p = validate_portrait(o["preperiod"], o["period"])
    dim = teich_dimension(p)
    out = {"postsingular_size": p.postsingular_size, "dimension": dim}
    return out, f"|P_f|={p.postsingular_size} dim={dim}\n{orbit_diagram(p)}"


HANDLERS = {
    "mass": _cmd_mass,
    "push": _cmd_push,
    "eff": _cmd_eff,
    "sweep": _cmd_sweep,
    "annulus": _cmd_annulus,
    "limit": _cmd_limit,
    "portrait": _cmd_portrait,
    "mass-condition": _cmd_mass_condition,
}


# ---------------------------------------------------------------------------
# argument parsing


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("numerics")
    g.add_argument("--tol", type=float, help="relative quadrature tolerance (default 1e-4)")
    g.add_argument("--max-depth", type=int, help="maximum subdivision depth (default 24)")
    g.add_argument("--trunc-k", type=int, help="preimage index cap K (default 64)")
    g.add_argument("--strip-y", type=float, help="fixed strip height Y (default: from the tail bound)")
    g.add_argument("--tail-tol", type=float, help="tail tolerance (default 1e-6)")
    o = p.add_argument_group("output")
    m = o.add_mutually_exclusive_group()
    m.add_argument("--json", dest="mode", action="store_const", const="json", help="machine-readable output")
    m.add_argument("--pretty", dest="mode", action="store_const", const="pretty", help="one 'key: value' per line")
    o.add_argument("--out", help="write output to this file instead of stdout")
    o.add_argument("--seed", type=int, default=0, help="seed for randomized runs (default 0)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="qdlab",
        description="Masses and cosine push-forwards of rational quadratic differentials.",
        epilog="Differentials are JSON objects {leading, zeros, poles} given inline or as a file path. "
        "Exit codes: 2 invalid input, 3 non-convergence, 4 inconclusive certification. QDLAB_THREADS sets "
        "the worker count without changing results.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mass", parents=[common], help="mass of a differential on a region")
    p.add_argument("--qd", required=True)
    p.add_argument("--region", help='region JSON, e.g. {"type":"annulus","center":[0,0],"r":1,"R":3}; default plane')
    p.add_argument("--method", choices=["region", "partition"], default="region")
    p.add_argument("--svg", help="write a divisor/heatmap SVG here")

    p = sub.add_parser("push", parents=[common], help="push-forward density at a point")
    p.add_argument("--qd", required=True)
    p.add_argument("--w", required=True)
    p.add_argument("--lam", help="lambda of z -> lambda cos z (default 1)")
    p.add_argument("--truncated", action="store_true", help="also report the K-truncated sum")

    p = sub.add_parser("eff", parents=[common], help="cos-efficiency ratio")
    p.add_argument("--qd", required=True)
    p.add_argument("--method", choices=["strip", "wplane"], default="strip")
    p.add_argument("--svg")

    p = sub.add_parser(
        "sweep", parents=[common], help="efficiency sweep over a family",
        description="CSV columns: index,mass,pushforward_mass,ratio,concentration_fraction,error_estimate. "
        "Failing members print nan and a diagnostic on stderr.",
    )
    p.add_argument("--family", choices=["ex42", "ex41"], default="ex42")
    p.add_argument("--n", default="1..8", help="index range lo..hi or comma list")
    p.add_argument("--schedule", choices=["geometric", "control"], default="geometric")

    p = sub.add_parser("annulus", parents=[common], help="modulus, dz^2/z^2 mass and restricted push-forward")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--center")
    p.add_argument("--qd")

    p = sub.add_parser("limit", help="limit-model tools")
    ls = p.add_subparsers(dest="limit_command", required=True)
    q = ls.add_parser("detect", parents=[common])
    q.add_argument("--qd", required=True)
    q = ls.add_parser("distance", parents=[common])
    q.add_argument("--qd", required=True)
    q.add_argument("--model", required=True)
    q.add_argument("--a")
    q.add_argument("--b")
    q = ls.add_parser("sn", parents=[common])
    q.add_argument("--a", required=True)
    q.add_argument("--b", required=True)
    q.add_argument("--z")
    q.add_argument("--R", type=float)
    q = ls.add_parser("concentrate", parents=[common])
    q.add_argument("--qd", required=True)
    q.add_argument("--M", type=float, help="required modulus (search mode)")
    q.add_argument("--delta", type=float, help="inner-radius mode: mass deficit allowed")
    q.add_argument("--center")
    q.add_argument("--r", type=float)
    q.add_argument("--R", type=float)
    q = ls.add_parser("mass-condition", parents=[common])
    _mass_condition_args(q)

    p = sub.add_parser("portrait", parents=[common], help="postsingular size, dimension and orbit diagram")
    p.add_argument("--preperiod", type=int, required=True)
    p.add_argument("--period", type=int, required=True)

    p = sub.add_parser("mass-condition", parents=[common], help="certify the mass condition for a disk")
    _mass_condition_args(p)
    return parser


def _mass_condition_args(p):
    p.add_argument("--center", default="0")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--lambdas", default="", help="comma-separated complex scalars")
    p.add_argument("--k-window", type=int)


def parse_manifest(argv) -> RunManifest:
    ns = build_parser().parse_args(argv)
    opts = {k: v for k, v in vars(ns).items() if k not in ("command", "out", "seed")}
    return RunManifest(ns.command, opts, ns.out if hasattr(ns, "out") else None, getattr(ns, "seed", 0) or 0)


def run(manifest: RunManifest) -> int:
    o = manifest.options
    mode = o.get("mode") or "line"
    try:
        if manifest.command not in HANDLERS:
            raise InputError(f"unknown command {manifest.command!r}")
        result, line = HANDLERS[manifest.command](o)
    except Inconclusive as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return 4
    except (NoConvergence, TailTooLarge) as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return 3
    except (QDLabError, ValueError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    text = _render(result, mode, line)
    if manifest.out:
        with open(manifest.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def main(argv=None) -> int:
    try:
        manifest = parse_manifest(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else 2
    return run(manifest)


if __name__ == "__main__":
    sys.exit(main())
