"""``hardyop`` command-line front end.

Exit codes: 0 on success, 2 when the numerics could not decide (undecided or
non-convergent), 1 on errors and when ``essnorm`` meets an unbounded operator.
``HARDYOP_THREADS`` sets the number of worker processes used by ``sweep``.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import estimators as est
from . import funcspace as fs
from . import measures as ms
from . import truncation as tr
from .errors import (AliasingTooLarge, EmptyLevel, HardyError, NoConvergence, NonConvergent, NotBounded,
                     Undecided)
from .scenario import Scenario, load_scenario, serialize

EXIT_OK, EXIT_ERROR, EXIT_UNDECIDED = 0, 1, 2
SUBCOMMANDS = ("analyze", "boundedness", "essnorm", "carleson", "truncate", "sweep", "selftest")
_UNDECIDED_ERRORS = (Undecided, NonConvergent, NoConvergence, AliasingTooLarge, EmptyLevel)


def jsonable(x):
    """Convert numpy scalars, complex numbers, tuples and non-finite floats for JSON."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": jsonable(x.real), "im": jsonable(x.imag)}
    return x


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def _envelope(command: str, s: Scenario | None, result: dict) -> dict:
    out = {"tool": "hardyop", "version": __version__, "command": command, "result": result}
    if s is not None:
        out["scenario"] = {"name": s.name, "text": serialize(s)}
        out["config"] = dataclasses.asdict(s.config)
    return out


# --------------------------------------------------------------------------- commands
# Each returns (exit code, result dict, traces) where traces maps a series name
# to a list of (x, value) pairs for the CSV output.


def _ring_traces(rings: dict | None) -> dict:
    if not rings:
        return {}
    r = rings["radii"]
    return {"ring_max": list(zip(r, rings["maxima"])), "ring_min": list(zip(r, rings["minima"]))}


def _report_traces(rep: dict) -> dict:
    traces = _ring_traces(rep.get("boundedness", {}).get("rings"))
    diag = (rep.get("bracket") or {}).get("diagnostics", {})
    eps = diag.get("eps", [])
    for key in ("extremal", "extremal_q", "extremal_pq"):
        if key in diag:
            traces[key] = list(zip(eps, diag[key]["sequence"]))
    if "m_phi_sequence" in diag:
        traces["m_phi"] = list(zip(eps, diag["m_phi_sequence"]))
    t = rep.get("truncation")
    if t:
        traces["trunc_upper"] = list(zip(t["schedule"], t["upper_values"]))
        traces["trunc_lower"] = list(zip(t["schedule"], t["lower_values"]))
    return traces


def cmd_analyze(s: Scenario, truncation: bool = True):
    rep = est.analyze(s.u, s.phi, s.p, s.q, s.config, truncation=truncation).to_dict()
    code = EXIT_UNDECIDED if rep["status"] in ("undecided", "nonconvergent") else EXIT_OK
    return code, rep, _report_traces(rep)


def cmd_essnorm(s: Scenario):
    code, rep, traces = cmd_analyze(s, truncation=False)
    if rep["status"] == "unbounded":
        code = EXIT_ERROR
    return code, rep, traces


def cmd_boundedness(s: Scenario):
    cfg = s.config
    regime = est.regime_of(s.p, s.q)
    res = {"regime": regime}
    traces = {}
    try:
        if regime in ("p<=q finite", "p=1<=q"):
            trace = est.ring_sweep(s.u, s.phi, s.p, s.q, cfg.ring_schedule(), method=cfg.kernel_method,
                                   M=cfg.kernel_grid, tol=cfg.quad_tol)
            traces = _ring_traces(trace.to_dict())
            b = est.boundedness_pq(s.u, s.phi, s.p, s.q, trace=trace)
            res.update(bounded=b.bounded, sup_estimate=b.sup_estimate, rings=trace.to_dict())
        elif regime == "H^p->H^inf":
            b = est.boundedness_p_inf(s.u, s.phi, s.p, angles=cfg.disk_angles)
            res.update(bounded=b.bounded, sup_estimate=b.sup_estimate, diagnostics=b.diagnostics)
        elif regime == "H^inf->H^q":
            n = fs.hardy_norm(s.u, s.q, cfg.grid)
            res.update(bounded=math.isfinite(n), sup_estimate=n)
        else:
            cl = _carleson(s)
            res.update(bounded=cl.is_carleson, certificate=cl.certificate)
    except Undecided as err:
        trace = getattr(err, "trace", None)
        if trace is not None:
            res["rings"] = trace.to_dict()
            traces = _ring_traces(res["rings"])
        res.update(status="undecided", message=str(err))
        return EXIT_UNDECIDED, res, traces
    res["status"] = "ok"
    return EXIT_OK, res, traces


def _carleson(s: Scenario):
    q = s.q.finite
    mu = ms.pullback(s.u, s.phi, q, s.config.grid)
    refined = ms.pullback(s.u, s.phi, q, 2 * s.config.grid)
    return ms.classify_carleson(mu, s.p.finite, q, depth=s.config.depth, alpha=s.config.alpha, refined=refined)


def cmd_carleson(s: Scenario):
    if s.p.infinite or s.q.infinite:
        raise HardyError("carleson needs finite p and q")
    cl = _carleson(s)
    res = {"is_carleson": cl.is_carleson, "regime": cl.regime, "certificate": cl.certificate, "status": "ok"}
    return EXIT_OK, res, {}


def cmd_truncate(s: Scenario):
    cfg = s.config
    b = tr.truncation_bracket(s.u, s.phi, cfg.truncation_degree, cfg.n_schedule, cfg.grid, cfg.remainder)
    res = {"status": "ok", **b.to_dict()}
    traces = {"trunc_upper": list(zip(b.schedule, b.upper_values)),
              "trunc_lower": list(zip(b.schedule, b.lower_values))}
    return EXIT_OK, res, traces


COMMANDS = {"analyze": cmd_analyze, "boundedness": cmd_boundedness, "essnorm": cmd_essnorm,
            "carleson": cmd_carleson, "truncate": cmd_truncate}


def run(command: str, s: Scenario):
    """Run one scenario command; numerical indecision maps to exit code 2."""
    try:
        return COMMANDS[command](s)
    except _UNDECIDED_ERRORS as err:
        return EXIT_UNDECIDED, {"status": "undecided" if isinstance(err, Undecided) else "nonconvergent",
                                "message": str(err)}, {}
    except NotBounded as err:
        return EXIT_ERROR, {"status": "unbounded", "message": str(err)}, {}


def _sweep_one(args):
    path, overrides = args
    s = _apply_overrides(load_scenario(path), overrides)
    code, res, _ = run("analyze", s)
    return code, _envelope("analyze", s, res)


# --------------------------------------------------------------------------- I/O


def traces_csv(traces: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["series", "x", "value"])
    for name in sorted(traces):
        for x, v in traces[name]:
            w.writerow([name, repr(float(x)), repr(float(v))])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _apply_overrides(s: Scenario, overrides: dict) -> Scenario:
    return s.with_overrides(**overrides) if overrides else s


def _threads() -> int:
    raw = os.environ.get("HARDYOP_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hardyop", description="Weighted composition operators on Hardy spaces.")
    ap.add_argument("--version", action="version", version=f"hardyop {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        if name == "sweep":
            sp.add_argument("--scenario", action="append", required=True,
                            help="scenario file or directory of *.scn files; repeatable")
        elif name != "selftest":
            sp.add_argument("--scenario", required=True, help="scenario file")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        if name != "selftest":
            sp.add_argument("--grid", type=int, help="boundary grid size M")
            sp.add_argument("--depth", type=int, help="dyadic arc depth")
            sp.add_argument("--alpha", type=float, help="Stolz aperture")
    return ap


def _overrides(ns) -> dict:
    return {k: getattr(ns, k) for k in ("grid", "depth", "alpha") if getattr(ns, k, None) is not None}


def _sweep_paths(items) -> list:
    paths = []
    for item in items:
        p = Path(item)
        paths.extend(sorted(p.glob("*.scn")) if p.is_dir() else [p])
    return [str(p) for p in paths]


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        if ns.command == "selftest":
            from .acceptance import run_all
            results = run_all(lambda line: print(line, file=sys.stderr))
            payload = {"tool": "hardyop", "version": __version__, "command": "selftest",
                       "result": [{"criterion": r.number, "title": r.title, "passed": r.passed,
                                   "values": {k: v for k, v in r.values.items() if k != "seconds"}}
                                  for r in results]}
            if ns.format == "json":
                _emit(dumps(payload), ns.out)
            return EXIT_OK if all(r.passed for r in results) else EXIT_ERROR
        overrides = _overrides(ns)
        if ns.command == "sweep":
            jobs = [(p, overrides) for p in _sweep_paths(ns.scenario)]
            with ProcessPoolExecutor(max_workers=min(_threads(), max(1, len(jobs)))) as pool:
                done = list(pool.map(_sweep_one, jobs))
            reports = sorted((env for _, env in done), key=lambda e: e["scenario"]["name"])
            codes = [c for c, _ in done]
            code = EXIT_ERROR if EXIT_ERROR in codes else EXIT_UNDECIDED if EXIT_UNDECIDED in codes else EXIT_OK
            if ns.format == "csv":
                traces = {f"{e['scenario']['name']}/{k}": v for e in reports
                          for k, v in _report_traces(jsonable(e["result"])).items()}
                _emit(traces_csv(traces), ns.out)
            else:
                _emit(dumps({"tool": "hardyop", "version": __version__, "command": "sweep",
                             "reports": reports}), ns.out)
            return code
        s = _apply_overrides(load_scenario(ns.scenario), overrides)
        code, res, traces = run(ns.command, s)
        if ns.format == "csv":
            _emit(traces_csv(traces), ns.out)
        else:
            _emit(dumps(_envelope(ns.command, s, res)), ns.out)
        return code
    except (HardyError, OSError) as err:
        print(f"hardyop: error: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
