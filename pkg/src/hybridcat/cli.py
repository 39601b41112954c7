"""Command-line front end.

Every subcommand reads an optional flat JSON config (``--config``); flags
given on the command line override file values and unknown keys are
rejected before any computation starts.  Artifacts are written atomically.

Exit codes
----------
0 success, 1 verification failed, 2 invalid configuration, 3 I/O error,
4 computation error.  Failures also print one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import os
import sys
import tempfile
from typing import Any, Callable, Optional

from . import __version__
from .analytics import Parity, Scheme, cv_rates
from .loss_model import fusion_error_rates
from .montecarlo import (bisect_threshold, estimate_threshold, extrapolate_p_L,
                         fit_crossing, scan_alpha)
from .resources import OverheadError, generation_costs, overhead_estimate
from .steane import threshold_curve

__all__ = ["main", "ConfigError", "EXIT_OK", "EXIT_CHECK", "EXIT_CONFIG", "EXIT_IO",
           "EXIT_COMPUTE", "write_atomic", "csv_text"]

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_IO, EXIT_COMPUTE = 0, 1, 2, 3, 4


class ConfigError(ValueError):
    """Invalid configuration (schema, types or ranges)."""


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


# ---------------------------------------------------------------- schema

def _floats(v):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return [float(v)]
    if isinstance(v, str):
        return [float(x) for x in v.split(",") if x.strip()]
    if isinstance(v, list):
        return [_num(x) for x in v]
    raise TypeError


def _ints(v):
    out = [int(x) for x in _floats(v)]
    if any(float(x) != y for x, y in zip(out, _floats(v))):
        raise TypeError
    return out


def _num(v):
    if isinstance(v, bool):
        raise TypeError
    return float(v)


def _int(v):
    if isinstance(v, bool) or float(v) != int(float(v)):
        raise TypeError
    return int(float(v))


def _str(v):
    if not isinstance(v, str):
        raise TypeError
    return v


def _opt(conv):
    return lambda v: None if v is None else conv(v)


def _table(v):
    if not isinstance(v, dict):
        raise TypeError
    return {int(k): float(x) for k, x in v.items()}


COMMON = {"out": (_opt(_str), None), "threads": (_opt(_int), None), "seed": (_int, 0)}

SCHEMA: dict[str, dict[str, tuple[Callable, Any]]] = {
    "rates": {"scheme": (_str, "both"), "alpha": (_floats, [2.93]), "eta": (_opt(_floats), None),
              "parity": (_str, "all")},
    "oracle-verify": {"scheme": (_str, "both"), "alpha": (_floats, [0.5, 1.0, 1.5, 2.0]),
                      "cutoff": (_opt(_int), None), "tol": (_num, 1e-6)},
    "rhg-threshold": {"scheme": (_str, "ha"), "alpha": (_num, 2.93),
                      "eta_grid": (_opt(_floats), None), "eta_lo": (_num, 2e-3),
                      "eta_hi": (_num, 1.2e-2), "steps": (_int, 6), "d_list": (_ints, [3, 5]),
                      "n_trials": (_int, 300_000), "n_sigma": (_num, 2.0),
                      "json": (_opt(_str), None)},
    "steane-threshold": {"scheme": (_str, "ha"), "alpha": (_floats, [2.9]),
                         "eta_grid": (_floats, [5e-4, 1e-3, 2e-3, 3e-3, 4e-3]),
                         "levels": (_int, 3), "n_trials": (_int, 200_000),
                         "json": (_opt(_str), None)},
    "resources": {"beta": (_num, 1.0), "target_p_L": (_num, 1e-6),
                  "convention": (_str, "bulk"), "p_L_table": (_opt(_table), None),
                  "scheme": (_str, "ha"), "alpha": (_num, 2.93), "eta": (_num, 1e-4),
                  "d_list": (_ints, [3, 4, 5]), "eta_fit": (_floats, [5e-4, 1e-3, 2e-3]),
                  "n_trials": (_int, 10_000_000), "n_fit_trials": (_int, 300_000)},
    "sweep": {"scheme": (_str, "ha"), "alpha": (_floats, [2.0, 2.5, 2.93, 3.5]),
              "eta_lo": (_num, 2e-3), "eta_hi": (_num, 1.2e-2), "steps": (_int, 6),
              "d_list": (_ints, [3, 5]), "n_trials": (_int, 100_000), "n_sigma": (_num, 2.0),
              "json": (_opt(_str), None)},
}


def _flag(key: str) -> str:
    return "--" + key.replace("_", "-").lower()


def _build_parser() -> argparse.ArgumentParser:
    p = _ArgParser(prog="hybridcat", description="Hybrid cat-code fusion and MBQC threshold tools.")
    p.add_argument("--version", action="version", version=f"hybridcat {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgParser)
    for name, keys in SCHEMA.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None, help="flat JSON config file")
        for key in {**COMMON, **keys}:
            aliases = [_flag(key)]
            if key == "n_trials":
                aliases.append("--trials")
            if key == "alpha":
                aliases.append("--alpha-grid")
            sp.add_argument(*aliases, dest=key, default=None, metavar=key.upper())
    return p


def _json_arg(v: str):
    try:
        return json.loads(v)
    except json.JSONDecodeError:
        return v


def resolve_config(command: str, file_cfg: dict, flags: dict) -> dict:
    """Merge defaults, file values and flags; validate every key."""
    schema = {**COMMON, **SCHEMA[command]}
    unknown = sorted(set(file_cfg) - set(schema))
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {', '.join(unknown)}")
    merged = {k: d for k, (_, d) in schema.items()}
    merged.update(file_cfg)
    merged.update({k: v for k, v in flags.items() if v is not None})
    out = {}
    for k, (conv, _) in schema.items():
        v = merged[k]
        if k == "p_L_table" and isinstance(v, str):
            v = _json_arg(v)
        try:
            out[k] = conv(v)
        except (TypeError, ValueError):
            raise ConfigError(f"invalid value for {k!r}: {v!r}") from None
    _check_ranges(command, out)
    return out


def _schemes(v: str) -> list[str]:
    if v.lower() == "both":
        return ["HA", "SDR"]
    try:
        return [Scheme.parse(v).value]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _check_ranges(command: str, c: dict) -> None:
    if "scheme" in c:
        _schemes(c["scheme"])
    alphas = c.get("alpha")
    for a in (alphas if isinstance(alphas, list) else [alphas] if alphas is not None else []):
        if not (a > 0 and math.isfinite(a)):
            raise ConfigError("alpha must be positive")
    for key in ("eta", "eta_grid", "eta_fit"):
        v = c.get(key)
        if isinstance(v, (int, float)):
            v = [v]
        if v and any(not 0.0 <= e < 1.0 for e in v):
            raise ConfigError(f"{key} values must lie in [0, 1)")
    for key in ("n_trials", "n_fit_trials", "steps", "levels"):
        if key in c and c[key] < 1:
            raise ConfigError(f"{key} must be >= 1")
    if "d_list" in c and (len(c["d_list"]) < 1 or min(c["d_list"]) < 2):
        raise ConfigError("d_list entries must be >= 2")
    if c.get("threads") is not None and c["threads"] < 1:
        raise ConfigError("threads must be >= 1")
    if "parity" in c and c["parity"].lower() != "all":
        try:
            Parity.parse(c["parity"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if command in ("rhg-threshold", "sweep") and not c["eta_lo"] < c["eta_hi"]:
        raise ConfigError("eta_lo must be below eta_hi")
    if command == "resources":
        if c["beta"] <= 0:
            raise ConfigError("beta must be positive")
        if c["convention"] not in ("bulk", "lattice"):
            raise ConfigError("convention must be 'bulk' or 'lattice'")


# ---------------------------------------------------------------- output

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_text(header: list[str], rows, meta: Optional[str] = None) -> str:
    """CSV with LF line endings; ``meta`` becomes a leading ``#`` line."""
    buf = io.StringIO()
    if meta is not None:
        buf.write(f"# {meta}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=d)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _meta(command: str) -> str:
    ts = _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return f"hybridcat {__version__} {command} generated {ts}"


def _emit(cfg: dict, command: str, header, rows, log) -> None:
    text = csv_text(header, rows, _meta(command))
    if cfg["out"]:
        write_atomic(cfg["out"], text)
        log(f"wrote {cfg['out']}")
    else:
        sys.stdout.write(text)


def _emit_json(path: Optional[str], obj: dict, log) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path:
        write_atomic(path, text)
        log(f"wrote {path}")
    else:
        log(text.rstrip("\n"))


# ---------------------------------------------------------------- commands

def _cmd_rates(c, log) -> int:
    schemes = _schemes(c["scheme"])
    if c["eta"] is None:
        pars = list(Parity) if c["parity"].lower() == "all" else [Parity.parse(c["parity"])]
        rows = []
        for s in schemes:
            for a in c["alpha"]:
                for par in pars:
                    r = cv_rates(s, a, par)
                    rows.append((s, a, par.value, r.p_x, r.p_loc, r.p_z_oo))
        _emit(c, "rates", ["scheme", "alpha", "parity", "p_x", "p_loc", "p_z_oo"], rows, log)
    else:
        rows = []
        for s in schemes:
            for a in c["alpha"]:
                for e in c["eta"]:
                    r = fusion_error_rates(s, a, e)
                    rows.append((s, a, e, r.p_x_total, r.p_z_unloc, r.p_z_loc))
        _emit(c, "rates", ["scheme", "alpha", "eta", "P_X", "P_Z_unloc", "P_Z_loc"], rows, log)
    return EXIT_OK


def _dev(a, b) -> float:
    if a is None or b is None:
        return 0.0 if a is b else math.inf
    return abs(a - b)


def _cmd_oracle(c, log) -> int:
    from .fock_oracle import estimate_fusion_stats
    rows, ok = [], True
    for s in _schemes(c["scheme"]):
        for a in c["alpha"]:
            for par in Parity:
                ref = cv_rates(s, a, par)
                got = estimate_fusion_stats(s, a, par, cutoff=c["cutoff"])
                devs = [_dev(got.p_x, ref.p_x), _dev(got.p_loc, ref.p_loc),
                        _dev(got.p_z_oo, ref.p_z_oo)]
                good = max(devs) < c["tol"]
                ok &= good
                rows.append((s, a, par.value, *devs, got.leakage, good))
                log(f"{s:>3} alpha={a:<5g} {par.value}  max dev {max(devs):.2e}  "
                    f"{'PASS' if good else 'FAIL'}")
    _emit(c, "oracle-verify", ["scheme", "alpha", "parity", "dev_p_x", "dev_p_loc", "dev_p_z_oo",
                               "leakage", "pass"], rows, log)
    return EXIT_OK if ok else EXIT_CHECK


def _point_logger(scheme, alpha, log):
    def f(pt):
        parts = "  ".join(f"d={d} p_L={e.p_L:.3e}" for d, e in sorted(pt.estimates.items()))
        log(f"{scheme} alpha={alpha:g} eta={pt.eta:.5f}  {parts}  "
            f"{'ordered' if pt.ordered() else 'not ordered'}")
    return f


_MC_HEADER = ["scheme", "alpha", "eta", "d", "n_trials", "n_failures", "p_L", "stderr"]


def _summary(est) -> dict:
    out = {"scheme": est.scheme, "alpha": est.alpha, "eta_th": est.eta_th}
    try:
        x, s = fit_crossing(est)
        out.update(eta_cross=x, eta_cross_sigma=s)
    except ValueError:
        out.update(eta_cross=None, eta_cross_sigma=None)
    return out


def _cmd_rhg(c, log) -> int:
    scheme = _schemes(c["scheme"])[0]
    if c["eta_grid"]:
        est = estimate_threshold(scheme, c["alpha"], sorted(c["eta_grid"]), c["d_list"],
                                 c["n_trials"], c["seed"], c["threads"], c["n_sigma"],
                                 progress=_point_logger(scheme, c["alpha"], log))
    else:
        est = bisect_threshold(scheme, c["alpha"], c["eta_lo"], c["eta_hi"], c["steps"],
                               c["d_list"], c["n_trials"], c["seed"], c["threads"], c["n_sigma"])
        for pt in est.points:
            _point_logger(scheme, c["alpha"], log)(pt)
    _emit(c, "rhg-threshold", _MC_HEADER, est.rows(), log)
    _emit_json(c["json"], {**_summary(est), "seed": c["seed"], "n_trials": c["n_trials"],
                           "d_list": c["d_list"]}, log)
    return EXIT_OK


def _cmd_sweep(c, log) -> int:
    scheme = _schemes(c["scheme"])[0]

    def prog(est):
        log(f"{scheme} alpha={est.alpha:g} eta_th={est.eta_th}")
    a_star, e_star, table = scan_alpha(scheme, c["alpha"], c["eta_lo"], c["eta_hi"], c["steps"],
                                       c["d_list"], c["n_trials"], c["seed"], c["threads"],
                                       c["n_sigma"], progress=prog)
    rows = [r for est in table for r in est.rows()]
    _emit(c, "sweep", _MC_HEADER, rows, log)
    _emit_json(c["json"], {"scheme": scheme, "alpha_star": a_star, "eta_th_star": e_star,
                           "table": [_summary(e) for e in table]}, log)
    return EXIT_OK


def _cmd_steane(c, log) -> int:
    scheme = _schemes(c["scheme"])[0]
    boundary, points = threshold_curve(scheme, c["alpha"], c["eta_grid"], c["levels"],
                                       c["n_trials"], c["seed"])
    rows = []
    for p in points:
        log(f"{scheme} alpha={p.alpha:g} eta={p.eta:g} "
            f"{'accepted' if p.accepted else 'rejected'}")
        for lvl, r in enumerate(p.trajectory):
            rows.append((p.alpha, p.eta, lvl, r.x_unloc, r.z_unloc, r.loc, p.accepted))
    _emit(c, "steane-threshold", ["alpha", "eta", "level", "x_unloc", "z_unloc", "loc",
                                  "accepted"], rows, log)
    _emit_json(c["json"], {"scheme": scheme,
                           "boundary": {repr(a): e for a, e in boundary.items()}}, log)
    return EXIT_OK


def _cmd_resources(c, log) -> int:
    costs = generation_costs(c["beta"])
    table, source = c["p_L_table"], "config"
    if table is None:
        ex = extrapolate_p_L(_schemes(c["scheme"])[0], c["alpha"], c["eta"], c["d_list"],
                             c["eta_fit"], c["n_trials"], c["seed"], c["threads"],
                             n_fit_trials=c["n_fit_trials"])
        table, source = ex.table, "monte-carlo"
        for d, p in sorted(table.items()):
            log(f"d={d} p_L={p:.3e}")
    rep = overhead_estimate(c["target_p_L"], table, c["beta"], c["convention"])
    report = {"costs": costs.as_dict(), "overhead": rep.as_dict(),
              "p_L_table": {str(d): p for d, p in sorted(table.items())},
              "p_L_source": source}
    if source == "monte-carlo":
        report["operating_point"] = {"scheme": _schemes(c["scheme"])[0], "alpha": c["alpha"],
                                     "eta": c["eta"]}
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if c["out"]:
        write_atomic(c["out"], text)
        log(f"wrote {c['out']}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {"rates": _cmd_rates, "oracle-verify": _cmd_oracle, "rhg-threshold": _cmd_rhg,
            "steane-threshold": _cmd_steane, "resources": _cmd_resources, "sweep": _cmd_sweep}


# ---------------------------------------------------------------- entry

def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


def main(argv: Optional[list[str]] = None) -> int:
    try:
        ns = _build_parser().parse_args(argv)
        flags = {k: v for k, v in vars(ns).items() if k not in ("command", "config")}
        file_cfg = {}
        if ns.config:
            with open(ns.config, encoding="utf-8") as f:
                file_cfg = json.load(f)
            if not isinstance(file_cfg, dict):
                raise ConfigError("config file must hold a JSON object")
        cfg = resolve_config(ns.command, file_cfg, flags)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "config", str(exc))
    except json.JSONDecodeError as exc:
        return _fail(EXIT_CONFIG, "config", f"config is not valid JSON: {exc}")
    except OSError as exc:
        return _fail(EXIT_IO, "io", str(exc))
    log = (lambda m: print(m, flush=True)) if cfg.get("out") else \
        (lambda m: print(m, file=sys.stderr, flush=True))
    try:
        return COMMANDS[ns.command](cfg, log)
    except OSError as exc:
        return _fail(EXIT_IO, "io", str(exc))
    except OverheadError as exc:
        return _fail(EXIT_COMPUTE, "computation", str(exc))
    except Exception as exc:  # noqa: BLE001 - reported as machine-readable error
        return _fail(EXIT_COMPUTE, "computation", f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
