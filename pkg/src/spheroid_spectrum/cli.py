"""Command-line front end.

Exit codes: 0 success, 1 usage or validation error, 2 empty result (no
stationary radii), 3 a verification check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import dominant_rate, integrate_linear_modes, integrate_radial, spectral_gap
from .errors import DomainError, NumericalFailure
from .spectrum import classify, compute_spectrum
from .stationary import Branch, ModelParams, solve_stationary, theta_star
from .verify import DEFAULT_TOLERANCES, run_suite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_EMPTY = 2
EXIT_VERIFY = 3

MODEL_FIELDS = ("sigma_bar", "sigma_tilde", "mu", "gamma", "p_bar")
REQUIRED_MODEL_FIELDS = ("sigma_bar", "sigma_tilde", "mu", "gamma")
SECTIONS = ("stationary", "threshold", "spectrum", "verify", "simulate")
TOP_LEVEL_KEYS = {"model", "results", *SECTIONS}


class ConfigError(ValueError):
    pass


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    params: ModelParams
    options: dict = field(default_factory=dict)
    output: str | None = None
    fmt: str = "csv"


def fmt_float(x: float) -> str:
    """17 significant digits, fixed scientific layout."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.16e}"


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_json_safe(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps_json(document: dict) -> str:
    return json.dumps(_json_safe(document), indent=2, sort_keys=True, allow_nan=False) + "\n"


def read_config(document: dict) -> tuple[ModelParams, dict]:
    """Validate a config document; returns the model and the per-command sections."""
    if not isinstance(document, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(document) - TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    model = document.get("model")
    if not isinstance(model, dict):
        raise ConfigError("missing 'model' section")
    extra = set(model) - set(MODEL_FIELDS)
    if extra:
        raise ConfigError(f"unknown model fields: {sorted(extra)}")
    missing = [name for name in REQUIRED_MODEL_FIELDS if model.get(name) is None]
    if missing:
        raise ConfigError(f"missing model fields: {missing}")
    values = {}
    for name in MODEL_FIELDS:
        if name not in model or model[name] is None:
            continue
        value = model[name]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"model.{name} must be a number")
        values[name] = float(value)
    try:
        params = ModelParams(**values)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    sections = {}
    for name in SECTIONS:
        section = document.get(name, {})
        if not isinstance(section, dict):
            raise ConfigError(f"section '{name}' must be an object")
        sections[name] = section
    return params, sections


def load_config(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


def _config_document(args) -> dict:
    document = load_config(args.config) if args.config else {}
    if not isinstance(document, dict):
        raise ConfigError("config must be a JSON object")
    document = dict(document)
    model = dict(document.get("model") or {})
    for name in MODEL_FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            model[name] = value
    document["model"] = model
    return document


def _build_config(args, command: str) -> RunConfig:
    params, sections = read_config(_config_document(args))
    options = dict(sections.get(command, {}))
    for key in ("branch", "k_max", "grid", "t_end", "r0", "modes", "mode", "n_samples", "summary"):
        value = getattr(args, key, None)
        if value is not None:
            options[key] = value
    fmt = args.format or options.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown format {fmt!r}")
    return RunConfig(params=params, options=options, output=args.output, fmt=fmt)


def _positive_int(options: dict, key: str, default: int, minimum: int = 1) -> int:
    value = options.get(key, default)
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise ConfigError(f"{key} must be an integer >= {minimum}")
    return int(value)


def _positive_float(options: dict, key: str, default: float | None = None) -> float:
    value = options.get(key, default)
    if value is None:
        raise ConfigError(f"{key} is required")
    value = float(value)
    if not value > 0 or not math.isfinite(value):
        raise ConfigError(f"{key} must be a positive number")
    return value


def _emit(text: str, output: str | None) -> None:
    if output:
        try:
            Path(output).write_text(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {output}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _select_state(params: ModelParams, branch: str | None):
    states = solve_stationary(params)
    if not states:
        return None
    branch = (branch or "larger").lower()
    if branch not in ("smaller", "larger"):
        raise ConfigError(f"branch must be 'smaller' or 'larger', got {branch!r}")
    if len(states) == 1:
        return states[0]
    return states[0] if branch == "smaller" else states[1]


def cmd_stationary(config: RunConfig) -> int:
    p = config.params
    states = solve_stationary(p)
    th_star, r_max = theta_star(p.gamma)
    if not states:
        print(f"no equilibria: theta={p.theta!r} exceeds theta_*={th_star!r}", file=sys.stderr)
        if config.fmt == "json":
            _emit(dumps_json({"model": p.to_dict(), "results": {
                "theta": p.theta, "theta_star": th_star, "argmax_R": r_max, "states": [],
                "message": "no equilibria"}}), config.output)
        return EXIT_EMPTY
    if config.fmt == "csv":
        rows = [[s.branch.value, s.radius, s.f_value, s.f_prime] for s in states]
        _emit(_csv_text(["branch", "R_s", "f_value", "f_prime"], rows), config.output)
        print(f"theta={p.theta!r} theta_star={th_star!r}", file=sys.stderr)
    else:
        results = {
            "theta": p.theta,
            "theta_star": th_star,
            "argmax_R": r_max,
            "states": [
                {"branch": s.branch.value, "R_s": s.radius, "f_value": s.f_value, "f_prime": s.f_prime,
                 "f_prime_sign": int(np.sign(s.f_prime))}
                for s in states
            ],
        }
        _emit(dumps_json({"model": p.to_dict(), "results": results}), config.output)
    return EXIT_OK


def cmd_threshold(config: RunConfig) -> int:
    p = config.params
    th_star, r_max = theta_star(p.gamma)
    k_max = _positive_int(config.options, "k_max", 64, 2)
    states = solve_stationary(p)
    rows = []
    for s in states:
        sp = compute_spectrum(s, k_max)
        rows.append({"branch": s.branch.value, "R_s": s.radius, "gamma_star": sp.gamma_star,
                     "attained_at": sp.attained_at, "classification": sp.classification.value})
    if config.fmt == "csv":
        header = ["gamma", "theta", "theta_star", "argmax_R", "branch", "R_s", "gamma_star", "attained_at"]
        out = [[p.gamma, p.theta, th_star, r_max, r["branch"], r["R_s"], r["gamma_star"], r["attained_at"]] for r in rows]
        if not out:
            out = [[p.gamma, p.theta, th_star, r_max, "none", math.nan, math.nan, ""]]
        _emit(_csv_text(header, out), config.output)
    else:
        _emit(dumps_json({"model": p.to_dict(), "threshold": {"k_max": k_max}, "results": {
            "gamma": p.gamma, "theta": p.theta, "theta_star": th_star, "argmax_R": r_max, "branches": rows}}),
            config.output)
    if not states:
        print("no equilibria", file=sys.stderr)
        return EXIT_EMPTY
    return EXIT_OK


def cmd_spectrum(config: RunConfig) -> int:
    p = config.params
    k_max = _positive_int(config.options, "k_max", 50, 2)
    state = _select_state(p, config.options.get("branch"))
    if state is None:
        print("no equilibria", file=sys.stderr)
        return EXIT_EMPTY
    sp = compute_spectrum(state, k_max)
    report = classify(p, k_max)
    negative = next((b.unstable_modes for b in report.branches if b.branch is state.branch), [])
    summary = {
        "branch": state.branch.value,
        "R_s": state.radius,
        "gamma_star": sp.gamma_star,
        "attained_at": sp.attained_at,
        "classification": sp.classification.value,
        "unstable_modes": negative,
    }
    if config.fmt == "csv":
        rows = [
            [str(k), sp.lambdas[k], sp.lambdas_hj[k], sp.h[k], sp.j[k], sp.gamma_k[k]]
            for k in range(k_max + 1)
        ]
        text = _csv_text(["k", "lambda_direct", "lambda_hj", "h_k", "j_k", "gamma_k"], rows)
        text += f"# branch={state.branch.value}\n# R_s={fmt_float(state.radius)}\n"
        text += f"# gamma_star={fmt_float(sp.gamma_star)}\n# attained_at={sp.attained_at}\n"
        text += f"# classification={sp.classification.value}\n"
        _emit(text, config.output)
    else:
        results = {
            "summary": summary,
            "modes": [
                {"k": k, "lambda_direct": sp.lambdas[k], "lambda_hj": sp.lambdas_hj[k], "h_k": sp.h[k],
                 "j_k": sp.j[k], "gamma_k": sp.gamma_k[k]}
                for k in range(k_max + 1)
            ],
        }
        _emit(dumps_json({"model": p.to_dict(), "spectrum": {"k_max": k_max, "branch": state.branch.value},
                          "results": results}), config.output)
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    options = config.options
    tolerances = options.get("tolerances", {})
    if not isinstance(tolerances, dict) or set(tolerances) - set(DEFAULT_TOLERANCES):
        raise ConfigError(f"verify.tolerances keys must be among {sorted(DEFAULT_TOLERANCES)}")
    n_grid = _positive_int(options, "grid", 4096, 64)
    k_max = _positive_int(options, "k_max", 20, 0)
    results = run_suite(config.params, tolerances, n_grid=n_grid, k_max=k_max)
    if config.fmt == "csv":
        rows = [[r.name, r.measured, r.tolerance, "pass" if r.passed else "fail", r.detail] for r in results]
        _emit(_csv_text(["check", "measured", "tolerance", "status", "detail"], rows), config.output)
    else:
        _emit(dumps_json({"model": config.params.to_dict(), "verify": {"grid": n_grid, "k_max": k_max},
                          "results": {"checks": [r.to_dict() for r in results],
                                      "all_passed": all(r.passed for r in results)}}), config.output)
    failed = [r.name for r in results if not r.passed]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name}: measured={r.measured:.3e} tolerance={r.tolerance:.3e}", file=sys.stderr)
    if failed:
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def parse_modes(modes_text) -> dict[int, float]:
    """Parse ``"k:amp,k:amp"`` (or a mapping) into {k: amplitude}."""
    if isinstance(modes_text, dict):
        items = modes_text.items()
    else:
        items = []
        for part in str(modes_text).split(","):
            part = part.strip()
            if not part:
                continue
            if ":" not in part:
                raise ConfigError(f"mode entry {part!r} is not of the form k:amp")
            k, amp = part.split(":", 1)
            items.append((k, amp))
    modes = {}
    for k, amp in items:
        try:
            k_int = int(k)
            amp_f = float(amp)
        except ValueError as exc:
            raise ConfigError(f"bad mode entry {k}:{amp}") from exc
        if k_int < 0 or not math.isfinite(amp_f):
            raise ConfigError(f"bad mode entry {k}:{amp}")
        modes[k_int] = amp_f
    if not modes:
        raise ConfigError("no modes given")
    return modes


def cmd_simulate(config: RunConfig) -> int:
    p = config.params
    options = config.options
    mode = options.get("mode", "radial")
    n_samples = _positive_int(options, "n_samples", 2001, 2)
    state = _select_state(p, options.get("branch"))
    if mode == "radial":
        t_end = _positive_float(options, "t_end")
        equilibrium = state.radius if state is not None else None
        r0 = _positive_float(options, "r0", 1.05 * equilibrium if equilibrium else None)
        trace = integrate_radial(p, r0, t_end, n_samples=n_samples, equilibrium=equilibrium)
        header = ["time", "R"]
        rows = [[t, v] for t, v in zip(trace.times, trace.values)]
        summary = {
            "mode": "radial",
            "R0": r0,
            "equilibrium": equilibrium,
            "fitted_rate": trace.fitted_rate,
            "lambda_0": compute_spectrum(state, 2).lambdas[0] if state is not None else None,
            "extinct": trace.metadata["extinct"],
            "blowup": trace.metadata["blowup"],
        }
    elif mode == "linear-modes":
        if state is None:
            print("no equilibria", file=sys.stderr)
            return EXIT_EMPTY
        t_end = _positive_float(options, "t_end")
        modes = parse_modes(options.get("modes", "0:1e-3,2:1e-3"))
        k_max = max(max(modes), 2)
        amplitudes = np.zeros(k_max + 1)
        for k, amp in modes.items():
            amplitudes[k] = amp
        lambdas = compute_spectrum(state, k_max).lambdas
        trace = integrate_linear_modes(state, amplitudes, t_end, n_samples=n_samples, lambdas=lambdas)
        ks = sorted(modes)
        header = ["time"] + [f"c_{k}" for k in ks] + ["deviation"]
        rows = [[t, *[trace.values[i, k] for k in ks], trace.deviation[i]] for i, t in enumerate(trace.times)]
        summary = {
            "mode": "linear-modes",
            "branch": state.branch.value,
            "R_s": state.radius,
            "fitted_rate": trace.fitted_rate,
            "dominant_rate": dominant_rate(lambdas, amplitudes),
            "spectral_gap": spectral_gap(lambdas, amplitudes),
            "lambdas": {str(k): lambdas[k] for k in ks},
        }
    else:
        raise ConfigError(f"simulate mode must be 'radial' or 'linear-modes', got {mode!r}")

    section = {"mode": mode, "t_end": t_end, "n_samples": n_samples}
    document = {"model": p.to_dict(), "simulate": section, "results": summary}
    if config.fmt == "csv":
        _emit(_csv_text(header, rows), config.output)
        summary_path = options.get("summary")
        if summary_path is None and config.output:
            summary_path = str(Path(config.output).with_suffix(".summary.json"))
        if summary_path:
            _emit(dumps_json(document), summary_path)
        else:
            sys.stderr.write(dumps_json(document))
    else:
        document["results"] = {**summary, "series": {"columns": header, "rows": rows}}
        _emit(dumps_json(document), config.output)
    return EXIT_OK


COMMANDS = {
    "stationary": cmd_stationary,
    "threshold": cmd_threshold,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spheroid-spectrum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="JSON config file")
        cmd.add_argument("--output", help="output path (default: stdout)")
        cmd.add_argument("--format", choices=("csv", "json"))
        cmd.add_argument("--sigma-bar", dest="sigma_bar", type=float)
        cmd.add_argument("--sigma-tilde", dest="sigma_tilde", type=float)
        cmd.add_argument("--mu", type=float)
        cmd.add_argument("--gamma", type=float)
        cmd.add_argument("--p-bar", dest="p_bar", type=float)
        if name in ("spectrum", "simulate", "threshold"):
            cmd.add_argument("--branch", choices=("smaller", "larger"))
        if name in ("spectrum", "threshold", "verify"):
            cmd.add_argument("--k-max", dest="k_max", type=int)
        if name == "verify":
            cmd.add_argument("--grid", type=int)
        if name == "simulate":
            cmd.add_argument("--mode", choices=("radial", "linear-modes"))
            cmd.add_argument("--t-end", dest="t_end", type=float)
            cmd.add_argument("--r0", type=float)
            cmd.add_argument("--modes", help='mode amplitudes, e.g. "0:1e-3,2:5e-4"')
            cmd.add_argument("--n-samples", dest="n_samples", type=int)
            cmd.add_argument("--summary", help="path for the JSON summary")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _build_config(args, args.command)
        return COMMANDS[args.command](config)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (UsageError, ConfigError, DomainError, KeyError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
