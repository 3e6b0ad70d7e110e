"""Config-driven command line: ``magucp <command> --config run.json``.

Exit codes: 0 when every asserted check passes, 1 when at least one asserted
check fails, 2 on configuration or evaluation errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import __version__
from .errors import ConfigurationError, MagUCPError
from .fields import catalog
from .functionals import build_profile, write_profile_csv
from .quadrature import DEFAULT_RADIAL_NODES, DEFAULT_SPHERE_ORDER, RadiiGrid, make_rules
from .verify import (
    DERIVATIVE_TOLERANCE,
    IDENTITY_TOLERANCE,
    IdentityReport,
    boundary_flux_bound,
    comparison_check,
    derivative_check,
    doubling_check,
    frequency_monotonicity,
    pohozaev_residual,
    rellich_check,
    vanishing_order,
    vanishing_report,
)

COMMANDS = ("verify", "profile", "doubling", "vanish")
EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2

DEFAULT_GRID = {"r_min": 0.05, "r_max": 0.95, "step": 0.0125}
DEFAULT_GAMMAS = [0.1, 0.2, 0.3, 0.4]
DEFAULT_VANISH_RADII = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45]


@dataclass
class TripleSpec:
    name: str
    params: dict = field(default_factory=dict)


@dataclass
class RunConfig:
    dimension: int = 2
    triples: list[TripleSpec] = field(default_factory=list)
    r_min: float = DEFAULT_GRID["r_min"]
    r_max: float = DEFAULT_GRID["r_max"]
    step: float = DEFAULT_GRID["step"]
    sphere_order: int | None = None
    radial_nodes: int = DEFAULT_RADIAL_NODES
    identity_tolerance: float = IDENTITY_TOLERANCE
    derivative_tolerance: float = DERIVATIVE_TOLERANCE
    gammas: list[float] = field(default_factory=lambda: list(DEFAULT_GAMMAS))
    vanish_radii: list[float] = field(default_factory=lambda: list(DEFAULT_VANISH_RADII))
    commands: list[str] = field(default_factory=lambda: ["verify"])
    report_path: str = "report.jsonl"
    csv_dir: str = "profiles"
    digest: str = ""

    def grid(self) -> RadiiGrid:
        return RadiiGrid.uniform(self.r_min, self.r_max, self.step)

    def rules(self):
        return make_rules(self.dimension, self.sphere_order, self.radial_nodes)


def _number(value, key: str, integer: bool = False):
    ok = isinstance(value, int) if integer else isinstance(value, (int, float))
    if isinstance(value, bool) or not ok or not math.isfinite(value):
        kind = "an integer" if integer else "a finite number"
        raise ConfigurationError(f"{key}: expected {kind}, got {value!r}")
    return value


def _section(raw: dict, key: str) -> dict:
    sec = raw.get(key, {})
    if not isinstance(sec, dict):
        raise ConfigurationError(f"{key}: expected an object")
    return sec


def parse_config(raw: Any) -> RunConfig:
    """Validate a decoded JSON config; errors name the offending key."""
    if not isinstance(raw, dict):
        raise ConfigurationError("config: top level must be an object")
    cfg = RunConfig()
    cfg.digest = hashlib.sha256(
        json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()

    cfg.dimension = _number(raw.get("dimension", 2), "dimension", integer=True)
    if cfg.dimension not in (2, 3):
        raise ConfigurationError(f"dimension: must be 2 or 3, got {cfg.dimension}")

    grid = _section(raw, "grid")
    for key in grid:
        if key not in DEFAULT_GRID:
            raise ConfigurationError(f"grid.{key}: unknown key")
    cfg.r_min = _number(grid.get("r_min", cfg.r_min), "grid.r_min")
    cfg.r_max = _number(grid.get("r_max", cfg.r_max), "grid.r_max")
    cfg.step = _number(grid.get("step", cfg.step), "grid.step")
    if not 0 < cfg.r_min < 1:
        raise ConfigurationError(f"grid.r_min: must lie in (0, 1), got {cfg.r_min}")
    if not cfg.r_min < cfg.r_max < 1:
        raise ConfigurationError(f"grid.r_max: need r_min < r_max < 1, got {cfg.r_max}")
    if not cfg.step > 0:
        raise ConfigurationError(f"grid.step: must be positive, got {cfg.step}")

    quad = _section(raw, "quadrature")
    if "sphere_order" in quad:
        cfg.sphere_order = _number(quad["sphere_order"], "quadrature.sphere_order", integer=True)
        if cfg.sphere_order < 2:
            raise ConfigurationError("quadrature.sphere_order: must be >= 2")
    else:
        cfg.sphere_order = DEFAULT_SPHERE_ORDER[cfg.dimension]
    cfg.radial_nodes = _number(quad.get("radial_nodes", cfg.radial_nodes), "quadrature.radial_nodes", integer=True)
    if cfg.radial_nodes < 1:
        raise ConfigurationError("quadrature.radial_nodes: must be >= 1")

    tol = _section(raw, "tolerances")
    cfg.identity_tolerance = _number(tol.get("identity", cfg.identity_tolerance), "tolerances.identity")
    cfg.derivative_tolerance = _number(tol.get("derivative", cfg.derivative_tolerance), "tolerances.derivative")
    for key, val in (("tolerances.identity", cfg.identity_tolerance), ("tolerances.derivative", cfg.derivative_tolerance)):
        if not val > 0:
            raise ConfigurationError(f"{key}: must be positive")

    gammas = _section(raw, "doubling").get("gammas", cfg.gammas)
    if not isinstance(gammas, list) or not gammas:
        raise ConfigurationError("doubling.gammas: expected a non-empty list")
    cfg.gammas = [_number(g, f"doubling.gammas[{i}]") for i, g in enumerate(gammas)]
    for i, g in enumerate(cfg.gammas):
        if not (0 < g and 2 * g < 1):
            raise ConfigurationError(f"doubling.gammas[{i}]: need 0 < gamma < 1/2, got {g}")

    radii = _section(raw, "vanish").get("radii", cfg.vanish_radii)
    if not isinstance(radii, list) or len(radii) < 4:
        raise ConfigurationError("vanish.radii: expected a list of at least 4 radii")
    cfg.vanish_radii = [_number(r, f"vanish.radii[{i}]") for i, r in enumerate(radii)]
    if any(not 0 < r < 0.5 for r in cfg.vanish_radii) or sorted(set(cfg.vanish_radii)) != cfg.vanish_radii:
        raise ConfigurationError("vanish.radii: must be strictly increasing inside (0, 0.5)")

    commands = raw.get("commands", cfg.commands)
    if not isinstance(commands, list) or any(c not in COMMANDS for c in commands):
        raise ConfigurationError(f"commands: expected a list drawn from {COMMANDS}, got {commands!r}")
    cfg.commands = list(commands)

    out = _section(raw, "outputs")
    cfg.report_path = out.get("report", cfg.report_path)
    cfg.csv_dir = out.get("csv_dir", cfg.csv_dir)
    for key, val in (("outputs.report", cfg.report_path), ("outputs.csv_dir", cfg.csv_dir)):
        if not isinstance(val, str) or not val:
            raise ConfigurationError(f"{key}: expected a non-empty path string")

    triples = raw.get("triples")
    if not isinstance(triples, list) or not triples:
        raise ConfigurationError("triples: expected a non-empty list")
    for i, item in enumerate(triples):
        if not isinstance(item, dict) or not isinstance(item.get("name"), str):
            raise ConfigurationError(f"triples[{i}].name: every triple needs a string name")
        params = item.get("params", {})
        if not isinstance(params, dict):
            raise ConfigurationError(f"triples[{i}].params: expected an object")
        cfg.triples.append(TripleSpec(item["name"], dict(params)))
    return cfg


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"config: cannot read {path}: {exc.strerror}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parse_config(raw)


def build_triples(cfg: RunConfig):
    out = []
    for i, spec in enumerate(cfg.triples):
        params = {"N": cfg.dimension, **spec.params}
        try:
            out.append(catalog(spec.name, params))
        except ConfigurationError as exc:
            raise ConfigurationError(f"triples[{i}]: {exc}") from exc
    return out


# --------------------------------------------------------------------------
# suites
# --------------------------------------------------------------------------


def _sort_key(rep: IdentityReport):
    return (rep.triple_label, rep.identity_name, rep.radius if math.isfinite(rep.radius) else math.inf)


def run_verify(cfg: RunConfig) -> list[IdentityReport]:
    rules = cfg.rules()
    grid = cfg.grid()
    reports: list[IdentityReport] = []
    for triple in build_triples(cfg):
        profile = build_profile(triple, grid, rules)
        for r in grid.radii:
            reports.append(rellich_check(triple, r, rules, cfg.identity_tolerance))
            reports.append(boundary_flux_bound(triple, r, rules))
            reports.append(pohozaev_residual(triple, r, rules, "classical", cfg.identity_tolerance))
            reports.append(pohozaev_residual(triple, r, rules, "paper", cfg.identity_tolerance))
        reports.extend(derivative_check(profile, cfg.derivative_tolerance, cfg.derivative_tolerance))
        reports.extend(comparison_check(triple, grid, rules))
        reports.append(frequency_monotonicity(profile).to_report())
    return sorted(reports, key=_sort_key)


def run_doubling(cfg: RunConfig) -> list[IdentityReport]:
    rules = cfg.rules()
    grid = cfg.grid()
    reports = []
    for triple in build_triples(cfg):
        for g in cfg.gammas:
            reports.extend(doubling_check(triple, g, grid, rules))
    return sorted(reports, key=_sort_key)


def run_vanish(cfg: RunConfig) -> list[IdentityReport]:
    rules = cfg.rules()
    radii = RadiiGrid.from_values(cfg.vanish_radii)
    reports = []
    for triple in build_triples(cfg):
        order = vanishing_order(triple, radii, rules)
        reports.append(vanishing_report(triple.label, order, radii))
    return sorted(reports, key=_sort_key)


def run_profile(cfg: RunConfig, csv_dir) -> list[Path]:
    rules = cfg.rules()
    grid = cfg.grid()
    paths = []
    for triple in build_triples(cfg):
        name = re.sub(r"[^A-Za-z0-9._=-]+", "_", triple.label).strip("_") + ".csv"
        paths.append(write_profile_csv(build_profile(triple, grid, rules), Path(csv_dir) / name))
    return paths


def write_report(path, cfg: RunConfig, command: str, reports: list[IdentityReport]) -> Path:
    path = Path(path)
    header = {
        "record": "header",
        "tool": "magucp",
        "version": __version__,
        "command": command,
        "config_digest": cfg.digest,
        "count": len(reports),
    }
    lines = [json.dumps(header, sort_keys=True)]
    lines.extend(json.dumps({"record": "identity", **rep.to_record()}, sort_keys=True) for rep in reports)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_report(path) -> tuple[dict, list[dict]]:
    with open(path, encoding="utf-8") as fh:
        rows = [json.loads(line) for line in fh if line.strip()]
    return rows[0], rows[1:]


def _exit_code(reports) -> int:
    return EXIT_FAIL if any(rep.failed for rep in reports) else EXIT_OK


def run(config_path, command: str | None = None, out=None, csv_dir=None) -> int:
    """Execute one command (or every command listed in the config) and return the exit code."""
    try:
        cfg = load_config(config_path)
        commands = [command] if command else cfg.commands
        code = EXIT_OK
        for cmd in commands:
            if cmd not in COMMANDS:
                raise ConfigurationError(f"command: unknown command {cmd!r}; expected one of {COMMANDS}")
            if cmd == "profile":
                target = csv_dir or cfg.csv_dir
                try:
                    paths = run_profile(cfg, target)
                except OSError as exc:
                    raise ConfigurationError(f"outputs.csv_dir: cannot write to {target}: {exc.strerror}") from exc
                for p in paths:
                    print(p)
                continue
            reports = {"verify": run_verify, "doubling": run_doubling, "vanish": run_vanish}[cmd](cfg)
            target = out or cfg.report_path
            if len(commands) > 1:
                target = str(Path(target).with_suffix("")) + f".{cmd}.jsonl"
            try:
                write_report(target, cfg, cmd, reports)
            except OSError as exc:
                raise ConfigurationError(f"outputs.report: cannot write to {target}: {exc.strerror}") from exc
            failed = sum(rep.failed for rep in reports)
            print(f"{cmd}: {len(reports)} records, {failed} asserted failures -> {target}")
            code = max(code, _exit_code(reports))
        return code
    except MagUCPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="magucp", description=__doc__.splitlines()[0])
    parser.add_argument("command", nargs="?", choices=COMMANDS, help="suite to run (default: config 'commands')")
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", help="report file (newline-delimited JSON)")
    parser.add_argument("--csv-dir", help="directory for profile CSV files")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    args = parser.parse_args(argv)
    return run(args.config, args.command, args.out, args.csv_dir)


if __name__ == "__main__":
    sys.exit(main())
