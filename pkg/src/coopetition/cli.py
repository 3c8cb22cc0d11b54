"""Command-line front end: simulate, sweep, metrics, equilibrium, validate.

Every command writes its artifacts into an output directory via
write-to-temp plus atomic rename, and echoes the fully resolved
configuration so a run can be reproduced exactly.  Exit codes: 0 success,
2 usage, 3 parse error, 4 model-invariant violation, 5 I/O failure.

Scenario file format (strict; '#' comments; unknown keys rejected):

    [actors]            id: display name, one per line
    [trust_params]      lambda_plus = 0.10   (all eight fields)
    [economy]           variant/beta_exponent/theta/gamma scalars;
                        shares/endowments/baselines as one value per actor
    [initial]           trust = 0.5 or per-dyad "trust <observer> <partner> = x";
                        same for reputation_damage
    [dependence]        "<depender> <dependee> = D" for every ordered pair
    [phases]            "<name> <duration> <deviation per actor...>"
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import replace

from coopetition import __version__
from coopetition.economy import EconomyParams
from coopetition.equilibrium import (
    ConvergenceError,
    StateGrid,
    value_iteration,
    write_policy_csv,
    write_value_csv,
)
from coopetition.istar import Actor, InterdependenceMatrix, NetworkParseError
from coopetition.metrics import ConfigOutcome, MetricProbeSpec, evaluate_config
from coopetition.scenario import (
    PhaseSpec,
    Scenario,
    Trajectory,
    renault_nissan_scenario,
    simulate,
    write_trajectory_csv,
    write_utilities_csv,
)
from coopetition.sweep import (
    default_grid,
    pareto_frontier,
    run_sweep,
    sensitivity,
    summarize,
    write_outcomes_csv,
    write_pareto_csv,
    write_sensitivity_csv,
    write_summary_json,
)
from coopetition.trust import (
    DyadState,
    ModelInvariantError,
    SystemState,
    TrustParams,
)
from coopetition.validation import (
    PhaseAnnotation,
    renault_nissan_annotations,
    validate,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_MODEL = 4
EXIT_IO = 5

BUILTIN_SCENARIOS = ("builtin:renault_nissan",)


class ScenarioParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Scenario text format
# ---------------------------------------------------------------------------

_TRUST_KEYS = ("lambda_plus", "lambda_minus", "mu_r", "delta_r",
               "xi", "rho", "kappa", "discount")
_ECON_SCALARS = ("variant", "beta_exponent", "theta", "gamma")
_ECON_VECTORS = ("shares", "endowments", "baselines")
_SECTIONS = ("[actors]", "[trust_params]", "[economy]", "[initial]",
             "[dependence]", "[phases]")


def parse_scenario_text(text: str) -> Scenario:
    actors: list[Actor] = []
    trust_kv: dict[str, float] = {}
    econ_kv: dict[str, object] = {}
    uniform_initial: dict[str, float] = {}
    dyad_initial: dict[tuple[str, str, str], float] = {}
    dependence: dict[tuple[str, str], float] = {}
    phases: list[tuple[str, int, tuple[float, ...]]] = []
    section = None

    def fail(line_no: int, message: str) -> None:
        raise ScenarioParseError(line_no, message)

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line not in _SECTIONS:
                fail(line_no, f"unknown section {line}")
            section = line
            continue
        if section is None:
            fail(line_no, "content before any section header")
        if section == "[actors]":
            if ":" not in line:
                fail(line_no, "expected 'id: name'")
            actor_id, name = (part.strip() for part in line.split(":", 1))
            actors.append(Actor(actor_id, name))
        elif section == "[trust_params]":
            key, value = _split_kv(line, line_no)
            if key not in _TRUST_KEYS:
                fail(line_no, f"unknown trust parameter {key!r}")
            if key in trust_kv:
                fail(line_no, f"duplicate key {key!r}")
            trust_kv[key] = _parse_float(value, line_no)
        elif section == "[economy]":
            key, value = _split_kv(line, line_no)
            if key in _ECON_SCALARS:
                econ_kv[key] = value if key == "variant" else _parse_float(value, line_no)
            elif key in _ECON_VECTORS:
                econ_kv[key] = tuple(_parse_float(v, line_no) for v in value.split())
            else:
                fail(line_no, f"unknown economy key {key!r}")
        elif section == "[initial]":
            key, value = _split_kv(line, line_no)
            parts = key.split()
            if parts[0] not in ("trust", "reputation_damage"):
                fail(line_no, f"unknown initial key {parts[0]!r}")
            if len(parts) == 1:
                uniform_initial[parts[0]] = _parse_float(value, line_no)
            elif len(parts) == 3:
                dyad_initial[(parts[0], parts[1], parts[2])] = _parse_float(value, line_no)
            else:
                fail(line_no, "expected 'trust = x' or 'trust <observer> <partner> = x'")
        elif section == "[dependence]":
            key, value = _split_kv(line, line_no)
            parts = key.split()
            if len(parts) != 2:
                fail(line_no, "expected '<depender> <dependee> = D'")
            dependence[(parts[0], parts[1])] = _parse_float(value, line_no)
        elif section == "[phases]":
            parts = line.split()
            if len(parts) < 3:
                fail(line_no, "expected '<name> <duration> <deviation per actor...>'")
            try:
                duration = int(parts[1])
            except ValueError:
                fail(line_no, f"duration must be an integer, got {parts[1]!r}")
            deviations = tuple(_parse_float(p, line_no) for p in parts[2:])
            phases.append((parts[0], duration, deviations))

    if not actors:
        raise ScenarioParseError(0, "missing required section [actors]")
    missing = [k for k in _TRUST_KEYS if k not in trust_kv]
    if missing:
        raise ScenarioParseError(0, f"missing trust parameters: {missing}")
    for key in _ECON_VECTORS:
        if key not in econ_kv:
            raise ScenarioParseError(0, f"missing economy key {key!r}")
    if not phases:
        raise ScenarioParseError(0, "missing required section [phases]")

    ids = tuple(a.id for a in actors)
    try:
        params = TrustParams(**trust_kv)
        econ = EconomyParams(
            n=len(ids),
            shares=tuple(econ_kv["shares"]),
            endowments=tuple(econ_kv["endowments"]),
            baselines=tuple(econ_kv["baselines"]),
            beta_exponent=float(econ_kv.get("beta_exponent", 0.75)),
            theta=float(econ_kv.get("theta", 1.0)),
            variant=str(econ_kv.get("variant", "power")),
            gamma=float(econ_kv.get("gamma", 1.0)),
        )
        dyads = {}
        for i in ids:
            for j in ids:
                if i == j:
                    continue
                trust = dyad_initial.get(("trust", i, j), uniform_initial.get("trust", 0.5))
                rep = dyad_initial.get(("reputation_damage", i, j),
                                       uniform_initial.get("reputation_damage", 0.0))
                dyads[(i, j)] = DyadState(trust, rep)
        initial = SystemState(dyads=dyads, period=0)
        entries = tuple(
            tuple(0.0 if i == j else dependence[(i, j)] for j in ids) for i in ids
        )
        matrix = InterdependenceMatrix(actor_ids=ids, entries=entries)
        scenario = Scenario(
            actors=tuple(actors),
            phases=tuple(PhaseSpec(name, duration, dev) for name, duration, dev in phases),
            initial=initial,
            trust_params=params,
            econ=econ,
            matrix=matrix,
        )
    except KeyError as exc:
        raise ScenarioParseError(0, f"missing dependence entry for pair {exc}") from exc
    return scenario


def _split_kv(line: str, line_no: int) -> tuple[str, str]:
    if "=" not in line:
        raise ScenarioParseError(line_no, f"expected 'key = value', got {line!r}")
    key, value = line.split("=", 1)
    return key.strip(), value.strip()


def _parse_float(text: str, line_no: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ScenarioParseError(line_no, f"expected a number, got {text!r}") from None


def scenario_to_text(scenario: Scenario) -> str:
    """Serialize a scenario so that parsing the output reproduces it exactly."""
    ids = scenario.actor_ids()
    lines = ["[actors]"]
    for actor in scenario.actors:
        lines.append(f"{actor.id}: {actor.name}")
    lines.append("")
    lines.append("[trust_params]")
    p = scenario.trust_params
    for key in _TRUST_KEYS:
        lines.append(f"{key} = {getattr(p, key)!r}")
    lines.append("")
    lines.append("[economy]")
    e = scenario.econ
    lines.append(f"variant = {e.variant}")
    lines.append(f"beta_exponent = {e.beta_exponent!r}")
    lines.append(f"theta = {e.theta!r}")
    lines.append(f"gamma = {e.gamma!r}")
    for key in _ECON_VECTORS:
        lines.append(f"{key} = " + " ".join(repr(v) for v in getattr(e, key)))
    lines.append("")
    lines.append("[initial]")
    for (i, j), dyad in sorted(scenario.initial.dyads.items()):
        lines.append(f"trust {i} {j} = {dyad.trust!r}")
        lines.append(f"reputation_damage {i} {j} = {dyad.reputation_damage!r}")
    lines.append("")
    lines.append("[dependence]")
    for i in ids:
        for j in ids:
            if i != j:
                lines.append(f"{i} {j} = {scenario.matrix.d(i, j)!r}")
    lines.append("")
    lines.append("[phases]")
    for phase in scenario.phases:
        devs = " ".join(repr(d) for d in phase.deviation)
        lines.append(f"{phase.name} {phase.duration} {devs}")
    lines.append("")
    return "\n".join(lines)


def parse_scenario(path_or_builtin: str) -> Scenario:
    if path_or_builtin.startswith("builtin:"):
        if path_or_builtin == "builtin:renault_nissan":
            return renault_nissan_scenario()
        raise UsageError(f"unknown builtin scenario {path_or_builtin!r}; "
                         f"available: {', '.join(BUILTIN_SCENARIOS)}")
    with open(path_or_builtin, "r", encoding="utf-8") as handle:
        return parse_scenario_text(handle.read())


# ---------------------------------------------------------------------------
# Overrides and atomic output
# ---------------------------------------------------------------------------

def parse_overrides(pairs: list[str]) -> dict[str, str]:
    overrides = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise UsageError(f"override must be key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        overrides[key.strip()] = value.strip()
    return overrides


def apply_prefixed(obj, prefix: str, overrides: dict[str, str], used: set[str]):
    """Replace dataclass fields named '<prefix>.<field>' from overrides."""
    updates = {}
    for key, value in overrides.items():
        if not key.startswith(prefix + "."):
            continue
        fieldname = key[len(prefix) + 1:]
        if not hasattr(obj, fieldname):
            raise UsageError(f"unknown override field {key!r}")
        current = getattr(obj, fieldname)
        if isinstance(current, bool):
            updates[fieldname] = value.lower() in ("1", "true", "yes")
        elif isinstance(current, int) and not isinstance(current, bool):
            updates[fieldname] = int(value)
        elif isinstance(current, float):
            updates[fieldname] = float(value)
        elif isinstance(current, str):
            updates[fieldname] = value
        else:
            raise UsageError(f"override field {key!r} is not a scalar")
        used.add(key)
    return replace(obj, **updates) if updates else obj


def write_atomic(out_dir: str, filename: str, writer) -> str:
    """Write via a temp file in the same directory, then atomic rename."""
    os.makedirs(out_dir, exist_ok=True)
    final_path = os.path.join(out_dir, filename)
    fd, tmp_path = tempfile.mkstemp(dir=out_dir, prefix=filename + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            writer(handle)
        os.replace(tmp_path, final_path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
    return final_path


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _scenario_with_overrides(args) -> Scenario:
    scenario = parse_scenario(args.scenario)
    overrides = parse_overrides(args.set)
    used: set[str] = set()
    params = apply_prefixed(scenario.trust_params, "trust", overrides, used)
    econ = apply_prefixed(scenario.econ, "econ", overrides, used)
    unused = set(overrides) - used
    if unused:
        raise UsageError(f"unknown overrides: {sorted(unused)}")
    if params is not scenario.trust_params or econ is not scenario.econ:
        scenario = replace(scenario, trust_params=params, econ=econ)
    return scenario


def cmd_simulate(args) -> int:
    scenario = _scenario_with_overrides(args)
    trajectory = simulate(scenario)
    write_atomic(args.out, "trajectory.csv", lambda h: write_trajectory_csv(trajectory, h))
    write_atomic(args.out, "utilities.csv", lambda h: write_utilities_csv(trajectory, h))
    write_atomic(args.out, "resolved_scenario.scenario",
                 lambda h: h.write(scenario_to_text(scenario)))
    print(f"simulated {len(trajectory)} periods x {len(trajectory.actor_ids)} actors "
          f"-> {args.out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.grid != "default":
        raise UsageError("only the default grid is supported; use --set probe.* to "
                         "adjust probe conventions")
    overrides = parse_overrides(args.set)
    used: set[str] = set()
    probe = apply_prefixed(MetricProbeSpec(), "probe", overrides, used)
    unused = set(overrides) - used
    if unused:
        raise UsageError(f"unknown overrides: {sorted(unused)}")
    spec = default_grid()
    result = run_sweep(spec, probe, threads=args.threads)
    summary = summarize(result)
    sens = sensitivity(result)
    frontier = pareto_frontier(result)
    write_atomic(args.out, "sweep_outcomes.csv", lambda h: write_outcomes_csv(result, h))
    write_atomic(args.out, "sweep_summary.json", lambda h: write_summary_json(summary, h))
    write_atomic(args.out, "sensitivity.csv", lambda h: write_sensitivity_csv(sens, h))
    write_atomic(args.out, "pareto.csv", lambda h: write_pareto_csv(result, frontier, h))
    resolved = {"grid": {name: list(levels) for name, levels in spec.levels.items()},
                "probe": probe.__dict__, "threads": args.threads,
                "configurations": spec.size, "pareto_size": len(frontier)}
    write_atomic(args.out, "resolved_config.json",
                 lambda h: json.dump(resolved, h, indent=2, default=list) or h.write("\n"))
    print(f"swept {spec.size} configurations; pareto frontier {len(frontier)} "
          f"-> {args.out}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    overrides = parse_overrides(args.set)
    used: set[str] = set()
    params = apply_prefixed(
        TrustParams(lambda_plus=0.10, lambda_minus=0.30, mu_r=0.60, delta_r=0.03,
                    xi=0.50, rho=0.20, kappa=1.00),
        "trust", overrides, used)
    probe = apply_prefixed(MetricProbeSpec(), "probe", overrides, used)
    unused = set(overrides) - used
    if unused:
        raise UsageError(f"unknown overrides: {sorted(unused)}")
    outcome = evaluate_config(params, probe)
    payload = {name: getattr(outcome, name) for name in ConfigOutcome.METRIC_NAMES}
    write_atomic(args.out, "metrics.json",
                 lambda h: json.dump(payload, h, indent=2) or h.write("\n"))
    resolved = {"trust": params.__dict__, "probe": probe.__dict__}
    write_atomic(args.out, "resolved_config.json",
                 lambda h: json.dump(resolved, h, indent=2) or h.write("\n"))
    for name, value in payload.items():
        print(f"{name} = {value:.9g}")
    return EXIT_OK


def cmd_equilibrium(args) -> int:
    overrides = parse_overrides(args.set)
    used: set[str] = set()
    params = apply_prefixed(
        TrustParams(lambda_plus=0.10, lambda_minus=0.30, mu_r=0.60, delta_r=0.03,
                    xi=0.50, rho=0.20, kappa=1.00),
        "trust", overrides, used)
    trust_points = int(overrides.get("grid.trust_points", 21))
    rep_points = int(overrides.get("grid.reputation_points", 11))
    action_max = float(overrides.get("grid.action_max", 3.0))
    action_step = float(overrides.get("grid.action_step", 0.25))
    d12 = float(overrides.get("d12", 0.5))
    d21 = float(overrides.get("d21", 0.5))
    gamma = float(overrides.get("econ.gamma", 1.0))
    baseline = float(overrides.get("econ.baseline", 1.0))
    used |= {k for k in overrides if k.startswith("grid.") or k in ("d12", "d21")
             or k in ("econ.gamma", "econ.baseline")}
    unused = set(overrides) - used
    if unused:
        raise UsageError(f"unknown overrides: {sorted(unused)}")

    import numpy as np

    from coopetition.economy import symmetric_economy

    grid = StateGrid(
        trust_levels=tuple(np.linspace(0.0, 1.0, trust_points)),
        reputation_levels=tuple(np.linspace(0.0, 1.0, rep_points)),
        action_levels=tuple(np.arange(0.0, action_max + 1e-9, action_step)),
    )
    econ = symmetric_economy(2, gamma=gamma, baseline=baseline)
    horizon = "infinite" if args.horizon == "infinite" else int(args.horizon)
    value, policy = value_iteration(grid, econ, params, d12, d21, horizon=horizon,
                                    tolerance=args.tolerance)
    write_atomic(args.out, "policy.csv", lambda h: write_policy_csv(policy, h))
    write_atomic(args.out, "value.csv", lambda h: write_value_csv(value, h))
    resolved = {
        "trust": params.__dict__,
        "grid": {"trust_points": trust_points, "reputation_points": rep_points,
                 "action_max": action_max, "action_step": action_step},
        "d12": d12, "d21": d21, "econ": {"gamma": gamma, "baseline": baseline},
        "horizon": args.horizon, "tolerance": args.tolerance,
    }
    write_atomic(args.out, "resolved_config.json",
                 lambda h: json.dump(resolved, h, indent=2) or h.write("\n"))
    print(f"solved {grid.n_dyad ** 2} joint states x {len(grid.action_levels)} actions "
          f"-> {args.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    scenario = _scenario_with_overrides(args)
    trajectory = simulate(scenario)
    if args.scenario == "builtin:renault_nissan":
        annotations = renault_nissan_annotations()
    else:
        annotations = _annotations_from_phases(scenario)
    report = validate(trajectory, annotations, scenario.trust_params)
    write_atomic(args.out, "validation.json", lambda h: h.write(report.to_json() + "\n"))
    write_atomic(args.out, "trajectory.csv", lambda h: write_trajectory_csv(trajectory, h))
    write_atomic(args.out, "resolved_scenario.scenario",
                 lambda h: h.write(scenario_to_text(scenario)))
    print(report.summary())
    return EXIT_OK


def _annotations_from_phases(scenario: Scenario) -> tuple[PhaseAnnotation, ...]:
    annotations = []
    start = 0
    for phase in scenario.phases:
        direction = "violation" if any(d < 0 for d in phase.deviation) else "cooperative"
        annotations.append(PhaseAnnotation(
            name=phase.name, start=start, end=start + phase.duration - 1,
            expected_direction=direction))
        start += phase.duration
    return tuple(annotations)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coopetition",
        description="Trust dynamics simulation and experiment harness")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a phase-structured scenario")
    p_sim.add_argument("--scenario", required=True,
                       help="scenario file path or builtin:renault_nissan")
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override trust.* or econ.* fields")
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="run the factorial parameter sweep")
    p_sweep.add_argument("--grid", default="default")
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--threads", type=int, default=None,
                         help="advisory parallelism hint (results are identical)")
    p_sweep.add_argument("--set", action="append", metavar="KEY=VALUE",
                         help="override probe.* fields")
    p_sweep.set_defaults(func=cmd_sweep)

    p_metrics = sub.add_parser("metrics", help="evaluate the seven outcome metrics")
    p_metrics.add_argument("--out", required=True)
    p_metrics.add_argument("--set", action="append", metavar="KEY=VALUE",
                           help="override trust.* or probe.* fields")
    p_metrics.set_defaults(func=cmd_metrics)

    p_eq = sub.add_parser("equilibrium", help="solve Markov policies by value iteration")
    p_eq.add_argument("--out", required=True)
    p_eq.add_argument("--horizon", default="infinite")
    p_eq.add_argument("--tolerance", type=float, default=1e-6)
    p_eq.add_argument("--set", action="append", metavar="KEY=VALUE",
                      help="override trust.*, grid.*, econ.*, d12, d21")
    p_eq.set_defaults(func=cmd_equilibrium)

    p_val = sub.add_parser("validate", help="score a scenario against annotations")
    p_val.add_argument("--scenario", required=True,
                       help="scenario file path or builtin:renault_nissan")
    p_val.add_argument("--out", required=True)
    p_val.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override trust.* or econ.* fields")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ScenarioParseError, NetworkParseError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ModelInvariantError, ConvergenceError, ValueError) as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
