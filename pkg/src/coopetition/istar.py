"""Strategic dependency networks and derived interdependence coefficients.

Actors are linked by dependums (resources, goals, softgoals, tasks) that
one actor relies on another to provide.  Each dependum carries an
importance weight and a criticality in [0, 1].  The interdependence
coefficient of a depender on a dependee is the criticality-weighted share
of the depender's total dependency weight that the dependee provides:

    D_ij = sum(w * crit over dependums i->j) / sum(w over ALL of i's dependums)

The denominator spans the depender's full dependum set, so dependencies on
third parties dilute D_ij.  A seven-point rubric maps qualitative case
assessments onto the validated parameter ranges.
"""

from __future__ import annotations

from dataclasses import dataclass, field

DEPENDUM_KINDS = ("resource", "goal", "softgoal", "task")

# Validated sweep range (low, high) per dynamics parameter, and the
# (score, value) anchor each rubric assessment must reproduce.
PARAMETER_RANGES: dict[str, tuple[float, float]] = {
    "lambda_plus": (0.05, 0.15),
    "lambda_minus": (0.15, 0.45),
    "mu_r": (0.5, 0.7),
    "delta_r": (0.01, 0.05),
    "xi": (0.3, 0.7),
    "rho": (0.1, 0.3),
    "kappa": (0.5, 1.5),
}

RUBRIC_ANCHORS: dict[str, tuple[int, float]] = {
    "lambda_plus": (4, 0.10),
    "lambda_minus": (5, 0.30),
    "mu_r": (5, 0.60),
    "delta_r": (2, 0.02),
    "xi": (4, 0.50),
    "rho": (3, 0.20),
    "kappa": (4, 1.00),
}


@dataclass(frozen=True)
class Actor:
    id: str
    name: str = ""

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("actor id must be nonempty")


@dataclass(frozen=True)
class Dependum:
    """One thing a depender relies on a dependee to provide."""

    depender: str
    dependee: str
    label: str
    kind: str
    weight: float
    criticality: float

    def __post_init__(self) -> None:
        if self.depender == self.dependee:
            raise ValueError(f"dependum {self.label!r}: depender equals dependee")
        if self.kind not in DEPENDUM_KINDS:
            raise ValueError(f"dependum {self.label!r}: unknown kind {self.kind!r}")
        if not self.weight > 0:
            raise ValueError(f"dependum {self.label!r}: weight must be positive")
        if not 0.0 <= self.criticality <= 1.0:
            raise ValueError(f"dependum {self.label!r}: criticality must be in [0, 1]")


@dataclass(frozen=True)
class DependencyNetwork:
    actors: tuple[Actor, ...]
    dependums: tuple[Dependum, ...]

    def __post_init__(self) -> None:
        ids = [a.id for a in self.actors]
        if len(set(ids)) != len(ids):
            raise ValueError("actor ids must be unique")
        known = set(ids)
        for d in self.dependums:
            for end in (d.depender, d.dependee):
                if end not in known:
                    raise ValueError(f"dependum {d.label!r} references unknown actor {end!r}")

    def actor_ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.actors)


@dataclass(frozen=True)
class InterdependenceMatrix:
    """Pairwise [0, 1] dependency coefficients with zero diagonal."""

    actor_ids: tuple[str, ...]
    entries: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.actor_ids)
        if len(self.entries) != n or any(len(row) != n for row in self.entries):
            raise ValueError("entries must be an n x n matrix")
        for i in range(n):
            if self.entries[i][i] != 0.0:
                raise ValueError("diagonal entries must be zero")
            for j in range(n):
                if not 0.0 <= self.entries[i][j] <= 1.0:
                    raise ValueError("entries must be in [0, 1]")

    @property
    def n(self) -> int:
        return len(self.actor_ids)

    def d(self, depender: str, dependee: str) -> float:
        i = self.actor_ids.index(depender)
        j = self.actor_ids.index(dependee)
        return self.entries[i][j]

    def pair_map(self) -> dict[tuple[str, str], float]:
        """Dependence keyed by ordered actor-id pair, diagonal omitted."""
        ids = self.actor_ids
        return {(a, b): self.d(a, b) for a in ids for b in ids if a != b}


def compute_interdependence(network: DependencyNetwork, depender: str,
                            dependee: str) -> float:
    """Structural dependency of ``depender`` on ``dependee`` in [0, 1]."""
    known = set(network.actor_ids())
    for end in (depender, dependee):
        if end not in known:
            raise KeyError(f"unknown actor id {end!r}")
    mine = [d for d in network.dependums if d.depender == depender]
    total_weight = sum(d.weight for d in mine)
    if total_weight == 0.0:
        return 0.0
    num = sum(d.weight * d.criticality for d in mine if d.dependee == dependee)
    return num / total_weight


def build_matrix(network: DependencyNetwork) -> InterdependenceMatrix:
    ids = network.actor_ids()
    entries = tuple(
        tuple(0.0 if i == j else compute_interdependence(network, i, j) for j in ids)
        for i in ids
    )
    return InterdependenceMatrix(actor_ids=ids, entries=entries)


@dataclass(frozen=True)
class RubricAssessment:
    """Seven-point qualitative score for one dynamics parameter."""

    parameter: str
    score: int

    def __post_init__(self) -> None:
        if self.parameter not in RUBRIC_ANCHORS:
            raise ValueError(f"unknown parameter {self.parameter!r}")
        if self.score not in range(1, 8):
            raise ValueError(f"score must be an integer in 1..7, got {self.score}")


def rubric_to_value(assessment: RubricAssessment) -> float:
    """Map a rubric score onto the parameter's validated range.

    Piecewise linear through (1, range minimum), the documented anchor
    score, and (7, range maximum), so published case parameterizations
    reproduce exactly.
    """
    lo, hi = PARAMETER_RANGES[assessment.parameter]
    anchor_score, anchor_value = RUBRIC_ANCHORS[assessment.parameter]
    s = assessment.score
    if s == anchor_score:
        return anchor_value
    if s < anchor_score:
        return lo + (anchor_value - lo) * (s - 1) / (anchor_score - 1)
    return anchor_value + (hi - anchor_value) * (s - anchor_score) / (7 - anchor_score)


# ---------------------------------------------------------------------------
# Network file format
#
# Two sections.  [actors] lines are "id: display name".  [dependums] lines
# are whitespace-separated key=value fields with exactly the keys
# depender, dependee, label, kind, weight, criticality.  Labels with
# spaces use quotes.  '#' starts a comment.  Unknown keys are rejected.
# ---------------------------------------------------------------------------

_DEPENDUM_KEYS = ("depender", "dependee", "label", "kind", "weight", "criticality")


class NetworkParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _split_fields(text: str, line_no: int) -> list[str]:
    fields, cur, quoted = [], "", False
    for ch in text:
        if ch == '"':
            quoted = not quoted
        elif ch.isspace() and not quoted:
            if cur:
                fields.append(cur)
                cur = ""
        else:
            cur += ch
    if quoted:
        raise NetworkParseError(line_no, "unterminated quote")
    if cur:
        fields.append(cur)
    return fields


def parse_network(text: str) -> DependencyNetwork:
    actors: list[Actor] = []
    dependums: list[Dependum] = []
    section = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line not in ("[actors]", "[dependums]"):
                raise NetworkParseError(line_no, f"unknown section {line}")
            section = line
            continue
        if section == "[actors]":
            if ":" not in line:
                raise NetworkParseError(line_no, "expected 'id: name'")
            actor_id, name = (part.strip() for part in line.split(":", 1))
            actors.append(Actor(actor_id, name))
        elif section == "[dependums]":
            kv = {}
            for fieldtext in _split_fields(line, line_no):
                if "=" not in fieldtext:
                    raise NetworkParseError(line_no, f"expected key=value, got {fieldtext!r}")
                key, value = fieldtext.split("=", 1)
                if key not in _DEPENDUM_KEYS:
                    raise NetworkParseError(line_no, f"unknown key {key!r}")
                if key in kv:
                    raise NetworkParseError(line_no, f"duplicate key {key!r}")
                kv[key] = value
            missing = [k for k in _DEPENDUM_KEYS if k not in kv]
            if missing:
                raise NetworkParseError(line_no, f"missing keys {missing}")
            try:
                dependums.append(Dependum(
                    depender=kv["depender"], dependee=kv["dependee"],
                    label=kv["label"], kind=kv["kind"],
                    weight=float(kv["weight"]), criticality=float(kv["criticality"]),
                ))
            except ValueError as exc:
                raise NetworkParseError(line_no, str(exc)) from exc
        else:
            raise NetworkParseError(line_no, "content before any section header")
    try:
        return DependencyNetwork(actors=tuple(actors), dependums=tuple(dependums))
    except ValueError as exc:
        raise NetworkParseError(0, str(exc)) from exc


def load_network(path) -> DependencyNetwork:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_network(handle.read())
