"""Domain model for student-subtask collaboration datasets.

Defines the core entities (subtasks, project specs, team rosters,
interaction events), ingestion from CSV files or a single JSON bundle,
canonical serialization, and referential-integrity validation.

On-disk formats
---------------
subtasks.csv      header: project_id,subtask_id,task_type,points
teams.csv         header: project_id,team_id,student_id,is_leader   (is_leader in {0,1})
interactions.csv  header: project_id,team_id,student_id,subtask_id,timestamp
                  (timestamp ISO-8601 or empty; kept as provenance, unused by measures)
dataset.json      one object with keys "projects", "teams", "interactions",
                  each a list of row objects mirroring the CSV fields; an
                  optional "metadata" object carries string provenance tags.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

SUBTASK_FIELDS = ("project_id", "subtask_id", "task_type", "points")
TEAM_FIELDS = ("project_id", "team_id", "student_id", "is_leader")
INTERACTION_FIELDS = ("project_id", "team_id", "student_id", "subtask_id", "timestamp")

# Violation kinds reported by validate_dataset
UNKNOWN_PROJECT = "UnknownProject"
UNKNOWN_TEAM = "UnknownTeam"
UNKNOWN_SUBTASK = "UnknownSubtask"
STUDENT_NOT_IN_ROSTER = "StudentNotInRoster"
LEADER_NOT_MEMBER = "LeaderNotMember"
STUDENT_IN_MULTIPLE_TEAMS = "StudentInMultipleTeams"


class DataFormatError(ValueError):
    """Malformed input data; the message names the file location when known."""


@dataclass(frozen=True)
class Subtask:
    """One teacher-authored unit of work with a type label and point value."""

    subtask_id: str
    project_id: str
    task_type: str
    points: int

    def __post_init__(self):
        if not self.subtask_id:
            raise ValueError("subtask_id must be nonempty")
        if not self.project_id:
            raise ValueError("project_id must be nonempty")
        if not self.task_type:
            raise ValueError("task_type must be nonempty")
        if not isinstance(self.points, int) or self.points < 1:
            raise ValueError(f"points must be a positive integer, got {self.points!r}")


@dataclass(frozen=True)
class ProjectSpec:
    """The task design of one project: an ordered collection of subtasks."""

    project_id: str
    subtasks: tuple[Subtask, ...]
    type_capacities: dict[str, int] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "subtasks", tuple(self.subtasks))
        if not self.subtasks:
            raise ValueError(f"project {self.project_id!r} has no subtasks")
        seen = set()
        caps: dict[str, int] = {}
        for st in self.subtasks:
            if st.project_id != self.project_id:
                raise ValueError(
                    f"subtask {st.subtask_id!r} belongs to project {st.project_id!r},"
                    f" not {self.project_id!r}"
                )
            if st.subtask_id in seen:
                raise ValueError(f"duplicate subtask_id {st.subtask_id!r}")
            seen.add(st.subtask_id)
            caps[st.task_type] = caps.get(st.task_type, 0) + 1
        object.__setattr__(self, "type_capacities", caps)

    @property
    def total_weight(self) -> int:
        return sum(st.points for st in self.subtasks)

    @property
    def subtask_ids(self) -> tuple[str, ...]:
        return tuple(st.subtask_id for st in self.subtasks)

    def subtask(self, subtask_id: str) -> Subtask:
        for st in self.subtasks:
            if st.subtask_id == subtask_id:
                return st
        raise KeyError(subtask_id)


@dataclass(frozen=True)
class TeamRoster:
    """Membership of one team in one project, with an optional assigned leader.

    Leader membership is deliberately not enforced here; validate_dataset
    reports it as a LeaderNotMember violation so that inconsistent data can
    be surfaced instead of rejected at construction.
    """

    team_id: str
    project_id: str
    members: frozenset[str]
    leader: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if not self.members:
            raise ValueError(f"team {self.team_id!r} has no members")


@dataclass(frozen=True)
class InteractionRecord:
    """One raw student-subtask interaction event."""

    project_id: str
    team_id: str
    student_id: str
    subtask_id: str
    timestamp: str | None = None


@dataclass(frozen=True)
class Violation:
    """One referential-integrity breach; violations are data, not errors."""

    kind: str
    message: str


@dataclass(frozen=True)
class Dataset:
    """A full input bundle: project specs, team rosters, interaction events."""

    projects: dict[str, ProjectSpec]
    rosters: tuple[TeamRoster, ...]
    interactions: tuple[InteractionRecord, ...]
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        ordered = tuple(sorted(self.rosters, key=lambda r: (r.project_id, r.team_id)))
        object.__setattr__(self, "rosters", ordered)
        object.__setattr__(self, "interactions", tuple(self.interactions))

    def roster(self, project_id: str, team_id: str) -> TeamRoster | None:
        for r in self.rosters:
            if r.project_id == project_id and r.team_id == team_id:
                return r
        return None

    def project_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.projects))

    def rosters_for_project(self, project_id: str) -> tuple[TeamRoster, ...]:
        return tuple(r for r in self.rosters if r.project_id == project_id)

    def interactions_for(self, project_id: str, team_id: str) -> tuple[InteractionRecord, ...]:
        return tuple(
            i for i in self.interactions
            if i.project_id == project_id and i.team_id == team_id
        )


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _require_format(fmt: str) -> str:
    if fmt not in ("csv", "json"):
        raise DataFormatError(f"unknown format {fmt!r}; expected 'csv' or 'json'")
    return fmt


def _read_csv_rows(path, required: tuple[str, ...]) -> list[tuple[int, dict]]:
    """Read CSV rows as (line_number, row_dict), checking the header."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise DataFormatError(f"{path}: missing column(s) {', '.join(missing)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            rows.append((lineno, row))
    return rows


def _read_json_rows(path, key: str) -> list[tuple[int, dict]]:
    """Read one section of a JSON bundle as (index, row_dict) pairs."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or key not in doc:
        raise DataFormatError(f"{path}: expected a JSON object with a {key!r} key")
    section = doc[key]
    if not isinstance(section, list):
        raise DataFormatError(f"{path}: {key!r} must be a list of row objects")
    return [(i, row) for i, row in enumerate(section)]


def _row_value(row: dict, column: str, where: str) -> str:
    value = row.get(column)
    if value is None or value == "":
        raise DataFormatError(f"{where}: missing value for {column!r}")
    return str(value)


def _parse_points(raw, where: str) -> int:
    try:
        points = int(raw)
    except (TypeError, ValueError):
        raise DataFormatError(f"{where}: points must be an integer, got {raw!r}") from None
    if points < 1:
        raise DataFormatError(f"{where}: points must be positive, got {points}")
    return points


def parse_project_specs(path, fmt: str = "csv") -> dict[str, ProjectSpec]:
    """Parse subtask rows into one ProjectSpec per project, in file order."""
    _require_format(fmt)
    rows = (_read_csv_rows(path, SUBTASK_FIELDS) if fmt == "csv"
            else _read_json_rows(path, "projects"))
    by_project: dict[str, list[Subtask]] = {}
    seen: set[tuple[str, str]] = set()
    for loc, row in rows:
        where = f"{path}:{'line' if fmt == 'csv' else 'projects'}[{loc}]"
        project_id = _row_value(row, "project_id", where)
        subtask_id = _row_value(row, "subtask_id", where)
        task_type = _row_value(row, "task_type", where)
        points = _parse_points(row.get("points"), where)
        if (project_id, subtask_id) in seen:
            raise DataFormatError(f"{where}: duplicate subtask_id {subtask_id!r}")
        seen.add((project_id, subtask_id))
        by_project.setdefault(project_id, []).append(
            Subtask(subtask_id=subtask_id, project_id=project_id,
                    task_type=task_type, points=points)
        )
    return {pid: ProjectSpec(pid, tuple(sts)) for pid, sts in by_project.items()}


def parse_project_spec(path, fmt: str = "csv") -> ProjectSpec:
    """Parse a subtask file that describes exactly one project."""
    specs = parse_project_specs(path, fmt)
    if len(specs) != 1:
        raise DataFormatError(
            f"{path}: expected exactly one project, found {sorted(specs) or 'none'}"
        )
    return next(iter(specs.values()))


def parse_team_rosters(path, fmt: str = "csv") -> tuple[TeamRoster, ...]:
    """Parse team membership rows into rosters, one per (project, team)."""
    _require_format(fmt)
    rows = (_read_csv_rows(path, TEAM_FIELDS) if fmt == "csv"
            else _read_json_rows(path, "teams"))
    members: dict[tuple[str, str], set[str]] = {}
    leaders: dict[tuple[str, str], str] = {}
    order: list[tuple[str, str]] = []
    for loc, row in rows:
        where = f"{path}:{'line' if fmt == 'csv' else 'teams'}[{loc}]"
        project_id = _row_value(row, "project_id", where)
        team_id = _row_value(row, "team_id", where)
        student_id = _row_value(row, "student_id", where)
        raw_leader = row.get("is_leader")
        if str(raw_leader) not in ("0", "1"):
            raise DataFormatError(f"{where}: is_leader must be 0 or 1, got {raw_leader!r}")
        key = (project_id, team_id)
        if key not in members:
            members[key] = set()
            order.append(key)
        members[key].add(student_id)
        if str(raw_leader) == "1":
            if key in leaders and leaders[key] != student_id:
                raise DataFormatError(
                    f"{where}: team {team_id!r} in project {project_id!r} has two leaders"
                )
            leaders[key] = student_id
    return tuple(
        TeamRoster(team_id=tid, project_id=pid,
                   members=frozenset(members[(pid, tid)]),
                   leader=leaders.get((pid, tid)))
        for pid, tid in order
    )


def parse_interactions(path, fmt: str = "csv") -> tuple[InteractionRecord, ...]:
    """Parse interaction events in file order; duplicates are preserved."""
    _require_format(fmt)
    rows = (_read_csv_rows(path, INTERACTION_FIELDS) if fmt == "csv"
            else _read_json_rows(path, "interactions"))
    records = []
    for loc, row in rows:
        where = f"{path}:{'line' if fmt == 'csv' else 'interactions'}[{loc}]"
        ts = row.get("timestamp")
        records.append(InteractionRecord(
            project_id=_row_value(row, "project_id", where),
            team_id=_row_value(row, "team_id", where),
            student_id=_row_value(row, "student_id", where),
            subtask_id=_row_value(row, "subtask_id", where),
            timestamp=str(ts) if ts not in (None, "") else None,
        ))
    return tuple(records)


def load_dataset(path, fmt: str | None = None) -> Dataset:
    """Load a dataset from a JSON bundle file or a directory of the three CSVs."""
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.is_dir() else "json"
    _require_format(fmt)
    if fmt == "json":
        if not path.is_file():
            raise FileNotFoundError(f"dataset bundle not found: {path}")
        projects = parse_project_specs(path, "json")
        rosters = parse_team_rosters(path, "json")
        interactions = parse_interactions(path, "json")
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        metadata = doc.get("metadata", {})
        if not isinstance(metadata, dict):
            raise DataFormatError(f"{path}: 'metadata' must be an object")
        metadata = {str(k): str(v) for k, v in metadata.items()}
    else:
        if not path.is_dir():
            raise FileNotFoundError(f"dataset directory not found: {path}")
        projects = parse_project_specs(path / "subtasks.csv", "csv")
        rosters = parse_team_rosters(path / "teams.csv", "csv")
        interactions = parse_interactions(path / "interactions.csv", "csv")
        metadata = {}
    return Dataset(projects=projects, rosters=rosters,
                   interactions=interactions, metadata=metadata)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _subtask_rows(dataset: Dataset) -> list[dict]:
    rows = []
    for pid in sorted(dataset.projects):
        for st in dataset.projects[pid].subtasks:
            rows.append({"project_id": pid, "subtask_id": st.subtask_id,
                         "task_type": st.task_type, "points": st.points})
    return rows


def _team_rows(dataset: Dataset) -> list[dict]:
    rows = []
    for roster in dataset.rosters:
        for student in sorted(roster.members):
            rows.append({"project_id": roster.project_id, "team_id": roster.team_id,
                         "student_id": student,
                         "is_leader": 1 if student == roster.leader else 0})
    return rows


def _interaction_rows(dataset: Dataset) -> list[dict]:
    return [{"project_id": i.project_id, "team_id": i.team_id,
             "student_id": i.student_id, "subtask_id": i.subtask_id,
             "timestamp": i.timestamp or ""}
            for i in dataset.interactions]


def dataset_to_json(dataset: Dataset) -> str:
    """Serialize to the canonical JSON bundle (deterministic byte output)."""
    doc = {
        "projects": _subtask_rows(dataset),
        "teams": _team_rows(dataset),
        "interactions": _interaction_rows(dataset),
    }
    if dataset.metadata:
        doc["metadata"] = {k: dataset.metadata[k] for k in sorted(dataset.metadata)}
    return json.dumps(doc, indent=2) + "\n"


def write_dataset(dataset: Dataset, out_dir, fmt: str = "csv") -> list[Path]:
    """Write the dataset in canonical form; returns the paths written."""
    _require_format(fmt)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        target = out_dir / "dataset.json"
        target.write_text(dataset_to_json(dataset), encoding="utf-8")
        return [target]
    written = []
    for name, fields, rows in (
        ("subtasks.csv", SUBTASK_FIELDS, _subtask_rows(dataset)),
        ("teams.csv", TEAM_FIELDS, _team_rows(dataset)),
        ("interactions.csv", INTERACTION_FIELDS, _interaction_rows(dataset)),
    ):
        target = out_dir / name
        with open(target, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(fields), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        written.append(target)
    return written


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate_dataset(dataset: Dataset) -> list[Violation]:
    """List every referential-integrity breach; an empty list means valid.

    Pure function: the dataset is never mutated, and violations are returned
    as data rather than raised.
    """
    violations: list[Violation] = []
    roster_index: dict[tuple[str, str], TeamRoster] = {}

    for roster in dataset.rosters:
        roster_index[(roster.project_id, roster.team_id)] = roster
        if roster.project_id not in dataset.projects:
            violations.append(Violation(
                UNKNOWN_PROJECT,
                f"team {roster.team_id!r} references unknown project {roster.project_id!r}",
            ))
        if roster.leader is not None and roster.leader not in roster.members:
            violations.append(Violation(
                LEADER_NOT_MEMBER,
                f"leader {roster.leader!r} of team {roster.team_id!r}"
                f" (project {roster.project_id!r}) is not a member",
            ))

    teams_by_student: dict[tuple[str, str], list[str]] = {}
    for roster in dataset.rosters:
        for student in roster.members:
            teams_by_student.setdefault((roster.project_id, student), []).append(roster.team_id)
    for (pid, student), team_ids in sorted(teams_by_student.items()):
        if len(team_ids) > 1:
            violations.append(Violation(
                STUDENT_IN_MULTIPLE_TEAMS,
                f"student {student!r} belongs to teams {sorted(team_ids)}"
                f" in project {pid!r}",
            ))

    known_subtasks = {pid: set(spec.subtask_ids) for pid, spec in dataset.projects.items()}
    for idx, rec in enumerate(dataset.interactions):
        ident = (f"interaction[{idx}] ({rec.student_id!r} on {rec.subtask_id!r},"
                 f" team {rec.team_id!r}, project {rec.project_id!r})")
        if rec.project_id not in dataset.projects:
            violations.append(Violation(
                UNKNOWN_PROJECT, f"{ident}: unknown project"))
        elif rec.subtask_id not in known_subtasks[rec.project_id]:
            violations.append(Violation(
                UNKNOWN_SUBTASK, f"{ident}: unknown subtask"))
        roster = roster_index.get((rec.project_id, rec.team_id))
        if roster is None:
            violations.append(Violation(
                UNKNOWN_TEAM, f"{ident}: no roster for this team"))
        elif rec.student_id not in roster.members:
            violations.append(Violation(
                STUDENT_NOT_IN_ROSTER, f"{ident}: student not on this team"))
    return violations
