"""Deterministic exporters: DOT network drawings, quadrant SVG charts, and
the machine-readable report bundle.

Exporters only format numbers produced by the measures, roles, and stats
modules; no arithmetic happens here. Fixed inputs yield byte-identical
output, so all three formats are safe to golden-file in tests.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .measures import BipartiteNetwork
from .model import ProjectSpec
from .roles import ContingencyTable2x2, ContributionProfile, RoleTransition, Thresholds
from .stats import BarnardResult, MwuResult

SCHEMA_VERSION = 1

_PROJECT_COLORS = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b")
_VIEW = 600
_MARGIN = 50
_PLOT = _VIEW - 2 * _MARGIN


def _dot_quote(identifier: str) -> str:
    escaped = identifier.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _dot_label(*lines: str) -> str:
    escaped = [s.replace("\\", "\\\\").replace('"', '\\"') for s in lines]
    return '"' + "\\n".join(escaped) + '"'


def export_network_dot(net: BipartiteNetwork, profiles: Sequence[ContributionProfile],
                       spec: ProjectSpec) -> str:
    """Render one team's bipartite network as a DOT graph.

    Students sit on the left rank (ellipses, leaders double-ringed), subtasks
    on the right (boxes annotated with type and points). The project spec
    supplies the subtask annotations.
    """
    if spec.project_id != net.project_id:
        raise ValueError(
            f"spec project {spec.project_id!r} does not match network {net.project_id!r}"
        )
    by_student = {p.student_id: p for p in profiles}
    missing = [s for s in net.student_nodes if s not in by_student]
    if missing:
        raise ValueError(f"profiles missing for students {missing}")

    lines = [f"graph {_dot_quote(f'collab_{net.project_id}_{net.team_id}')} {{"]
    lines.append("  rankdir=LR;")
    lines.append('  node [fontsize=10, fontname="Helvetica"];')
    lines.append("  { rank=source;")
    for student in net.student_nodes:
        attrs = ["shape=ellipse", 'style=filled']
        if by_student[student].is_assigned_leader:
            attrs += ['fillcolor="#ffd27f"', "peripheries=2",
                      f"label={_dot_label(student, '(leader)')}"]
        else:
            attrs += ['fillcolor="#e8e8e8"', f"label={_dot_label(student)}"]
        lines.append(f"    {_dot_quote(student)} [{', '.join(attrs)}];")
    lines.append("  }")
    lines.append("  { rank=sink;")
    for sid in net.subtask_nodes:
        st = spec.subtask(sid)
        label = _dot_label(sid, f"{st.task_type} ({st.points})")
        lines.append(f"    {_dot_quote(sid)} [shape=box, label={label}];")
    lines.append("  }")
    for student, sid in sorted(net.edges):
        lines.append(f"  {_dot_quote(student)} -- {_dot_quote(sid)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _x(q: float) -> str:
    return f"{_MARGIN + q * _PLOT:.2f}"


def _y(h: float) -> str:
    return f"{_VIEW - _MARGIN - h * _PLOT:.2f}"


def _star_points(q: float, h: float, radius: float = 8.0) -> str:
    cx = _MARGIN + q * _PLOT
    cy = _VIEW - _MARGIN - h * _PLOT
    pts = []
    for k in range(10):
        r = radius if k % 2 == 0 else radius * 0.45
        angle = -math.pi / 2 + k * math.pi / 5
        pts.append(f"{cx + r * math.cos(angle):.2f},{cy + r * math.sin(angle):.2f}")
    return " ".join(pts)


def export_quadrant_svg(profiles: Sequence[ContributionProfile],
                        thresholds: Thresholds = Thresholds()) -> str:
    """Render profiles as a quantity-heterogeneity scatter on the unit square.

    Dashed lines mark the classification cuts, leaders draw as stars and
    other members as circles, and each quadrant is labeled with its role.
    With profiles from exactly two projects, dashed arrows connect each
    paired student's positions.
    """
    profiles = list(profiles)
    if not profiles:
        raise ValueError("profiles must be nonempty")
    project_ids = sorted({p.project_id for p in profiles})
    color = {pid: _PROJECT_COLORS[i % len(_PROJECT_COLORS)]
             for i, pid in enumerate(project_ids)}

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_VIEW}" height="{_VIEW}"'
        f' viewBox="0 0 {_VIEW} {_VIEW}">',
        f'  <rect x="0" y="0" width="{_VIEW}" height="{_VIEW}" fill="white"/>',
        f'  <rect x="{_MARGIN}" y="{_MARGIN}" width="{_PLOT}" height="{_PLOT}"'
        ' fill="none" stroke="black" stroke-width="1"/>',
    ]
    # cut lines
    out.append(f'  <line x1="{_x(thresholds.quantity_cut)}" y1="{_y(0)}"'
               f' x2="{_x(thresholds.quantity_cut)}" y2="{_y(1)}"'
               ' stroke="grey" stroke-width="1" stroke-dasharray="6,4"/>')
    out.append(f'  <line x1="{_x(0)}" y1="{_y(thresholds.heterogeneity_cut)}"'
               f' x2="{_x(1)}" y2="{_y(thresholds.heterogeneity_cut)}"'
               ' stroke="grey" stroke-width="1" stroke-dasharray="6,4"/>')
    # axis labels and ticks
    out.append(f'  <text x="{_VIEW / 2:.2f}" y="{_VIEW - 12}" text-anchor="middle"'
               ' font-size="14">quantity of contribution</text>')
    out.append(f'  <text x="16" y="{_VIEW / 2:.2f}" text-anchor="middle" font-size="14"'
               f' transform="rotate(-90 16 {_VIEW / 2:.2f})">heterogeneity of contribution</text>')
    for v in (0.0, 0.5, 1.0):
        out.append(f'  <text x="{_x(v)}" y="{_VIEW - _MARGIN + 18}" text-anchor="middle"'
                   f' font-size="11">{v:g}</text>')
        out.append(f'  <text x="{_MARGIN - 8}" y="{_y(v)}" text-anchor="end"'
                   f' font-size="11" dominant-baseline="middle">{v:g}</text>')
    # quadrant labels
    quadrants = (
        (0.75, 0.97, "comprehensive contributor"),
        (0.75, 0.03, "specialized contributor"),
        (0.25, 0.97, "versatile participant"),
        (0.25, 0.03, "free rider"),
    )
    for qx, qy, name in quadrants:
        out.append(f'  <text x="{_x(qx)}" y="{_y(qy)}" text-anchor="middle"'
                   f' font-size="12" fill="#555555">{name}</text>')
    # legend
    for i, pid in enumerate(project_ids):
        ly = _MARGIN + 16 + 18 * i
        out.append(f'  <circle cx="{_MARGIN + 14}" cy="{ly}" r="5" fill="{color[pid]}"/>')
        out.append(f'  <text x="{_MARGIN + 26}" y="{ly + 4}" font-size="12">{pid}</text>')
    out.append(f'  <text x="{_MARGIN + 26}" y="{_MARGIN + 16 + 18 * len(project_ids) + 4}"'
               ' font-size="12">star = assigned leader</text>')

    # transition arrows between exactly two projects
    if len(project_ids) == 2:
        first = {p.student_id: p for p in profiles if p.project_id == project_ids[0]}
        second = {p.student_id: p for p in profiles if p.project_id == project_ids[1]}
        for student in sorted(first.keys() & second.keys()):
            p1, p2 = first[student], second[student]
            if (p1.quantity, p1.heterogeneity) == (p2.quantity, p2.heterogeneity):
                continue
            out.append(f'  <line x1="{_x(p1.quantity)}" y1="{_y(p1.heterogeneity)}"'
                       f' x2="{_x(p2.quantity)}" y2="{_y(p2.heterogeneity)}"'
                       ' stroke="#999999" stroke-width="1" stroke-dasharray="3,3"'
                       ' marker-end="url(#arrow)"/>')

    # marker definition (referenced above, harmless when unused)
    out.insert(1, '  <defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5"'
                  ' markerWidth="6" markerHeight="6" orient="auto-start-reverse">'
                  '<path d="M 0 0 L 10 5 L 0 10 z" fill="#999999"/></marker></defs>')

    for p in sorted(profiles, key=lambda p: (p.project_id, p.student_id)):
        fill = color[p.project_id]
        if p.is_assigned_leader:
            out.append(f'  <polygon points="{_star_points(p.quantity, p.heterogeneity)}"'
                       f' fill="{fill}" stroke="black" stroke-width="0.8"/>')
        else:
            out.append(f'  <circle cx="{_x(p.quantity)}" cy="{_y(p.heterogeneity)}" r="5"'
                       f' fill="{fill}" stroke="black" stroke-width="0.5"/>')
        out.append(f'  <text x="{float(_x(p.quantity)) + 8:.2f}"'
                   f' y="{float(_y(p.heterogeneity)) + 4:.2f}"'
                   f' font-size="10">{p.student_id}</text>')

    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Report bundle
# ---------------------------------------------------------------------------

@dataclass
class ReportBundle:
    """Everything one analysis run produced, plus the metadata to audit it."""

    metadata: dict
    profiles: dict[str, tuple[ContributionProfile, ...]]
    transitions: dict[str, tuple[RoleTransition, ...]] = field(default_factory=dict)
    unpaired: dict[str, dict[str, tuple[str, ...]]] = field(default_factory=dict)
    contingency: dict[str, ContingencyTable2x2] = field(default_factory=dict)
    mwu: dict[str, MwuResult] = field(default_factory=dict)
    barnard: dict[str, BarnardResult] = field(default_factory=dict)


def _profile_dict(p: ContributionProfile) -> dict:
    return {
        "student_id": p.student_id,
        "team_id": p.team_id,
        "quantity": p.quantity,
        "heterogeneity": p.heterogeneity,
        "is_assigned_leader": p.is_assigned_leader,
        "role": p.role.value,
    }


def _transition_dict(t: RoleTransition) -> dict:
    return {
        "student_id": t.student_id,
        "role_before": t.role_before.value,
        "role_after": t.role_after.value,
        "leadership_changed": t.leadership_changed,
        "role_changed": t.role_changed,
    }


def _contingency_dict(table: ContingencyTable2x2) -> dict:
    return {
        "a": table.a, "b": table.b, "c": table.c, "d": table.d,
        "leadership_changes": table.leadership_changes,
        "role_changes": table.role_changes,
        "n": table.n,
    }


def report_to_json(bundle: ReportBundle) -> str:
    """Serialize the bundle with stable key ordering (deterministic bytes)."""
    doc: dict = {"schema_version": SCHEMA_VERSION, "metadata": bundle.metadata}
    doc["profiles"] = {
        pid: [_profile_dict(p) for p in bundle.profiles[pid]]
        for pid in sorted(bundle.profiles)
    }
    doc["mann_whitney"] = {
        key: bundle.mwu[key].to_dict() for key in sorted(bundle.mwu)
    }
    transitions: dict = {}
    for key in sorted(bundle.transitions):
        entry: dict = {
            "pairs": [_transition_dict(t) for t in bundle.transitions[key]],
        }
        if key in bundle.unpaired:
            entry["dropouts"] = list(bundle.unpaired[key]["dropouts"])
            entry["joiners"] = list(bundle.unpaired[key]["joiners"])
        if key in bundle.contingency:
            entry["contingency"] = _contingency_dict(bundle.contingency[key])
        if key in bundle.barnard:
            entry["barnard"] = bundle.barnard[key].to_dict()
        transitions[key] = entry
    doc["transitions"] = transitions
    return json.dumps(doc, indent=2) + "\n"


def write_report_json(bundle: ReportBundle, path) -> Path:
    """Write report.json; returns the path written."""
    path = Path(path)
    path.write_text(report_to_json(bundle), encoding="utf-8")
    return path
