"""Orchestration from a validated dataset to a full report bundle."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from . import __version__, measures, roles, stats
from .model import Dataset, dataset_to_json
from .report import ReportBundle
from .roles import ContributionProfile, Thresholds


@dataclass(frozen=True)
class StatsOptions:
    """Test configuration; the defaults match the analysis this tool reproduces."""

    mwu_tails: str = "one"
    mwu_method: str = "normal"
    continuity_correction: bool = False
    barnard_tails: str = "two"
    barnard_grid: float = stats.DEFAULT_GRID_RESOLUTION


def team_networks(dataset: Dataset) -> dict[tuple[str, str], measures.BipartiteNetwork]:
    """Build one bipartite network per (project, team), keyed accordingly."""
    nets = {}
    for roster in dataset.rosters:
        spec = dataset.projects[roster.project_id]
        nets[(roster.project_id, roster.team_id)] = measures.build_network(
            roster, spec, dataset.interactions_for(roster.project_id, roster.team_id))
    return nets


def project_profiles(dataset: Dataset,
                     thresholds: Thresholds = Thresholds(),
                     ) -> dict[str, tuple[ContributionProfile, ...]]:
    """Profile every roster member, grouped by project, ordered by (team, student)."""
    nets = team_networks(dataset)
    out: dict[str, list[ContributionProfile]] = {}
    for roster in dataset.rosters:
        spec = dataset.projects[roster.project_id]
        net = nets[(roster.project_id, roster.team_id)]
        out.setdefault(roster.project_id, []).extend(
            roles.profile_team(net, spec, roster, thresholds))
    return {pid: tuple(profs) for pid, profs in out.items()}


def leader_split(profiles, measure: str) -> tuple[list[float], list[float]]:
    """Split one project's profiles into (leader values, non-leader values)."""
    if measure not in ("quantity", "heterogeneity"):
        raise ValueError(f"measure must be 'quantity' or 'heterogeneity', got {measure!r}")
    leaders = [getattr(p, measure) for p in profiles if p.is_assigned_leader]
    others = [getattr(p, measure) for p in profiles if not p.is_assigned_leader]
    return leaders, others


def dataset_digest(dataset: Dataset) -> str:
    return hashlib.sha256(dataset_to_json(dataset).encode("utf-8")).hexdigest()


def _metadata(thresholds: Thresholds, options: StatsOptions,
              input_digests: dict[str, str]) -> dict:
    return {
        "tool": "collabnet",
        "version": __version__,
        "thresholds": {
            "quantity_cut": thresholds.quantity_cut,
            "heterogeneity_cut": thresholds.heterogeneity_cut,
            "boundary_rule": thresholds.boundary_rule,
        },
        "stats_options": {
            "mwu_tails": options.mwu_tails,
            "mwu_method": options.mwu_method,
            "continuity_correction": options.continuity_correction,
            "barnard_tails": options.barnard_tails,
            "barnard_grid": options.barnard_grid,
        },
        "inputs": {name: input_digests[name] for name in sorted(input_digests)},
    }


def run_analysis(dataset: Dataset, thresholds: Thresholds = Thresholds(),
                 options: StatsOptions = StatsOptions(),
                 input_digests: dict[str, str] | None = None) -> ReportBundle:
    """Run the full pipeline: profiles, leader tests, transitions, Barnard.

    Transitions are computed between consecutive projects in sorted id
    order. The Mann-Whitney leader comparison is skipped for a project
    whose leader or non-leader group is empty; Barnard is skipped when a
    contingency margin is zero.
    """
    if input_digests is None:
        input_digests = {"dataset": dataset_digest(dataset)}
    profiles = project_profiles(dataset, thresholds)

    bundle = ReportBundle(
        metadata=_metadata(thresholds, options, input_digests),
        profiles=profiles,
    )
    for pid in sorted(profiles):
        for measure_name in ("quantity", "heterogeneity"):
            leaders, others = leader_split(profiles[pid], measure_name)
            if leaders and others:
                bundle.mwu[f"{pid}/{measure_name}"] = stats.mann_whitney_u(
                    leaders, others,
                    tails=options.mwu_tails,
                    continuity_correction=options.continuity_correction,
                    method=options.mwu_method,
                )

    pids = dataset.project_ids()
    for before, after in zip(pids, pids[1:]):
        key = f"{before}->{after}"
        transitions = roles.role_transitions(profiles[before], profiles[after])
        dropouts, joiners = roles.unpaired_students(profiles[before], profiles[after])
        bundle.transitions[key] = transitions
        bundle.unpaired[key] = {"dropouts": dropouts, "joiners": joiners}
        table = roles.build_contingency(transitions)
        bundle.contingency[key] = table
        if table.a + table.b >= 1 and table.c + table.d >= 1:
            bundle.barnard[key] = stats.barnard_test(
                table, tails=options.barnard_tails,
                grid_resolution=options.barnard_grid,
            )
    return bundle
