"""Monte-Carlo propagation of estimate uncertainty.

Samples carrying estimates have their deltas redrawn per run; everything else
stays fixed. RNG algorithm (versioned with the report format): Philox4x64
keyed by [seed, run_index], so runs are independent substreams and parallel
or serial execution would merge to identical summaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .model import DomainError, Estimate, EstimateKind, GoalGraph
from .propagation import Scenario, propagate

# Bump when the draw order or the generator family changes.
RNG_ALGORITHM = "philox4x64-keyed/1"


@dataclass(frozen=True)
class Sampler:
    """Deterministic draw rule for one estimate; feed it a seeded generator."""

    estimate: Estimate

    def draw(self, gen: np.random.Generator) -> float:
        kind = self.estimate.kind
        values = self.estimate.values
        if kind is EstimateKind.POINT:
            return values[0]
        if kind is EstimateKind.INTERVAL:
            low, high = values
            if low == high:
                return low
            return float(gen.uniform(low, high))
        left, mode, right = values
        if left == right:
            return left
        return float(gen.triangular(left, mode, right))

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        return np.array([self.draw(gen) for _ in range(size)], dtype=float)


def make_sampler(estimate: Estimate) -> Sampler:
    """Sampler for an estimate: point is constant, interval uniform,
    worst/likely/best triangular."""
    return Sampler(estimate=estimate)


def run_generator(seed: int, run_index: int) -> np.random.Generator:
    """Independent substream for one run (distinct Philox keys never overlap)."""
    key = np.array([seed % (1 << 64), run_index % (1 << 64)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class McNodeStats:
    mean: float
    stddev: float
    p05: float
    p50: float
    p95: float
    p_satisfied: float | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "mean": self.mean,
            "stddev": self.stddev,
            "p05": self.p05,
            "p50": self.p50,
            "p95": self.p95,
            "p_satisfied": self.p_satisfied,
        }


@dataclass(frozen=True)
class McSummary:
    runs: int
    seed: int
    profile: str
    rng: str
    nodes: Mapping[str, McNodeStats]

    def to_dict(self) -> dict[str, Any]:
        return {
            "runs": self.runs,
            "seed": self.seed,
            "profile": self.profile,
            "rng": self.rng,
            "nodes": {k: v.to_dict() for k, v in self.nodes.items()},
        }


def _stats(values: np.ndarray) -> tuple[float, float, float, float, float]:
    if values.min() == values.max():
        # Degenerate series: report the exact propagated value, not a
        # floating-point mean of identical numbers.
        value = float(values[0])
        return value, 0.0, value, value, value
    mean = float(values.mean())
    stddev = float(values.std())
    p05, p50, p95 = (float(q) for q in np.quantile(values, [0.05, 0.5, 0.95]))
    return mean, stddev, p05, p50, p95


def monte_carlo(graph: GoalGraph, scenario: Scenario, runs: int, seed: int) -> McSummary:
    """Propagate ``runs`` redraws of all estimate-carrying deltas.

    Per-node summary statistics plus, for objective-bearing goals, the
    fraction of runs in which the objective held. Identical inputs give
    byte-identical reports.
    """
    if runs < 1:
        raise DomainError(f"runs must be >= 1, got {runs}")
    # Draw order is fixed: links by id, samples by position within the
    # scenario profile's list.
    drawn: list[tuple[str, int, Sampler]] = []
    for link in sorted(graph.links, key=lambda l: l.id):
        entries = link.samples.get(scenario.profile, ())
        for index, sample in enumerate(entries):
            if sample.estimate is not None:
                drawn.append((link.id, index, make_sampler(sample.estimate)))

    levels: dict[str, list[float]] = {}
    satisfied_counts: dict[str, int] = {}
    objective_ids = {g.id for g in graph.objective_goals()}
    for run_index in range(runs):
        gen = run_generator(seed, run_index)
        overrides = {
            (link_id, index): sampler.draw(gen) for link_id, index, sampler in drawn
        }
        result = propagate(graph, scenario, overrides)
        for node_id, outcome in result.nodes.items():
            if outcome.attained_level is not None:
                levels.setdefault(node_id, []).append(outcome.attained_level)
            if node_id in objective_ids and outcome.satisfied:
                satisfied_counts[node_id] = satisfied_counts.get(node_id, 0) + 1

    nodes: dict[str, McNodeStats] = {}
    for node_id in sorted(levels):
        mean, stddev, p05, p50, p95 = _stats(np.asarray(levels[node_id]))
        p_satisfied = None
        if node_id in objective_ids:
            p_satisfied = satisfied_counts.get(node_id, 0) / runs
        nodes[node_id] = McNodeStats(
            mean=mean, stddev=stddev, p05=p05, p50=p50, p95=p95, p_satisfied=p_satisfied
        )
    return McSummary(
        runs=runs, seed=seed, profile=scenario.profile, rng=RNG_ALGORITHM, nodes=nodes
    )
