"""Exhaustive placement-sequence minimizer for tiny instances.

Enumerates every per-epoch joint host assignment (assignments to chains are
carried over, routing uses the same deterministic router as the policies),
discards sequences violating storage/uniqueness/assignment/capacity
constraints, and returns the cheapest sequence under the weighted objective,
with sequences that miss any deadline ranked strictly below those meeting
all of them. Intended as ground truth: exponential in instances and epochs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import costs, drl
from .placement import (PlacementConfiguration, apply_action,
                        check_processing_capacity, check_storage)


class BudgetExceededError(RuntimeError):
    def __init__(self, combinations: int, budget: int):
        super().__init__(
            f"enumeration needs {combinations} sequences, over the budget of "
            f"{budget}")
        self.combinations = combinations
        self.budget = budget


@dataclass
class OracleResult:
    sequence: list[PlacementConfiguration]  # initial config first
    objective: float  # summed weighted cost over decision epochs
    deadlines_met: bool

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "deadlines_met": self.deadlines_met,
            "sequence": [c.to_dict() for c in self.sequence],
        }


def sequence_objective(scenario, sequence, weights: costs.Weights
                       ) -> tuple[float, bool]:
    """(summed weighted cost, all deadlines met) over decision epochs."""
    net = scenario.network
    total = 0.0
    met = True
    for t in range(1, len(sequence)):
        cfg, prev = sequence[t], sequence[t - 1]
        total += costs.step_objective(cfg, prev, cfg.routes, net, scenario,
                                      t, weights).weighted_total
        for req in scenario.requests:
            delay = costs.total_delay(cfg, prev, cfg.routes, net, scenario, t,
                                      req, weights.transmission_delay_mode)
            met = met and delay.deadline_met
    return total, met


def enumerate_optimal(scenario, weights: costs.Weights | None = None,
                      budget: int = 10_000_000) -> OracleResult:
    weights = weights or costs.Weights()
    net = scenario.network
    instances = scenario.instances()
    slots = [drl.label_to_slot(lab) for lab in drl.full_label_space(net)]
    decisions = scenario.epochs - 1
    per_epoch = len(slots) ** len(instances)
    combinations = per_epoch ** decisions if decisions > 0 else 1
    if combinations > budget:
        raise BudgetExceededError(combinations, budget)

    best: tuple[int, float] | None = None
    best_sequence: list[PlacementConfiguration] | None = None

    def recurse(prefix: list[PlacementConfiguration], cost: float, missed: bool):
        nonlocal best, best_sequence
        t = len(prefix)
        if t == scenario.epochs:
            key = (1 if missed else 0, cost)
            if best is None or key < best:
                best = key
                best_sequence = list(prefix)
            return
        for combo in itertools.product(slots, repeat=len(instances)):
            action = dict(zip(instances, combo))
            cfg = apply_action(prefix[-1], action, scenario, t)
            if not check_storage(cfg, net, scenario.catalog).ok:
                continue
            if not check_processing_capacity(cfg, scenario, t).ok:
                continue
            step = costs.step_objective(cfg, prefix[-1], cfg.routes, net,
                                        scenario, t, weights).weighted_total
            step_missed = missed
            if not step_missed:
                for req in scenario.requests:
                    delay = costs.total_delay(cfg, prefix[-1], cfg.routes, net,
                                              scenario, t, req,
                                              weights.transmission_delay_mode)
                    if not delay.deadline_met:
                        step_missed = True
                        break
            recurse(prefix + [cfg], cost + step, step_missed)

    recurse([scenario.initial_placement], 0.0, False)
    if best_sequence is None:
        raise RuntimeError("no feasible placement sequence exists")
    return OracleResult(best_sequence, best[1], best[0] == 0)
