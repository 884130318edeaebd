"""Objective components: IT/bandwidth/migration/programming costs and the
per-chain delay terms.

Conventions (see :mod:`sfcem.units`): storage in MB, rates in Mbps, delays in
ms, prices per MB. A rate becomes a per-epoch traffic volume through one
normalized slot. Migration between servers that are not directly linked uses
the cheapest path's summed per-MB cost and its bottleneck bandwidth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import units
from .placement import SERVER, SWITCH_EXTERNAL, SWITCH_LOCAL, PlacementConfiguration
from .routing import RoutePlan

COST_FLOOR = 1e-6

PER_UNIT = "per_unit"
PROPAGATION_ONLY = "propagation_only"


class EvaluationError(RuntimeError):
    pass


@dataclass
class Weights:
    """Objective balance (alpha scales usage cost, beta reconfiguration cost)."""

    alpha: float = 1.0
    beta: float = 1.0
    transmission_delay_mode: str = PER_UNIT

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha/beta: weights must be >= 0")
        if self.transmission_delay_mode not in (PER_UNIT, PROPAGATION_ONLY):
            raise ValueError(
                f"transmission_delay_mode: unknown mode {self.transmission_delay_mode!r}")


@dataclass
class CostBreakdown:
    it_cost: float
    bandwidth_cost: float
    migration_cost: float
    programming_cost: float
    reconfiguration_cost: float
    weighted_total: float


@dataclass
class DelayBreakdown:
    migration_delay: float
    programming_delay: float
    reconfig_delay: float
    processing_delay: float
    transmission_delay: float
    total: float
    deadline_met: bool


# --- cost terms ---------------------------------------------------------------


def it_resource_cost(config: PlacementConfiguration, net, catalog) -> float:
    """Storage rent for every deployed instance at its current slot."""
    types = {t.id: t for t in catalog}
    total = 0.0
    for (f, _i), slot in sorted(config.instance_host.items()):
        t = types[f]
        if slot.kind == SERVER:
            total += net.server(slot.node).storage_cost * t.server_footprint
        elif slot.kind == SWITCH_LOCAL:
            total += net.switch(slot.node).lm_cost * t.switch_footprint
        else:
            total += net.switch(slot.node).em_cost * t.switch_footprint
    return total


def bandwidth_cost(plan: RoutePlan, net, scenario, epoch: int) -> float:
    """Per-link transfer charges for every routed chain volume."""
    by_id = {r.id: r for r in scenario.requests}
    total = 0.0
    for (q, _l), path in sorted(plan.paths.items()):
        volume = units.rate_to_volume_mb(by_id[q].traffic_at(epoch))
        for u, v in zip(path, path[1:]):
            total += volume * net.link(u, v).unit_cost
    return total


def _moved_between_servers(config_t, config_prev, inst):
    """(u, v) if ``inst`` moved server u -> server v, else None."""
    now = config_t.instance_host.get(inst)
    before = config_prev.instance_host.get(inst)
    if (now is None or before is None or now.kind != SERVER
            or before.kind != SERVER or now.node == before.node):
        return None
    return before.node, now.node


def _newly_programmed(config_t, config_prev, inst):
    """Target switch id if ``inst`` now sits on a switch it was not on before
    (coming from a server or from a different switch), else None."""
    now = config_t.instance_host.get(inst)
    before = config_prev.instance_host.get(inst)
    if now is None or before is None or not now.on_switch:
        return None
    if before.on_switch and before.node == now.node:
        return None  # LM<->EM inside one switch is not reprogrammed
    return now.node


def migration_cost(config_t: PlacementConfiguration,
                   config_prev: PlacementConfiguration, net, catalog) -> float:
    """Volume charges for instances that moved between servers."""
    types = {t.id: t for t in catalog}
    total = 0.0
    for inst in sorted(config_t.instance_host):
        moved = _moved_between_servers(config_t, config_prev, inst)
        if moved is None:
            continue
        _path, cost_per_mb, _bw = net.transfer_route(*moved)
        total += types[inst[0]].server_footprint * cost_per_mb
    return total


def programming_cost(config_t: PlacementConfiguration,
                     config_prev: PlacementConfiguration, net, catalog) -> float:
    """Controller traffic charges for switches that gained an instance."""
    types = {t.id: t for t in catalog}
    total = 0.0
    for inst in sorted(config_t.instance_host):
        sid = _newly_programmed(config_t, config_prev, inst)
        if sid is None:
            continue
        total += types[inst[0]].programming_traffic * net.switch(sid).controller_cost
    return total


def step_objective(config_t: PlacementConfiguration,
                   config_prev: PlacementConfiguration, plan: RoutePlan,
                   net, scenario, epoch: int, weights: Weights) -> CostBreakdown:
    it = it_resource_cost(config_t, net, scenario.catalog)
    bw = bandwidth_cost(plan, net, scenario, epoch)
    mig = migration_cost(config_t, config_prev, net, scenario.catalog)
    prog = programming_cost(config_t, config_prev, net, scenario.catalog)
    return CostBreakdown(
        it_cost=it,
        bandwidth_cost=bw,
        migration_cost=mig,
        programming_cost=prog,
        reconfiguration_cost=mig + prog,
        weighted_total=weights.alpha * (it + bw) + weights.beta * (mig + prog),
    )


# --- delay terms --------------------------------------------------------------


def migration_delay(config_t: PlacementConfiguration,
                    config_prev: PlacementConfiguration, net, catalog,
                    request) -> float:
    """Slowest server-to-server move among the chain's own instances (moves
    run in parallel, so the max counts, not the sum)."""
    types = {t.id: t for t in catalog}
    worst = 0.0
    for n in range(len(request.vnfs)):
        inst = config_t.assignment.get((request.id, n))
        if inst is None or config_prev.assignment.get((request.id, n)) != inst:
            continue
        moved = _moved_between_servers(config_t, config_prev, inst)
        if moved is None:
            continue
        _path, _cost, bottleneck = net.transfer_route(*moved)
        worst = max(worst, units.transfer_time_ms(
            types[inst[0]].server_footprint, bottleneck))
    return worst


def programming_delay(config_t: PlacementConfiguration,
                      config_prev: PlacementConfiguration, net, catalog,
                      request) -> float:
    """Slowest controller push among the chain's newly programmed switches."""
    types = {t.id: t for t in catalog}
    worst = 0.0
    for n in range(len(request.vnfs)):
        inst = config_t.assignment.get((request.id, n))
        if inst is None or config_prev.assignment.get((request.id, n)) != inst:
            continue
        sid = _newly_programmed(config_t, config_prev, inst)
        if sid is None:
            continue
        worst = max(worst, units.transfer_time_ms(
            types[inst[0]].programming_traffic, net.switch(sid).controller_bandwidth))
    return worst


def em_unit_delay(vnf, switch) -> float:
    """Per-MB processing delay from external memory.

    The flow entries are fetched in ``ceil(footprint / rdma_table)`` RDMA
    rounds; every round pays the local-memory unit delay plus one RDMA access.
    """
    accesses = math.ceil(vnf.switch_footprint / switch.rdma_table_capacity)
    return accesses * (switch.lm_unit_delay[vnf.id] + switch.rdma_access_delay)


def processing_delay(config: PlacementConfiguration, scenario, epoch: int,
                     request) -> float:
    """Summed per-VNF processing time of the chain's traffic volume."""
    volume = units.rate_to_volume_mb(request.traffic_at(epoch))
    net = scenario.network
    total = 0.0
    for n, fid in enumerate(request.vnfs):
        inst = config.assignment.get((request.id, n))
        slot = config.instance_host.get(inst) if inst is not None else None
        if slot is None:
            raise EvaluationError(f"chain position {request.id}/{n} unassigned")
        t = scenario.vnf_type(fid)
        if slot.kind == SERVER:
            unit = net.server(slot.node).vnf_unit_delay[fid]
        elif slot.kind == SWITCH_LOCAL:
            unit = net.switch(slot.node).lm_unit_delay[fid]
        else:
            unit = em_unit_delay(t, net.switch(slot.node))
        total += volume * unit
    return total


def transmission_delay(plan: RoutePlan, net, scenario, epoch: int, request,
                       mode: str = PER_UNIT) -> float:
    """Summed link delays along the chain's routed paths.

    ``per_unit`` multiplies each link delay by the chain's traffic volume (the
    literal delay form); ``propagation_only`` sums the raw link delays.
    """
    volume = units.rate_to_volume_mb(request.traffic_at(epoch))
    scale = volume if mode == PER_UNIT else 1.0
    total = 0.0
    for u, v in plan.edges_of(request.id):
        total += scale * net.link(u, v).unit_delay
    return total


def total_delay(config_t: PlacementConfiguration,
                config_prev: PlacementConfiguration, plan: RoutePlan,
                net, scenario, epoch: int, request,
                mode: str = PER_UNIT) -> DelayBreakdown:
    """End-to-end chain delay; reconfiguration runs in parallel so it adds the
    max of migration and programming, not their sum."""
    mig = migration_delay(config_t, config_prev, net, scenario.catalog, request)
    prog = programming_delay(config_t, config_prev, net, scenario.catalog, request)
    reconf = max(mig, prog)
    proc = processing_delay(config_t, scenario, epoch, request)
    trans = transmission_delay(plan, net, scenario, epoch, request, mode)
    total = reconf + proc + trans
    return DelayBreakdown(
        migration_delay=mig,
        programming_delay=prog,
        reconfig_delay=reconf,
        processing_delay=proc,
        transmission_delay=trans,
        total=total,
        deadline_met=total < request.deadline_at(epoch),
    )
