"""Comparison policies: RANDOM, a server-only migration agent, and the
layered-auxiliary-graph (LAG) segment heuristic.

All three honor the same storage-feasibility contract as the main policy:
an action never targets a slot without room at selection time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import costs, drl, routing, units
from .placement import SERVER, SWITCH_LOCAL, HostSlot, InstanceId, \
    PlacementConfiguration

POLICY_KINDS = ("random", "server_only_drl", "lag_heuristic", "sr_em")


# --- RANDOM --------------------------------------------------------------------


def random_step(config_prev: PlacementConfiguration, state: drl.StateFeatures,
                catalog, rng: np.random.Generator, net,
                instances: list[InstanceId]) -> dict[InstanceId, HostSlot]:
    """Uniform choice among the slots that can currently accommodate each
    instance, committed sequentially so the joint move stays feasible."""
    labels = drl.full_label_space(net)
    ledger = drl.StorageLedger(net, catalog, config_prev)
    action: dict[InstanceId, HostSlot] = {}
    for inst in instances:
        mask = drl.build_dynamic_filter(state, config_prev, catalog, inst, net,
                                        labels)
        mask &= np.array([ledger.can_host(inst, drl.label_to_slot(lab))
                          for lab in labels])
        active = np.flatnonzero(mask)
        slot = drl.label_to_slot(labels[int(active[rng.integers(len(active))])])
        ledger.commit(inst, slot)
        action[inst] = slot
    return action


def random_rollout(scenario, seed: int) -> list[PlacementConfiguration]:
    net = scenario.network
    rng = np.random.default_rng(seed)
    cfg = scenario.initial_placement
    sequence = [cfg]
    for t in range(1, scenario.epochs):
        state = drl.extract_state(cfg, net, scenario, t)
        action = random_step(cfg, state, scenario.catalog, rng, net,
                             scenario.instances())
        cfg = drl.apply_action(cfg, action, scenario, t)
        sequence.append(cfg)
    return sequence


# --- server-only migration agent (DDQN-CM analogue) ------------------------------


def server_only_train(scenarios, config: drl.TrainingConfig,
                      weights: costs.Weights | None = None, on_step=None):
    """Same machinery as the main agent, restricted to server slots and
    rewarded with the negated sum of chain delays and migration cost."""
    return drl.train(scenarios, config, weights, kind="server_only",
                     on_step=on_step)


# --- LAG segment heuristic --------------------------------------------------------


@dataclass
class LagDecision:
    hosts: dict[InstanceId, HostSlot]
    assignment: dict[tuple[str, int], InstanceId]
    unplaced: set[str] = field(default_factory=set)
    plan: routing.RoutePlan = field(default_factory=routing.RoutePlan)


def _slot_candidates(net, vnf):
    """(slot, deployment cost, unit processing delay, capacity) for servers
    and switch local memories, cheapest first."""
    rows = []
    for m in net.servers:
        rows.append((HostSlot(SERVER, m.id), m.storage_cost * vnf.server_footprint,
                     m.vnf_unit_delay[vnf.id], vnf.server_capacity))
    for s in net.switches:
        rows.append((HostSlot(SWITCH_LOCAL, s.id), s.lm_cost * vnf.switch_footprint,
                     s.lm_unit_delay[vnf.id], vnf.switch_capacity))
    order = {drl.slot_to_label(r[0]): k
             for k, r in enumerate(rows)}
    rows.sort(key=lambda r: (r[1], order[drl.slot_to_label(r[0])]))
    return rows


def lag_step(config_prev: PlacementConfiguration, net, scenario,
             epoch: int) -> LagDecision:
    """Re-place every chain, segment by segment, on servers and switch LMs.

    Nodes that cannot meet the per-VNF latency share (deadline / chain length)
    or carry the chain's bandwidth are pruned; among the rest the cheapest
    deployment wins. Instances are shared until their processing capacity is
    exhausted, then the next free instance of the type is opened; when none is
    left the request is unplaced and counts against acceptance.
    """
    ledger = drl.StorageLedger(net, scenario.catalog, config_prev)
    # instances of a type already pinned to a slot this epoch, with their load
    opened: dict[InstanceId, tuple[HostSlot, float]] = {}
    free_pool: dict[str, list[int]] = {
        t.id: list(range(t.instance_count)) for t in scenario.catalog}
    assignment: dict[tuple[str, int], InstanceId] = {}
    unplaced: set[str] = set()
    plan = routing.RoutePlan()

    def node_bandwidth_ok(node: str, rate: float) -> bool:
        return any(net.link(node, nb).bandwidth
                   - plan.link_load.get(routing.link_key(node, nb), 0.0) >= rate
                   for nb in net.neighbors(node))

    for req in scenario.requests:
        rate = req.traffic_at(epoch)
        volume = units.rate_to_volume_mb(rate)
        bound = req.deadline_at(epoch) / len(req.vnfs)
        trial_assign: dict[tuple[str, int], InstanceId] = {}
        trial_open: list[InstanceId] = []
        trial_load: dict[InstanceId, float] = {}
        ok = True
        for n, fid in enumerate(req.vnfs):
            vnf = scenario.vnf_type(fid)
            placed = False
            for slot, _cost, unit_delay, capacity in _slot_candidates(net, vnf):
                if volume * unit_delay > bound:
                    continue
                if not node_bandwidth_ok(slot.node, rate):
                    continue
                # share an instance already pinned here
                shared = None
                for i in sorted(i for (f, i) in opened if f == fid
                                and opened[(f, i)][0] == slot):
                    load = opened[(fid, i)][1] + trial_load.get((fid, i), 0.0)
                    if load + rate <= capacity:
                        shared = (fid, i)
                        break
                if shared is not None:
                    trial_assign[(req.id, n)] = shared
                    trial_load[shared] = trial_load.get(shared, 0.0) + rate
                    placed = True
                    break
                # open the next free instance of the type at this slot
                pool = free_pool[fid]
                if pool and rate <= capacity and ledger.can_host((fid, pool[0]), slot):
                    inst = (fid, pool.pop(0))
                    ledger.commit(inst, slot)
                    opened[inst] = (slot, 0.0)
                    trial_open.append(inst)
                    trial_assign[(req.id, n)] = inst
                    trial_load[inst] = rate
                    placed = True
                    break
            if not placed:
                ok = False
                break
        if not ok:
            # revert this request's tentative openings and loads
            for inst in trial_open:
                opened.pop(inst)
                free_pool[inst[0]].append(inst[1])
                free_pool[inst[0]].sort()
                ledger.commit(inst, config_prev.instance_host[inst])
            unplaced.add(req.id)
            continue
        for inst, extra in trial_load.items():
            slot, load = opened[inst]
            opened[inst] = (slot, load + extra)
        assignment.update(trial_assign)
        # route this chain's segments against the running link loads
        waypoints = [req.source]
        waypoints += [ledger.location[trial_assign[(req.id, n)]].node
                      for n in range(len(req.vnfs))]
        waypoints.append(req.destination)
        for l, (a, b) in enumerate(zip(waypoints, waypoints[1:])):
            path = routing._dijkstra(net, plan.link_load, a, b)
            plan.paths[(req.id, l)] = path
            for u, v in zip(path, path[1:]):
                k = routing.link_key(u, v)
                plan.link_load[k] = plan.link_load.get(k, 0.0) + rate

    hosts = dict(ledger.location)  # opened instances moved, the rest stay put
    return LagDecision(hosts, assignment, unplaced, plan)


def lag_rollout(scenario, weights: costs.Weights | None = None
                ) -> list[PlacementConfiguration]:
    net = scenario.network
    cfg = scenario.initial_placement
    sequence = [cfg]
    for t in range(1, scenario.epochs):
        decision = lag_step(cfg, net, scenario, t)
        cfg = PlacementConfiguration(decision.hosts, decision.assignment,
                                     decision.plan, t)
        sequence.append(cfg)
    return sequence
