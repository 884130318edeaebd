"""Load-balanced chain routing and link-side constraint checks.

Each chain is routed segment by segment (source -> first host -> ... -> last
host -> destination) with Dijkstra, weighting every link by its accumulated
load in Mbps plus one, so empty networks fall back to hop count. Segments are
processed in ascending request id then segment index, and ties between
equal-weight paths go to the lexicographically smallest node sequence, which
makes plans reproducible.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field

LinkKey = tuple[str, str]


class RoutingError(RuntimeError):
    pass


def link_key(u: str, v: str) -> LinkKey:
    return (u, v) if u <= v else (v, u)


@dataclass
class RoutePlan:
    """Routed node sequences per (request, segment) plus aggregate link loads."""

    paths: dict[tuple[str, int], tuple[str, ...]] = field(default_factory=dict)
    link_load: dict[LinkKey, float] = field(default_factory=dict)

    def request_ids(self) -> list[str]:
        return sorted({q for q, _ in self.paths})

    def segments_of(self, request_id: str) -> list[tuple[str, ...]]:
        idx = sorted(l for q, l in self.paths if q == request_id)
        return [self.paths[(request_id, l)] for l in idx]

    def edges_of(self, request_id: str) -> list[tuple[str, str]]:
        edges = []
        for path in self.segments_of(request_id):
            edges.extend(zip(path, path[1:]))
        return edges

    def to_dict(self) -> dict:
        return {
            "paths": {f"{q}/{l}": list(p) for (q, l), p in sorted(self.paths.items())},
            "link_load": {f"{u}|{v}": w for (u, v), w in sorted(self.link_load.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, doc: dict) -> "RoutePlan":
        paths = {}
        for key, p in doc["paths"].items():
            q, l = key.rsplit("/", 1)
            paths[(q, int(l))] = tuple(p)
        loads = {tuple(k.split("|")): w for k, w in doc["link_load"].items()}
        return cls(paths, loads)


def _dijkstra(net, loads: dict[LinkKey, float], src: str, dst: str) -> tuple[str, ...]:
    """Shortest path under weight = accumulated load + 1 per link."""
    if src == dst:
        return ()
    heap: list[tuple[float, tuple[str, ...]]] = [(0.0, (src,))]
    done: set[str] = set()
    while heap:
        dist, path = heapq.heappop(heap)
        node = path[-1]
        if node == dst:
            return path
        if node in done:
            continue
        done.add(node)
        for nxt in net.neighbors(node):
            if nxt in done:
                continue
            w = loads.get(link_key(node, nxt), 0.0) + 1.0
            heapq.heappush(heap, (dist + w, path + (nxt,)))
    raise RoutingError(f"no route from {src} to {dst}")


def route_chain_links(net, config, scenario, epoch: int,
                      requests=None) -> RoutePlan:
    """Map every virtual link of every chain to a substrate path.

    ``requests`` narrows routing to a subset (used by policies that leave
    some chains unplaced); by default all scenario requests are routed and
    every chain position must be assigned and hosted.
    """
    if requests is None:
        requests = scenario.requests
    plan = RoutePlan()
    for req in requests:
        rate = req.traffic_at(epoch)
        waypoints = [req.source]
        for n in range(len(req.vnfs)):
            slot = config.instance_host.get(config.assignment.get((req.id, n)))
            if slot is None:
                raise RoutingError(f"chain position {req.id}/{n} has no host")
            waypoints.append(slot.node)
        waypoints.append(req.destination)
        for l, (a, b) in enumerate(zip(waypoints, waypoints[1:])):
            path = _dijkstra(net, plan.link_load, a, b)
            plan.paths[(req.id, l)] = path
            for u, v in zip(path, path[1:]):
                k = link_key(u, v)
                plan.link_load[k] = plan.link_load.get(k, 0.0) + rate
    return plan


# --- checks ------------------------------------------------------------------


def check_flow_conservation(plan: RoutePlan, scenario):
    """Net out-flow must be +1 at the source, -1 at the destination and zero
    at every intermediate node, over each request's concatenated segments."""
    from .placement import ConstraintReport  # local import avoids a cycle

    report = ConstraintReport()
    by_id = {r.id: r for r in scenario.requests}
    for q in plan.request_ids():
        req = by_id[q]
        balance: dict[str, int] = {}
        for u, v in plan.edges_of(q):
            balance[u] = balance.get(u, 0) + 1
            balance[v] = balance.get(v, 0) - 1
        balance.setdefault(req.source, 0)
        balance.setdefault(req.destination, 0)
        for node in sorted(balance):
            expect = 1 if node == req.source else -1 if node == req.destination else 0
            if balance[node] != expect:
                report.add("flow-conservation", f"{q}@{node}",
                           float(balance[node] - expect))
    return report


def check_link_capacity(plan: RoutePlan, net, scenario, epoch: int):
    """Aggregate routed traffic per link against its bandwidth."""
    from .placement import ConstraintReport

    report = ConstraintReport()
    by_id = {r.id: r for r in scenario.requests}
    loads: dict[LinkKey, float] = {}
    for (q, _l), path in plan.paths.items():
        rate = by_id[q].traffic_at(epoch)
        for u, v in zip(path, path[1:]):
            k = link_key(u, v)
            loads[k] = loads.get(k, 0.0) + rate
    for k in sorted(loads):
        cap = net.link(*k).bandwidth
        if loads[k] > cap:
            report.add("link-capacity", f"{k[0]}|{k[1]}", loads[k] - cap)
    return report


def overloaded_links(plan: RoutePlan, net, scenario, epoch: int) -> set[LinkKey]:
    report = check_link_capacity(plan, net, scenario, epoch)
    return {tuple(v.subject.split("|")) for v in report.violations}
