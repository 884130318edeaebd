"""Substrate network model and fat-tree generator.

Nodes are servers ("m0", "m1", ...) and programmable switches ("s0", ...).
Switches carry a local memory (LM), an RDMA-backed external memory (EM) and
an implicit uplink to the SDN controller; the controller itself is not a
routed graph node, only its per-switch bandwidth/cost attributes are kept.

All quantities are stored in the canonical units of :mod:`sfcem.units`.
Networks are immutable after construction and safe to share across runs.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field

import numpy as np

from . import units


class NetworkError(ValueError):
    """Invalid network construction input; message names the offending field."""


def _require(cond: bool, field_name: str, msg: str) -> None:
    if not cond:
        raise NetworkError(f"{field_name}: {msg}")


@dataclass
class Server:
    """A commodity server: VM-style VNF hosting."""

    id: str
    storage_capacity: float  # MB
    storage_cost: float  # currency per MB
    vnf_unit_delay: dict[str, float]  # type id -> ms per MB of traffic

    def __post_init__(self):
        _require(self.storage_capacity > 0, "storage_capacity", "must be > 0")
        _require(self.storage_cost >= 0, "storage_cost", "must be >= 0")
        for f, d in self.vnf_unit_delay.items():
            _require(d >= 0, f"vnf_unit_delay[{f}]", "must be >= 0")


@dataclass
class Switch:
    """A programmable data-plane switch with LM, EM and an RDMA staging table."""

    id: str
    lm_capacity: float  # MB
    em_capacity: float  # MB
    rdma_table_capacity: float  # MB, bounds entries per RDMA fetch
    lm_cost: float  # currency per MB
    em_cost: float  # currency per MB
    lm_unit_delay: dict[str, float]  # type id -> ms per MB of traffic
    rdma_access_delay: float  # ms per access
    controller_bandwidth: float  # Mbps, switch <-> SDN controller
    controller_cost: float  # currency per MB of programming traffic

    def __post_init__(self):
        for name in ("lm_capacity", "em_capacity", "rdma_table_capacity",
                     "controller_bandwidth"):
            _require(getattr(self, name) > 0, name, "must be > 0")
        for name in ("lm_cost", "em_cost", "rdma_access_delay", "controller_cost"):
            _require(getattr(self, name) >= 0, name, "must be >= 0")
        for f, d in self.lm_unit_delay.items():
            _require(d >= 0, f"lm_unit_delay[{f}]", "must be >= 0")


@dataclass
class Link:
    """Undirected substrate link."""

    endpoints: tuple[str, str]
    bandwidth: float  # Mbps
    unit_cost: float  # currency per MB transferred
    unit_delay: float  # ms (per MB in the per-unit delay reading)

    def __post_init__(self):
        _require(self.bandwidth > 0, "bandwidth", "must be > 0")
        _require(self.unit_cost >= 0, "unit_cost", "must be >= 0")
        _require(self.unit_delay >= 0, "unit_delay", "must be >= 0")
        _require(self.endpoints[0] != self.endpoints[1], "endpoints",
                 "self-loops not allowed")

    @property
    def key(self) -> tuple[str, str]:
        u, v = self.endpoints
        return (u, v) if u <= v else (v, u)


def _node_sort_key(node_id: str) -> tuple[str, int]:
    # "m10" sorts after "m2"
    i = 0
    while i < len(node_id) and not node_id[i].isdigit():
        i += 1
    return (node_id[:i], int(node_id[i:]) if i < len(node_id) else -1)


@dataclass
class SubstrateNetwork:
    """Servers + switches + links, with adjacency and path helpers."""

    servers: list[Server]
    switches: list[Switch]
    links: list[Link]
    _adj: dict[str, list[str]] = field(default_factory=dict, repr=False)
    _link_by_key: dict[tuple[str, str], Link] = field(default_factory=dict, repr=False)
    _route_cache: dict[tuple[str, str], tuple[tuple[str, ...], float, float]] = field(
        default_factory=dict, repr=False)

    def __post_init__(self):
        ids = [s.id for s in self.servers] + [s.id for s in self.switches]
        _require(len(ids) == len(set(ids)), "node ids", "must be unique")
        self._servers_by_id = {s.id: s for s in self.servers}
        self._switches_by_id = {s.id: s for s in self.switches}
        self._adj = {i: [] for i in ids}
        for link in self.links:
            u, v = link.endpoints
            _require(u in self._adj, "endpoints", f"unknown node {u}")
            _require(v in self._adj, "endpoints", f"unknown node {v}")
            _require(link.key not in self._link_by_key, "links",
                     f"duplicate link {link.key}")
            self._link_by_key[link.key] = link
            self._adj[u].append(v)
            self._adj[v].append(u)
        for nid in self._adj:
            self._adj[nid].sort(key=_node_sort_key)

    # --- lookups -----------------------------------------------------------

    @property
    def server_ids(self) -> list[str]:
        return [s.id for s in self.servers]

    @property
    def switch_ids(self) -> list[str]:
        return [s.id for s in self.switches]

    @property
    def node_ids(self) -> list[str]:
        return self.server_ids + self.switch_ids

    def server(self, node_id: str) -> Server:
        try:
            return self._servers_by_id[node_id]
        except KeyError:
            raise KeyError(f"unknown server {node_id}") from None

    def switch(self, node_id: str) -> Switch:
        try:
            return self._switches_by_id[node_id]
        except KeyError:
            raise KeyError(f"unknown switch {node_id}") from None

    def link(self, u: str, v: str) -> Link:
        key = (u, v) if u <= v else (v, u)
        try:
            return self._link_by_key[key]
        except KeyError:
            raise KeyError(f"no link between {u} and {v}") from None

    def neighbors(self, node_id: str) -> list[str]:
        """Adjacent node ids, sorted for determinism."""
        try:
            return list(self._adj[node_id])
        except KeyError:
            raise KeyError(f"unknown node {node_id}") from None

    def is_connected(self) -> bool:
        if not self._adj:
            return True
        start = next(iter(self._adj))
        seen = {start}
        stack = [start]
        while stack:
            for v in self._adj[stack.pop()]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == len(self._adj)

    # --- transfer paths ----------------------------------------------------

    def transfer_route(self, u: str, v: str) -> tuple[tuple[str, ...], float, float]:
        """Min-transfer-cost route from u to v.

        Returns (path, cost_per_mb, bottleneck_mbps). A direct link is used
        as-is; otherwise the cheapest path under summed per-MB link costs is
        taken (lexicographically smallest node sequence on ties) and the
        bottleneck is the smallest bandwidth along it. Used to complete the
        pairwise gamma/B terms of migration cost and delay for server pairs
        that are not directly wired.
        """
        if u == v:
            return (u,), 0.0, float("inf")
        key = (u, v)
        cached = self._route_cache.get(key)
        if cached is not None:
            return cached
        direct = self._link_by_key.get((u, v) if u <= v else (v, u))
        if direct is not None:
            result = ((u, v), direct.unit_cost, direct.bandwidth)
        else:
            result = self._cheapest_path(u, v)
        self._route_cache[key] = result
        return result

    def _cheapest_path(self, src: str, dst: str) -> tuple[tuple[str, ...], float, float]:
        heap: list[tuple[float, tuple[str, ...]]] = [(0.0, (src,))]
        done: set[str] = set()
        while heap:
            cost, path = heapq.heappop(heap)
            node = path[-1]
            if node == dst:
                bottleneck = min(self.link(a, b).bandwidth
                                 for a, b in zip(path, path[1:]))
                return path, cost, bottleneck
            if node in done:
                continue
            done.add(node)
            for nxt in self._adj[node]:
                if nxt not in done:
                    w = self.link(node, nxt).unit_cost
                    heapq.heappush(heap, (cost + w, path + (nxt,)))
        raise NetworkError(f"endpoints: no path between {src} and {dst}")

    # --- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": "sfcem-network-v1",
            "servers": [{
                "id": s.id,
                "storage_capacity_mb": s.storage_capacity,
                "storage_cost_per_mb": s.storage_cost,
                "vnf_unit_delay_ms_per_mb": dict(sorted(s.vnf_unit_delay.items())),
            } for s in self.servers],
            "switches": [{
                "id": s.id,
                "lm_capacity_mb": s.lm_capacity,
                "em_capacity_mb": s.em_capacity,
                "rdma_table_capacity_mb": s.rdma_table_capacity,
                "lm_cost_per_mb": s.lm_cost,
                "em_cost_per_mb": s.em_cost,
                "lm_unit_delay_ms_per_mb": dict(sorted(s.lm_unit_delay.items())),
                "rdma_access_delay_ms": s.rdma_access_delay,
                "controller_bandwidth_mbps": s.controller_bandwidth,
                "controller_cost_per_mb": s.controller_cost,
            } for s in self.switches],
            "links": [{
                "u": l.endpoints[0],
                "v": l.endpoints[1],
                "bandwidth_mbps": l.bandwidth,
                "unit_cost_per_mb": l.unit_cost,
                "unit_delay_ms": l.unit_delay,
            } for l in self.links],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, doc: dict) -> "SubstrateNetwork":
        servers = [Server(d["id"], d["storage_capacity_mb"], d["storage_cost_per_mb"],
                          dict(d["vnf_unit_delay_ms_per_mb"]))
                   for d in doc["servers"]]
        switches = [Switch(d["id"], d["lm_capacity_mb"], d["em_capacity_mb"],
                           d["rdma_table_capacity_mb"], d["lm_cost_per_mb"],
                           d["em_cost_per_mb"], dict(d["lm_unit_delay_ms_per_mb"]),
                           d["rdma_access_delay_ms"], d["controller_bandwidth_mbps"],
                           d["controller_cost_per_mb"])
                    for d in doc["switches"]]
        links = [Link((d["u"], d["v"]), d["bandwidth_mbps"], d["unit_cost_per_mb"],
                      d["unit_delay_ms"])
                 for d in doc["links"]]
        return cls(servers, switches, links)

    @classmethod
    def from_json(cls, text: str) -> "SubstrateNetwork":
        return cls.from_dict(json.loads(text))


# --- randomized generation --------------------------------------------------

Range = tuple[float, float]


@dataclass
class ParamRanges:
    """Uniform draw ranges for network parameters, in config units.

    ``rdma_table_mb=None`` sizes each RDMA table equal to the switch's drawn
    LM capacity (tables hold the same kind of entries as the LM).
    """

    server_storage_gb: Range = (10.0, 40.0)
    server_storage_cost_per_gb: Range = (0.002, 0.003)
    server_proc_delay_ms_per_mb: Range = (0.1, 0.3)
    lm_capacity_mb: Range = (10.0, 35.0)
    em_capacity_mb: Range = (100.0, 500.0)
    rdma_table_mb: Range | None = None
    lm_cost_per_mb: Range = (0.0021, 0.0024)
    em_cost_per_mb: Range = (0.0002, 0.0004)
    switch_proc_delay_ms_per_mb: Range = (0.01, 0.03)
    rdma_access_delay_ns: Range = (50.0, 150.0)
    controller_bandwidth_gbps: Range = (50.0, 50.0)
    controller_cost_per_gb: Range = (0.8, 1.0)
    link_bandwidth_gbps: Range = (30.0, 50.0)
    link_cost_per_gb: Range = (0.8, 1.0)
    link_delay_ms: Range = (0.5, 1.0)
    vnf_type_count: int = 4

    def validate(self) -> None:
        for name, value in self.__dict__.items():
            if name == "vnf_type_count":
                _require(value >= 1, name, "must be >= 1")
                continue
            if value is None:
                continue
            lo, hi = value
            _require(lo <= hi, name, f"empty range ({lo} > {hi})")
            _require(lo >= 0, name, "must be non-negative")


def paper_ranges() -> ParamRanges:
    """The evaluation parameter ranges used throughout the benchmarks."""
    return ParamRanges()


def type_ids(count: int) -> list[str]:
    return [f"f{i}" for i in range(count)]


def _draw(rng: np.random.Generator, r: Range) -> float:
    lo, hi = r
    return float(lo) if lo == hi else float(rng.uniform(lo, hi))


def build_fat_tree(switch_count: int, server_count: int,
                   param_ranges: ParamRanges, rng_seed: int) -> SubstrateNetwork:
    """Random two-layer fat-tree: core switches fully meshed to edge switches,
    servers attached round-robin to edge switches only.

    The core layer takes ``max(1, switch_count // 3)`` switches. Identical
    seeds produce bit-identical networks.
    """
    _require(switch_count >= 2, "switch_count", "needs >= 2 for a two-layer fat-tree")
    _require(server_count >= 1, "server_count", "must be >= 1")
    param_ranges.validate()
    rng = np.random.default_rng(rng_seed)
    types = type_ids(param_ranges.vnf_type_count)

    core_count = max(1, switch_count // 3)
    core = [f"s{i}" for i in range(core_count)]
    edge = [f"s{i}" for i in range(core_count, switch_count)]

    switches = []
    for sid in core + edge:
        lm = _draw(rng, param_ranges.lm_capacity_mb)
        em = _draw(rng, param_ranges.em_capacity_mb)
        rdma = lm if param_ranges.rdma_table_mb is None else \
            _draw(rng, param_ranges.rdma_table_mb)
        switches.append(Switch(
            id=sid,
            lm_capacity=lm,
            em_capacity=em,
            rdma_table_capacity=rdma,
            lm_cost=_draw(rng, param_ranges.lm_cost_per_mb),
            em_cost=_draw(rng, param_ranges.em_cost_per_mb),
            lm_unit_delay={f: _draw(rng, param_ranges.switch_proc_delay_ms_per_mb)
                           for f in types},
            rdma_access_delay=units.ns_to_ms(_draw(rng, param_ranges.rdma_access_delay_ns)),
            controller_bandwidth=units.gbps_to_mbps(
                _draw(rng, param_ranges.controller_bandwidth_gbps)),
            controller_cost=units.per_gb_to_per_mb(
                _draw(rng, param_ranges.controller_cost_per_gb)),
        ))

    servers = []
    for i in range(server_count):
        servers.append(Server(
            id=f"m{i}",
            storage_capacity=units.gb_to_mb(_draw(rng, param_ranges.server_storage_gb)),
            storage_cost=units.per_gb_to_per_mb(
                _draw(rng, param_ranges.server_storage_cost_per_gb)),
            vnf_unit_delay={f: _draw(rng, param_ranges.server_proc_delay_ms_per_mb)
                            for f in types},
        ))

    def make_link(u: str, v: str) -> Link:
        return Link(
            endpoints=(u, v),
            bandwidth=units.gbps_to_mbps(_draw(rng, param_ranges.link_bandwidth_gbps)),
            unit_cost=units.per_gb_to_per_mb(_draw(rng, param_ranges.link_cost_per_gb)),
            unit_delay=_draw(rng, param_ranges.link_delay_ms),
        )

    links = [make_link(e, c) for e in edge for c in core]
    links += [make_link(f"m{i}", edge[i % len(edge)]) for i in range(server_count)]

    return SubstrateNetwork(servers, switches, links)
