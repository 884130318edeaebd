"""VNF catalog, chain requests and randomized scenario generation.

Traffic follows a two-regime day: the first ``working_epochs`` epochs carry
the high working-hours rate, the rest the low off-hours rate; per request,
one rate and one deadline are drawn per regime and held constant inside it.
The initial placement puts every instance on the cheapest server with room,
then maps each chain position to a random instance of the right type that
still has processing headroom at epoch 0. A scenario that cannot be placed
this way raises :class:`GenerationError` (try another seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import routing
from .network import SubstrateNetwork, _require
from .placement import (SERVER, HostSlot, InstanceId, PlacementConfiguration,
                        check_placement)


class GenerationError(RuntimeError):
    pass


@dataclass
class VnfType:
    """One VNF type; instances of it are shared among chains."""

    id: str
    switch_footprint: float  # MB of match-action entries
    server_footprint: float  # MB as a VM image
    switch_capacity: float  # Mbps an instance can process in-network
    server_capacity: float  # Mbps an instance can process on a server
    programming_traffic: float  # MB pushed by the controller per deployment
    instance_count: int

    def __post_init__(self):
        _require(self.switch_footprint > 0, "switch_footprint", "must be > 0")
        _require(self.server_footprint > 0, "server_footprint", "must be > 0")
        _require(self.programming_traffic > 0, "programming_traffic", "must be > 0")
        _require(self.switch_capacity > 0, "switch_capacity", "must be > 0")
        _require(self.server_capacity > 0, "server_capacity", "must be > 0")
        _require(self.instance_count >= 1, "instance_count", "must be >= 1")


@dataclass
class SfcRequest:
    """An ordered VNF chain with epoch-indexed traffic and deadline."""

    id: str
    vnfs: tuple[str, ...]
    source: str
    destination: str
    traffic: tuple[float, ...]  # Mbps per epoch
    deadline: tuple[float, ...]  # ms per epoch

    def __post_init__(self):
        _require(len(self.vnfs) >= 1, "vnfs", "chain must not be empty")
        _require(self.source != self.destination, "source",
                 "must differ from destination")
        _require(len(self.traffic) == len(self.deadline), "traffic",
                 "traffic/deadline epoch counts differ")
        _require(all(x > 0 for x in self.traffic), "traffic", "must be > 0")
        _require(all(x > 0 for x in self.deadline), "deadline", "must be > 0")

    def traffic_at(self, epoch: int) -> float:
        if not 0 <= epoch < len(self.traffic):
            raise IndexError(f"epoch {epoch} outside horizon of {len(self.traffic)}")
        return self.traffic[epoch]

    def deadline_at(self, epoch: int) -> float:
        if not 0 <= epoch < len(self.deadline):
            raise IndexError(f"epoch {epoch} outside horizon of {len(self.deadline)}")
        return self.deadline[epoch]


@dataclass
class Scenario:
    """A substrate network plus a fixed request set over a decision horizon."""

    network: SubstrateNetwork
    catalog: list[VnfType]
    requests: list[SfcRequest]
    epochs: int
    working_epochs: int
    initial_placement: PlacementConfiguration | None = None
    name: str = ""
    _types_by_id: dict[str, VnfType] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._types_by_id = {t.id: t for t in self.catalog}

    def vnf_type(self, type_id: str) -> VnfType:
        return self._types_by_id[type_id]

    def instances(self) -> list[InstanceId]:
        return [(t.id, i) for t in self.catalog for i in range(t.instance_count)]

    def is_working_epoch(self, epoch: int) -> bool:
        return epoch < self.working_epochs

    # --- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": "sfcem-scenario-v1",
            "name": self.name,
            "network": self.network.to_dict(),
            "catalog": [{
                "id": t.id,
                "switch_footprint_mb": t.switch_footprint,
                "server_footprint_mb": t.server_footprint,
                "switch_capacity_mbps": t.switch_capacity,
                "server_capacity_mbps": t.server_capacity,
                "programming_traffic_mb": t.programming_traffic,
                "instance_count": t.instance_count,
            } for t in self.catalog],
            "requests": [{
                "id": r.id,
                "vnfs": list(r.vnfs),
                "source": r.source,
                "destination": r.destination,
                "traffic_mbps": list(r.traffic),
                "deadline_ms": list(r.deadline),
            } for r in self.requests],
            "epochs": self.epochs,
            "working_epochs": self.working_epochs,
            "initial_placement": (self.initial_placement.to_dict()
                                  if self.initial_placement else None),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, doc: dict) -> "Scenario":
        scenario = cls(
            network=SubstrateNetwork.from_dict(doc["network"]),
            catalog=[VnfType(t["id"], t["switch_footprint_mb"],
                             t["server_footprint_mb"], t["switch_capacity_mbps"],
                             t["server_capacity_mbps"], t["programming_traffic_mb"],
                             t["instance_count"])
                     for t in doc["catalog"]],
            requests=[SfcRequest(r["id"], tuple(r["vnfs"]), r["source"],
                                 r["destination"], tuple(r["traffic_mbps"]),
                                 tuple(r["deadline_ms"]))
                      for r in doc["requests"]],
            epochs=doc["epochs"],
            working_epochs=doc["working_epochs"],
            name=doc.get("name", ""),
        )
        if doc.get("initial_placement") is not None:
            scenario.initial_placement = PlacementConfiguration.from_dict(
                doc["initial_placement"])
        return scenario

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))


Range = tuple[float, float]


@dataclass
class GenParams:
    """Scenario generation knobs, in the units named by the field suffixes.

    ``server_footprint_mb=None`` reuses each type's switch footprint draw as
    its server footprint (one storage demand per VNF); the programming
    traffic always equals the switch footprint.
    """

    type_count: int = 4
    instance_count: int = 2
    footprint_mb: Range = (10.0, 50.0)
    server_footprint_mb: Range | None = None
    switch_capacity_mbps: Range = (100_000.0, 100_000.0)
    server_capacity_mbps: Range = (25.0, 40.0)
    request_count: int = 90
    chain_length: tuple[int, int] = (1, 4)
    epochs: int = 6
    working_epochs: int = 3
    working_traffic_mbps: Range = (15.0, 35.0)
    nonworking_traffic_mbps: Range = (0.2, 0.5)
    working_deadline_ms: Range = (8.0, 12.0)
    nonworking_deadline_ms: Range = (3.0, 8.0)

    def validate(self) -> None:
        _require(self.type_count >= 1, "type_count", "must be >= 1")
        _require(self.instance_count >= 1, "instance_count", "must be >= 1")
        _require(self.request_count >= 1, "request_count", "must be >= 1")
        _require(1 <= self.chain_length[0] <= self.chain_length[1],
                 "chain_length", "must satisfy 1 <= min <= max")
        _require(self.epochs >= 1, "epochs", "must be >= 1")
        _require(0 <= self.working_epochs <= self.epochs, "working_epochs",
                 "must lie within the horizon")
        for name in ("footprint_mb", "switch_capacity_mbps", "server_capacity_mbps",
                     "working_traffic_mbps", "nonworking_traffic_mbps",
                     "working_deadline_ms", "nonworking_deadline_ms"):
            lo, hi = getattr(self, name)
            _require(0 < lo <= hi, name, f"bad range ({lo}, {hi})")


def paper_gen_params() -> GenParams:
    return GenParams()


def _draw(rng: np.random.Generator, r: Range) -> float:
    lo, hi = r
    return float(lo) if lo == hi else float(rng.uniform(lo, hi))


def _make_catalog(net: SubstrateNetwork, gen: GenParams,
                  rng: np.random.Generator) -> list[VnfType]:
    available = sorted(net.servers[0].vnf_unit_delay, key=lambda f: int(f[1:]))
    if gen.type_count > len(available):
        raise GenerationError(
            f"type_count: network carries unit delays for {len(available)} "
            f"VNF types, {gen.type_count} requested")
    catalog = []
    for fid in available[:gen.type_count]:
        switch_fp = _draw(rng, gen.footprint_mb)
        server_fp = switch_fp if gen.server_footprint_mb is None else \
            _draw(rng, gen.server_footprint_mb)
        catalog.append(VnfType(
            id=fid,
            switch_footprint=switch_fp,
            server_footprint=server_fp,
            switch_capacity=_draw(rng, gen.switch_capacity_mbps),
            server_capacity=_draw(rng, gen.server_capacity_mbps),
            programming_traffic=switch_fp,
            instance_count=gen.instance_count,
        ))
    return catalog


def _make_requests(net: SubstrateNetwork, gen: GenParams,
                   rng: np.random.Generator) -> list[SfcRequest]:
    type_pool = [f"f{i}" for i in range(gen.type_count)]
    switch_ids = net.switch_ids
    if len(switch_ids) < 2:
        raise GenerationError("request endpoints need at least 2 switches")
    requests = []
    for k in range(gen.request_count):
        max_len = min(gen.chain_length[1], gen.type_count)
        min_len = min(gen.chain_length[0], max_len)
        length = int(rng.integers(min_len, max_len + 1))
        vnfs = tuple(str(f) for f in rng.choice(type_pool, size=length, replace=False))
        src, dst = rng.choice(switch_ids, size=2, replace=False)
        hi_rate = _draw(rng, gen.working_traffic_mbps)
        lo_rate = _draw(rng, gen.nonworking_traffic_mbps)
        hi_dl = _draw(rng, gen.working_deadline_ms)
        lo_dl = _draw(rng, gen.nonworking_deadline_ms)
        traffic = tuple(hi_rate if t < gen.working_epochs else lo_rate
                        for t in range(gen.epochs))
        deadline = tuple(hi_dl if t < gen.working_epochs else lo_dl
                         for t in range(gen.epochs))
        requests.append(SfcRequest(f"q{k}", vnfs, str(src), str(dst),
                                   traffic, deadline))
    return requests


def _initial_placement(scenario: Scenario, rng: np.random.Generator) -> None:
    """Cheapest-fitting-server deployment, then random feasible assignment."""
    net = scenario.network
    free = {m.id: m.storage_capacity for m in net.servers}
    hosts: dict[InstanceId, HostSlot] = {}
    for inst in scenario.instances():
        t = scenario.vnf_type(inst[0])
        fitting = [m for m in net.servers if free[m.id] >= t.server_footprint]
        if not fitting:
            raise GenerationError(
                f"initial placement: no server fits instance {inst[0]}/{inst[1]} "
                f"({t.server_footprint} MB)")
        best = min(fitting, key=lambda m: (m.storage_cost * t.server_footprint, m.id))
        free[best.id] -= t.server_footprint
        hosts[inst] = HostSlot(SERVER, best.id)

    headroom = {inst: scenario.vnf_type(inst[0]).server_capacity
                for inst in scenario.instances()}
    assignment: dict[tuple[str, int], InstanceId] = {}
    for req in scenario.requests:
        rate = req.traffic_at(0)
        for n, fid in enumerate(req.vnfs):
            candidates = [(fid, i) for i in range(scenario.vnf_type(fid).instance_count)
                          if headroom[(fid, i)] >= rate]
            if not candidates:
                raise GenerationError(
                    f"initial placement: no {fid} instance can absorb chain "
                    f"{req.id} at {rate:.3f} Mbps")
            inst = candidates[int(rng.integers(len(candidates)))]
            headroom[inst] -= rate
            assignment[(req.id, n)] = inst

    config = PlacementConfiguration(hosts, assignment, None, 0)
    config.routes = routing.route_chain_links(net, config, scenario, 0)
    report = check_placement(config, net, scenario, 0)
    if not report.ok:
        raise GenerationError(f"initial placement violates constraints: "
                              f"{report.violations[:3]}")
    scenario.initial_placement = config


def generate_scenario(net: SubstrateNetwork, gen_params: GenParams,
                      rng_seed: int) -> Scenario:
    """Randomized scenario on ``net``; pure function of its arguments."""
    gen_params.validate()
    rng = np.random.default_rng(rng_seed)
    catalog = _make_catalog(net, gen_params, rng)
    requests = _make_requests(net, gen_params, rng)
    scenario = Scenario(network=net, catalog=catalog, requests=requests,
                        epochs=gen_params.epochs,
                        working_epochs=gen_params.working_epochs,
                        name=f"scn-seed{rng_seed}")
    _initial_placement(scenario, rng)
    return scenario
