"""Placement decision variables and constraint checking.

A :class:`PlacementConfiguration` pins every VNF instance to exactly one
host slot (a server, or the local/external memory of a switch), maps every
chain position to an instance, and carries the routed paths for its epoch.
Constraint checks return violation reports instead of raising, so invalid
configurations can be scored (zero reward) rather than rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import routing

SERVER = "server"
SWITCH_LOCAL = "switch-local"
SWITCH_EXTERNAL = "switch-external"

KINDS = (SERVER, SWITCH_LOCAL, SWITCH_EXTERNAL)

# instance id: (vnf type id, instance index)
InstanceId = tuple[str, int]
# chain position: (request id, 0-based position in the chain)
Position = tuple[str, int]


class MalformedActionError(ValueError):
    pass


@dataclass(frozen=True)
class HostSlot:
    """One assignable hosting slot."""

    kind: str
    node: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind: unknown slot kind {self.kind!r}")

    @property
    def on_switch(self) -> bool:
        return self.kind != SERVER


@dataclass
class Violation:
    constraint: str  # e.g. "EM-storage", "link-capacity"
    subject: str
    overload: float


@dataclass
class ConstraintReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, constraint: str, subject, overload: float) -> None:
        self.violations.append(Violation(constraint, str(subject), overload))

    def extend(self, other: "ConstraintReport") -> "ConstraintReport":
        self.violations.extend(other.violations)
        return self


@dataclass
class PlacementConfiguration:
    """Host map + chain-to-instance assignment + routes, at one epoch."""

    instance_host: dict[InstanceId, HostSlot]
    assignment: dict[Position, InstanceId]
    routes: routing.RoutePlan | None
    epoch: int

    def host_of_position(self, request_id: str, n: int) -> HostSlot:
        return self.instance_host[self.assignment[(request_id, n)]]

    def instances_on(self, slot: HostSlot) -> list[InstanceId]:
        return [i for i, h in self.instance_host.items() if h == slot]

    # --- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "epoch": self.epoch,
            "instance_host": {f"{f}/{i}": {"kind": slot.kind, "node": slot.node}
                              for (f, i), slot in sorted(self.instance_host.items())},
            "assignment": {f"{q}/{n}": f"{f}/{i}"
                           for (q, n), (f, i) in sorted(self.assignment.items())},
            "routes": self.routes.to_dict() if self.routes is not None else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, doc: dict) -> "PlacementConfiguration":
        def inst(key: str) -> InstanceId:
            f, i = key.rsplit("/", 1)
            return (f, int(i))

        hosts = {inst(k): HostSlot(v["kind"], v["node"])
                 for k, v in doc["instance_host"].items()}
        assignment = {}
        for k, v in doc["assignment"].items():
            q, n = k.rsplit("/", 1)
            assignment[(q, int(n))] = inst(v)
        routes = None
        if doc.get("routes") is not None:
            routes = routing.RoutePlan.from_dict(doc["routes"])
        return cls(hosts, assignment, routes, doc["epoch"])


# --- constraint checks -------------------------------------------------------


def check_storage(config: PlacementConfiguration, net, catalog) -> ConstraintReport:
    """Per-node storage occupancy against EM, LM and server capacities."""
    types = {t.id: t for t in catalog}
    report = ConstraintReport()
    em_load: dict[str, float] = {}
    lm_load: dict[str, float] = {}
    server_load: dict[str, float] = {}
    for (f, _i), slot in config.instance_host.items():
        t = types[f]
        if slot.kind == SWITCH_EXTERNAL:
            em_load[slot.node] = em_load.get(slot.node, 0.0) + t.switch_footprint
        elif slot.kind == SWITCH_LOCAL:
            lm_load[slot.node] = lm_load.get(slot.node, 0.0) + t.switch_footprint
        else:
            server_load[slot.node] = server_load.get(slot.node, 0.0) + t.server_footprint
    for sid in sorted(em_load):
        cap = net.switch(sid).em_capacity
        if em_load[sid] > cap:
            report.add("EM-storage", sid, em_load[sid] - cap)
    for sid in sorted(lm_load):
        cap = net.switch(sid).lm_capacity
        if lm_load[sid] > cap:
            report.add("LM-storage", sid, lm_load[sid] - cap)
    for mid in sorted(server_load):
        cap = net.server(mid).storage_capacity
        if server_load[mid] > cap:
            report.add("server-storage", mid, server_load[mid] - cap)
    return report


def check_uniqueness_and_assignment(config: PlacementConfiguration,
                                    scenario) -> ConstraintReport:
    """Every instance hosted exactly once; every chain position mapped to one
    instance of the right type."""
    report = ConstraintReport()
    expected = set(scenario.instances())
    hosted = set(config.instance_host)
    for inst in sorted(expected - hosted):
        report.add("uniqueness", f"{inst[0]}/{inst[1]}", 0.0)
    for inst in sorted(hosted - expected):
        report.add("uniqueness", f"{inst[0]}/{inst[1]} (unknown)", 0.0)
    for req in scenario.requests:
        for n, ftype in enumerate(req.vnfs):
            inst = config.assignment.get((req.id, n))
            if inst is None:
                report.add("assignment", f"{req.id}/{n}", 0.0)
            elif inst[0] != ftype or inst not in expected:
                report.add("assignment", f"{req.id}/{n} -> {inst[0]}/{inst[1]}", 0.0)
    return report


def instance_loads(config: PlacementConfiguration, scenario,
                   epoch: int) -> dict[InstanceId, float]:
    """Aggregate assigned traffic (Mbps) per instance at ``epoch``."""
    loads: dict[InstanceId, float] = {}
    for req in scenario.requests:
        rate = req.traffic_at(epoch)
        for n in range(len(req.vnfs)):
            inst = config.assignment.get((req.id, n))
            if inst is not None:
                loads[inst] = loads.get(inst, 0.0) + rate
    return loads


def check_processing_capacity(config: PlacementConfiguration, scenario,
                              epoch: int) -> ConstraintReport:
    """Assigned traffic per instance against its host-dependent capacity."""
    report = ConstraintReport()
    loads = instance_loads(config, scenario, epoch)
    for inst in sorted(loads):
        slot = config.instance_host.get(inst)
        if slot is None:
            continue  # uniqueness check flags the missing host
        t = scenario.vnf_type(inst[0])
        if slot.on_switch:
            cap, cid = t.switch_capacity, "switch-processing-capacity"
        else:
            cap, cid = t.server_capacity, "server-processing-capacity"
        if loads[inst] > cap:
            report.add(cid, f"{inst[0]}/{inst[1]}", loads[inst] - cap)
    return report


def check_placement(config: PlacementConfiguration, net, scenario,
                    epoch: int) -> ConstraintReport:
    """All placement-side checks (storage, uniqueness/assignment, capacity)."""
    report = check_storage(config, net, scenario.catalog)
    report.extend(check_uniqueness_and_assignment(config, scenario))
    report.extend(check_processing_capacity(config, scenario, epoch))
    return report


# --- reconfiguration ---------------------------------------------------------


def apply_action(prev: PlacementConfiguration, action: dict[InstanceId, HostSlot],
                 scenario, epoch: int) -> PlacementConfiguration:
    """Re-host instances per ``action``; assignments carry over unchanged and
    paths are re-routed at the new epoch."""
    missing = [i for i in prev.instance_host if i not in action]
    extra = [i for i in action if i not in prev.instance_host]
    if missing or extra:
        raise MalformedActionError(
            f"action must cover exactly the placed instances "
            f"(missing={missing}, unknown={extra})")
    config = PlacementConfiguration(
        instance_host=dict(action),
        assignment=dict(prev.assignment),
        routes=None,
        epoch=epoch,
    )
    config.routes = routing.route_chain_links(scenario.network, config, scenario, epoch)
    return config
