"""Hand-built networks/scenarios and randomized micro-instances for tests."""

import numpy as np

from sfcem.network import Link, Server, SubstrateNetwork, Switch
from sfcem.placement import (SERVER, SWITCH_EXTERNAL, SWITCH_LOCAL, HostSlot,
                             PlacementConfiguration)
from sfcem.routing import route_chain_links
from sfcem.workload import Scenario, SfcRequest, VnfType

TYPES = ["f0", "f1"]


def make_server(sid="m0", capacity=1000.0, cost=2e-6, delay=0.2, types=TYPES):
    return Server(sid, capacity, cost, {f: delay for f in types})


def make_switch(sid="s0", lm=100.0, em=500.0, rdma=50.0, lm_cost=0.0022,
                em_cost=0.0003, lm_delay=0.02, rdma_delay=1e-4,
                ctrl_bw=50_000.0, ctrl_cost=9e-4, types=TYPES):
    return Switch(sid, lm, em, rdma, lm_cost, em_cost,
                  {f: lm_delay for f in types}, rdma_delay, ctrl_bw, ctrl_cost)


def make_link(u, v, bw=40_000.0, cost=9e-4, delay=0.5):
    return Link((u, v), bw, cost, delay)


def make_type(fid="f0", switch_fp=30.0, server_fp=30.0, switch_cap=100_000.0,
              server_cap=200.0, instances=1):
    return VnfType(fid, switch_fp, server_fp, switch_cap, server_cap,
                   switch_fp, instances)


def chain_net(types=TYPES):
    """m0 - s0 - s1 - m1: two switches in line, one server on each side."""
    servers = [make_server("m0", types=types), make_server("m1", types=types)]
    switches = [make_switch("s0", types=types), make_switch("s1", types=types)]
    links = [make_link("m0", "s0"), make_link("s0", "s1"), make_link("s1", "m1")]
    return SubstrateNetwork(servers, switches, links)


def make_scenario(net, catalog, requests, hosts, assignment, epochs=2,
                  working_epochs=1, route_epoch=0):
    scenario = Scenario(network=net, catalog=catalog, requests=requests,
                        epochs=epochs, working_epochs=working_epochs,
                        name="manual")
    config = PlacementConfiguration(dict(hosts), dict(assignment), None, 0)
    config.routes = route_chain_links(net, config, scenario, route_epoch)
    scenario.initial_placement = config
    return scenario


def simple_request(rid="q0", vnfs=("f0",), source="s0", destination="s1",
                   rate=20.0, deadline=1000.0, epochs=2):
    return SfcRequest(rid, tuple(vnfs), source, destination,
                      tuple([rate] * epochs), tuple([deadline] * epochs))


# --- randomized micro-instances (<= 3 nodes, <= 2 instances, <= 2 requests) ----


def micro_case(seed: int):
    """Scenario + consecutive configurations + routed plan, decision epoch 1.

    Hosts are drawn freely over all slots (storage feasibility not enforced;
    the cost/delay formulas are defined regardless), assignments are carried
    over between the two epochs.
    """
    rng = np.random.default_rng(seed)
    switch_count, server_count = [(1, 1), (1, 2), (2, 1)][int(rng.integers(3))]
    catalog_shape = [[("f0", 1)], [("f0", 2)],
                     [("f0", 1), ("f1", 1)]][int(rng.integers(3))]
    types = [fid for fid, _n in catalog_shape]
    servers = [Server(f"m{i}", float(rng.uniform(100, 400)),
                      float(rng.uniform(2e-6, 3e-6)),
                      {f: float(rng.uniform(0.1, 0.5)) for f in types})
               for i in range(server_count)]
    switches = [Switch(f"s{i}", float(rng.uniform(20, 60)),
                       float(rng.uniform(50, 150)), float(rng.uniform(10, 40)),
                       float(rng.uniform(0.002, 0.003)),
                       float(rng.uniform(2e-4, 5e-4)),
                       {f: float(rng.uniform(0.01, 0.05)) for f in types},
                       float(rng.uniform(1e-4, 1e-3)),
                       float(rng.uniform(10_000, 60_000)),
                       float(rng.uniform(8e-4, 1e-3)))
                for i in range(switch_count)]
    nodes = [s.id for s in servers] + [s.id for s in switches]
    links = []
    for a, b in zip(nodes, nodes[1:]):  # path graph keeps it connected
        links.append(Link((a, b), float(rng.uniform(20_000, 50_000)),
                          float(rng.uniform(8e-4, 1e-3)),
                          float(rng.uniform(0.3, 1.0))))
    if len(nodes) == 3 and rng.random() < 0.5:
        links.append(Link((nodes[0], nodes[2]), float(rng.uniform(20_000, 50_000)),
                          float(rng.uniform(8e-4, 1e-3)),
                          float(rng.uniform(0.3, 1.0))))
    net = SubstrateNetwork(servers, switches, links)

    catalog = [VnfType(fid, float(rng.uniform(10, 50)), float(rng.uniform(10, 50)),
                       float(rng.uniform(5_000, 50_000)), float(rng.uniform(30, 300)),
                       float(rng.uniform(5, 40)), count)
               for fid, count in catalog_shape]

    slots = [HostSlot(SERVER, m.id) for m in servers]
    for s in switches:
        slots.append(HostSlot(SWITCH_LOCAL, s.id))
        slots.append(HostSlot(SWITCH_EXTERNAL, s.id))

    instances = [(t.id, i) for t in catalog for i in range(t.instance_count)]
    hosts_prev = {inst: slots[int(rng.integers(len(slots)))] for inst in instances}
    hosts_now = {inst: slots[int(rng.integers(len(slots)))] for inst in instances}

    requests = []
    for k in range(int(rng.integers(1, 3))):
        length = int(rng.integers(1, min(2, len(catalog)) + 1))
        picked = list(rng.choice(types, size=length, replace=False))
        src, dst = rng.choice(nodes, size=2, replace=False)
        requests.append(SfcRequest(
            f"q{k}", tuple(str(f) for f in picked), str(src), str(dst),
            tuple(float(rng.uniform(5, 40)) for _ in range(2)),
            tuple(float(rng.uniform(1, 50)) for _ in range(2))))

    assignment = {}
    for req in requests:
        for n, fid in enumerate(req.vnfs):
            count = next(t.instance_count for t in catalog if t.id == fid)
            assignment[(req.id, n)] = (fid, int(rng.integers(count)))

    scenario = Scenario(network=net, catalog=catalog, requests=requests,
                        epochs=2, working_epochs=1, name=f"micro{seed}")
    config_prev = PlacementConfiguration(hosts_prev, dict(assignment), None, 0)
    config_prev.routes = route_chain_links(net, config_prev, scenario, 0)
    scenario.initial_placement = config_prev
    config_now = PlacementConfiguration(hosts_now, dict(assignment), None, 1)
    config_now.routes = route_chain_links(net, config_now, scenario, 1)
    return scenario, config_prev, config_now
