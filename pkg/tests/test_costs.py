import math

import pytest

import brute
import helpers
from helpers import (chain_net, make_link, make_scenario, make_server,
                     make_switch, make_type, simple_request)
from sfcem import costs, units
from sfcem.network import SubstrateNetwork
from sfcem.placement import (SERVER, SWITCH_EXTERNAL, SWITCH_LOCAL, HostSlot,
                             PlacementConfiguration)
from sfcem.routing import RoutePlan, route_chain_links


def one_instance_scenario(slot, server_fp=10_000.0, switch_fp=30.0,
                          server_cost=2e-6):
    net = chain_net()
    net.server("m0").storage_cost = server_cost
    catalog = [make_type("f0", switch_fp=switch_fp, server_fp=server_fp)]
    req = simple_request()
    sc = make_scenario(net, catalog, [req], {("f0", 0): slot},
                       {("q0", 0): ("f0", 0)})
    return sc


def reconfigure(sc, new_slot, epoch=1):
    prev = sc.initial_placement
    action = dict(prev.instance_host)
    action[("f0", 0)] = new_slot
    from sfcem.placement import apply_action
    return prev, apply_action(prev, action, sc, epoch)


# --- IT cost -------------------------------------------------------------------


def test_it_cost_single_server_instance():
    # 10 GB at 0.002 currency per GB
    sc = one_instance_scenario(HostSlot(SERVER, "m0"))
    assert costs.it_resource_cost(sc.initial_placement, sc.network, sc.catalog) \
        == pytest.approx(0.02, rel=1e-12)


def test_it_cost_empty_placement():
    sc = one_instance_scenario(HostSlot(SERVER, "m0"))
    empty = PlacementConfiguration({}, {}, None, 0)
    assert costs.it_resource_cost(empty, sc.network, sc.catalog) == 0.0


def test_it_cost_drops_moving_lm_to_em():
    sc = one_instance_scenario(HostSlot(SWITCH_LOCAL, "s0"))
    lm = costs.it_resource_cost(sc.initial_placement, sc.network, sc.catalog)
    sc2 = one_instance_scenario(HostSlot(SWITCH_EXTERNAL, "s0"))
    em = costs.it_resource_cost(sc2.initial_placement, sc2.network, sc2.catalog)
    assert em < lm


# --- bandwidth cost --------------------------------------------------------------


def test_bandwidth_cost_two_hops_equal_gamma():
    net = chain_net()
    for link in net.links:
        link.unit_cost = 9e-4
    catalog = [make_type("f0")]
    req = simple_request(rate=20.0, source="s0", destination="s1")
    sc = make_scenario(net, catalog, [req],
                       {("f0", 0): HostSlot(SWITCH_LOCAL, "s1")},
                       {("q0", 0): ("f0", 0)})
    got = costs.bandwidth_cost(sc.initial_placement.routes, net, sc, 0)
    # one substrate hop s0-s1 carries the chain; volume 20/8 MB
    one_hop = units.rate_to_volume_mb(20.0) * 9e-4
    assert got == pytest.approx(one_hop, rel=1e-12)
    # host on the far server adds exactly one more link of equal cost
    sc2 = make_scenario(net, catalog, [req], {("f0", 0): HostSlot(SERVER, "m1")},
                        {("q0", 0): ("f0", 0)})
    got2 = costs.bandwidth_cost(sc2.initial_placement.routes, net, sc2, 0)
    assert got2 == pytest.approx(3 * one_hop, rel=1e-12)  # s0-s1, s1-m1, m1-s1...


def test_bandwidth_cost_empty_plan():
    sc = one_instance_scenario(HostSlot(SERVER, "m0"))
    assert costs.bandwidth_cost(RoutePlan(), sc.network, sc, 0) == 0.0


# --- migration / programming cost -------------------------------------------------


def test_migration_cost_identity_is_zero():
    sc = one_instance_scenario(HostSlot(SERVER, "m0"))
    prev, now = reconfigure(sc, HostSlot(SERVER, "m0"))
    assert costs.migration_cost(now, prev, sc.network, sc.catalog) == 0.0


def test_migration_cost_single_move():
    # 10 GB across a path of summed cost 0.9 per GB
    sc = one_instance_scenario(HostSlot(SERVER, "m0"))
    path, per_mb, _bw = sc.network.transfer_route("m0", "m1")
    for a, b in zip(path, path[1:]):
        sc.network.link(a, b).unit_cost = 0.0
    sc.network.link(path[0], path[1]).unit_cost = 0.9 / 1000.0
    sc.network._route_cache.clear()
    prev, now = reconfigure(sc, HostSlot(SERVER, "m1"))
    assert costs.migration_cost(now, prev, sc.network, sc.catalog) \
        == pytest.approx(9.0, rel=1e-12)


def test_server_to_switch_move_not_migration():
    sc = one_instance_scenario(HostSlot(SERVER, "m0"))
    prev, now = reconfigure(sc, HostSlot(SWITCH_EXTERNAL, "s0"))
    assert costs.migration_cost(now, prev, sc.network, sc.catalog) == 0.0
    assert costs.programming_cost(now, prev, sc.network, sc.catalog) > 0.0


def test_programming_cost_server_to_em():
    sc = one_instance_scenario(HostSlot(SERVER, "m0"), switch_fp=20.0)
    sc.network.switch("s0").controller_cost = 0.001
    prev, now = reconfigure(sc, HostSlot(SWITCH_EXTERNAL, "s0"))
    assert costs.programming_cost(now, prev, sc.network, sc.catalog) \
        == pytest.approx(0.02, rel=1e-12)


def test_programming_cost_lm_em_same_switch_free():
    sc = one_instance_scenario(HostSlot(SWITCH_LOCAL, "s0"))
    prev, now = reconfigure(sc, HostSlot(SWITCH_EXTERNAL, "s0"))
    assert costs.programming_cost(now, prev, sc.network, sc.catalog) == 0.0


def test_programming_cost_no_switch_instances():
    sc = one_instance_scenario(HostSlot(SERVER, "m0"))
    prev, now = reconfigure(sc, HostSlot(SERVER, "m1"))
    assert costs.programming_cost(now, prev, sc.network, sc.catalog) == 0.0


# --- objective -------------------------------------------------------------------


def test_step_objective_plain_sum_at_unit_weights():
    sc = one_instance_scenario(HostSlot(SERVER, "m0"))
    prev, now = reconfigure(sc, HostSlot(SWITCH_EXTERNAL, "s0"))
    b = costs.step_objective(now, prev, now.routes, sc.network, sc, 1,
                             costs.Weights(1.0, 1.0))
    assert b.reconfiguration_cost == b.migration_cost + b.programming_cost
    assert b.weighted_total == pytest.approx(
        b.it_cost + b.bandwidth_cost + b.reconfiguration_cost, rel=1e-12)


def test_step_objective_beta_zero_makes_reconfig_free():
    sc = one_instance_scenario(HostSlot(SERVER, "m0"))
    prev, now = reconfigure(sc, HostSlot(SWITCH_EXTERNAL, "s0"))
    b = costs.step_objective(now, prev, now.routes, sc.network, sc, 1,
                             costs.Weights(1.0, 0.0))
    assert b.weighted_total == pytest.approx(b.it_cost + b.bandwidth_cost)


# --- delays ---------------------------------------------------------------------


def test_migration_delay_no_moves():
    sc = one_instance_scenario(HostSlot(SERVER, "m0"))
    prev, now = reconfigure(sc, HostSlot(SERVER, "m0"))
    assert costs.migration_delay(now, prev, sc.network, sc.catalog,
                                 sc.requests[0]) == 0.0


def test_migration_delay_10gb_over_40gbps():
    sc = one_instance_scenario(HostSlot(SERVER, "m0"))
    path, _cost, _bw = sc.network.transfer_route("m0", "m1")
    for a, b in zip(path, path[1:]):
        sc.network.link(a, b).bandwidth = 40_000.0
    sc.network._route_cache.clear()
    prev, now = reconfigure(sc, HostSlot(SERVER, "m1"))
    assert costs.migration_delay(now, prev, sc.network, sc.catalog,
                                 sc.requests[0]) == pytest.approx(2000.0)


def test_migration_delay_max_not_sum():
    net = chain_net()
    catalog = [make_type("f0", server_fp=1000.0, instances=2)]
    req = simple_request(vnfs=("f0", "f0"))
    hosts = {("f0", 0): HostSlot(SERVER, "m0"), ("f0", 1): HostSlot(SERVER, "m1")}
    assignment = {("q0", 0): ("f0", 0), ("q0", 1): ("f0", 1)}
    sc = make_scenario(net, catalog, [req], hosts, assignment)
    from sfcem.placement import apply_action
    prev = sc.initial_placement
    action = {("f0", 0): HostSlot(SERVER, "m1"), ("f0", 1): HostSlot(SERVER, "m0")}
    now = apply_action(prev, action, sc, 1)
    single = units.transfer_time_ms(1000.0, min(
        sc.network.link(a, b).bandwidth
        for a, b in zip(*[sc.network.transfer_route("m0", "m1")[0][i:] for i in (0, 1)])))
    got = costs.migration_delay(now, prev, sc.network, sc.catalog, req)
    assert got == pytest.approx(single)  # both moves in parallel: max


def test_programming_delay_20mb_over_50gbps():
    sc = one_instance_scenario(HostSlot(SERVER, "m0"), switch_fp=20.0)
    sc.network.switch("s0").controller_bandwidth = 50_000.0
    prev, now = reconfigure(sc, HostSlot(SWITCH_EXTERNAL, "s0"))
    got = costs.programming_delay(now, prev, sc.network, sc.catalog,
                                  sc.requests[0])
    assert got == pytest.approx(20.0 * 8.0 / 50_000.0 * 1000.0)  # 3.2 ms


def test_programming_delay_same_switch_zero():
    sc = one_instance_scenario(HostSlot(SWITCH_LOCAL, "s0"))
    prev, now = reconfigure(sc, HostSlot(SWITCH_EXTERNAL, "s0"))
    assert costs.programming_delay(now, prev, sc.network, sc.catalog,
                                   sc.requests[0]) == 0.0


def test_programming_delay_multiple_switches_max():
    net = chain_net()
    catalog = [make_type("f0", switch_fp=20.0, instances=2)]
    req = simple_request(vnfs=("f0", "f0"))
    hosts = {("f0", 0): HostSlot(SERVER, "m0"), ("f0", 1): HostSlot(SERVER, "m1")}
    assignment = {("q0", 0): ("f0", 0), ("q0", 1): ("f0", 1)}
    sc = make_scenario(net, catalog, [req], hosts, assignment)
    net.switch("s0").controller_bandwidth = 50_000.0
    net.switch("s1").controller_bandwidth = 10_000.0
    from sfcem.placement import apply_action
    action = {("f0", 0): HostSlot(SWITCH_LOCAL, "s0"),
              ("f0", 1): HostSlot(SWITCH_EXTERNAL, "s1")}
    now = apply_action(sc.initial_placement, action, sc, 1)
    got = costs.programming_delay(now, sc.initial_placement, net, sc.catalog, req)
    assert got == pytest.approx(20.0 * 8.0 / 10_000.0 * 1000.0)  # slower switch


# --- RDMA unit delay --------------------------------------------------------------


def test_em_unit_delay_two_fetches():
    vnf = make_type("f0", switch_fp=20.0)
    sw = make_switch("s0", rdma=10.0, lm_delay=0.01, rdma_delay=0.0001)
    assert costs.em_unit_delay(vnf, sw) == pytest.approx(0.0202, rel=1e-12)


def test_em_unit_delay_single_fetch_at_boundary():
    vnf = make_type("f0", switch_fp=10.0)
    sw = make_switch("s0", rdma=10.0, lm_delay=0.01, rdma_delay=0.0001)
    assert costs.em_unit_delay(vnf, sw) == pytest.approx(0.0101, rel=1e-12)


def test_em_delay_exceeds_lm_delay():
    for seed in range(10):
        sc, _prev, _now = helpers.micro_case(seed)
        for t in sc.catalog:
            for sw in sc.network.switches:
                assert costs.em_unit_delay(t, sw) > sw.lm_unit_delay[t.id]


def test_em_unit_delay_monotone():
    sw = make_switch("s0", rdma=10.0, lm_delay=0.01, rdma_delay=0.0001)
    delays = [costs.em_unit_delay(make_type("f0", switch_fp=fp), sw)
              for fp in (5.0, 10.0, 15.0, 20.0, 25.0, 35.0)]
    assert delays == sorted(delays)
    caps = [costs.em_unit_delay(make_type("f0", switch_fp=20.0),
                                make_switch("s0", rdma=c, lm_delay=0.01,
                                            rdma_delay=0.0001))
            for c in (5.0, 10.0, 20.0, 40.0)]
    assert caps == sorted(caps, reverse=True)


# --- processing / transmission ------------------------------------------------------


def test_processing_delay_linear_in_rate():
    sc = one_instance_scenario(HostSlot(SWITCH_LOCAL, "s0"))
    req = sc.requests[0]
    d1 = costs.processing_delay(sc.initial_placement, sc, 0, req)
    half = simple_request(rate=req.traffic_at(0) / 2)
    sc.requests[0] = half
    d2 = costs.processing_delay(sc.initial_placement, sc, 0, half)
    assert d2 == pytest.approx(d1 / 2)


def test_switch_processing_faster_than_server():
    sc_srv = one_instance_scenario(HostSlot(SERVER, "m0"))
    sc_sw = one_instance_scenario(HostSlot(SWITCH_LOCAL, "s0"))
    d_srv = costs.processing_delay(sc_srv.initial_placement, sc_srv, 0,
                                   sc_srv.requests[0])
    d_sw = costs.processing_delay(sc_sw.initial_placement, sc_sw, 0,
                                  sc_sw.requests[0])
    assert d_sw < d_srv  # 0.02 vs 0.2 ms per MB in the helpers


def test_em_processing_scales_lm_by_fetch_count():
    sc_lm = one_instance_scenario(HostSlot(SWITCH_LOCAL, "s0"), switch_fp=100.0)
    sc_em = one_instance_scenario(HostSlot(SWITCH_EXTERNAL, "s0"), switch_fp=100.0)
    req = sc_lm.requests[0]
    d_lm = costs.processing_delay(sc_lm.initial_placement, sc_lm, 0, req)
    d_em = costs.processing_delay(sc_em.initial_placement, sc_em, 0, req)
    sw = sc_em.network.switch("s0")
    vnf = sc_em.catalog[0]
    xi = math.ceil(vnf.switch_footprint / sw.rdma_table_capacity)
    expect = d_lm * xi * (1 + sw.rdma_access_delay / sw.lm_unit_delay["f0"])
    assert d_em == pytest.approx(expect, rel=1e-9)


def test_unassigned_position_raises():
    sc = one_instance_scenario(HostSlot(SERVER, "m0"))
    broken = PlacementConfiguration(dict(sc.initial_placement.instance_host),
                                    {}, sc.initial_placement.routes, 0)
    with pytest.raises(costs.EvaluationError):
        costs.processing_delay(broken, sc, 0, sc.requests[0])


def test_transmission_colocated_chain_zero():
    net = chain_net()
    catalog = [make_type("f0")]
    req = simple_request(source="s0", destination="s1")
    sc = make_scenario(net, catalog, [req],
                       {("f0", 0): HostSlot(SWITCH_LOCAL, "s0")},
                       {("q0", 0): ("f0", 0)})
    # route co-located chain: source==host, single hop to destination
    plan = RoutePlan(paths={("q0", 0): (), ("q0", 1): ()}, link_load={})
    assert costs.transmission_delay(plan, net, sc, 0, req) == 0.0


def test_transmission_additive_per_hop():
    net = chain_net()
    for link in net.links:
        link.unit_delay = 0.5
    catalog = [make_type("f0")]
    req = simple_request(rate=16.0, source="s0", destination="s1")
    sc = make_scenario(net, catalog, [req],
                       {("f0", 0): HostSlot(SWITCH_LOCAL, "s0")},
                       {("q0", 0): ("f0", 0)})
    one = costs.transmission_delay(sc.initial_placement.routes, net, sc, 0, req)
    assert one == pytest.approx(units.rate_to_volume_mb(16.0) * 0.5)
    sc2 = make_scenario(net, catalog, [req], {("f0", 0): HostSlot(SERVER, "m1")},
                        {("q0", 0): ("f0", 0)})
    three = costs.transmission_delay(sc2.initial_placement.routes, net, sc2, 0, req)
    assert three == pytest.approx(3 * one, rel=1e-12)


def test_propagation_only_mode():
    net = chain_net()
    catalog = [make_type("f0")]
    req = simple_request(rate=16.0, source="s0", destination="s1")
    sc = make_scenario(net, catalog, [req],
                       {("f0", 0): HostSlot(SWITCH_LOCAL, "s0")},
                       {("q0", 0): ("f0", 0)})
    plan = sc.initial_placement.routes
    got = costs.transmission_delay(plan, net, sc, 0, req,
                                   mode=costs.PROPAGATION_ONLY)
    assert got == pytest.approx(net.link("s0", "s1").unit_delay)


# --- total delay ------------------------------------------------------------------


def test_total_delay_without_reconfig():
    sc = one_instance_scenario(HostSlot(SERVER, "m0"))
    cfg = sc.initial_placement
    d = costs.total_delay(cfg, cfg, cfg.routes, sc.network, sc, 0,
                          sc.requests[0])
    assert d.reconfig_delay == 0.0
    assert d.total == pytest.approx(d.processing_delay + d.transmission_delay)


def test_reconfig_delay_is_max_of_components():
    for seed in range(15):
        sc, prev, now = helpers.micro_case(seed)
        for req in sc.requests:
            d = costs.total_delay(now, prev, now.routes, sc.network, sc, 1, req)
            assert d.reconfig_delay == max(d.migration_delay, d.programming_delay)
            assert d.total == pytest.approx(
                d.reconfig_delay + d.processing_delay + d.transmission_delay)


def test_deadline_boundary_strict():
    sc = one_instance_scenario(HostSlot(SERVER, "m0"))
    cfg = sc.initial_placement
    d = costs.total_delay(cfg, cfg, cfg.routes, sc.network, sc, 0, sc.requests[0])
    exact = simple_request(deadline=d.total)
    sc.requests[0] = exact
    d2 = costs.total_delay(cfg, cfg, cfg.routes, sc.network, sc, 0, exact)
    assert d2.total == d.total
    assert not d2.deadline_met  # strict <


# --- brute-force agreement ----------------------------------------------------------


def test_all_formulas_match_brute_force():
    for seed in range(20):
        sc, prev, now = helpers.micro_case(seed)
        net, plan = sc.network, now.routes
        assert costs.it_resource_cost(now, net, sc.catalog) \
            == pytest.approx(brute.it_cost(now, net, sc.catalog), rel=1e-9)
        assert costs.bandwidth_cost(plan, net, sc, 1) \
            == pytest.approx(brute.bandwidth_cost(plan, net, sc, 1), rel=1e-9)
        assert costs.migration_cost(now, prev, net, sc.catalog) \
            == pytest.approx(brute.migration_cost(now, prev, net, sc.catalog),
                             rel=1e-9)
        assert costs.programming_cost(now, prev, net, sc.catalog) \
            == pytest.approx(brute.programming_cost(now, prev, net, sc.catalog),
                             rel=1e-9)
        for req in sc.requests:
            assert costs.total_delay(now, prev, plan, net, sc, 1, req).total \
                == pytest.approx(brute.total_delay(now, prev, plan, net, sc, 1,
                                                   req), rel=1e-9)


def test_identity_reconfiguration_free():
    for seed in range(10):
        sc, prev, _now = helpers.micro_case(seed)
        same = PlacementConfiguration(dict(prev.instance_host),
                                      dict(prev.assignment), prev.routes, 1)
        assert costs.migration_cost(same, prev, sc.network, sc.catalog) == 0.0
        assert costs.programming_cost(same, prev, sc.network, sc.catalog) == 0.0
        for req in sc.requests:
            d = costs.total_delay(same, prev, prev.routes, sc.network, sc, 1, req)
            assert d.reconfig_delay == 0.0


def test_outputs_nonnegative_and_finite():
    for seed in range(10):
        sc, prev, now = helpers.micro_case(seed)
        b = costs.step_objective(now, prev, now.routes, sc.network, sc, 1,
                                 costs.Weights())
        for value in (b.it_cost, b.bandwidth_cost, b.migration_cost,
                      b.programming_cost, b.weighted_total):
            assert value >= 0.0 and math.isfinite(value)
