"""Per-instance policy networks with static/dynamic action filtering.

Every VNF instance owns one single-layer softmax network scoring its host
slots; the softmax outputs double as normalized Q-scores for the Bellman
update. Static filtering removes output neurons whose slot can never fit the
instance; dynamic filtering masks, per epoch, slots without enough residual
storage (the current host always stays selectable). When dynamic filtering
is on, the joint action is additionally committed instance by instance
against a running storage ledger so that no explored configuration can
violate a storage constraint, which the per-instance masks alone cannot
guarantee when several instances move into the same memory at once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import costs, placement, routing
from .placement import (SERVER, SWITCH_EXTERNAL, SWITCH_LOCAL, HostSlot,
                        InstanceId, PlacementConfiguration, apply_action,
                        check_processing_capacity, check_storage)

FILTER_MODES = ("none", "static", "dynamic", "hybrid")

Label = tuple  # ('m', server) | ('s', switch, 'LM') | ('s', switch, 'EM')


class UnplaceableInstanceError(RuntimeError):
    pass


def label_to_slot(label: Label) -> HostSlot:
    if label[0] == "m":
        return HostSlot(SERVER, label[1])
    return HostSlot(SWITCH_LOCAL if label[2] == "LM" else SWITCH_EXTERNAL, label[1])


def slot_to_label(slot: HostSlot) -> Label:
    if slot.kind == SERVER:
        return ("m", slot.node)
    return ("s", slot.node, "LM" if slot.kind == SWITCH_LOCAL else "EM")


def full_label_space(net, server_only: bool = False) -> list[Label]:
    """Canonical output order: servers, then per switch LM and EM."""
    labels: list[Label] = [("m", m) for m in net.server_ids]
    if not server_only:
        for s in net.switch_ids:
            labels.append(("s", s, "LM"))
            labels.append(("s", s, "EM"))
    return labels


# --- state features ----------------------------------------------------------


@dataclass
class StateFeatures:
    """Residual capacities and current placement, scaled to [0, 1]."""

    server_storage_left: np.ndarray  # over servers
    lm_storage_left: np.ndarray  # over switches
    em_storage_left: np.ndarray  # over switches
    instance_capacity_left: np.ndarray  # (max instance index, types)
    adjacent_bandwidth_left: np.ndarray  # servers then switches
    placement_onehot: np.ndarray  # instances x full slot space, flattened

    def vector(self) -> np.ndarray:
        return np.concatenate([
            self.server_storage_left, self.lm_storage_left, self.em_storage_left,
            self.instance_capacity_left.ravel(), self.adjacent_bandwidth_left,
            self.placement_onehot,
        ])


def extract_state(config: PlacementConfiguration, net, scenario,
                  epoch: int) -> StateFeatures:
    """State snapshot for a reconfiguration decision at ``epoch``: the
    previous configuration's hosts and routes, meeting the epoch's traffic."""
    catalog = scenario.catalog
    types = {t.id: t for t in catalog}

    server_used = {m.id: 0.0 for m in net.servers}
    lm_used = {s.id: 0.0 for s in net.switches}
    em_used = {s.id: 0.0 for s in net.switches}
    for (f, _i), slot in config.instance_host.items():
        t = types[f]
        if slot.kind == SERVER:
            server_used[slot.node] += t.server_footprint
        elif slot.kind == SWITCH_LOCAL:
            lm_used[slot.node] += t.switch_footprint
        else:
            em_used[slot.node] += t.switch_footprint
    server_left = np.array([
        max(0.0, 1.0 - server_used[m.id] / m.storage_capacity) for m in net.servers])
    lm_left = np.array([
        max(0.0, 1.0 - lm_used[s.id] / s.lm_capacity) for s in net.switches])
    em_left = np.array([
        max(0.0, 1.0 - em_used[s.id] / s.em_capacity) for s in net.switches])

    loads = placement.instance_loads(config, scenario, epoch)
    max_count = max(t.instance_count for t in catalog)
    cap_left = np.zeros((max_count, len(catalog)))
    for j, t in enumerate(catalog):
        for i in range(t.instance_count):
            slot = config.instance_host.get((t.id, i))
            if slot is None:
                continue
            cap = t.switch_capacity if slot.on_switch else t.server_capacity
            cap_left[i, j] = min(1.0, max(0.0, 1.0 - loads.get((t.id, i), 0.0) / cap))

    link_load: dict[tuple[str, str], float] = {}
    if config.routes is not None:
        by_id = {r.id: r for r in scenario.requests}
        for (q, _l), path in config.routes.paths.items():
            rate = by_id[q].traffic_at(epoch)
            for u, v in zip(path, path[1:]):
                k = routing.link_key(u, v)
                link_load[k] = link_load.get(k, 0.0) + rate
    rb = []
    for nid in net.server_ids + net.switch_ids:
        total, left = 0.0, 0.0
        for nb in net.neighbors(nid):
            link = net.link(nid, nb)
            total += link.bandwidth
            left += max(0.0, link.bandwidth - link_load.get(routing.link_key(nid, nb), 0.0))
        rb.append(left / total if total > 0 else 0.0)

    space = full_label_space(net)
    idx = {lab: k for k, lab in enumerate(space)}
    onehot = np.zeros((len(scenario.instances()), len(space)))
    for row, inst in enumerate(scenario.instances()):
        slot = config.instance_host.get(inst)
        if slot is not None:
            onehot[row, idx[slot_to_label(slot)]] = 1.0

    return StateFeatures(server_left, lm_left, em_left, cap_left,
                         np.array(rb), onehot.ravel())


# --- filters -----------------------------------------------------------------


def build_static_filter(catalog, net, server_only: bool = False
                        ) -> dict[InstanceId, list[Label]]:
    """Retained output labels per instance: slots whose capacity strictly
    exceeds the footprint can ever host it."""
    retained: dict[InstanceId, list[Label]] = {}
    for t in catalog:
        labels: list[Label] = []
        for m in net.servers:
            if t.server_footprint < m.storage_capacity:
                labels.append(("m", m.id))
        if not server_only:
            for s in net.switches:
                if t.switch_footprint < s.lm_capacity:
                    labels.append(("s", s.id, "LM"))
                if t.switch_footprint < s.em_capacity:
                    labels.append(("s", s.id, "EM"))
        if not labels:
            raise UnplaceableInstanceError(
                f"no slot can ever host instances of type {t.id}")
        order = {lab: k for k, lab in enumerate(full_label_space(net, server_only))}
        labels.sort(key=order.__getitem__)
        for i in range(t.instance_count):
            retained[(t.id, i)] = list(labels)
    return retained


def build_dynamic_filter(state: StateFeatures, config_prev: PlacementConfiguration,
                         catalog, instance: InstanceId, net,
                         labels: list[Label]) -> np.ndarray:
    """Activate labels whose residual storage strictly exceeds the instance
    footprint; the current host is always active."""
    t = next(x for x in catalog if x.id == instance[0])
    current = slot_to_label(config_prev.instance_host[instance])
    server_pos = {m: i for i, m in enumerate(net.server_ids)}
    switch_pos = {s: i for i, s in enumerate(net.switch_ids)}
    mask = np.zeros(len(labels), dtype=bool)
    for k, lab in enumerate(labels):
        if lab == current:
            mask[k] = True
        elif lab[0] == "m":
            cap = net.server(lab[1]).storage_capacity
            mask[k] = state.server_storage_left[server_pos[lab[1]]] * cap \
                > t.server_footprint
        elif lab[2] == "LM":
            cap = net.switch(lab[1]).lm_capacity
            mask[k] = state.lm_storage_left[switch_pos[lab[1]]] * cap \
                > t.switch_footprint
        else:
            cap = net.switch(lab[1]).em_capacity
            mask[k] = state.em_storage_left[switch_pos[lab[1]]] * cap \
                > t.switch_footprint
    return mask


class StorageLedger:
    """Running storage occupancy used to commit a joint action slot by slot."""

    def __init__(self, net, catalog, config: PlacementConfiguration):
        self.net = net
        self.types = {t.id: t for t in catalog}
        self.used: dict[HostSlot, float] = {}
        self.location: dict[InstanceId, HostSlot] = dict(config.instance_host)
        for inst, slot in self.location.items():
            self.used[slot] = self.used.get(slot, 0.0) + self._footprint(inst, slot)

    def _footprint(self, inst: InstanceId, slot: HostSlot) -> float:
        t = self.types[inst[0]]
        return t.switch_footprint if slot.on_switch else t.server_footprint

    def _capacity(self, slot: HostSlot) -> float:
        if slot.kind == SERVER:
            return self.net.server(slot.node).storage_capacity
        s = self.net.switch(slot.node)
        return s.lm_capacity if slot.kind == SWITCH_LOCAL else s.em_capacity

    def can_host(self, inst: InstanceId, slot: HostSlot) -> bool:
        if slot == self.location[inst]:
            return True
        residual = self._capacity(slot) - self.used.get(slot, 0.0)
        return residual > self._footprint(inst, slot)

    def commit(self, inst: InstanceId, slot: HostSlot) -> None:
        old = self.location[inst]
        if slot == old:
            return
        self.used[old] -= self._footprint(inst, old)
        self.used[slot] = self.used.get(slot, 0.0) + self._footprint(inst, slot)
        self.location[inst] = slot


# --- policy networks ---------------------------------------------------------


@dataclass
class PolicyHead:
    """Single fully-connected layer with softmax over retained outputs."""

    labels: list[Label]
    weights: np.ndarray  # (outputs, feature dim)
    bias: np.ndarray  # (outputs,)

    def scores(self, x: np.ndarray) -> np.ndarray:
        return self.weights @ x + self.bias

    def probabilities(self, x: np.ndarray, active: np.ndarray) -> np.ndarray:
        """Masked softmax; inactive outputs get probability zero."""
        z = self.scores(x)
        p = np.zeros_like(z)
        za = z[active]
        e = np.exp(za - za.max())
        p[active] = e / e.sum()
        return p

    def td_update(self, x: np.ndarray, active: np.ndarray, chosen: int,
                  target: float, learning_rate: float) -> float:
        """One gradient-descent step on (target - p[chosen])^2 / 2."""
        p = self.probabilities(x, active)
        err = target - p[chosen]
        grad_z = np.zeros_like(p)
        sel = np.zeros_like(p)
        sel[chosen] = 1.0
        grad_z[active] = -err * p[chosen] * (sel[active] - p[active])
        self.weights -= learning_rate * np.outer(grad_z, x)
        self.bias -= learning_rate * grad_z
        return err


@dataclass
class PolicyBank:
    """One policy head per VNF instance plus the shared feature layout."""

    kind: str  # "sr_em" or "server_only"
    filter_mode: str
    instances: list[InstanceId]
    heads: dict[InstanceId, PolicyHead]
    feature_dim: int

    def save(self, path) -> None:
        doc = {
            "format": "sfcem-policy-v1",
            "kind": self.kind,
            "filter_mode": self.filter_mode,
            "feature_dim": self.feature_dim,
            "instances": [f"{f}/{i}" for f, i in self.instances],
            "heads": {
                f"{f}/{i}": {
                    "labels": [list(lab) for lab in head.labels],
                    "weights": head.weights.tolist(),
                    "bias": head.bias.tolist(),
                } for (f, i), head in sorted(self.heads.items())
            },
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, sort_keys=True, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "PolicyBank":
        with open(path) as fh:
            doc = json.load(fh)
        if doc.get("format") != "sfcem-policy-v1":
            raise ValueError(f"format: unsupported policy file {doc.get('format')!r}")

        def inst(key: str) -> InstanceId:
            f, i = key.rsplit("/", 1)
            return (f, int(i))

        heads = {inst(k): PolicyHead([tuple(lab) for lab in h["labels"]],
                                     np.array(h["weights"]), np.array(h["bias"]))
                 for k, h in doc["heads"].items()}
        return cls(doc["kind"], doc["filter_mode"],
                   [inst(k) for k in doc["instances"]], heads, doc["feature_dim"])


@dataclass
class TrainingConfig:
    episodes: int = 1000
    epsilon_start: float = 1.0
    epsilon_end: float = 0.02
    learning_rate: float = 0.2
    discount: float = 0.3
    reward_weights: tuple[float, float] = (0.8, 0.2)  # (acceptance, inverse cost)
    filter_mode: str = "hybrid"
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.epsilon_end <= self.epsilon_start <= 1.0):
            raise ValueError("epsilon_schedule: need 0 <= end <= start <= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate: must be > 0")
        if self.discount <= 0:
            raise ValueError("discount: must be > 0")
        if self.filter_mode not in FILTER_MODES:
            raise ValueError(f"filter_mode: unknown mode {self.filter_mode!r}")

    def epsilon_at(self, episode: int) -> float:
        if self.episodes <= 1:
            return self.epsilon_end
        frac = episode / (self.episodes - 1)
        return self.epsilon_start + (self.epsilon_end - self.epsilon_start) * frac


# --- action selection ---------------------------------------------------------


def build_masks(bank: PolicyBank, state: StateFeatures,
                config_prev: PlacementConfiguration, scenario,
                net) -> dict[InstanceId, np.ndarray]:
    """Per-instance active-output masks under the bank's filter mode."""
    masks = {}
    for inst in bank.instances:
        labels = bank.heads[inst].labels
        if bank.filter_mode in ("dynamic", "hybrid"):
            masks[inst] = build_dynamic_filter(state, config_prev, scenario.catalog,
                                               inst, net, labels)
        else:
            masks[inst] = np.ones(len(labels), dtype=bool)
        current = slot_to_label(config_prev.instance_host[inst])
        if current not in labels:
            raise UnplaceableInstanceError(
                f"current host {current} of {inst[0]}/{inst[1]} is outside its "
                f"retained outputs; the configuration cannot be expressed")
    return masks


def select_action(bank: PolicyBank, state_vec: np.ndarray,
                  masks: dict[InstanceId, np.ndarray], epsilon: float,
                  rng: np.random.Generator, ledger: StorageLedger | None = None):
    """Epsilon-greedy slot choice per instance network.

    With a ledger, choices are committed sequentially in canonical instance
    order and slots that no longer fit are masked out on top of ``masks``;
    staying put is always possible, so the effective mask is never empty.

    Returns (action, chosen output index per instance, effective masks).
    """
    action: dict[InstanceId, HostSlot] = {}
    chosen: dict[InstanceId, int] = {}
    effective: dict[InstanceId, np.ndarray] = {}
    for inst in bank.instances:
        head = bank.heads[inst]
        mask = masks[inst]
        if ledger is not None:
            mask = mask & np.array([ledger.can_host(inst, label_to_slot(lab))
                                    for lab in head.labels])
        active_idx = np.flatnonzero(mask)
        if epsilon > 0.0 and rng.random() < epsilon:
            pick = int(active_idx[rng.integers(len(active_idx))])
        else:
            p = head.probabilities(state_vec, mask)
            pick = int(active_idx[np.argmax(p[active_idx])])
        slot = label_to_slot(head.labels[pick])
        if ledger is not None:
            ledger.commit(inst, slot)
        action[inst] = slot
        chosen[inst] = pick
        effective[inst] = mask
    return action, chosen, effective


# --- reward -------------------------------------------------------------------


def request_accepted(config_t, config_prev, plan, net, scenario, epoch,
                     request, overloaded, mode) -> bool:
    """Deadline met strictly, and none of the chain's links over capacity."""
    for n in range(len(request.vnfs)):
        if config_t.assignment.get((request.id, n)) is None:
            return False
    delay = costs.total_delay(config_t, config_prev, plan, net, scenario,
                              epoch, request, mode)
    if not delay.deadline_met:
        return False
    return not any(routing.link_key(u, v) in overloaded
                   for u, v in plan.edges_of(request.id))


def acceptance_ratio(config_t, config_prev, plan, net, scenario, epoch,
                     mode: str = costs.PER_UNIT) -> float:
    overloaded = routing.overloaded_links(plan, net, scenario, epoch)
    accepted = sum(request_accepted(config_t, config_prev, plan, net, scenario,
                                    epoch, r, overloaded, mode)
                   for r in scenario.requests)
    return accepted / len(scenario.requests)


def compute_reward(config_t, config_prev, plan, net, scenario, epoch,
                   weights: costs.Weights,
                   reward_weights: tuple[float, float] = (0.8, 0.2)) -> float:
    """Zero on any storage or processing-capacity violation, otherwise a
    blend of the deadline acceptance ratio and the inverse step cost."""
    storage = check_storage(config_t, net, scenario.catalog)
    capacity = check_processing_capacity(config_t, scenario, epoch)
    if not storage.ok or not capacity.ok:
        return 0.0
    acr = acceptance_ratio(config_t, config_prev, plan, net, scenario, epoch,
                           weights.transmission_delay_mode)
    breakdown = costs.step_objective(config_t, config_prev, plan, net, scenario,
                                     epoch, weights)
    alpha_r, beta_r = reward_weights
    return alpha_r * acr + beta_r / max(breakdown.weighted_total, costs.COST_FLOOR)


def server_only_reward(config_t, config_prev, plan, net, scenario, epoch,
                       weights: costs.Weights) -> float:
    """Negated accumulation of chain delays plus migration cost (the
    server-restricted comparison agent's objective)."""
    total = costs.migration_cost(config_t, config_prev, net, scenario.catalog)
    for req in scenario.requests:
        total += costs.total_delay(config_t, config_prev, plan, net, scenario,
                                   epoch, req, weights.transmission_delay_mode).total
    return -total


# --- training ------------------------------------------------------------------


def _check_shared_structure(scenarios) -> None:
    first = scenarios[0]
    net_doc = first.network.to_dict()
    cat = [(t.id, t.instance_count) for t in first.catalog]
    for sc in scenarios[1:]:
        if sc.network.to_dict() != net_doc:
            raise ValueError("scenarios: all scenarios must share one network")
        if [(t.id, t.instance_count) for t in sc.catalog] != cat:
            raise ValueError("scenarios: all scenarios must share the catalog shape")


def new_bank(scenarios, filter_mode: str, seed: int,
             kind: str = "sr_em") -> PolicyBank:
    """Freshly initialized policy heads for the scenario family."""
    sc = scenarios[0]
    net = sc.network
    server_only = kind == "server_only"
    rng = np.random.default_rng(seed)
    probe = extract_state(sc.initial_placement, net, sc, 0)
    dim = probe.vector().size
    if filter_mode in ("static", "hybrid"):
        retained = build_static_filter(sc.catalog, net, server_only)
    else:
        space = full_label_space(net, server_only)
        retained = {inst: list(space) for inst in sc.instances()}
    heads = {}
    for inst in sc.instances():
        labels = retained[inst]
        heads[inst] = PolicyHead(
            labels=labels,
            weights=rng.normal(0.0, 0.01, size=(len(labels), dim)),
            bias=np.zeros(len(labels)),
        )
    return PolicyBank(kind, filter_mode, sc.instances(), heads, dim)


def train(scenarios, config: TrainingConfig, weights: costs.Weights | None = None,
          kind: str = "sr_em", on_step=None):
    """Three-step loop per decision epoch: epsilon-greedy action, load-balanced
    re-routing with carried assignments, reward and TD update of each head.

    Returns (bank, trace) where trace rows are (episode, mean_reward, epsilon).
    """
    if not scenarios:
        raise ValueError("scenarios: training set must not be empty")
    _check_shared_structure(scenarios)
    weights = weights or costs.Weights()
    net = scenarios[0].network
    bank = new_bank(scenarios, config.filter_mode, config.seed, kind)
    rng = np.random.default_rng(config.seed + 1)
    dynamic = config.filter_mode in ("dynamic", "hybrid")
    trace: list[tuple[int, float, float]] = []

    for episode in range(config.episodes):
        eps = config.epsilon_at(episode)
        sc = scenarios[int(rng.integers(len(scenarios)))]
        cfg = sc.initial_placement
        rewards = []
        for t in range(1, sc.epochs):
            state = extract_state(cfg, net, sc, t)
            x = state.vector()
            masks = build_masks(bank, state, cfg, sc, net)
            ledger = StorageLedger(net, sc.catalog, cfg) if dynamic else None
            action, chosen, eff = select_action(bank, x, masks, eps, rng, ledger)
            nxt = apply_action(cfg, action, sc, t)
            if kind == "server_only":
                r = server_only_reward(nxt, cfg, nxt.routes, net, sc, t, weights)
            else:
                r = compute_reward(nxt, cfg, nxt.routes, net, sc, t, weights,
                                   config.reward_weights)
            if t < sc.epochs - 1:
                nstate = extract_state(nxt, net, sc, t + 1)
                nx = nstate.vector()
                nmasks = build_masks(bank, nstate, nxt, sc, net)
            for inst in bank.instances:
                head = bank.heads[inst]
                if t < sc.epochs - 1:
                    probs = head.probabilities(nx, nmasks[inst])
                    target = r + config.discount * float(probs[nmasks[inst]].max())
                else:
                    target = r
                head.td_update(x, eff[inst], chosen[inst], target,
                               config.learning_rate)
            if on_step is not None:
                on_step(sc, t, nxt)
            cfg = nxt
            rewards.append(r)
        trace.append((episode, float(np.mean(rewards)) if rewards else 0.0, eps))
    return bank, trace


# --- evaluation -----------------------------------------------------------------


@dataclass
class EpochMetrics:
    scenario: str
    epoch: int
    working: bool
    acceptance_ratio: float
    it_cost: float
    bandwidth_cost: float
    migration_cost: float
    programming_cost: float
    reconfig_cost: float
    total_cost: float
    server_share: float
    lm_share: float
    em_share: float


def host_shares(config: PlacementConfiguration) -> tuple[float, float, float]:
    n = len(config.instance_host)
    if n == 0:
        return 0.0, 0.0, 0.0
    kinds = [slot.kind for slot in config.instance_host.values()]
    return (kinds.count(SERVER) / n, kinds.count(SWITCH_LOCAL) / n,
            kinds.count(SWITCH_EXTERNAL) / n)


def epoch_metrics(scenario, config_t, config_prev, epoch: int,
                  weights: costs.Weights) -> EpochMetrics:
    net = scenario.network
    plan = config_t.routes
    breakdown = costs.step_objective(config_t, config_prev, plan, net, scenario,
                                     epoch, weights)
    srv, lm, em = host_shares(config_t)
    return EpochMetrics(
        scenario=scenario.name,
        epoch=epoch,
        working=scenario.is_working_epoch(epoch),
        acceptance_ratio=acceptance_ratio(config_t, config_prev, plan, net,
                                          scenario, epoch,
                                          weights.transmission_delay_mode),
        it_cost=breakdown.it_cost,
        bandwidth_cost=breakdown.bandwidth_cost,
        migration_cost=breakdown.migration_cost,
        programming_cost=breakdown.programming_cost,
        reconfig_cost=breakdown.reconfiguration_cost,
        total_cost=breakdown.weighted_total,
        server_share=srv,
        lm_share=lm,
        em_share=em,
    )


def greedy_rollout(bank: PolicyBank, scenario, weights: costs.Weights):
    """Deterministic epsilon=0 rollout; returns the configuration sequence."""
    net = scenario.network
    rng = np.random.default_rng(0)  # untouched at epsilon 0
    dynamic = bank.filter_mode in ("dynamic", "hybrid")
    cfg = scenario.initial_placement
    sequence = [cfg]
    for t in range(1, scenario.epochs):
        state = extract_state(cfg, net, scenario, t)
        masks = build_masks(bank, state, cfg, scenario, net)
        ledger = StorageLedger(net, scenario.catalog, cfg) if dynamic else None
        action, _chosen, _eff = select_action(bank, state.vector(), masks, 0.0,
                                              rng, ledger)
        cfg = apply_action(cfg, action, scenario, t)
        sequence.append(cfg)
    return sequence


def evaluate(policy, scenarios, weights: costs.Weights | None = None,
             seed: int = 0) -> list[EpochMetrics]:
    """Per-epoch metrics of a policy over a test set.

    ``policy`` is a trained :class:`PolicyBank`, or one of the stateless
    policy tags ``"random"`` / ``"lag"``.
    """
    from . import baselines  # late import; baselines builds on this module

    weights = weights or costs.Weights()
    rows: list[EpochMetrics] = []
    for k, sc in enumerate(scenarios):
        if isinstance(policy, PolicyBank):
            sequence = greedy_rollout(policy, sc, weights)
        elif policy == "random":
            sequence = baselines.random_rollout(sc, seed + k)
        elif policy == "lag":
            sequence = baselines.lag_rollout(sc, weights)
        else:
            raise ValueError(f"policy: unknown policy {policy!r}")
        prev = sequence[0]
        for t, cfg in enumerate(sequence):
            rows.append(epoch_metrics(sc, cfg, prev, t, weights))
            prev = cfg
    return rows
