"""Experiment configuration files.

One JSON document with four sections (``network``, ``workload``, ``training``,
``weights``) plus an ``experiment`` section for train/test set sizes. Values
use conventional networking units (GB, Gbps, ms, ns); they are converted to
the package's canonical units on load. Unknown keys are rejected so typos
fail loudly, naming the offending field.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources

from .costs import Weights
from .drl import TrainingConfig
from .network import ParamRanges
from .workload import GenParams


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    switch_count: int
    server_count: int
    ranges: ParamRanges
    gen: GenParams
    training: TrainingConfig
    weights: Weights
    train_count: int
    test_count: int
    raw: dict


_RANGE_FIELDS_NETWORK = {
    "server_storage_gb", "server_storage_cost_per_gb",
    "server_proc_delay_ms_per_mb", "lm_capacity_mb", "em_capacity_mb",
    "rdma_table_mb", "lm_cost_per_mb", "em_cost_per_mb",
    "switch_proc_delay_ms_per_mb", "rdma_access_delay_ns",
    "controller_bandwidth_gbps", "controller_cost_per_gb",
    "link_bandwidth_gbps", "link_cost_per_gb", "link_delay_ms",
}
_RANGE_FIELDS_WORKLOAD = {
    "footprint_mb", "server_footprint_mb", "switch_capacity_mbps",
    "server_capacity_mbps", "working_traffic_mbps", "nonworking_traffic_mbps",
    "working_deadline_ms", "nonworking_deadline_ms",
}


def _section(doc: dict, name: str, required: bool = True) -> dict:
    if name not in doc:
        if required:
            raise ConfigError(f"{name}: missing section")
        return {}
    if not isinstance(doc[name], dict):
        raise ConfigError(f"{name}: must be an object")
    return doc[name]


def _check_keys(section: dict, allowed: set[str], prefix: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"{prefix}.{sorted(unknown)[0]}: unknown field")


def _range(value, path: str):
    if not (isinstance(value, (list, tuple)) and len(value) == 2
            and all(isinstance(x, (int, float)) for x in value)):
        raise ConfigError(f"{path}: must be a [min, max] pair")
    return (float(value[0]), float(value[1]))


def parse_config(doc: dict) -> ExperimentConfig:
    net = _section(doc, "network")
    _check_keys(net, {"switch_count", "server_count", "ranges"}, "network")
    for key in ("switch_count", "server_count"):
        if not isinstance(net.get(key), int):
            raise ConfigError(f"network.{key}: must be an integer")
    ranges_doc = net.get("ranges", {})
    _check_keys(ranges_doc, _RANGE_FIELDS_NETWORK | {"vnf_type_count"},
                "network.ranges")
    range_kwargs = {}
    for key, value in ranges_doc.items():
        if key == "vnf_type_count":
            if not isinstance(value, int):
                raise ConfigError("network.ranges.vnf_type_count: must be an integer")
            range_kwargs[key] = value
        elif key == "rdma_table_mb" and value is None:
            range_kwargs[key] = None
        else:
            range_kwargs[key] = _range(value, f"network.ranges.{key}")
    try:
        ranges = ParamRanges(**range_kwargs)
        ranges.validate()
    except ValueError as exc:
        raise ConfigError(f"network.ranges.{exc}") from None

    wl = _section(doc, "workload")
    allowed = {"type_count", "instance_count", "request_count", "chain_length",
               "epochs", "working_epochs"} | _RANGE_FIELDS_WORKLOAD
    _check_keys(wl, allowed, "workload")
    gen_kwargs = {}
    for key, value in wl.items():
        if key in _RANGE_FIELDS_WORKLOAD:
            if key == "server_footprint_mb" and value is None:
                gen_kwargs[key] = None
            else:
                gen_kwargs[key] = _range(value, f"workload.{key}")
        elif key == "chain_length":
            lo, hi = _range(value, "workload.chain_length")
            gen_kwargs[key] = (int(lo), int(hi))
        else:
            if not isinstance(value, int):
                raise ConfigError(f"workload.{key}: must be an integer")
            gen_kwargs[key] = value
    try:
        gen = GenParams(**gen_kwargs)
        gen.validate()
    except ValueError as exc:
        raise ConfigError(f"workload.{exc}") from None

    wt = _section(doc, "weights", required=False)
    _check_keys(wt, {"alpha", "beta", "alpha_r", "beta_r",
                     "transmission_delay_mode"}, "weights")
    try:
        weights = Weights(alpha=float(wt.get("alpha", 1.0)),
                          beta=float(wt.get("beta", 1.0)),
                          transmission_delay_mode=wt.get(
                              "transmission_delay_mode", "per_unit"))
    except ValueError as exc:
        raise ConfigError(f"weights.{exc}") from None

    tr = _section(doc, "training", required=False)
    _check_keys(tr, {"episodes", "epsilon_start", "epsilon_end", "learning_rate",
                     "discount", "filter_mode"}, "training")
    try:
        training = TrainingConfig(
            episodes=int(tr.get("episodes", 1000)),
            epsilon_start=float(tr.get("epsilon_start", 1.0)),
            epsilon_end=float(tr.get("epsilon_end", 0.02)),
            learning_rate=float(tr.get("learning_rate", 0.2)),
            discount=float(tr.get("discount", 0.3)),
            reward_weights=(float(wt.get("alpha_r", 0.8)),
                            float(wt.get("beta_r", 0.2))),
            filter_mode=tr.get("filter_mode", "hybrid"),
        )
    except ValueError as exc:
        raise ConfigError(f"training.{exc}") from None

    ex = _section(doc, "experiment", required=False)
    _check_keys(ex, {"train_count", "test_count"}, "experiment")
    train_count = ex.get("train_count", 1)
    test_count = ex.get("test_count", 1)
    for key, value in (("train_count", train_count), ("test_count", test_count)):
        if not isinstance(value, int) or value < 0:
            raise ConfigError(f"experiment.{key}: must be a non-negative integer")

    return ExperimentConfig(
        switch_count=net["switch_count"],
        server_count=net["server_count"],
        ranges=ranges,
        gen=gen,
        training=training,
        weights=weights,
        train_count=train_count,
        test_count=test_count,
        raw=doc,
    )


def load_config(path_or_name: str) -> ExperimentConfig:
    """Load a config from a file path or a bundled name like 'paper_defaults'."""
    if os.path.exists(path_or_name):
        with open(path_or_name) as fh:
            doc = json.load(fh)
    else:
        bundled = resources.files("sfcem.configs").joinpath(f"{path_or_name}.json")
        if not bundled.is_file():
            raise ConfigError(f"config: no file or bundled config {path_or_name!r}")
        doc = json.loads(bundled.read_text())
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be an object")
    return parse_config(doc)
