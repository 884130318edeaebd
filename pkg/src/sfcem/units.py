"""Unit conventions and conversions.

Everything inside the package uses one canonical system:

* storage and traffic volume: megabytes (MB)
* traffic rates and bandwidth: megabits per second (Mbps)
* delays: milliseconds (ms)
* cost rates: currency per MB (storage rent and per-traffic-volume transfer)

Config files may use the usual networking units (GB, Gbps, ns, per-GB
prices); they are converted once on load. Decimal prefixes throughout
(1 GB = 1000 MB, 1 Gbps = 1000 Mbps).

A traffic rate is turned into a per-epoch volume via one normalized slot of
``SLOT_SECONDS``; every policy is scored under the same normalization, so the
absolute currency scale is arbitrary but comparisons are not.
"""

MB_PER_GB = 1000.0
MBIT_PER_MB = 8.0
MS_PER_S = 1000.0
NS_PER_MS = 1_000_000.0

SLOT_SECONDS = 1.0


def gb_to_mb(gb: float) -> float:
    return gb * MB_PER_GB


def gbps_to_mbps(gbps: float) -> float:
    return gbps * MB_PER_GB


def ns_to_ms(ns: float) -> float:
    return ns / NS_PER_MS


def per_gb_to_per_mb(cost_per_gb: float) -> float:
    return cost_per_gb / MB_PER_GB


def rate_to_volume_mb(rate_mbps: float) -> float:
    """Traffic volume (MB) carried during one normalized epoch slot."""
    return rate_mbps * SLOT_SECONDS / MBIT_PER_MB


def transfer_time_ms(size_mb: float, rate_mbps: float) -> float:
    """Time (ms) to push ``size_mb`` through a ``rate_mbps`` pipe."""
    return size_mb * MBIT_PER_MB / rate_mbps * MS_PER_S
