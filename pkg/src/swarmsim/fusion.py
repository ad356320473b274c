"""Analytic communication layer.

Covers the channel-aware weighted fusion of per-drone detections, the
onboard-compute energy model, the aggregate uplink bandwidth bill, and the
edge-vs-cloud scenario sweep built from the last two. All functions are
pure; the only randomness enters through sample_channel's explicit stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DegenerateWeightsError
from .geometry import Vec2, distance
from .rng import RngHandle
from .state import CollisionEvent, Drone

DEFAULT_DECLARE_THRESHOLD = 0.5


@dataclass(frozen=True)
class ChannelSample:
    """One drone's view of a collision: link quality and detector outputs."""

    drone_id: int
    snr: float
    dos: float
    gamma: float

    def __post_init__(self) -> None:
        if not self.snr > 0:
            raise ValueError(f"snr must be a positive linear ratio, got {self.snr}")
        if not 0.0 <= self.dos <= 1.0:
            raise ValueError(f"dos must lie in [0,1], got {self.dos}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0,1], got {self.gamma}")


@dataclass(frozen=True)
class FusionResult:
    confidence: float
    weights: tuple[float, ...]
    declared: bool


@dataclass(frozen=True)
class EnergyParams:
    """Onboard inference energy: scale constant, inference frequency,
    processing time, supply voltage."""

    k: float = 0.5
    f_cnn: float = 10.0
    t_proc: float = 10.0
    v_dd: float = 1.1

    def __post_init__(self) -> None:
        for name in ("k", "f_cnn", "t_proc", "v_dd"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class LinkBudget:
    """Per-drone uplink: encoding rate (bits/s), observation window (s),
    transmit power (W), channel gain magnitude, noise power (W)."""

    r_enc: float = 120e6
    t_obs: float = 10.0
    p_t: float = 0.5
    h: float = 1.0
    n0b: float = 0.05

    def __post_init__(self) -> None:
        if self.h < 0:
            raise ValueError(f"channel gain magnitude must be >= 0, got {self.h}")
        for name in ("r_enc", "t_obs", "p_t", "n0b"):
            v = getattr(self, name)
            if not v > 0:
                raise ValueError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class ChannelParams:
    """Synthetic channel model: log-normal shadowing on an inverse-square
    decay of SNR with distance to the ground station."""

    snr_ref: float = 200.0
    ref_distance: float = 10.0
    shadow_sigma: float = 0.5
    gamma_noise_sigma: float = 0.05


@dataclass(frozen=True)
class ScenarioRecord:
    n_drones: int
    edge_energy_j: float
    edge_control_bits: float
    cloud_bits: float
    cloud_bits_per_s: float


def fuse_confidence(
    samples: Sequence[ChannelSample],
    threshold: float = DEFAULT_DECLARE_THRESHOLD,
) -> FusionResult:
    """Fuse per-drone detections into one collision confidence.

    Each drone's weight is its snr*dos share of the total, and the fused
    confidence is the weight-averaged detector probability. A collision is
    declared only when the fused confidence clears the threshold AND at
    least two drones contributed, honoring the two-observer mandate.
    """
    if not samples:
        raise ValueError("fuse_confidence needs at least one sample")
    raw = [s.snr * s.dos for s in samples]
    total = math.fsum(raw)
    if total <= 0.0:
        raise DegenerateWeightsError(
            "all snr*dos products are zero; fusion weights are undefined"
        )
    weights = tuple(r / total for r in raw)
    confidence = math.fsum(w * s.gamma for w, s in zip(weights, samples))
    declared = confidence >= threshold and len(samples) >= 2
    return FusionResult(confidence=confidence, weights=weights, declared=declared)


def compute_energy(p: EnergyParams) -> float:
    """Onboard compute energy in joules: k * f_cnn * t_proc * v_dd^2."""
    return p.k * p.f_cnn * p.t_proc * p.v_dd * p.v_dd


def link_bandwidth(links: Iterable[LinkBudget]) -> float:
    """Total uplink volume in bits over each link's observation window:
    sum of r_enc * t_obs * log2(1 + p_t*h^2/n0b)."""
    total = 0.0
    for link in links:
        snr = link.p_t * link.h * link.h / link.n0b
        total += link.r_enc * link.t_obs * math.log2(1.0 + snr)
    return total


def sample_channel(
    rng: RngHandle,
    drone: Drone,
    gcs_pos: Vec2,
    event: CollisionEvent,
    params: ChannelParams = ChannelParams(),
) -> ChannelSample:
    """Draw one synthetic channel sample for a drone observing an event.

    SNR decays with the square of the drone-to-GCS distance (floored at the
    reference distance) under log-normal shadowing. The detection confidence
    falls linearly from 1 at the event to 0 at the detection boundary, and
    the detector probability is that confidence plus clamped Gaussian noise.
    Consumes exactly four uniform draws.
    """
    d_gcs = distance(drone.pos, gcs_pos)
    decay = params.ref_distance / max(d_gcs, params.ref_distance)
    mean_snr = params.snr_ref * decay * decay
    snr = mean_snr * math.exp(rng.normal(0.0, params.shadow_sigma))
    d_event = distance(drone.pos, event.pos)
    dos = min(1.0, max(0.0, 1.0 - d_event / drone.detect_radius))
    gamma = min(1.0, max(0.0, dos + rng.normal(0.0, params.gamma_noise_sigma)))
    return ChannelSample(drone_id=drone.id, snr=snr, dos=dos, gamma=gamma)


def scenario_sweep(
    n_values: Iterable[int],
    energy: EnergyParams,
    link: LinkBudget,
    control_bits: float = 1e6,
) -> list[ScenarioRecord]:
    """Edge-vs-cloud accounting per swarm size.

    Edge: every drone runs inference locally, so energy scales with n while
    the uplink carries only the fixed control channel. Cloud: onboard compute
    is nil and every drone streams raw video, so the bill is n identical
    uplinks. Bits are reported both as window totals and as bits/s.
    """
    per_drone = compute_energy(energy)
    records = []
    for n in n_values:
        if n < 0:
            raise ValueError(f"drone count must be >= 0, got {n}")
        cloud_bits = link_bandwidth([link] * n)
        records.append(
            ScenarioRecord(
                n_drones=n,
                edge_energy_j=n * per_drone,
                edge_control_bits=control_bits if n > 0 else 0.0,
                cloud_bits=cloud_bits,
                cloud_bits_per_s=cloud_bits / link.t_obs,
            )
        )
    return records
