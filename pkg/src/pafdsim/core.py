"""Shared-buffer state model: packets, per-flow FIFO queues, byte accounting.

All times are integer microseconds, all rates bytes/second, all sizes bytes.
The flow population of a buffer is fixed for its lifetime; flows may drain to
empty but are never added or removed.
"""

from collections import deque
from dataclasses import dataclass, field
from enum import Enum

Time = int  # microseconds since simulation start
FlowId = int

US_PER_SEC = 1_000_000


class PriorityClass(Enum):
    HIGH = "high"
    LOW = "low"


class ChannelQuality(Enum):
    GOOD = "good"
    BAD = "bad"


@dataclass
class ChannelState:
    """Current channel condition of one flow: quality plus the service-rate
    multiplier it implies (1.0 = full link rate)."""

    state: ChannelQuality = ChannelQuality.GOOD
    rate_multiplier: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.rate_multiplier <= 1.0:
            raise ValueError("rate_multiplier must be in (0, 1]")


@dataclass(frozen=True)
class Packet:
    id: int
    flow: FlowId
    length: int
    arrival: Time

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("packet length must be at least 1 byte")
        if self.arrival < 0:
            raise ValueError("arrival time must be non-negative")


@dataclass
class ServiceFlow:
    """Per-flow state: static QoS weight, GPS weight, priority class, FIFO
    queue and its byte count, and the flow's channel condition."""

    id: FlowId
    u: float
    phi: float
    priority: PriorityClass = PriorityClass.HIGH
    channel: ChannelState = field(default_factory=ChannelState)
    queue: deque = field(default_factory=deque)
    queued_bytes: int = 0

    def __post_init__(self):
        if self.u <= 0:
            raise ValueError("flow weight u must be positive")
        if not 0.0 < self.phi <= 1.0:
            raise ValueError("GPS weight phi must be in (0, 1]")

    def head(self) -> Packet | None:
        return self.queue[0] if self.queue else None


@dataclass(frozen=True)
class Thresholds:
    """Buffer occupancy-rate thresholds. buf_medium is carried for reporting;
    the adaptive drop weighting uses only buf_min and buf_max."""

    buf_min: float = 0.85
    buf_medium: float = 0.915
    buf_max: float = 0.98

    def __post_init__(self):
        if not 0.0 < self.buf_min < self.buf_medium < self.buf_max <= 1.0:
            raise ValueError("thresholds must satisfy 0 < buf_min < buf_medium < buf_max <= 1")


class SharedBuffer:
    """A shared byte buffer partitioned into per-flow FIFO queues.

    All queue mutation goes through enqueue/pop_head so that `occupied` and
    each flow's `queued_bytes` stay exact.
    """

    def __init__(self, capacity: int, flows: list[ServiceFlow],
                 thresholds: Thresholds | None = None):
        if capacity <= 0:
            raise ValueError("capacity must be positive")
        ids = [f.id for f in flows]
        if not ids:
            raise ValueError("buffer needs at least one flow")
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate flow ids")
        self.capacity = capacity
        self.flows = sorted(flows, key=lambda f: f.id)  # id order fixes every tie-break
        self.by_id = {f.id: f for f in self.flows}
        self.thresholds = thresholds or Thresholds()
        self.occupied = 0

    def flow(self, fid: FlowId) -> ServiceFlow:
        return self.by_id[fid]

    @property
    def remaining(self) -> int:
        return self.capacity - self.occupied

    def occupancy_rate(self) -> float:
        return self.occupied / self.capacity

    def occupancy_share(self, fid: FlowId) -> float:
        """Fraction of the occupied bytes held by one flow. Shares over all
        flows sum to 1 whenever the buffer is non-empty."""
        if self.occupied == 0:
            raise ValueError("empty buffer has no shares")
        return self.by_id[fid].queued_bytes / self.occupied

    def enqueue(self, packet: Packet) -> None:
        if packet.length > self.remaining:
            raise ValueError("enqueue would exceed buffer capacity")
        f = self.by_id[packet.flow]
        f.queue.append(packet)
        f.queued_bytes += packet.length
        self.occupied += packet.length

    def pop_head(self, fid: FlowId) -> Packet:
        f = self.by_id[fid]
        if not f.queue:
            raise ValueError(f"flow {fid} has no queued packets")
        packet = f.queue.popleft()
        f.queued_bytes -= packet.length
        self.occupied -= packet.length
        return packet

    def rescan_bytes(self) -> dict[FlowId, int]:
        """Recompute per-flow byte counts from the queues (consistency oracle)."""
        return {f.id: sum(p.length for p in f.queue) for f in self.flows}
