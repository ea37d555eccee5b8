"""Admission policies for the shared buffer.

Four policies decide what happens when a packet arrives:

  * PAFD ("packet adaptive fair dropping"): if the buffer cannot hold the
    arrival, repeatedly pick the flow with the largest weighted buffer
    occupation C_i / W_i and drop its head packet (or, with a configured
    probability, the arrival itself) until the arrival fits.  The synthetic
    weight W_i blends the static QoS weight with queue-length pressure; the
    blend factor alpha adapts to buffer occupancy.
  * PAFD-DiffServ: same loop, with W_i additionally scaled by a class factor
    beta that shrinks for low-priority flows as network load grows.
  * RED: classic early random detection over the aggregate occupancy EWMA.
  * Tail drop: admit iff the arrival fits, never evict.

Policies return a PolicyDecision; nothing here mutates the buffer except
apply_decision, which performs the recorded evictions and the enqueue.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .core import FlowId, Packet, PriorityClass, SharedBuffer, Time


@dataclass(frozen=True)
class PafdConfig:
    buf_min: float = 0.85
    buf_max: float = 0.98
    p_self: float = 0.5            # chance a self-victim round drops the arrival
    alpha_offset_low: float = 0.1  # alpha reduction for low-priority flows (DiffServ)
    beta_knee: float = 0.5         # load where beta starts to ramp down
    beta_min: float = 0.5          # beta floor at full load
    diffserv: bool = False

    def __post_init__(self):
        if not 0.0 < self.buf_min < self.buf_max <= 1.0:
            raise ValueError("need 0 < buf_min < buf_max <= 1")
        if not 0.0 <= self.p_self <= 1.0:
            raise ValueError("p_self must be in [0, 1]")
        if self.alpha_offset_low < 0.0:
            raise ValueError("alpha_offset_low must be >= 0")
        if not 0.0 <= self.beta_knee <= 1.0:
            raise ValueError("beta_knee must be in [0, 1]")
        if not 0.0 < self.beta_min <= 1.0:
            raise ValueError("beta_min must be in (0, 1]")


@dataclass(frozen=True)
class RedConfig:
    w_q: float = 0.002
    min_th: int = 25_000   # bytes of average occupancy
    max_th: int = 75_000
    max_p: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.w_q < 1.0:
            raise ValueError("w_q must be in (0, 1)")
        if not 0 < self.min_th < self.max_th:
            raise ValueError("need 0 < min_th < max_th")
        if not 0.0 < self.max_p <= 1.0:
            raise ValueError("max_p must be in (0, 1]")


@dataclass
class RedState:
    """Running state of the RED estimator: occupancy EWMA, packets since the
    last drop (-1 outside the random-drop band), and when the buffer went
    empty (for idle-time decay of the average)."""

    avg: float = 0.0
    count: int = -1
    idle_since: Time | None = 0
    idle_pkt_time_us: float = 256.0  # transmission time of a typical small packet

    def mark_idle(self, now: Time) -> None:
        self.idle_since = now


class DecisionKind(Enum):
    ADMIT = "admit"
    DROP_ARRIVAL = "drop-arrival"
    EVICT_THEN_ADMIT = "evict-then-admit"


@dataclass(frozen=True)
class PolicyDecision:
    """Outcome of one admission attempt.

    `evictions` lists (flow id, packet id) pairs in the order the head packets
    must be removed; a dropped arrival can still carry evictions chosen before
    the drop coin came up.
    """

    admitted: bool
    evictions: tuple[tuple[FlowId, int], ...] = ()
    oversize: bool = False

    @property
    def kind(self) -> DecisionKind:
        if not self.admitted:
            return DecisionKind.DROP_ARRIVAL
        if self.evictions:
            return DecisionKind.EVICT_THEN_ADMIT
        return DecisionKind.ADMIT


def compute_alpha(occupancy: float, buf_min: float, buf_max: float) -> float:
    """Blend factor between static-weight fairness (alpha=1) and longest-queue
    pressure (alpha=0), as a function of buffer occupancy rate.

    Quadratic-in-occupancy decay from 1 at buf_min to 0 at buf_max; pinned to
    0 below buf_min and back to 1 above buf_max, where fair dropping resumes
    under severe congestion.
    """
    occ2 = occupancy * occupancy
    lo2 = buf_min * buf_min
    hi2 = buf_max * buf_max
    if occ2 < lo2:
        return 0.0
    if occ2 > hi2:
        return 1.0
    a = 1.0 - (occ2 - lo2) / (hi2 - lo2)
    return min(1.0, max(0.0, a))


def compute_beta(priority: PriorityClass, load: float, cfg: PafdConfig) -> float:
    """Class scale factor for the synthetic weight: 1 for high priority at any
    load, and for low priority a linear ramp from 1 at the knee down to
    beta_min at full load."""
    if priority is PriorityClass.HIGH:
        return 1.0
    load = min(1.0, max(0.0, load))
    if load <= cfg.beta_knee or cfg.beta_knee >= 1.0:
        return 1.0
    frac = (load - cfg.beta_knee) / (1.0 - cfg.beta_knee)
    return 1.0 + (cfg.beta_min - 1.0) * frac


def synthetic_weight(alpha: float, u_hat: float, v_hat: float, beta: float) -> float:
    """Blend the normalized static weight u_hat with the queue-pressure weight
    v_hat and scale by the class factor beta."""
    w = (alpha * u_hat + (1.0 - alpha) * v_hat) * beta
    if w <= 0.0:
        raise ValueError("degenerate weight")
    return w


def _select_victim(buffer: SharedBuffer, cfg: PafdConfig, load: float,
                   pending: dict[FlowId, list[int]]) -> FlowId:
    """Pick the flow with the largest C_i / W_i among flows with queued bytes,
    ties to the lowest id.  `pending` maps flow id -> [packets, bytes] already
    chosen for eviction in the current admission round; those bytes are
    treated as gone.
    """
    pending_total = sum(b for _, b in pending.values())
    occupied = buffer.occupied - pending_total
    if occupied <= 0:
        raise ValueError("no victim available")

    flows = buffer.flows
    n = len(flows)
    occ_rate = occupied / buffer.capacity
    alpha_base = compute_alpha(occ_rate, cfg.buf_min, cfg.buf_max)
    u_sum = sum(f.u for f in flows)

    best_id = None
    best_score = -math.inf
    for f in flows:
        c_bytes = f.queued_bytes - (pending[f.id][1] if f.id in pending else 0)
        if c_bytes <= 0:
            continue
        if n == 1:
            return f.id  # sole flow: no blending to do
        u_hat = f.u / u_sum
        share = c_bytes / occupied
        v_hat = (1.0 - share) / (n - 1)
        if cfg.diffserv:
            alpha = alpha_base
            if f.priority is PriorityClass.LOW:
                alpha = min(1.0, max(0.0, alpha_base - cfg.alpha_offset_low))
            beta = compute_beta(f.priority, load, cfg)
        else:
            alpha, beta = alpha_base, 1.0
        try:
            score = c_bytes / synthetic_weight(alpha, u_hat, v_hat, beta)
        except ValueError:
            # flow holds everything at alpha 0: it is the only sensible victim
            score = math.inf
        if score > best_score:
            best_id, best_score = f.id, score
    if best_id is None:
        raise ValueError("no victim available")
    return best_id


def select_victim(buffer: SharedBuffer, cfg: PafdConfig, load: float) -> FlowId:
    return _select_victim(buffer, cfg, load, {})


def pafd_admit(packet: Packet, buffer: SharedBuffer, cfg: PafdConfig,
               load: float, rng) -> PolicyDecision:
    """Run the adaptive fair-dropping admission loop for one arrival.

    Fast path: the arrival fits, admit.  Otherwise pick victims one head
    packet at a time until enough space is freed.  When the victim is the
    arrival's own flow the arrival itself is dropped with probability p_self;
    when it is another flow its head is evicted with probability 1 - p_self
    and the arrival dropped otherwise.  Evictions chosen before a drop still
    stand.
    """
    if packet.length > buffer.capacity:
        return PolicyDecision(admitted=False, oversize=True)
    if buffer.remaining >= packet.length:
        return PolicyDecision(admitted=True)

    pending: dict[FlowId, list[int]] = {}
    evictions: list[tuple[FlowId, int]] = []
    freed = 0
    while buffer.remaining + freed < packet.length:
        victim = _select_victim(buffer, cfg, load, pending)
        coin = rng.random()
        if victim == packet.flow:
            drop_arrival = coin < cfg.p_self
        else:
            drop_arrival = coin >= 1.0 - cfg.p_self
        if drop_arrival:
            return PolicyDecision(admitted=False, evictions=tuple(evictions))
        entry = pending.setdefault(victim, [0, 0])
        head = buffer.flow(victim).queue[entry[0]]  # next head after pending ones
        entry[0] += 1
        entry[1] += head.length
        evictions.append((victim, head.id))
        freed += head.length
    return PolicyDecision(admitted=True, evictions=tuple(evictions))


def red_admit(packet: Packet, buffer: SharedBuffer, state: RedState,
              cfg: RedConfig, rng) -> PolicyDecision:
    """Classic early-detection admission over the aggregate occupancy EWMA.

    Updates the average (with idle-time decay while the buffer sat empty),
    then admits below min_th, drops at or above max_th, and in between drops
    with probability p_b / (1 - count * p_b).  A physically full buffer always
    drops.
    """
    now = packet.arrival
    if buffer.occupied == 0 and state.idle_since is not None:
        m = (now - state.idle_since) / state.idle_pkt_time_us
        state.avg *= (1.0 - cfg.w_q) ** m
    else:
        state.avg += cfg.w_q * (buffer.occupied - state.avg)
    state.idle_since = None

    if packet.length > buffer.remaining:
        state.count = 0
        return PolicyDecision(admitted=False)
    if state.avg < cfg.min_th:
        state.count = -1
        return PolicyDecision(admitted=True)
    if state.avg >= cfg.max_th:
        state.count = 0
        return PolicyDecision(admitted=False)

    state.count += 1
    p_b = cfg.max_p * (state.avg - cfg.min_th) / (cfg.max_th - cfg.min_th)
    denom = 1.0 - state.count * p_b
    p_a = 1.0 if denom <= 0.0 else p_b / denom
    if rng.random() < p_a:
        state.count = 0
        return PolicyDecision(admitted=False)
    return PolicyDecision(admitted=True)


def td_admit(packet: Packet, buffer: SharedBuffer) -> PolicyDecision:
    """Tail drop: admit iff the arrival fits in the remaining space."""
    return PolicyDecision(admitted=buffer.remaining >= packet.length)


def classify_sla(packet: Packet, sla: dict[FlowId, PriorityClass]) -> PriorityClass:
    """Map a packet to its flow's contracted class; unknown flows are treated
    as low priority."""
    return sla.get(packet.flow, PriorityClass.LOW)


def apply_decision(buffer: SharedBuffer, packet: Packet,
                   decision: PolicyDecision) -> list[Packet]:
    """Perform a decision against the buffer: evict the recorded head packets
    in order, then enqueue the arrival if it was admitted.  Returns the
    evicted packets."""
    evicted = []
    for fid, pid in decision.evictions:
        head = buffer.pop_head(fid)
        if head.id != pid:
            raise RuntimeError("decision is stale: eviction head mismatch")
        evicted.append(head)
    if decision.admitted:
        buffer.enqueue(packet)
    return evicted
