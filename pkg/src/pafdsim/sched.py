"""Link schedulers: pick which backlogged flow transmits next.

All selectors return None iff every queue is empty, and break ties toward the
lowest flow id.  The GPS ideal-share helper is a fairness oracle for tests; it
never drives the simulated link.
"""

from .core import FlowId, SharedBuffer


def lqf_next(buffer: SharedBuffer) -> FlowId | None:
    """Weighted longest-queue-first: argmax of u_i * queued_bytes."""
    best, best_key = None, 0.0
    for f in buffer.flows:
        if f.queued_bytes <= 0:
            continue
        key = f.u * f.queued_bytes
        if best is None or key > best_key:
            best, best_key = f.id, key
    return best


def bcf_next(buffer: SharedBuffer) -> FlowId | None:
    """Best-channel-first: the backlogged flow with the highest current rate
    multiplier."""
    best, best_key = None, 0.0
    for f in buffer.flows:
        if f.queued_bytes <= 0:
            continue
        key = f.channel.rate_multiplier
        if best is None or key > best_key:
            best, best_key = f.id, key
    return best


class RoundRobin:
    """Cyclic cursor over flow ids, skipping empty queues."""

    def __init__(self, start_after: FlowId | None = None):
        self.cursor = start_after

    def next(self, buffer: SharedBuffer) -> FlowId | None:
        ids = [f.id for f in buffer.flows]  # already sorted
        if self.cursor is None:
            rotation = ids
        else:
            try:
                k = ids.index(self.cursor) + 1
            except ValueError:
                k = 0
            rotation = ids[k:] + ids[:k]
        for fid in rotation:
            if buffer.flow(fid).queued_bytes > 0:
                self.cursor = fid
                return fid
        return None


def rr_next(state: RoundRobin, buffer: SharedBuffer) -> FlowId | None:
    return state.next(buffer)


def gps_ideal_share(phi: dict[FlowId, float], backlogged: set[FlowId],
                    bandwidth: float) -> dict[FlowId, float]:
    """Ideal fluid-fair bandwidth split: each backlogged flow gets bandwidth in
    proportion to its GPS weight, renormalized over the backlogged set."""
    total = sum(phi.values())
    if abs(total - 1.0) > 1e-9:
        raise ValueError("GPS weights must sum to 1")
    unknown = set(backlogged) - set(phi)
    if unknown:
        raise ValueError(f"backlogged flows without weights: {sorted(unknown)}")
    if not backlogged:
        raise ValueError("backlogged set is empty")
    denom = sum(phi[i] for i in backlogged)
    return {i: (phi[i] / denom) * bandwidth if i in backlogged else 0.0
            for i in phi}
