"""Behavioral emulation of a network-processor queue pipeline.

1024 queues (64 ports x 16 queues) live behind a 16-entry descriptor cache
with CAM-style lookup.  A miss writes the least-recently-used resident
descriptor back to the simulated SRAM and loads the requested one.  Each
descriptor is a linked list (head, tail, packet count); enqueue and dequeue
update the resident copy and emit a transition message whenever a queue flips
between empty and non-empty.  Messages travel over a bounded in-order ring to
the scheduling stage.

Not cycle-accurate: no SRAM latency, no hardware-thread model.
"""

from collections import OrderedDict, deque
from dataclasses import dataclass
from enum import Enum

N_PORTS = 64
QUEUES_PER_PORT = 16
N_QUEUES = N_PORTS * QUEUES_PER_PORT
CACHE_ENTRIES = 16
COUNTER_MAX = 0xFFFF  # packet counters are 16 bits wide
RING_CAPACITY = 128


@dataclass(frozen=True, order=True)
class QueueId:
    port: int
    queue: int

    def __post_init__(self):
        if not 0 <= self.port < N_PORTS:
            raise ValueError("port must be in 0..63")
        if not 0 <= self.queue < QUEUES_PER_PORT:
            raise ValueError("queue must be in 0..15")

    @property
    def flat(self) -> int:
        return self.port * QUEUES_PER_PORT + self.queue

    @classmethod
    def from_flat(cls, flat: int) -> "QueueId":
        return cls(flat // QUEUES_PER_PORT, flat % QUEUES_PER_PORT)


class TransitionKind(Enum):
    BECAME_NONEMPTY = "BecameNonEmpty"
    BECAME_EMPTY = "BecameEmpty"


@dataclass(frozen=True)
class TransitionMessage:
    seq: int
    kind: TransitionKind
    queue: QueueId


class _Descriptor:
    __slots__ = ("head", "tail", "packet_count")

    def __init__(self, head=None, tail=None, packet_count=0):
        self.head = head
        self.tail = tail
        self.packet_count = packet_count

    def pack(self):
        return (self.head, self.tail, self.packet_count)


class DescriptorCache:
    """16-entry working set of queue descriptors over a 1024-descriptor
    backing store, LRU write-back on miss."""

    def __init__(self):
        self._sram = [(None, None, 0)] * N_QUEUES  # packed descriptor values
        self._resident: OrderedDict[int, _Descriptor] = OrderedDict()
        self._nodes: dict[int, list] = {}  # node id -> [payload, next node id]
        self._next_node = 0
        self._msg_seq = 0
        self._ring: deque[TransitionMessage] = deque()
        self.hits = 0
        self.loads = 0
        self.writebacks = 0

    @property
    def resident_count(self) -> int:
        return len(self._resident)

    def resident_ids(self) -> list[int]:
        return list(self._resident)

    def lookup_or_load(self, q: QueueId) -> _Descriptor:
        """Return the resident descriptor for q, evicting the LRU entry first
        if the working set is full."""
        fid = q.flat
        entry = self._resident.get(fid)
        if entry is not None:
            self._resident.move_to_end(fid)
            self.hits += 1
            return entry
        if len(self._resident) >= CACHE_ENTRIES:
            victim, desc = self._resident.popitem(last=False)
            self._sram[victim] = desc.pack()
            self.writebacks += 1
        entry = _Descriptor(*self._sram[fid])
        self._resident[fid] = entry
        self.loads += 1
        return entry

    def _emit(self, kind: TransitionKind, q: QueueId) -> TransitionMessage:
        self._msg_seq += 1
        msg = TransitionMessage(self._msg_seq, kind, q)
        assert len(self._ring) < RING_CAPACITY, "transition ring overflow"
        self._ring.append(msg)
        return msg

    def drain_messages(self) -> list[TransitionMessage]:
        out = list(self._ring)
        self._ring.clear()
        return out

    def enqueue(self, q: QueueId, item, admit=None) -> list[TransitionMessage]:
        """Append an item to queue q, subject to the admission hook.  Emits
        BecameNonEmpty on a 0 -> 1 count transition."""
        desc = self.lookup_or_load(q)
        if admit is not None and not admit(q, item):
            return []
        assert desc.packet_count < COUNTER_MAX, "packet counter width exceeded"
        nid = self._next_node
        self._next_node += 1
        self._nodes[nid] = [item, None]
        if desc.tail is None:
            desc.head = desc.tail = nid
        else:
            self._nodes[desc.tail][1] = nid
            desc.tail = nid
        desc.packet_count += 1
        if desc.packet_count == 1:
            return [self._emit(TransitionKind.BECAME_NONEMPTY, q)]
        return []

    def dequeue(self, q: QueueId):
        """Remove and return the head item of queue q (None when empty).
        Emits BecameEmpty on a 1 -> 0 count transition."""
        desc = self.lookup_or_load(q)
        if desc.packet_count == 0:
            return None, []
        nid = desc.head
        payload, nxt = self._nodes.pop(nid)
        desc.head = nxt
        if nxt is None:
            desc.tail = None
        desc.packet_count -= 1
        if desc.packet_count == 0:
            return payload, [self._emit(TransitionKind.BECAME_EMPTY, q)]
        return payload, []

    def peek_queue(self, q: QueueId) -> list:
        """Queue contents head-to-tail without touching LRU recency (oracle
        support)."""
        fid = q.flat
        if fid in self._resident:
            head = self._resident[fid].head
        else:
            head = self._sram[fid][0]
        out = []
        while head is not None:
            payload, head = self._nodes[head]
            out.append(payload)
        return out


class TraceError(Exception):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def replay_trace(lines, cache: DescriptorCache | None = None):
    """Replay a trace of operations, yielding transition messages.

    Format, one op per line (blank lines skipped):
        E <port> <queue> <len>   enqueue a packet of <len> bytes
        D <port> <queue>         dequeue
    """
    cache = cache or DescriptorCache()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        op = parts[0]
        try:
            if op == "E":
                if len(parts) != 4:
                    raise ValueError("expected: E <port> <queue> <len>")
                port, queue, length = int(parts[1]), int(parts[2]), int(parts[3])
                if length < 1:
                    raise ValueError("length must be positive")
                msgs = cache.enqueue(QueueId(port, queue), length)
            elif op == "D":
                if len(parts) != 3:
                    raise ValueError("expected: D <port> <queue>")
                port, queue = int(parts[1]), int(parts[2])
                _, msgs = cache.dequeue(QueueId(port, queue))
            else:
                raise ValueError(f"unknown op {op!r}")
        except (ValueError, IndexError) as exc:
            raise TraceError(lineno, str(exc)) from exc
        yield from msgs


def format_message(msg: TransitionMessage) -> str:
    return f"M {msg.seq} {msg.kind.value} {msg.queue.port} {msg.queue.queue}"
