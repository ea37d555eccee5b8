"""Workload generation: ON-OFF packet sources and two-state Markov channels.

Sources alternate exponentially distributed ON and OFF dwells.  While ON they
emit packets back to back at the configured byte rate: each packet of length L
occupies L / on_rate seconds of the dwell, so the long-run offered rate is
on_rate * mean_on / (mean_on + mean_off).  An emission that would land at or
past the end of the dwell is discarded and the source toggles OFF instead.
"""

from dataclasses import dataclass
from enum import Enum

from .core import FlowId, Time, US_PER_SEC


@dataclass(frozen=True)
class LengthConfig:
    """Packet length law in bytes: fixed when low == high, else integer
    uniform on [low, high]."""

    low: int
    high: int

    def __post_init__(self):
        if not 1 <= self.low <= self.high:
            raise ValueError("need 1 <= low <= high")


LENGTH_CONFIGS = {
    "fixed64": LengthConfig(64, 64),
    "fixed65": LengthConfig(65, 65),
    "fixed128": LengthConfig(128, 128),
    "fixed129": LengthConfig(129, 129),
    "fixed256": LengthConfig(256, 256),
    "rand64-128": LengthConfig(64, 128),
    "rand64-256": LengthConfig(64, 256),
    "rand64-1500": LengthConfig(64, 1500),
}


def sample_packet_length(cfg: LengthConfig, rng) -> int:
    if cfg.low == cfg.high:
        return cfg.low
    return rng.randint(cfg.low, cfg.high)


class SourceState(Enum):
    ON = "on"
    OFF = "off"


class SourceEventKind(Enum):
    TOGGLE = "toggle"
    EMIT = "emit"


@dataclass(frozen=True)
class SourceEvent:
    time: Time
    kind: SourceEventKind
    length: int | None = None  # set for EMIT


def _exp_us(mean_us: float, rng) -> int:
    # durations are integer microseconds, floored at 1 to keep event times
    # strictly increasing
    return max(1, round(rng.expovariate(1.0 / mean_us)))


@dataclass
class OnOffSource:
    flow: FlowId
    mean_on_us: int = 400_000
    mean_off_us: int = 600_000
    on_rate: float = 50_000.0  # bytes/sec while ON; 0 keeps the source silent
    lengths: LengthConfig = LENGTH_CONFIGS["rand64-1500"]
    state: SourceState = SourceState.OFF
    dwell_end_us: Time = 0

    def __post_init__(self):
        if self.mean_on_us <= 0 or self.mean_off_us <= 0:
            raise ValueError("dwell means must be positive")
        if self.on_rate < 0:
            raise ValueError("on_rate must be non-negative")

    def prime(self, rng) -> None:
        """Draw the initial state from the stationary ON fraction so runs do
        not all start silent."""
        duty = self.mean_on_us / (self.mean_on_us + self.mean_off_us)
        if rng.random() < duty:
            self.state = SourceState.ON
            self.dwell_end_us = _exp_us(self.mean_on_us, rng)
        else:
            self.state = SourceState.OFF


def next_source_event(src: OnOffSource, now: Time, rng) -> SourceEvent | None:
    """Advance the ON-OFF machine one event past `now` (the time of the event
    processed last).  Returns None for a silent (zero-rate) source."""
    if src.on_rate <= 0:
        return None
    if src.state is SourceState.OFF:
        t = now + _exp_us(src.mean_off_us, rng)
        src.state = SourceState.ON
        src.dwell_end_us = t + _exp_us(src.mean_on_us, rng)
        return SourceEvent(t, SourceEventKind.TOGGLE)
    length = sample_packet_length(src.lengths, rng)
    t = now + max(1, round(length * US_PER_SEC / src.on_rate))
    if t >= src.dwell_end_us:
        t = src.dwell_end_us
        src.state = SourceState.OFF
        return SourceEvent(t, SourceEventKind.TOGGLE)
    return SourceEvent(t, SourceEventKind.EMIT, length)


@dataclass(frozen=True)
class ChannelProcess:
    """Two-state Markov channel stepped on a fixed clock: Good transmits at
    r_good times the link rate, Bad at r_bad."""

    p_gb: float = 0.1
    p_bg: float = 0.3
    r_good: float = 1.0
    r_bad: float = 0.25
    step_us: int = 1_000

    def __post_init__(self):
        if not (0.0 <= self.p_gb <= 1.0 and 0.0 <= self.p_bg <= 1.0):
            raise ValueError("transition probabilities must be in [0, 1]")
        if not 0.0 < self.r_bad < self.r_good <= 1.0:
            raise ValueError("need 0 < r_bad < r_good <= 1")
        if self.step_us <= 0:
            raise ValueError("step_us must be positive")


def channel_step(proc: ChannelProcess, state, rng):
    """Advance one channel step in place and return the state."""
    from .core import ChannelQuality

    if state.state is ChannelQuality.GOOD:
        if rng.random() < proc.p_gb:
            state.state = ChannelQuality.BAD
    else:
        if rng.random() < proc.p_bg:
            state.state = ChannelQuality.GOOD
    state.rate_multiplier = proc.r_good if state.state is ChannelQuality.GOOD else proc.r_bad
    return state
