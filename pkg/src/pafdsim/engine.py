"""Deterministic discrete-event simulation binding sources, drop policy,
scheduler, and link, plus the sweep runner for policy x scheduler grids.

Event ordering is (time, insertion sequence): ties resolve in insertion
order, so a run is a pure function of (config, seed).  One run is strictly
single-threaded and owns all of its state.
"""

import heapq
import random
from dataclasses import dataclass, field, replace

from .core import (ChannelQuality, ChannelState, FlowId, Packet,
                   PriorityClass, ServiceFlow, SharedBuffer, Thresholds,
                   US_PER_SEC)
from .droppolicy import (PafdConfig, PolicyDecision, RedConfig, RedState,
                         apply_decision, pafd_admit, red_admit, td_admit)
from .metrics import (FlowStats, RunReport, avg_queuing_delay, fairness_index,
                      throughput_effectiveness)
from .sched import RoundRobin, bcf_next, lqf_next
from .traffic import (ChannelProcess, LENGTH_CONFIGS, LengthConfig,
                      OnOffSource, SourceEventKind, channel_step,
                      next_source_event)

POLICIES = ("pafd", "pafd-ds", "red", "td")
SCHEDULERS = ("bcf", "lqf", "rr")

LOAD_WINDOW_US = 100_000  # sliding window for the network-load estimate


class ConfigError(ValueError):
    """Configuration rejected; `field` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class SourceConfig:
    mean_on_us: int = 400_000
    mean_off_us: int = 600_000
    on_rate: float = 50_000.0
    lengths: LengthConfig = LENGTH_CONFIGS["rand64-1500"]


@dataclass(frozen=True)
class FlowConfig:
    id: FlowId
    u: float
    phi: float
    priority: PriorityClass = PriorityClass.HIGH
    source: SourceConfig = field(default_factory=SourceConfig)
    channel: ChannelProcess = field(default_factory=ChannelProcess)


@dataclass(frozen=True)
class SimConfig:
    flows: tuple[FlowConfig, ...]
    duration_us: int = 60_000_000
    warmup_us: int | None = None  # None -> 10% of duration
    link_rate: float = 250_000.0  # bytes/sec
    capacity: int = 100_000       # bytes
    thresholds: Thresholds = field(default_factory=Thresholds)
    policy: str = "pafd"
    scheduler: str = "lqf"
    seed: int = 1
    pafd: PafdConfig | None = None  # None -> derived from thresholds
    red: RedConfig | None = None    # None -> derived from capacity

    @property
    def effective_warmup_us(self) -> int:
        if self.warmup_us is None:
            return self.duration_us // 10
        return self.warmup_us

    def pafd_config(self) -> PafdConfig:
        base = self.pafd or PafdConfig(buf_min=self.thresholds.buf_min,
                                       buf_max=self.thresholds.buf_max)
        if self.policy == "pafd-ds":
            return replace(base, diffserv=True)
        return replace(base, diffserv=False)

    def red_config(self) -> RedConfig:
        if self.red is not None:
            return self.red
        return RedConfig(min_th=max(1, self.capacity // 4),
                         max_th=max(2, (3 * self.capacity) // 4))

    def validate(self) -> None:
        if not self.flows:
            raise ConfigError("flows", "at least one flow is required")
        ids = [f.id for f in self.flows]
        if len(set(ids)) != len(ids):
            raise ConfigError("flows.id", "flow ids must be unique")
        if self.duration_us <= 0:
            raise ConfigError("duration_us", "must be positive")
        warmup = self.effective_warmup_us
        if warmup < 0 or warmup >= self.duration_us:
            raise ConfigError("warmup_us", "need 0 <= warmup < duration")
        if self.link_rate <= 0:
            raise ConfigError("link_rate", "must be positive")
        if self.capacity <= 0:
            raise ConfigError("capacity", "must be positive")
        if self.policy not in POLICIES:
            raise ConfigError("policy", f"unknown policy {self.policy!r}")
        if self.scheduler not in SCHEDULERS:
            raise ConfigError("scheduler", f"unknown scheduler {self.scheduler!r}")
        for f in self.flows:
            if f.u <= 0:
                raise ConfigError("flows.u", f"flow {f.id}: u must be positive")
            if f.source.on_rate < 0:
                raise ConfigError("flows.source.on_rate",
                                  f"flow {f.id}: on_rate must be >= 0")
        phi_sum = sum(f.phi for f in self.flows)
        if abs(phi_sum - 1.0) > 1e-9:
            raise ConfigError("phi", f"flow phi weights sum to {phi_sum!r}, expected 1")


def combo_label(policy: str, scheduler: str) -> str:
    names = {"pafd": "PAFD", "pafd-ds": "DSPAFD", "red": "RED", "td": "TD"}
    return f"{names[policy]}-{scheduler.upper()}"


_SOURCE, _CHANNEL, _TX_DONE = 0, 1, 2


class _FlowCounters:
    __slots__ = ("admitted", "admitted_bytes", "dropped", "dropped_bytes",
                 "evicted", "evicted_bytes", "delivered", "delivered_bytes",
                 "w_delivered_bytes", "w_delay_sum", "w_delivered")

    def __init__(self):
        self.admitted = 0
        self.admitted_bytes = 0
        self.dropped = 0
        self.dropped_bytes = 0
        self.evicted = 0
        self.evicted_bytes = 0
        self.delivered = 0
        self.delivered_bytes = 0
        self.w_delivered_bytes = 0
        self.w_delay_sum = 0
        self.w_delivered = 0


class Simulation:
    def __init__(self, config: SimConfig):
        config.validate()
        self.cfg = config
        self.warmup = config.effective_warmup_us

        flows = [ServiceFlow(id=fc.id, u=fc.u, phi=fc.phi, priority=fc.priority,
                             channel=ChannelState())
                 for fc in config.flows]
        self.buffer = SharedBuffer(config.capacity, flows, config.thresholds)
        self.flow_cfgs = {fc.id: fc for fc in config.flows}

        seed = config.seed
        self.src_rngs = {fc.id: random.Random(seed ^ fc.id) for fc in config.flows}
        self.chan_rngs = {fc.id: random.Random(f"chan:{seed}:{fc.id}")
                          for fc in config.flows}
        self.policy_rng = random.Random(f"policy:{seed}")

        self.sources = {fc.id: OnOffSource(flow=fc.id,
                                           mean_on_us=fc.source.mean_on_us,
                                           mean_off_us=fc.source.mean_off_us,
                                           on_rate=fc.source.on_rate,
                                           lengths=fc.source.lengths)
                        for fc in config.flows}

        self.pafd_cfg = config.pafd_config()
        self.red_cfg = config.red_config()
        self.red_state = RedState(
            idle_pkt_time_us=64 * US_PER_SEC / config.link_rate)
        self.rr = RoundRobin()

        self.heap: list = []
        self.seq = 0
        self.now = 0
        self.link_busy = False
        self.in_flight: Packet | None = None

        self.counters = {fc.id: _FlowCounters() for fc in config.flows}
        self.delay_records: list[tuple[int, int]] = []
        self.offered_bytes = 0
        self.oversize_drops = 0
        # sliding-window load estimate state
        self.window: list[tuple[int, int]] = []
        self.window_head = 0
        self.window_bytes = 0
        self.next_packet_id = 1

    def _push(self, time_us: int, kind: int, payload) -> None:
        self.seq += 1
        heapq.heappush(self.heap, (time_us, self.seq, kind, payload))

    def _window_load(self, now: int) -> float:
        cutoff = now - LOAD_WINDOW_US
        w = self.window
        i = self.window_head
        while i < len(w) and w[i][0] <= cutoff:
            self.window_bytes -= w[i][1]
            i += 1
        if i > 4096 and i * 2 > len(w):  # compact the consumed prefix
            del w[:i]
            i = 0
        self.window_head = i
        load = self.window_bytes * US_PER_SEC / (self.cfg.link_rate * LOAD_WINDOW_US)
        return min(1.0, load)

    def _decide(self, packet: Packet) -> PolicyDecision:
        policy = self.cfg.policy
        if policy == "td":
            return td_admit(packet, self.buffer)
        if policy == "red":
            return red_admit(packet, self.buffer, self.red_state,
                             self.red_cfg, self.policy_rng)
        load = self._window_load(packet.arrival)
        return pafd_admit(packet, self.buffer, self.pafd_cfg, load,
                          self.policy_rng)

    def _select(self) -> FlowId | None:
        if self.cfg.scheduler == "lqf":
            return lqf_next(self.buffer)
        if self.cfg.scheduler == "bcf":
            return bcf_next(self.buffer)
        return self.rr.next(self.buffer)

    def _start_transmission(self, now: int) -> None:
        fid = self._select()
        if fid is None:
            self.link_busy = False
            assert all(f.queued_bytes == 0 for f in self.buffer.flows), \
                "link idle with backlogged flows"
            return
        flow = self.buffer.flow(fid)
        packet = self.buffer.pop_head(fid)
        if self.buffer.occupied == 0:
            self.red_state.mark_idle(now)
        # channel multiplier sampled at transmission start, held for the packet
        rate = self.cfg.link_rate * flow.channel.rate_multiplier
        duration = max(1, round(packet.length * US_PER_SEC / rate))
        self.link_busy = True
        self.in_flight = packet
        self._push(now + duration, _TX_DONE, packet)

    def _handle_arrival(self, packet: Packet) -> None:
        self.offered_bytes += packet.length
        self.window.append((packet.arrival, packet.length))
        self.window_bytes += packet.length
        ctr = self.counters[packet.flow]
        decision = self._decide(packet)
        evicted = apply_decision(self.buffer, packet, decision)
        for ev in evicted:
            c = self.counters[ev.flow]
            c.evicted += 1
            c.evicted_bytes += ev.length
        if decision.admitted:
            ctr.admitted += 1
            ctr.admitted_bytes += packet.length
            if not self.link_busy:
                self._start_transmission(packet.arrival)
        else:
            ctr.dropped += 1
            ctr.dropped_bytes += packet.length
            if decision.oversize:
                self.oversize_drops += 1

    def _handle_source(self, now: int, fid: FlowId) -> None:
        src = self.sources[fid]
        ev = next_source_event(src, now, self.src_rngs[fid])
        if ev is None or ev.time > self.cfg.duration_us:
            return
        self._push(ev.time, _SOURCE, (fid, ev))

    def run(self) -> RunReport:
        cfg = self.cfg
        for fc in cfg.flows:
            src = self.sources[fc.id]
            src.prime(self.src_rngs[fc.id])
            self._handle_source(0, fc.id)
            # start channels at their stationary split so BCF sees a settled mix
            chan = self.buffer.flow(fc.id).channel
            proc = fc.channel
            p = proc.p_bg / (proc.p_gb + proc.p_bg) if proc.p_gb + proc.p_bg > 0 else 1.0
            if self.chan_rngs[fc.id].random() >= p:
                chan.state = ChannelQuality.BAD
            chan.rate_multiplier = proc.r_good if chan.state is ChannelQuality.GOOD else proc.r_bad
            if proc.step_us <= cfg.duration_us:
                self._push(proc.step_us, _CHANNEL, fc.id)

        duration = cfg.duration_us
        while self.heap:
            time_us, _, kind, payload = heapq.heappop(self.heap)
            if time_us > duration:
                break
            assert time_us >= self.now, "event time went backwards"
            self.now = time_us
            if kind == _SOURCE:
                fid, ev = payload
                if ev.kind is SourceEventKind.EMIT:
                    packet = Packet(id=self.next_packet_id, flow=fid,
                                    length=ev.length, arrival=time_us)
                    self.next_packet_id += 1
                    self._handle_arrival(packet)
                self._handle_source(time_us, fid)
            elif kind == _CHANNEL:
                fc = self.flow_cfgs[payload]
                channel_step(fc.channel, self.buffer.flow(payload).channel,
                             self.chan_rngs[payload])
                nxt = time_us + fc.channel.step_us
                if nxt <= duration:
                    self._push(nxt, _CHANNEL, payload)
            else:  # _TX_DONE
                packet = payload
                ctr = self.counters[packet.flow]
                ctr.delivered += 1
                ctr.delivered_bytes += packet.length
                if time_us > self.warmup:
                    ctr.w_delivered_bytes += packet.length
                    ctr.w_delivered += 1
                    ctr.w_delay_sum += time_us - packet.arrival
                    self.delay_records.append((packet.arrival, time_us))
                self.in_flight = None
                self._start_transmission(time_us)

        return self._build_report()

    def _build_report(self) -> RunReport:
        cfg = self.cfg
        window_s = (cfg.duration_us - self.warmup) / US_PER_SEC
        flow_stats = []
        goodputs = []
        weights = []
        for f in self.buffer.flows:
            c = self.counters[f.id]
            goodput = c.w_delivered_bytes / window_s
            mean_delay = (c.w_delay_sum / c.w_delivered) if c.w_delivered else None
            flow_stats.append(FlowStats(
                flow=f.id, goodput=goodput, admitted=c.admitted,
                dropped=c.dropped, evicted=c.evicted, delivered=c.delivered,
                admitted_bytes=c.admitted_bytes,
                delivered_bytes=c.delivered_bytes,
                evicted_bytes=c.evicted_bytes,
                mean_delay_us=mean_delay))
            goodputs.append(goodput)
            weights.append(f.u)

        delivered_w = sum(c.w_delivered_bytes for c in self.counters.values())
        effectiveness = throughput_effectiveness(delivered_w, cfg.link_rate, window_s)
        fairness = None
        if any(g > 0 for g in goodputs):
            fairness = fairness_index(goodputs, weights)
        avg_delay = avg_queuing_delay(self.delay_records)

        admitted = sum(c.admitted_bytes for c in self.counters.values())
        delivered = sum(c.delivered_bytes for c in self.counters.values())
        evicted = sum(c.evicted_bytes for c in self.counters.values())
        residual = self.buffer.occupied
        if self.in_flight is not None:
            residual += self.in_flight.length
        assert admitted == delivered + evicted + residual, \
            "byte conservation violated"

        offered_load = self.offered_bytes * US_PER_SEC / (cfg.link_rate * cfg.duration_us)
        return RunReport(
            combo=combo_label(cfg.policy, cfg.scheduler),
            policy=cfg.policy, scheduler=cfg.scheduler, seed=cfg.seed,
            load=offered_load, flows=tuple(flow_stats),
            goodput_total=sum(goodputs),
            effectiveness=effectiveness, avg_delay_us=avg_delay,
            fairness=fairness, admitted_bytes=admitted,
            delivered_bytes=delivered, evicted_bytes=evicted,
            residual_bytes=residual, oversize_drops=self.oversize_drops)


def run(config: SimConfig) -> RunReport:
    return Simulation(config).run()


def offered_rate(config: SimConfig) -> float:
    """Long-run offered byte rate implied by the sources (bytes/sec)."""
    total = 0.0
    for f in config.flows:
        duty = f.source.mean_on_us / (f.source.mean_on_us + f.source.mean_off_us)
        total += f.source.on_rate * duty
    return total


def scale_to_load(config: SimConfig, load: float) -> SimConfig:
    """Scale every source's ON rate so total offered load = load * link_rate."""
    base = offered_rate(config)
    if base <= 0:
        raise ConfigError("flows.source.on_rate", "cannot scale an idle workload")
    factor = load * config.link_rate / base
    flows = tuple(
        replace(f, source=replace(f.source, on_rate=f.source.on_rate * factor))
        for f in config.flows)
    return replace(config, flows=flows)


@dataclass(frozen=True)
class SweepCell:
    combo: str
    load: float
    report: RunReport | None
    error: str | None = None


def sweep(base: SimConfig, loads, combos) -> list[SweepCell]:
    """Run every (policy, scheduler) combo at every load, combo-major order.
    Cell failures are recorded, not raised."""
    cells = []
    for policy, scheduler in combos:
        for load in loads:
            label = combo_label(policy, scheduler)
            cfg = replace(scale_to_load(base, load),
                          policy=policy, scheduler=scheduler)
            try:
                report = replace(run(cfg), load=load)
                cells.append(SweepCell(label, load, report))
            except ConfigError as exc:
                cells.append(SweepCell(label, load, None, str(exc)))
            except (ValueError, AssertionError) as exc:
                cells.append(SweepCell(label, load, None, f"run failed: {exc}"))
    return cells


ALL_COMBOS = (("pafd", "bcf"), ("pafd", "lqf"),
              ("red", "bcf"), ("red", "lqf"),
              ("td", "bcf"), ("td", "lqf"))


def sixteen_flow_config(load: float = 1.0, policy: str = "pafd",
                        scheduler: str = "lqf", seed: int = 1,
                        duration_us: int = 10_000_000,
                        warmup_us: int | None = None,
                        lengths: str = "rand64-1500",
                        link_rate: float = 250_000.0,
                        capacity: int = 100_000,
                        mean_on_us: int = 400_000,
                        mean_off_us: int = 600_000,
                        equal_rates: bool = False,
                        priority_split: bool = False,
                        uniform_channels: bool = False) -> SimConfig:
    """The default 16-flow experiment: flows 1-8 carry weight 2 and, unless
    equal_rates is set, twice the ON rate of flows 9-16.  Channel quality is
    graded across flows (stationary Good fraction 0.90 down to 0.30,
    interleaved between the weight groups) so that channel-aware scheduling
    has real choices; uniform_channels switches every flow to the same
    process.  With priority_split, flows 1-8 are high priority and 9-16 low.
    """
    n = 16
    u = {i: 2.0 if i <= 8 else 1.0 for i in range(1, n + 1)}
    u_sum = sum(u.values())
    length_cfg = LENGTH_CONFIGS[lengths]

    # interleave the two weight groups through the quality ladder
    ladder = [1, 9, 2, 10, 3, 11, 4, 12, 5, 13, 6, 14, 7, 15, 8, 16]
    pi = {fid: 0.90 - 0.04 * rank for rank, fid in enumerate(ladder)}

    duty = mean_on_us / (mean_on_us + mean_off_us)
    rate_unit = load * link_rate / (u_sum * duty)

    flows = []
    for i in range(1, n + 1):
        if equal_rates:
            on_rate = load * link_rate / (n * duty)
        else:
            on_rate = u[i] * rate_unit
        if uniform_channels:
            channel = ChannelProcess()
        else:
            p_gb = 0.1
            p_bg = pi[i] * p_gb / (1.0 - pi[i])
            channel = ChannelProcess(p_gb=p_gb, p_bg=p_bg)
        priority = PriorityClass.HIGH
        if priority_split and i > 8:
            priority = PriorityClass.LOW
        flows.append(FlowConfig(
            id=i, u=u[i], phi=u[i] / u_sum, priority=priority,
            source=SourceConfig(mean_on_us=mean_on_us, mean_off_us=mean_off_us,
                                on_rate=on_rate, lengths=length_cfg),
            channel=channel))
    return SimConfig(flows=tuple(flows), duration_us=duration_us,
                     warmup_us=warmup_us, link_rate=link_rate,
                     capacity=capacity, policy=policy, scheduler=scheduler,
                     seed=seed)


# --- JSON config ingestion -------------------------------------------------

def _require_keys(section: dict, allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(where, f"unknown keys: {sorted(unknown)}")


def _lengths_from_json(value, where: str) -> LengthConfig:
    if isinstance(value, str):
        if value not in LENGTH_CONFIGS:
            raise ConfigError(where, f"unknown length config {value!r}")
        return LENGTH_CONFIGS[value]
    if isinstance(value, dict):
        _require_keys(value, {"low", "high"}, where)
        return LengthConfig(int(value["low"]), int(value["high"]))
    raise ConfigError(where, "expected a named config or {low, high}")


def config_from_dict(doc: dict) -> SimConfig:
    """Build a SimConfig from a parsed JSON document, raising ConfigError with
    the offending field name on any schema violation."""
    if not isinstance(doc, dict):
        raise ConfigError("config", "top level must be an object")
    allowed = {"duration_us", "warmup_us", "link_rate", "capacity",
               "thresholds", "policy", "scheduler", "seed", "flows"}
    _require_keys(doc, allowed, "config")
    if "flows" not in doc or not isinstance(doc["flows"], list) or not doc["flows"]:
        raise ConfigError("flows", "a non-empty flow list is required")

    thresholds = Thresholds()
    if "thresholds" in doc:
        t = doc["thresholds"]
        _require_keys(t, {"buf_min", "buf_medium", "buf_max"}, "thresholds")
        try:
            thresholds = Thresholds(
                buf_min=float(t.get("buf_min", 0.85)),
                buf_medium=float(t.get("buf_medium", 0.915)),
                buf_max=float(t.get("buf_max", 0.98)))
        except ValueError as exc:
            raise ConfigError("thresholds", str(exc)) from exc

    policy_name = "pafd"
    pafd_cfg = None
    red_cfg = None
    if "policy" in doc:
        p = doc["policy"]
        if isinstance(p, str):
            policy_name = p
        elif isinstance(p, dict):
            policy_name = p.get("name", "pafd")
            params = {k: v for k, v in p.items() if k != "name"}
            try:
                if policy_name in ("pafd", "pafd-ds"):
                    _require_keys(params, {"buf_min", "buf_max", "p_self",
                                           "alpha_offset_low", "beta_knee",
                                           "beta_min"}, "policy")
                    pafd_cfg = PafdConfig(
                        buf_min=float(params.get("buf_min", thresholds.buf_min)),
                        buf_max=float(params.get("buf_max", thresholds.buf_max)),
                        p_self=float(params.get("p_self", 0.5)),
                        alpha_offset_low=float(params.get("alpha_offset_low", 0.1)),
                        beta_knee=float(params.get("beta_knee", 0.5)),
                        beta_min=float(params.get("beta_min", 0.5)))
                elif policy_name == "red":
                    _require_keys(params, {"w_q", "min_th", "max_th", "max_p"},
                                  "policy")
                    capacity = int(doc.get("capacity", 100_000))
                    red_cfg = RedConfig(
                        w_q=float(params.get("w_q", 0.002)),
                        min_th=int(params.get("min_th", capacity // 4)),
                        max_th=int(params.get("max_th", (3 * capacity) // 4)),
                        max_p=float(params.get("max_p", 0.1)))
                elif policy_name == "td":
                    _require_keys(params, set(), "policy")
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError("policy", str(exc)) from exc
        else:
            raise ConfigError("policy", "expected a name or an object")

    flows = []
    flow_allowed = {"id", "u", "phi", "priority", "source", "channel"}
    src_allowed = {"mean_on_us", "mean_off_us", "on_rate", "lengths"}
    chan_allowed = {"p_gb", "p_bg", "r_good", "r_bad", "step_us"}
    for idx, fdoc in enumerate(doc["flows"]):
        where = f"flows[{idx}]"
        if not isinstance(fdoc, dict):
            raise ConfigError(where, "expected an object")
        _require_keys(fdoc, flow_allowed, where)
        if "id" not in fdoc:
            raise ConfigError(f"{where}.id", "flow id is required")
        try:
            fid = int(fdoc["id"])
            u = float(fdoc.get("u", 1.0))
            priority = PriorityClass(fdoc.get("priority", "high"))
        except ValueError as exc:
            raise ConfigError(where, str(exc)) from exc
        source = SourceConfig()
        if "source" in fdoc:
            s = fdoc["source"]
            _require_keys(s, src_allowed, f"{where}.source")
            try:
                source = SourceConfig(
                    mean_on_us=int(s.get("mean_on_us", 400_000)),
                    mean_off_us=int(s.get("mean_off_us", 600_000)),
                    on_rate=float(s.get("on_rate", 50_000.0)),
                    lengths=_lengths_from_json(s.get("lengths", "rand64-1500"),
                                               f"{where}.source.lengths"))
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"{where}.source", str(exc)) from exc
        channel = ChannelProcess()
        if "channel" in fdoc:
            c = fdoc["channel"]
            _require_keys(c, chan_allowed, f"{where}.channel")
            try:
                channel = ChannelProcess(
                    p_gb=float(c.get("p_gb", 0.1)),
                    p_bg=float(c.get("p_bg", 0.3)),
                    r_good=float(c.get("r_good", 1.0)),
                    r_bad=float(c.get("r_bad", 0.25)),
                    step_us=int(c.get("step_us", 1_000)))
            except ValueError as exc:
                raise ConfigError(f"{where}.channel", str(exc)) from exc
        flows.append({"id": fid, "u": u, "priority": priority,
                      "phi": fdoc.get("phi"), "source": source,
                      "channel": channel})

    u_sum = sum(f["u"] for f in flows)
    flow_cfgs = []
    for f in flows:
        phi = f["phi"]
        if phi is None:
            phi = f["u"] / u_sum
        else:
            try:
                phi = float(phi)
            except ValueError as exc:
                raise ConfigError("phi", str(exc)) from exc
        try:
            flow_cfgs.append(FlowConfig(id=f["id"], u=f["u"], phi=phi,
                                        priority=f["priority"],
                                        source=f["source"],
                                        channel=f["channel"]))
        except ValueError as exc:
            raise ConfigError("flows", str(exc)) from exc

    try:
        cfg = SimConfig(
            flows=tuple(flow_cfgs),
            duration_us=int(doc.get("duration_us", 60_000_000)),
            warmup_us=(int(doc["warmup_us"]) if "warmup_us" in doc
                       and doc["warmup_us"] is not None else None),
            link_rate=float(doc.get("link_rate", 250_000.0)),
            capacity=int(doc.get("capacity", 100_000)),
            thresholds=thresholds,
            policy=policy_name,
            scheduler=doc.get("scheduler", "lqf"),
            seed=int(doc.get("seed", 1)),
            pafd=pafd_cfg, red=red_cfg)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("config", str(exc)) from exc
    cfg.validate()
    return cfg


def config_to_dict(cfg: SimConfig) -> dict:
    """Serialize a SimConfig back to the JSON document shape."""
    policy: dict = {"name": cfg.policy}
    if cfg.policy in ("pafd", "pafd-ds") and cfg.pafd is not None:
        p = cfg.pafd
        policy.update(buf_min=p.buf_min, buf_max=p.buf_max, p_self=p.p_self,
                      alpha_offset_low=p.alpha_offset_low,
                      beta_knee=p.beta_knee, beta_min=p.beta_min)
    if cfg.policy == "red" and cfg.red is not None:
        r = cfg.red
        policy.update(w_q=r.w_q, min_th=r.min_th, max_th=r.max_th, max_p=r.max_p)
    return {
        "duration_us": cfg.duration_us,
        "warmup_us": cfg.warmup_us,
        "link_rate": cfg.link_rate,
        "capacity": cfg.capacity,
        "thresholds": {"buf_min": cfg.thresholds.buf_min,
                       "buf_medium": cfg.thresholds.buf_medium,
                       "buf_max": cfg.thresholds.buf_max},
        "policy": policy,
        "scheduler": cfg.scheduler,
        "seed": cfg.seed,
        "flows": [
            {
                "id": f.id, "u": f.u, "phi": f.phi,
                "priority": f.priority.value,
                "source": {"mean_on_us": f.source.mean_on_us,
                           "mean_off_us": f.source.mean_off_us,
                           "on_rate": f.source.on_rate,
                           "lengths": {"low": f.source.lengths.low,
                                       "high": f.source.lengths.high}},
                "channel": {"p_gb": f.channel.p_gb, "p_bg": f.channel.p_bg,
                            "r_good": f.channel.r_good,
                            "r_bad": f.channel.r_bad,
                            "step_us": f.channel.step_us},
            }
            for f in cfg.flows
        ],
    }
