"""Post-run statistics: per-flow goodput, throughput effectiveness, queuing
delay, and the weighted fairness index, plus the report row formats."""

from dataclasses import dataclass, field

from .core import FlowId


def fairness_index(goodputs, weights) -> float:
    """Jain-style fairness over the weighted ratios r_i = G_i / W_i:

        F = (sum r_i)^2 / (N * sum r_i^2)

    1 means goodput exactly proportional to the weights; the lower bound is
    1/N (one flow takes everything).
    """
    g = list(goodputs)
    w = list(weights)
    if len(g) != len(w) or not g:
        raise ValueError("goodputs and weights must be equal-length, non-empty")
    if any(wi <= 0 for wi in w):
        raise ValueError("weights must be positive")
    if any(gi < 0 for gi in g):
        raise ValueError("goodputs must be non-negative")
    if all(gi == 0 for gi in g):
        raise ValueError("no throughput")
    ratios = [gi / wi for gi, wi in zip(g, w)]
    total = sum(ratios)
    sq = sum(r * r for r in ratios)
    return (total * total) / (len(ratios) * sq)


def throughput_effectiveness(delivered_bytes: float, link_rate: float,
                             window_s: float) -> float:
    """Delivered bytes over what the link could carry in the window."""
    if window_s <= 0:
        raise ValueError("window must be positive")
    if link_rate <= 0:
        raise ValueError("link_rate must be positive")
    return min(1.0, max(0.0, delivered_bytes / (link_rate * window_s)))


def avg_queuing_delay(records) -> float | None:
    """Mean (departure - arrival) over delivered packets; None when nothing
    was delivered (absence, not zero)."""
    total, n = 0, 0
    for arrival, departure in records:
        total += departure - arrival
        n += 1
    if n == 0:
        return None
    return total / n


@dataclass(frozen=True)
class FlowStats:
    flow: FlowId
    goodput: float               # bytes/sec over the measurement window
    admitted: int
    dropped: int                 # arrivals refused (incl. oversize)
    evicted: int                 # queued packets pushed out by the policy
    delivered: int
    admitted_bytes: int
    delivered_bytes: int
    evicted_bytes: int
    mean_delay_us: float | None


@dataclass(frozen=True)
class RunReport:
    combo: str
    policy: str
    scheduler: str
    seed: int
    load: float                  # offered bytes / link capacity over the run
    flows: tuple[FlowStats, ...]
    goodput_total: float
    effectiveness: float
    avg_delay_us: float | None
    fairness: float | None
    # whole-run byte conservation: admitted = delivered + evicted + residual
    admitted_bytes: int = 0
    delivered_bytes: int = 0
    evicted_bytes: int = 0
    residual_bytes: int = 0
    oversize_drops: int = 0
    extra: dict = field(default_factory=dict, compare=False)


CSV_BASE_COLUMNS = ("combo", "load", "goodput_total", "effectiveness",
                    "avg_delay_us", "fairness")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def csv_header(flow_ids) -> str:
    cols = list(CSV_BASE_COLUMNS) + [f"goodput_flow_{fid}" for fid in flow_ids]
    return ",".join(cols)


def csv_row(report: RunReport) -> str:
    cells = [report.combo, _fmt(report.load), _fmt(report.goodput_total),
             _fmt(report.effectiveness), _fmt(report.avg_delay_us),
             _fmt(report.fairness)]
    cells += [_fmt(fs.goodput) for fs in report.flows]
    return ",".join(cells)


def reports_to_csv(reports) -> str:
    """Render reports as CSV with a fixed column order and \\n line endings.
    All reports must cover the same flow ids."""
    reports = list(reports)
    if not reports:
        return ""
    flow_ids = [fs.flow for fs in reports[0].flows]
    lines = [csv_header(flow_ids)]
    lines += [csv_row(r) for r in reports]
    return "\n".join(lines) + "\n"


def report_to_dict(report: RunReport) -> dict:
    """Full-precision mapping mirroring the CSV fields, for JSON output."""
    return {
        "combo": report.combo,
        "policy": report.policy,
        "scheduler": report.scheduler,
        "seed": report.seed,
        "load": report.load,
        "goodput_total": report.goodput_total,
        "effectiveness": report.effectiveness,
        "avg_delay_us": report.avg_delay_us,
        "fairness": report.fairness,
        "admitted_bytes": report.admitted_bytes,
        "delivered_bytes": report.delivered_bytes,
        "evicted_bytes": report.evicted_bytes,
        "residual_bytes": report.residual_bytes,
        "oversize_drops": report.oversize_drops,
        "flows": [
            {
                "flow": fs.flow,
                "goodput": fs.goodput,
                "admitted": fs.admitted,
                "dropped": fs.dropped,
                "evicted": fs.evicted,
                "delivered": fs.delivered,
                "admitted_bytes": fs.admitted_bytes,
                "delivered_bytes": fs.delivered_bytes,
                "evicted_bytes": fs.evicted_bytes,
                "mean_delay_us": fs.mean_delay_us,
            }
            for fs in report.flows
        ],
    }
