"""Shared-buffer queue management simulator.

Adaptive fair dropping (PAFD, with a DiffServ variant) against RED and tail
drop, under best-channel-first / longest-queue-first / round-robin link
scheduling, plus a software emulation of a network-processor descriptor-cache
dataplane.
"""

from .core import (ChannelQuality, ChannelState, Packet, PriorityClass,
                   ServiceFlow, SharedBuffer, Thresholds)
from .droppolicy import (DecisionKind, PafdConfig, PolicyDecision, RedConfig,
                         RedState, apply_decision, classify_sla, compute_alpha,
                         compute_beta, pafd_admit, red_admit, select_victim,
                         synthetic_weight, td_admit)
from .engine import (ALL_COMBOS, ConfigError, FlowConfig, SimConfig,
                     SourceConfig, combo_label, config_from_dict, run,
                     sixteen_flow_config, sweep)
from .metrics import (FlowStats, RunReport, avg_queuing_delay, fairness_index,
                      throughput_effectiveness)
from .sched import RoundRobin, bcf_next, gps_ideal_share, lqf_next, rr_next
from .traffic import (ChannelProcess, LENGTH_CONFIGS, LengthConfig,
                      OnOffSource, channel_step, next_source_event,
                      sample_packet_length)

__version__ = "0.1.0"
