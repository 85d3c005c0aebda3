"""Deterministic discrete-event simulation of upward result reporting.

Time is integer ticks. Events are processed from a heap ordered by
(time, insertion counter), so ties break by scheduling order and a run is
a pure function of its configuration and seed; the only randomness is an
explicitly seeded generator used for optional latency jitter and miscount
noise.

Each leaf emits one preliminary report over its configured channel and,
later, one final report over the postal channel. A node that accepts a
preliminary immediately (same tick) emits fresh replacement totals for its
own subtree upward; the root publishes instead. Finals are slower: a node
forwards its final only once every child's final has arrived. Preliminary
counts can be corrupted in flight by configured attacks; final counts ride
the integrity-protected postal channel, so the final publication always
equals the sum of the leaf ground truths.
"""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .adversary import (
    AttackKind,
    AttackSpec,
    apply_tamper,
    check_attack_permitted,
    delayed_delivery,
    forge_report,
)
from .channels import POSTAL_FINAL, ChannelSpec
from .counts import VoteCount, accumulate
from .errors import DuplicateFinal
from .reports import Report, ReportKind
from .traces import (
    AttackRecord,
    DeliverRecord,
    DetectRecord,
    EmitRecord,
    EventTrace,
    PublishRecord,
    TraceRecord,
)
from .tree import JurisdictionId, JurisdictionTree

REASON_UNKNOWN_SENDER = "unknown_sender"
REASON_OVER_ELIGIBLE = "over_eligible"
REASON_STALE_SEQUENCE = "stale_sequence"
REASON_DUPLICATE_FINAL = "duplicate_final"

DEFAULT_FINAL_EMIT_AT = 100


def feasibility_check(
    report: Report,
    receiver: JurisdictionId,
    tree: JurisdictionTree,
    last_seen: Mapping[JurisdictionId, int],
) -> str | None:
    """First reason to refuse a preliminary report, or None to accept.

    Checks, in order: the sender must be a direct child of the receiver;
    the claimed total may not exceed the sender's eligible voters (when
    known); the sequence number must be strictly newer than the last one
    accepted from that sender.
    """
    if report.sender not in tree or tree.parent(report.sender) != receiver:
        return REASON_UNKNOWN_SENDER
    eligible = tree.eligible_voters.get(report.sender)
    if eligible is not None and report.counts.total() > eligible:
        return REASON_OVER_ELIGIBLE
    if report.sequence_no <= last_seen.get(report.sender, 0):
        return REASON_STALE_SEQUENCE
    return None


def final_disposition(prev: Report | None, incoming: Report) -> str:
    """How to treat an incoming final given what the sender sent before.

    Finals are idempotent: a redelivery with identical counts is absorbed
    ("duplicate"), but the same sender contradicting its own final is a
    protocol violation, not a message to reconcile.
    """
    if prev is None:
        return "store"
    if prev.counts != incoming.counts:
        raise DuplicateFinal(
            f"{incoming.sender} sent conflicting final counts "
            f"({prev.counts} then {incoming.counts})"
        )
    return "duplicate"


@dataclass(frozen=True, slots=True)
class NoiseModel:
    """Honest miscounts: each leaf's preliminary may shift some ballots.

    With probability ``probability`` a leaf's preliminary moves 1 to
    ``max_shift`` ballots from one answer to the other (direction drawn at
    random, magnitude clamped to the source side). Totals are preserved
    and finals are never touched.
    """

    probability: float
    max_shift: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError("probability must be in [0, 1]")
        if self.max_shift < 1:
            raise ValueError("max_shift must be >= 1")

    def perturb(self, counts: VoteCount, rng: random.Random) -> VoteCount:
        if rng.random() >= self.probability:
            return counts
        magnitude = rng.randint(1, self.max_shift)
        if rng.random() < 0.5:
            moved = min(magnitude, counts.yes)
            return VoteCount(counts.yes - moved, counts.no + moved, counts.blank, counts.invalid)
        moved = min(magnitude, counts.no)
        return VoteCount(counts.yes + moved, counts.no - moved, counts.blank, counts.invalid)


class _NodeState:
    __slots__ = ("next_seq", "last_seen", "received_prelim", "received_final", "final_emitted")

    def __init__(self) -> None:
        self.next_seq = 1
        self.last_seen: dict[JurisdictionId, int] = {}
        self.received_prelim: dict[JurisdictionId, Report] = {}
        self.received_final: dict[JurisdictionId, Report] = {}
        self.final_emitted = False


@dataclass(frozen=True)
class Simulation:
    """A fully specified run: tree, channels, truth, timing, attacks."""

    election_id: str
    tree: JurisdictionTree
    channels: Mapping[JurisdictionId, ChannelSpec]
    ground_truth: Mapping[JurisdictionId, VoteCount]
    seed: int = 0
    prelim_emit: Mapping[JurisdictionId, int] = field(default_factory=dict)
    final_emit: Mapping[JurisdictionId, int] = field(default_factory=dict)
    final_emit_default: int = DEFAULT_FINAL_EMIT_AT
    jitter_max: int = 0
    noise: NoiseModel | None = None
    attacks: Sequence[AttackSpec] = ()
    postal: ChannelSpec = POSTAL_FINAL

    def __post_init__(self) -> None:
        leaves = set(self.tree.leaves())
        if leaves == {self.tree.root}:
            raise ValueError("simulation needs at least one reporting edge")
        if set(self.ground_truth) != leaves:
            missing = sorted(str(a) for a in leaves - set(self.ground_truth))
            extra = sorted(str(a) for a in set(self.ground_truth) - leaves)
            raise ValueError(
                f"ground truth must cover exactly the leaves; missing={missing} extra={extra}"
            )
        for node in self.tree.nodes():
            if node != self.tree.root and node not in self.channels:
                raise ValueError(f"no channel configured for edge {node} -> parent")
        if self.jitter_max < 0:
            raise ValueError("jitter_max must be >= 0")
        for when in (*self.prelim_emit.values(), *self.final_emit.values()):
            if when < 0:
                raise ValueError("emit times must be >= 0")
        # Capability gating happens here, before anything runs: an attack a
        # channel rules out is a configuration error, not a runtime event.
        for attack in self.attacks:
            if attack.edge_child not in self.tree or attack.edge_child == self.tree.root:
                raise ValueError(f"attack targets unknown edge {attack.edge_child}")
            check_attack_permitted(attack.kind, self.channel_for(attack))

    def channel_for(self, attack: AttackSpec) -> ChannelSpec:
        if attack.report_kind is ReportKind.FINAL:
            return self.postal
        return self.channels[attack.edge_child]

    def run(self) -> EventTrace:
        rng = random.Random(self.seed)
        records: list[TraceRecord] = []
        counter = itertools.count()
        heap: list[tuple[int, int, tuple]] = []
        states: dict[JurisdictionId, _NodeState] = {n: _NodeState() for n in self.tree.nodes()}
        fires_left: list[int | None] = [a.first_n for a in self.attacks]

        # Noise draws come first and in leaf order, so the perturbed counts
        # do not depend on event interleaving.
        prelim_counts: dict[JurisdictionId, VoteCount] = {}
        for leaf in self.tree.leaves():
            counts = self.ground_truth[leaf]
            prelim_counts[leaf] = self.noise.perturb(counts, rng) if self.noise else counts

        for leaf in self.tree.leaves():
            at = self.prelim_emit.get(leaf, 0)
            heapq.heappush(heap, (at, next(counter), ("leaf_prelim", leaf)))
        for leaf in self.tree.leaves():
            at = self.final_emit.get(leaf, self.final_emit_default)
            heapq.heappush(heap, (at, next(counter), ("leaf_final", leaf)))

        def send(time: int, report: Report, channel: ChannelSpec) -> None:
            receiver = self.tree.parent(report.sender)
            assert receiver is not None
            delivery = time + channel.base_latency
            if self.jitter_max:
                delivery += rng.randint(0, self.jitter_max)
            for idx, attack in enumerate(self.attacks):
                if not attack.matches(report):
                    continue
                left = fires_left[idx]
                if left == 0:
                    continue
                if left is not None:
                    fires_left[idx] = left - 1
                if attack.kind is AttackKind.TAMPER:
                    assert attack.mutation is not None
                    report = apply_tamper(report, attack.mutation, channel)
                elif attack.kind is AttackKind.DELAY:
                    delivery = delayed_delivery(delivery, attack.hold_ticks, channel)
                else:
                    forged = forge_report(report, attack, channel)
                    # Pushed first at the same delivery tick, so the forgery
                    # is processed before the genuine report it shadows.
                    heapq.heappush(
                        heap, (delivery, next(counter), ("deliver", forged, receiver, channel))
                    )
                records.append(
                    AttackRecord(
                        time, attack.kind.value, report.sender, receiver,
                        attack.mode, attack.describe(),
                    )
                )
            heapq.heappush(heap, (delivery, next(counter), ("deliver", report, receiver, channel)))

        def emit(time: int, node: JurisdictionId, kind: ReportKind, counts: VoteCount) -> Report:
            state = states[node]
            report = Report(self.election_id, node, state.next_seq, counts, kind, time)
            state.next_seq += 1
            records.append(EmitRecord(time, node, kind, report.sequence_no, counts))
            return report

        def prelim_totals(node: JurisdictionId) -> VoteCount:
            state = states[node]
            return accumulate(
                state.received_prelim[c].counts
                for c in self.tree.children(node)
                if c in state.received_prelim
            )

        def publish(time: int, node: JurisdictionId, kind: ReportKind) -> None:
            state = states[node]
            reports = state.received_prelim if kind is ReportKind.PRELIMINARY else state.received_final
            children = tuple(
                (c, reports[c].sequence_no, reports[c].counts)
                for c in self.tree.children(node)
                if c in reports
            )
            totals = accumulate(counts for _, _, counts in children)
            records.append(PublishRecord(time, node, kind, totals, children))

        def on_prelim(time: int, report: Report, receiver: JurisdictionId, channel: ChannelSpec) -> None:
            state = states[receiver]
            reason = feasibility_check(report, receiver, self.tree, state.last_seen)
            records.append(
                DeliverRecord(
                    time, report.sender, receiver, channel.name, report.kind,
                    report.sequence_no, report.counts, reason is None, reason,
                )
            )
            if reason is not None:
                records.append(
                    DetectRecord(time, receiver, reason, report.sender, report.sequence_no)
                )
                return
            state.last_seen[report.sender] = report.sequence_no
            state.received_prelim[report.sender] = report
            if receiver == self.tree.root:
                publish(time, receiver, ReportKind.PRELIMINARY)
            else:
                fresh = emit(time, receiver, ReportKind.PRELIMINARY, prelim_totals(receiver))
                send(time, fresh, self.channels[receiver])

        def on_final(time: int, report: Report, receiver: JurisdictionId, channel: ChannelSpec) -> None:
            state = states[receiver]
            prev = state.received_final.get(report.sender)
            if final_disposition(prev, report) == "duplicate":
                records.append(
                    DeliverRecord(
                        time, report.sender, receiver, channel.name, report.kind,
                        report.sequence_no, report.counts, True, REASON_DUPLICATE_FINAL,
                    )
                )
                return
            state.received_final[report.sender] = report
            records.append(
                DeliverRecord(
                    time, report.sender, receiver, channel.name, report.kind,
                    report.sequence_no, report.counts, True, None,
                )
            )
            if state.final_emitted or set(state.received_final) != set(self.tree.children(receiver)):
                return
            state.final_emitted = True
            totals = accumulate(r.counts for r in state.received_final.values())
            if receiver == self.tree.root:
                publish(time, receiver, ReportKind.FINAL)
            else:
                fresh = emit(time, receiver, ReportKind.FINAL, totals)
                send(time, fresh, self.postal)

        while heap:
            time, _, event = heapq.heappop(heap)
            match event:
                case ("leaf_prelim", leaf):
                    report = emit(time, leaf, ReportKind.PRELIMINARY, prelim_counts[leaf])
                    send(time, report, self.channels[leaf])
                case ("leaf_final", leaf):
                    report = emit(time, leaf, ReportKind.FINAL, self.ground_truth[leaf])
                    send(time, report, self.postal)
                case ("deliver", report, receiver, channel):
                    if report.kind is ReportKind.PRELIMINARY:
                        on_prelim(time, report, receiver, channel)
                    else:
                        on_final(time, report, receiver, channel)

        return EventTrace(
            election_id=self.election_id,
            seed=self.seed,
            tree=self.tree,
            ground_truth=dict(self.ground_truth),
            records=tuple(records),
        )
