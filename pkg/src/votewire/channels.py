"""Transmission channels as capability flags.

A channel is abstracted to three security-relevant booleans: can contents
change in flight (integrity), can senders be impersonated (authenticity),
and can messages be held back (delayable). The presets model the
mechanisms in real use between cantonal and federal offices; none of the
electronic ones provides integrity or authenticity, and every mechanism,
postal mail included, can be delayed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True, slots=True)
class ChannelSpec:
    name: str
    integrity: bool
    authenticity: bool
    delayable: bool
    base_latency: int
    preset: str | None = None

    def __post_init__(self) -> None:
        if self.base_latency < 0:
            raise ValueError("base_latency must be >= 0 ticks")

    def with_latency(self, base_latency: int) -> "ChannelSpec":
        return replace(self, base_latency=base_latency)


TELEPHONE = ChannelSpec("telephone", False, False, True, base_latency=3, preset="telephone")
FAX = ChannelSpec("fax", False, False, True, base_latency=2, preset="fax")
EMAIL = ChannelSpec("email", False, False, True, base_latency=1, preset="email")
# Dedicated reporting software is not assumed secure: the deployed tools
# have not passed a public review, so the conservative default applies.
DEDICATED_SOFTWARE = ChannelSpec("dedicated", False, False, True, base_latency=1, preset="dedicated")
# The paper trail: hand-signed documents by post. Unforgeable and
# unmodifiable for this model's purposes, but days slower and still delayable.
POSTAL_FINAL = ChannelSpec("postal_final", True, True, True, base_latency=48, preset="postal_final")

PRESETS: dict[str, ChannelSpec] = {
    spec.preset: spec
    for spec in (TELEPHONE, FAX, EMAIL, DEDICATED_SOFTWARE, POSTAL_FINAL)
}


def preset(name: str, base_latency: int | None = None) -> ChannelSpec:
    try:
        spec = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown channel preset {name!r}; known: {sorted(PRESETS)}") from None
    if base_latency is not None:
        spec = spec.with_latency(base_latency)
    return spec


def wrapped(spec: ChannelSpec) -> ChannelSpec:
    """The same channel carrying signed reports.

    Signing gives integrity and authenticity on any transport. It cannot
    stop anyone from sitting on a message, so delayable is untouched.
    """
    if spec.integrity and spec.authenticity:
        return spec
    return replace(spec, name=f"{spec.name}+signed", integrity=True, authenticity=True)
