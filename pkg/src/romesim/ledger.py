"""Accounting of zeropoint mode sets per region and the distinguishability bound.

A network is auditable when it exposes, per :func:`audit_network`:

* ``crystal_variable_ids``: mode sets amplified inside the source crystal;
* ``injections``: every idle-channel vacuum entry, tagged with the region of
  the setup it belongs to;
* ``analyser_inputs``: the beams entering the Bell-state analyser;
* ``bob_signal``: the beam carrying the amplified sets at Bob's station
  (may be ``None`` for source-only graphs).

Counting is done from the constructed element graph, never hand-entered, so a
miswired scenario shows up as a wrong ledger.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .stochastic import iter_variable_ids

REGIONS = ("source", "preparer", "analyser", "bob", "verification")


@dataclass(frozen=True)
class IdleInjection:
    """One vacuum input channel: which element, where, and which mode sets."""

    element: str
    region: str
    variable_ids: tuple[int, ...]


@dataclass(frozen=True)
class ZpfLedger:
    """Per-region counts of zeropoint mode sets."""

    n_zpf_source: int
    n_zpf_analyser: int
    n_idle_channels: int
    n_zpf_analyser_noise: int

    def __post_init__(self):
        counts = (self.n_zpf_source, self.n_zpf_analyser, self.n_idle_channels, self.n_zpf_analyser_noise)
        if any(n < 0 for n in counts):
            raise ValueError("ledger counts must be >= 0")
        if self.n_zpf_analyser_noise != 2 * self.n_idle_channels:
            raise ValueError("each idle channel must introduce exactly two sets of vacuum modes")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n_zpf_source, self.n_zpf_analyser, self.n_idle_channels, self.n_zpf_analyser_noise)


def max_distinguishable_classes(ledger: ZpfLedger) -> int:
    """Upper bound on mutually distinguishable Bell-state classes.

    Amplified mode sets entering the analyser minus one per idle channel
    inside it (equivalently minus half the analyser noise sets).
    """
    n = ledger.n_zpf_analyser - ledger.n_idle_channels
    if n < 0:
        raise ValueError("noise exceeds information")
    return n


@dataclass(frozen=True)
class BobStationAudit:
    """Balance of information-bearing sets versus noise entries at Bob's side."""

    amplified_sets: int
    idle_channels: int
    required_classes: int

    @property
    def distinguishable(self) -> int:
        return self.amplified_sets - self.idle_channels

    @property
    def sufficient(self) -> bool:
        return self.distinguishable >= self.required_classes


@dataclass
class NetworkGraph:
    """Minimal auditable network; scenario objects expose the same attributes."""

    crystal_variable_ids: tuple[int, ...]
    injections: list[IdleInjection]
    analyser_inputs: list
    bob_signal: object | None = None


def _injections_in(network, region: str) -> Sequence[IdleInjection]:
    found = []
    for injection in network.injections:
        if injection.region not in REGIONS:
            raise ValueError(f"unclassifiable element: {injection.element} (region {injection.region!r})")
        if injection.region == region:
            found.append(injection)
    return found


def audit_network(network) -> ZpfLedger:
    """Count mode sets per region from a constructed network graph."""
    source_sets = len(network.crystal_variable_ids)
    source_sets += sum(len(inj.variable_ids) for inj in _injections_in(network, "source"))

    analyser_sets = len(iter_variable_ids(
        form for beam in network.analyser_inputs for form in (beam.h, beam.v)
    ))

    analyser_idles = _injections_in(network, "analyser")
    return ZpfLedger(
        n_zpf_source=source_sets,
        n_zpf_analyser=analyser_sets,
        n_idle_channels=len(analyser_idles),
        n_zpf_analyser_noise=sum(len(inj.variable_ids) for inj in analyser_idles),
    )


def audit_bob_station(network) -> BobStationAudit:
    """Audit Bob's side: amplified sets in the signal beam versus idle entries
    inside the verification station, against the class count the analyser
    resolves."""
    if network.bob_signal is None:
        raise ValueError("network has no signal beam at Bob's station")
    amplified = len(iter_variable_ids((network.bob_signal.h, network.bob_signal.v)))
    idles = _injections_in(network, "verification")
    required = max_distinguishable_classes(audit_network(network))
    return BobStationAudit(
        amplified_sets=amplified,
        idle_channels=len(idles),
        required_classes=required,
    )
