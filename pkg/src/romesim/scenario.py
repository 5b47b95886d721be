"""End-to-end Rome teleportation scenario.

Source, Preparer, Alice's polarization-momentum Bell-state analyser, Bob's
polarization-restoring station, outcome-conditioned correction maps, the
verification station for linear and elliptical preparations, and the timing
condition for reconstructing the cross-correlations after classical
communication.

Angles are degrees at this interface and radians inside the optics layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .detection import DetectionRecord, NetworkSampler, joint_probability_intensity, joint_probability_p12
from .ledger import IdleInjection, NetworkGraph
from .optics import (
    IDENTITY_MAP,
    SPEED_OF_LIGHT,
    JonesMap,
    PbsOrientation,
    PolarizedBeam,
    apply_jones,
    balanced_beamsplitter,
    mirror,
    pbs_combine,
    polarizing_beamsplitter,
    quarter_wave,
    retarder,
    rotator,
    vacuum_beam,
)
from .source import CrystalParams, SourceOutput, emit_entangled_pair, momentum_entangle
from .stochastic import Ensemble, ModeKind

DETECTORS = ("DT+", "DT-", "DR+", "DR-")
PORTS = ("DB", "DBperp")

_HALF_PI = math.pi / 2.0


@dataclass(frozen=True)
class PreparerSpec:
    """Unitary polarization map encoding the qubit handed to Alice's photon."""

    kind: str
    jones: JonesMap
    theta_deg: float | None = None
    gamma_deg: float | None = None

    def __post_init__(self):
        if self.kind not in ("linear", "elliptical", "generic"):
            raise ValueError(f"unknown preparer kind: {self.kind!r}")
        if not self.jones.is_unitary():
            raise ValueError("preparer map must be unitary")

    @classmethod
    def linear(cls, theta_deg: float) -> PreparerSpec:
        return cls("linear", rotator(math.radians(theta_deg)), theta_deg=theta_deg)

    @classmethod
    def elliptical(cls, gamma_deg: float) -> PreparerSpec:
        return cls("elliptical", quarter_wave(math.radians(gamma_deg)), gamma_deg=gamma_deg)

    @classmethod
    def generic(cls, jones: JonesMap) -> PreparerSpec:
        return cls("generic", jones)


_OUTCOME_BITS = {"DT-": (0, 0), "DT+": (0, 1), "DR-": (1, 0), "DR+": (1, 1)}


@dataclass(frozen=True)
class AliceOutcome:
    """Which detector fired; carries the two classical bits sent to Bob."""

    detector: str

    def __post_init__(self):
        if self.detector not in DETECTORS:
            raise ValueError(f"unknown detector: {self.detector!r}")

    @property
    def classical_bits(self) -> tuple[int, int]:
        return _OUTCOME_BITS[self.detector]


@dataclass(frozen=True)
class TimingSpec:
    """Geometry and delay budget for applying Bob's correction in time."""

    classical_delay: float      # seconds from Alice's click to Bob's action
    source_to_alice: float      # metres of optical path, source to Alice's detectors
    source_to_bob: float        # metres, source to where Bob applies the map
    correlation_time: float     # seconds, width of the pair correlation

    def __post_init__(self):
        if min(self.classical_delay, self.source_to_alice, self.source_to_bob, self.correlation_time) < 0:
            raise ValueError("timing quantities must be >= 0")


class CoherenceResult(NamedTuple):
    ok: bool
    margin: float


def coherence_ok(timing: TimingSpec) -> CoherenceResult:
    """Can Bob's correction still overlap the pair correlation window?

    True when ``|T + (d_A - d_B)/c| <= tau``; the margin is the slack left,
    zero exactly at the boundary.
    """
    offset = abs(timing.classical_delay + (timing.source_to_alice - timing.source_to_bob) / SPEED_OF_LIGHT)
    margin = timing.correlation_time - offset
    return CoherenceResult(ok=margin >= 0.0, margin=margin)


class Correction(NamedTuple):
    jones: JonesMap
    constant: complex


_CORRECTIONS = {
    "DT-": Correction(IDENTITY_MAP, -1.0 + 0j),
    "DT+": Correction(retarder(math.pi), -1j),
    "DR+": Correction(rotator(_HALF_PI), -1.0 + 0j),
    "DR-": Correction(retarder(math.pi) @ rotator(_HALF_PI), 1j),
}


def correction_for(outcome: AliceOutcome | str) -> Correction:
    """Bob's restoring map and its attached constant for one Alice outcome."""
    detector = outcome.detector if isinstance(outcome, AliceOutcome) else outcome
    if detector not in _CORRECTIONS:
        raise ValueError(f"unknown detector: {detector!r}")
    return _CORRECTIONS[detector]


def elliptical_plate_angle(detector: str, gamma_deg: float) -> float:
    """Verification-plate orientation conditioned on Alice's detector (degrees)."""
    if detector == "DT+":
        return -gamma_deg
    if detector == "DT-":
        return gamma_deg
    if detector == "DR+":
        return gamma_deg + 90.0
    if detector == "DR-":
        return -gamma_deg + 90.0
    raise ValueError(f"unknown detector: {detector!r}")


@dataclass
class Scenario:
    """A wired network plus the bookkeeping the ledger audit consumes."""

    params: CrystalParams
    preparer: PreparerSpec
    ensemble: Ensemble
    source: SourceOutput
    prepared_a1: PolarizedBeam
    prepared_b1: PolarizedBeam
    injections: list[IdleInjection]
    mirror_phase: complex = 1j
    detector_beams: dict[str, PolarizedBeam] | None = None
    bob_signal: PolarizedBeam | None = None
    bob_noise: PolarizedBeam | None = None
    _vs_idle: PolarizedBeam | None = field(default=None, repr=False)

    @property
    def crystal_variable_ids(self) -> tuple[int, ...]:
        return tuple(v.id for v in self.ensemble.variables() if v.kind is ModeKind.CRYSTAL)

    @property
    def analyser_inputs(self) -> list[PolarizedBeam]:
        return [self.prepared_a1, self.prepared_b1]

    @property
    def reference_scale(self) -> float:
        return self.params.coincidence_scale


def build_rome(params: CrystalParams, preparer: PreparerSpec, *, mirror_phase: complex = 1j) -> Scenario:
    """Source plus Preparer: the momentum-entangled pair with the qubit written
    onto Alice's two horizontally polarized beams."""
    ensemble = Ensemble()
    beam1, beam2 = emit_entangled_pair(params, ensemble)
    idle1 = vacuum_beam(ensemble, "ZPF1")
    idle2 = vacuum_beam(ensemble, "ZPF2")
    src = momentum_entangle(beam1, beam2, idle1, idle2)
    return Scenario(
        params=params,
        preparer=preparer,
        ensemble=ensemble,
        source=src,
        prepared_a1=apply_jones(preparer.jones, src.a1),
        prepared_b1=apply_jones(preparer.jones, src.b1),
        injections=list(src.injections),
        mirror_phase=mirror_phase,
    )


def alice_analyser(
    scenario: Scenario,
    idle3: PolarizedBeam | None = None,
    idle4: PolarizedBeam | None = None,
) -> dict[str, PolarizedBeam]:
    """Wire the Bell-state analyser; returns the four detector beams.

    Each prepared beam meets a polarizing beam-splitter (vertical-transmitting
    on path a1, horizontal-transmitting on path b1) with a fresh vacuum idle;
    a 90-degree rotator plus folding mirror sits on the a1-transmitted and
    b1-reflected arms, and two balanced beam-splitters produce DT+/- and
    DR+/-.
    """
    ensemble = scenario.ensemble
    if idle3 is None:
        idle3 = vacuum_beam(ensemble, "ZPF3")
    if idle4 is None:
        idle4 = vacuum_beam(ensemble, "ZPF4")
    for name, idle in (("PBS3", idle3), ("PBS4", idle4)):
        scenario.injections.append(
            IdleInjection(name, "analyser", tuple(sorted(idle.h.variable_ids() | idle.v.variable_ids())))
        )

    swap = rotator(_HALF_PI)
    ports3 = polarizing_beamsplitter(scenario.prepared_a1, idle3, PbsOrientation.TRANSMIT_V)
    a1_t = mirror(apply_jones(swap, ports3.transmitted), scenario.mirror_phase)
    a1_r = ports3.reflected

    ports4 = polarizing_beamsplitter(scenario.prepared_b1, idle4, PbsOrientation.TRANSMIT_H)
    b1_t = ports4.transmitted
    b1_r = mirror(apply_jones(swap, ports4.reflected), scenario.mirror_phase)

    dt_plus, dt_minus = balanced_beamsplitter(b1_t, a1_t)
    dr_plus, dr_minus = balanced_beamsplitter(a1_r, b1_r)
    scenario.detector_beams = {
        "DT+": dt_plus.with_path("DT+"),
        "DT-": dt_minus.with_path("DT-"),
        "DR+": dr_plus.with_path("DR+"),
        "DR-": dr_minus.with_path("DR-"),
    }
    return scenario.detector_beams


def bob_station(scenario: Scenario) -> tuple[PolarizedBeam, PolarizedBeam]:
    """Move the correlations from momentum into polarization at Bob's side.

    Path b2 is rotated 90 degrees, path a2 is folded by a mirror, and the two
    merge at a horizontal-transmitting polarizing beam-splitter whose second
    output carries away the idle-channel noise from the source conversion.
    """
    rotated_b2 = apply_jones(rotator(_HALF_PI), scenario.source.b2)
    mirrored_a2 = mirror(scenario.source.a2, scenario.mirror_phase)
    ports = pbs_combine(rotated_b2, mirrored_a2, PbsOrientation.TRANSMIT_H)
    scenario.bob_signal = ports.transmitted.with_path("bob-signal")
    scenario.bob_noise = ports.reflected.with_path("bob-noise")
    return scenario.bob_signal, scenario.bob_noise


def build_full_rome(params: CrystalParams, preparer: PreparerSpec, *, mirror_phase: complex = 1j) -> Scenario:
    """Source, Preparer, analyser and Bob's station in one call."""
    scenario = build_rome(params, preparer, mirror_phase=mirror_phase)
    alice_analyser(scenario)
    bob_station(scenario)
    return scenario


def ensure_verification_idle(scenario: Scenario) -> PolarizedBeam:
    """Create (once) the vacuum idle of the verification beam-splitter."""
    if scenario._vs_idle is None:
        idle = vacuum_beam(scenario.ensemble, "ZPFvs")
        scenario.injections.append(
            IdleInjection("PBSvs", "verification", tuple(sorted(idle.h.variable_ids() | idle.v.variable_ids())))
        )
        scenario._vs_idle = idle
    return scenario._vs_idle


def verification_analyzer(theta_b_deg: float, plate_gamma_b_deg: float | None = None) -> JonesMap:
    """Map applied to Bob's signal before the verification beam-splitter.

    A rotator, optionally preceded by a quarter-wave plate.  The analysis
    plate undoes the preparation plate, so it carries the opposite
    retardance: the entrywise conjugate of the preparation plate matrix.
    """
    jones = rotator(math.radians(theta_b_deg))
    if plate_gamma_b_deg is not None:
        jones = jones @ quarter_wave(math.radians(plate_gamma_b_deg)).conjugate()
    return jones


def verification_station(
    scenario: Scenario,
    theta_b_deg: float,
    *,
    plate_gamma_b_deg: float | None = None,
) -> tuple[PolarizedBeam, PolarizedBeam]:
    """Analyse Bob's signal; returns the (DB, DBperp) detector beams."""
    if scenario.bob_signal is None:
        raise ValueError("scenario has no signal at Bob's station; build it first")
    idle = ensure_verification_idle(scenario)
    analysed = apply_jones(verification_analyzer(theta_b_deg, plate_gamma_b_deg), scenario.bob_signal)
    ports = polarizing_beamsplitter(analysed, idle, PbsOrientation.TRANSMIT_H)
    return ports.transmitted.with_path("DB"), ports.reflected.with_path("DBperp")


def _detector_analyzers(scenario: Scenario, theta_b_deg: float) -> dict[str, float | None]:
    if scenario.preparer.kind == "elliptical":
        gamma = scenario.preparer.gamma_deg
        return {det: elliptical_plate_angle(det, gamma) for det in DETECTORS}
    return {det: None for det in DETECTORS}


def joint_detection_records(
    scenario: Scenario,
    theta_b_deg: float,
    *,
    engine: str = "p12",
    sampler: NetworkSampler | None = None,
) -> dict[tuple[str, str], DetectionRecord]:
    """Joint detection records for the eight (detector, port) pairs.

    Engines: ``p12`` (pair correlations), ``intensity`` (correlated intensity
    excess), ``monte-carlo`` (sampling; requires a prepared sampler).  For an
    elliptical preparation the verification plate angle follows Alice's
    detector.
    """
    if scenario.detector_beams is None:
        raise ValueError("scenario has no analyser; build it first")
    if engine == "monte-carlo" and sampler is None:
        raise ValueError("monte-carlo engine requires a NetworkSampler")
    scale = scenario.reference_scale
    plate_angles = _detector_analyzers(scenario, theta_b_deg)

    records: dict[tuple[str, str], DetectionRecord] = {}
    port_cache: dict[float | None, tuple[PolarizedBeam, PolarizedBeam]] = {}
    for det in DETECTORS:
        angle = plate_angles[det]
        if angle not in port_cache:
            port_cache[angle] = verification_station(scenario, theta_b_deg, plate_gamma_b_deg=angle)
        db_beam, dbperp_beam = port_cache[angle]
        alice_beam = scenario.detector_beams[det]
        for port, port_beam in (("DB", db_beam), ("DBperp", dbperp_beam)):
            if engine == "p12":
                rec = joint_probability_p12(alice_beam, port_beam, reference_scale=scale)
            elif engine == "intensity":
                rec = joint_probability_intensity(alice_beam, port_beam, reference_scale=scale)
            elif engine == "monte-carlo":
                rec = sampler.joint(alice_beam, port_beam, reference_scale=scale)
            else:
                raise ValueError(f"unknown engine: {engine!r}")
            records[(det, port)] = rec
    return records


def linear_reference(theta_deg: float, theta_b_deg: float) -> dict[tuple[str, str], float]:
    """Closed-form normalized coincidence pattern for a linear preparation."""
    minus = math.radians(theta_deg - theta_b_deg)
    plus = math.radians(theta_deg + theta_b_deg)
    return {
        ("DT+", "DB"): math.cos(minus) ** 2,
        ("DT+", "DBperp"): math.sin(minus) ** 2,
        ("DT-", "DB"): math.cos(plus) ** 2,
        ("DT-", "DBperp"): math.sin(plus) ** 2,
        ("DR+", "DB"): math.sin(plus) ** 2,
        ("DR+", "DBperp"): math.cos(plus) ** 2,
        ("DR-", "DB"): math.sin(minus) ** 2,
        ("DR-", "DBperp"): math.cos(minus) ** 2,
    }


def elliptical_reference(theta_b_deg: float) -> dict[tuple[str, str], float]:
    """Closed-form normalized coincidence pattern for an elliptical preparation."""
    tb = math.radians(theta_b_deg)
    cos2, sin2 = math.cos(tb) ** 2, math.sin(tb) ** 2
    return {
        ("DT+", "DB"): cos2,
        ("DT+", "DBperp"): sin2,
        ("DT-", "DB"): cos2,
        ("DT-", "DBperp"): sin2,
        ("DR+", "DB"): sin2,
        ("DR+", "DBperp"): cos2,
        ("DR-", "DB"): sin2,
        ("DR-", "DBperp"): cos2,
    }


def verify_linear(
    theta_deg: float,
    theta_b_deg: float,
    params: CrystalParams | None = None,
) -> dict[tuple[str, str], float]:
    """Normalized joint probabilities for a linear preparation at one setting."""
    scenario = build_full_rome(params or CrystalParams(), PreparerSpec.linear(theta_deg))
    records = joint_detection_records(scenario, theta_b_deg)
    return {pair: rec.normalized for pair, rec in records.items()}


def verify_elliptical(
    gamma_deg: float,
    theta_b_deg: float,
    params: CrystalParams | None = None,
) -> dict[tuple[str, str], float]:
    """Normalized joint probabilities for an elliptical preparation at one setting."""
    scenario = build_full_rome(params or CrystalParams(), PreparerSpec.elliptical(gamma_deg))
    records = joint_detection_records(scenario, theta_b_deg)
    return {pair: rec.normalized for pair, rec in records.items()}


def build_source_only(params: CrystalParams | None = None) -> NetworkGraph:
    """Momentum-entangled source with no analyser attached; audit fodder."""
    params = params or CrystalParams()
    ensemble = Ensemble()
    beam1, beam2 = emit_entangled_pair(params, ensemble)
    src = momentum_entangle(beam1, beam2, vacuum_beam(ensemble, "ZPF1"), vacuum_beam(ensemble, "ZPF2"))
    crystal = tuple(v.id for v in ensemble.variables() if v.kind is ModeKind.CRYSTAL)
    return NetworkGraph(
        crystal_variable_ids=crystal,
        injections=list(src.injections),
        analyser_inputs=[],
        bob_signal=None,
    )


def build_risco_variant(params: CrystalParams | None = None) -> NetworkGraph:
    """Momentum-coded variant of the scheme.

    The source emits the polarization-entangled pair directly (four crystal
    sets, no conversion); the Preparer writes the qubit into momentum with a
    balanced beam-splitter whose idle channel feeds two extra mode sets into
    the beams heading for the analyser, which again holds two idle channels.
    """
    params = params or CrystalParams()
    ensemble = Ensemble()
    beam1, beam2 = emit_entangled_pair(params, ensemble)
    injections: list[IdleInjection] = []

    prep_idle = vacuum_beam(ensemble, "ZPFP")
    injections.append(
        IdleInjection("BSprep", "preparer", tuple(sorted(prep_idle.h.variable_ids() | prep_idle.v.variable_ids())))
    )
    path_plus, path_minus = balanced_beamsplitter(beam1, prep_idle)

    for name, beam in (("PBS3", path_plus), ("PBS4", path_minus)):
        idle = vacuum_beam(ensemble, f"ZPF{name[-1]}r")
        injections.append(
            IdleInjection(name, "analyser", tuple(sorted(idle.h.variable_ids() | idle.v.variable_ids())))
        )
        polarizing_beamsplitter(beam, idle, PbsOrientation.TRANSMIT_V)

    crystal = tuple(v.id for v in ensemble.variables() if v.kind is ModeKind.CRYSTAL)
    return NetworkGraph(
        crystal_variable_ids=crystal,
        injections=injections,
        analyser_inputs=[path_plus, path_minus],
        bob_signal=beam2,
    )
