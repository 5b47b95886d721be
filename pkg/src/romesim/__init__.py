"""Simulator of the Rome teleportation experiment built on stochastic
zeropoint field amplitudes propagated through linear optics."""

from .detection import (
    DetectionRecord,
    DetectorSpec,
    NetworkSampler,
    joint_probability_intensity,
    joint_probability_p12,
    mc_joint_probability,
    single_probability,
    vacuum_reference,
)
from .ledger import (
    BobStationAudit,
    IdleInjection,
    NetworkGraph,
    ZpfLedger,
    audit_bob_station,
    audit_network,
    max_distinguishable_classes,
)
from .optics import (
    DEFAULT_CARRIER_OMEGA,
    SPEED_OF_LIGHT,
    JonesMap,
    PbsOrientation,
    PbsPorts,
    PolarizedBeam,
    apply_jones,
    balanced_beamsplitter,
    mirror,
    pbs_combine,
    polarizing_beamsplitter,
    propagate,
    quarter_wave,
    retarder,
    rotator,
    vacuum_beam,
)
from .oracle import HilbertState, bell_decompose, born_joint_probability, detection_amplitudes, prepare
from .scenario import (
    DETECTORS,
    PORTS,
    AliceOutcome,
    CoherenceResult,
    Correction,
    PreparerSpec,
    Scenario,
    TimingSpec,
    alice_analyser,
    bob_station,
    build_full_rome,
    build_risco_variant,
    build_rome,
    build_source_only,
    coherence_ok,
    correction_for,
    elliptical_reference,
    joint_detection_records,
    linear_reference,
    verification_station,
    verify_elliptical,
    verify_linear,
)
from .source import CrystalParams, SourceOutput, emit_entangled_pair, momentum_entangle
from .stochastic import (
    BasisVariable,
    Ensemble,
    ModeKind,
    StochasticAmplitude,
    evaluate,
    fourth_moment,
    sample_ensemble,
    second_moment,
)

__version__ = "0.1.0"
