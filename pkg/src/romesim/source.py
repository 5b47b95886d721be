"""Down-conversion source: entangled beam pair and momentum conversion.

The crystal is modelled as an effective first-order two-mode squeezer: each
emitted component is ``c1 * a + c2 * conj(a')`` over two crystal mode sets,
with ``c1 = nu0 / sqrt(mu0)`` and ``c2 = g * V * sqrt(mu0)``.  This is the
minimal linear form that reproduces, for arbitrary ``nu0`` and ``mu0``, both
the pair cross-correlation ``g*V*nu0`` and the vacuum-subtracted intensity
``g^2*|V|^2*mu0/2`` per component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .ledger import IdleInjection
from .optics import (
    DEFAULT_CARRIER_OMEGA,
    PbsOrientation,
    PolarizedBeam,
    polarizing_beamsplitter,
)
from .stochastic import Ensemble, ModeKind, StochasticAmplitude


@dataclass(frozen=True)
class CrystalParams:
    """Source parameters: coupling, pump, and zero-delay coherence kernels."""

    coupling: float = 1.0
    pump_amplitude: complex = 1.0 + 0j
    nu0: complex = 1.0 + 0j
    mu0: float = 1.0
    correlation_time: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "pump_amplitude", complex(self.pump_amplitude))
        object.__setattr__(self, "nu0", complex(self.nu0))
        if self.coupling <= 0:
            raise ValueError("coupling must be > 0")
        if self.mu0 <= 0:
            raise ValueError("mu0 must be > 0")
        if self.correlation_time < 0:
            raise ValueError("correlation time must be >= 0")

    @property
    def pair_correlation(self) -> complex:
        """Cross-correlation of the two matched signal components."""
        return self.coupling * self.pump_amplitude * self.nu0

    @property
    def mean_intensity_excess(self) -> float:
        """Vacuum-subtracted mean intensity per signal polarization component."""
        return self.coupling**2 * abs(self.pump_amplitude) ** 2 * self.mu0 / 2.0

    @property
    def coincidence_scale(self) -> float:
        """Common prefactor of all joint detection probabilities."""
        return self.coupling**2 * abs(self.pump_amplitude) ** 2 * abs(self.nu0) ** 2 / 2.0

    def cross_kernel(self, delay: float) -> complex:
        """Gaussian cross-correlation kernel at a time delay (demo use only)."""
        return self.nu0 * math.exp(-(delay**2) / (2.0 * self.correlation_time**2))


@dataclass(frozen=True)
class SourceOutput:
    """The four momentum-entangled beams plus the source's ledger entries.

    ``a1``/``b1`` (horizontal) head to the Preparer and Alice; ``a2``/``b2``
    (vertical) head to Bob.
    """

    a1: PolarizedBeam
    b1: PolarizedBeam
    a2: PolarizedBeam
    b2: PolarizedBeam
    injections: tuple[IdleInjection, ...]


def emit_entangled_pair(
    params: CrystalParams,
    ensemble: Ensemble | None = None,
    *,
    omega: float = DEFAULT_CARRIER_OMEGA,
) -> tuple[PolarizedBeam, PolarizedBeam]:
    """Emit the polarization-entangled beam pair from four crystal mode sets.

    Beam "1" couples (k1,H)<->(k2,V)* on H and (k1,V)<->(k2,H)* on V; beam "2"
    is the mirror image, so only opposite-polarization components across the
    two beams are correlated.
    """
    ensemble = ensemble if ensemble is not None else Ensemble()
    k1_h, k1_v = ensemble.new_pair("k1", ModeKind.CRYSTAL)
    k2_h, k2_v = ensemble.new_pair("k2", ModeKind.CRYSTAL)

    c1 = params.nu0 / math.sqrt(params.mu0)
    c2 = params.coupling * params.pump_amplitude * math.sqrt(params.mu0)

    def squeezed(vacuum, partner) -> StochasticAmplitude:
        return StochasticAmplitude.of(vacuum, c1) + StochasticAmplitude.of(partner, c2, conjugated=True)

    beam1 = PolarizedBeam(
        ensemble=ensemble,
        h=squeezed(k1_h, k2_v),
        v=squeezed(k1_v, k2_h),
        path="1",
        omega=omega,
    )
    beam2 = PolarizedBeam(
        ensemble=ensemble,
        h=squeezed(k2_h, k1_v),
        v=squeezed(k2_v, k1_h),
        path="2",
        omega=omega,
    )
    return beam1, beam2


def momentum_entangle(
    beam1: PolarizedBeam,
    beam2: PolarizedBeam,
    idle1: PolarizedBeam,
    idle2: PolarizedBeam,
) -> SourceOutput:
    """Convert polarization entanglement to momentum entanglement.

    Each beam meets a vertical-transmitting polarizing beam-splitter with a
    fresh vacuum idle: the reflected ports (well-defined horizontal) form the
    ``a1``/``b1`` pair for Alice, the transmitted ports (well-defined
    vertical) form the ``b2``/``a2`` pair for Bob.
    """
    ports1 = polarizing_beamsplitter(beam1, idle1, PbsOrientation.TRANSMIT_V)
    ports2 = polarizing_beamsplitter(beam2, idle2, PbsOrientation.TRANSMIT_V)
    injections = (
        IdleInjection("PBS1", "source", tuple(sorted(idle1.h.variable_ids() | idle1.v.variable_ids()))),
        IdleInjection("PBS2", "source", tuple(sorted(idle2.h.variable_ids() | idle2.v.variable_ids()))),
    )
    return SourceOutput(
        a1=ports1.reflected.with_path("a1"),
        b2=ports1.transmitted.with_path("b2"),
        b1=ports2.reflected.with_path("b1"),
        a2=ports2.transmitted.with_path("a2"),
        injections=injections,
    )
