"""Polarized beams and lossless linear optical elements.

Conventions, chosen once and used everywhere:

* reflection at a polarizing or balanced beam-splitter multiplies the
  reflected amplitude by ``i``;
* mirrors multiply both components by a configurable unimodular phase,
  ``i`` by default;
* a rotator of angle ``theta`` acts as ``[[cos, -sin], [sin, cos]]`` on the
  (H, V) column.

All elements are pure functions over immutable beams and preserve the total
second moment of the fields they touch.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .stochastic import Ensemble, ModeKind, StochasticAmplitude

SPEED_OF_LIGHT = 299_792_458.0

# Degenerate near-infrared down-conversion carrier (702 nm).
DEFAULT_CARRIER_OMEGA = 2.0 * math.pi * SPEED_OF_LIGHT / 702e-9

UNITARITY_TOL = 1e-12

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class JonesMap:
    """2x2 complex map acting on the (H, V) polarization components."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def __matmul__(self, other: JonesMap) -> JonesMap:
        return JonesMap(
            a=self.a * other.a + self.b * other.c,
            b=self.a * other.b + self.b * other.d,
            c=self.c * other.a + self.d * other.c,
            d=self.c * other.b + self.d * other.d,
        )

    def conjugate(self) -> JonesMap:
        """Entrywise conjugate; for a retarder this flips the retardance sign."""
        return JonesMap(self.a.conjugate(), self.b.conjugate(), self.c.conjugate(), self.d.conjugate())

    def unitarity_residual(self) -> float:
        row1 = abs(abs(self.a) ** 2 + abs(self.b) ** 2 - 1.0)
        row2 = abs(abs(self.c) ** 2 + abs(self.d) ** 2 - 1.0)
        cross = abs(self.a * self.c.conjugate() + self.b * self.d.conjugate())
        return max(row1, row2, cross)

    def is_unitary(self, tol: float = UNITARITY_TOL) -> bool:
        return self.unitarity_residual() <= tol


IDENTITY_MAP = JonesMap(1.0, 0.0, 0.0, 1.0)


def rotator(theta: float) -> JonesMap:
    """Polarization rotator of angle ``theta`` (radians) from horizontal."""
    c, s = math.cos(theta), math.sin(theta)
    return JonesMap(c, -s, s, c)


def retarder(phi: float) -> JonesMap:
    """Wave retarder: phase ``phi`` between the vertical and horizontal components."""
    return JonesMap(1.0, 0.0, 0.0, cmath.exp(1j * phi))


def quarter_wave(gamma: float) -> JonesMap:
    """Quarter-wave plate oriented at ``gamma`` (radians) from horizontal."""
    c, s = math.cos(gamma), math.sin(gamma)
    return JonesMap(
        a=c * c + 1j * s * s,
        b=(1.0 - 1j) * s * c,
        c=(1.0 - 1j) * s * c,
        d=s * s + 1j * c * c,
    )


@dataclass(frozen=True)
class PolarizedBeam:
    """Pair of H/V field amplitudes travelling along one labelled path."""

    ensemble: Ensemble
    h: StochasticAmplitude
    v: StochasticAmplitude
    path: str
    path_length: float = 0.0
    omega: float = DEFAULT_CARRIER_OMEGA

    def __post_init__(self):
        if not self.path:
            raise ValueError("beam path label must be nonempty")
        for var_id in self.h.variable_ids() | self.v.variable_ids():
            if var_id not in self.ensemble:
                raise ValueError(f"beam component uses foreign basis variable: id {var_id}")

    def with_path(self, path: str) -> PolarizedBeam:
        return replace(self, path=path)

    def components(self) -> dict[str, StochasticAmplitude]:
        return {"H": self.h, "V": self.v}

    def scaled(self, factor: complex) -> PolarizedBeam:
        return replace(self, h=self.h * factor, v=self.v * factor)


def vacuum_beam(
    ensemble: Ensemble,
    name: str,
    *,
    path: str | None = None,
    omega: float = DEFAULT_CARRIER_OMEGA,
) -> PolarizedBeam:
    """Fresh pure-vacuum beam backed by two new idle mode sets."""
    var_h, var_v = ensemble.new_pair(name, ModeKind.IDLE)
    return PolarizedBeam(
        ensemble=ensemble,
        h=StochasticAmplitude.of(var_h),
        v=StochasticAmplitude.of(var_v),
        path=path or name,
        omega=omega,
    )


def apply_jones(jones: JonesMap, beam: PolarizedBeam, *, enforce_unitarity: bool = True) -> PolarizedBeam:
    """Act with a polarization map on a beam; path metadata is preserved."""
    if enforce_unitarity and not jones.is_unitary():
        raise ValueError(f"unitarity violation: residual {jones.unitarity_residual():.3e}")
    return replace(
        beam,
        h=jones.a * beam.h + jones.b * beam.v,
        v=jones.c * beam.h + jones.d * beam.v,
    )


class PbsOrientation(Enum):
    TRANSMIT_V = "transmit-V"
    TRANSMIT_H = "transmit-H"


@dataclass(frozen=True)
class PbsPorts:
    transmitted: PolarizedBeam
    reflected: PolarizedBeam


def _require_same_ensemble(b1: PolarizedBeam, b2: PolarizedBeam) -> None:
    if b1.ensemble is not b2.ensemble:
        raise ValueError("beams belong to different ensembles")


def pbs_combine(in1: PolarizedBeam, in2: PolarizedBeam, orientation: PbsOrientation) -> PbsPorts:
    """Polarizing beam-splitter with both input ports driven.

    The ``transmitted`` port continues the direction of ``in1`` and carries
    its transmitted component plus the reflected component of ``in2``; the
    ``reflected`` port is the converse.  Reflected amplitudes pick up ``i``.
    """
    _require_same_ensemble(in1, in2)
    if orientation is PbsOrientation.TRANSMIT_V:
        transmitted = replace(in1, h=1j * in2.h, v=in1.v)
        reflected = replace(in2, h=1j * in1.h, v=in2.v)
    elif orientation is PbsOrientation.TRANSMIT_H:
        transmitted = replace(in1, h=in1.h, v=1j * in2.v)
        reflected = replace(in2, h=in2.h, v=1j * in1.v)
    else:
        raise ValueError(f"unknown PBS orientation: {orientation!r}")
    return PbsPorts(transmitted=transmitted, reflected=reflected)


def _is_vacuum_form(form: StochasticAmplitude, ensemble: Ensemble) -> bool:
    if form.is_zero:
        return False
    for (var_id, conj), coeff in form.terms.items():
        if conj or ensemble.kind_of(var_id) is not ModeKind.IDLE:
            return False
        if abs(abs(coeff) - 1.0) > UNITARITY_TOL:
            return False
    return True


def polarizing_beamsplitter(beam: PolarizedBeam, idle: PolarizedBeam, orientation: PbsOrientation) -> PbsPorts:
    """Polarizing beam-splitter with a pure-vacuum idle port.

    ``idle`` must consist of unconjugated idle mode sets with unimodular
    coefficients; anything else is rejected so accidental reuse of signal
    beams as noise inputs is caught early.
    """
    _require_same_ensemble(beam, idle)
    if not (_is_vacuum_form(idle.h, idle.ensemble) and _is_vacuum_form(idle.v, idle.ensemble)):
        raise ValueError("idle beam is not vacuum-pure")
    return pbs_combine(beam, idle, orientation)


def balanced_beamsplitter(b1: PolarizedBeam, b2: PolarizedBeam) -> tuple[PolarizedBeam, PolarizedBeam]:
    """Balanced non-polarizing beam-splitter.

    Returns ``(plus, minus)`` with ``plus = (i*b1 + b2)/sqrt(2)`` and
    ``minus = (b1 + i*b2)/sqrt(2)`` componentwise.
    """
    _require_same_ensemble(b1, b2)
    plus = replace(b1, h=_INV_SQRT2 * (1j * b1.h + b2.h), v=_INV_SQRT2 * (1j * b1.v + b2.v))
    minus = replace(b2, h=_INV_SQRT2 * (b1.h + 1j * b2.h), v=_INV_SQRT2 * (b1.v + 1j * b2.v))
    return plus, minus


def propagate(beam: PolarizedBeam, distance: float) -> PolarizedBeam:
    """Free propagation over ``distance`` metres: unimodular carrier phase."""
    if distance < 0:
        raise ValueError("propagation distance must be >= 0")
    phase = cmath.exp(1j * beam.omega * distance / SPEED_OF_LIGHT)
    return replace(
        beam,
        h=phase * beam.h,
        v=phase * beam.v,
        path_length=beam.path_length + distance,
    )


def mirror(beam: PolarizedBeam, phase: complex = 1j) -> PolarizedBeam:
    """Lossless mirror: both components multiplied by a unimodular phase."""
    if abs(abs(phase) - 1.0) > UNITARITY_TOL:
        raise ValueError("mirror phase must be unimodular")
    return beam.scaled(phase)
