"""Single and joint detection probabilities, analytic and Monte-Carlo.

Detectors subtract the zeropoint intensity level.  The vacuum reference of a
beam component is the same linear form with its amplified (pump-carrying)
terms deleted; in this network those are exactly the conjugated crystal
terms, because every element downstream of the source is a non-conjugating
linear map.

Two joint-probability routes are provided and cross-checked:

* the pair-correlation route, proportional to ``sum |<F_a F_b>|^2``;
* the intensity route ``<(I_a - J_a)(I_b - J_b)>`` with ``J`` the intensity
  of a statistically independent vacuum reference.  Subtracting the vacuum of
  the *same* realization instead would halve the leading term, so both the
  analytic form and the sampling estimator use an independent reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .optics import PolarizedBeam
from .stochastic import (
    Ensemble,
    ModeKind,
    StochasticAmplitude,
    evaluate,
    fourth_moment,
    sample_stream,
    second_moment,
)

NEGATIVE_CLIP = 1e-12

COMPONENTS = ("H", "V")

MIN_MC_SAMPLES = 1000


@dataclass(frozen=True)
class DetectorSpec:
    """Detector name, effective efficiency, and optional polarization filter."""

    name: str
    efficiency: float = 1.0
    selected_polarization: str | None = None

    def __post_init__(self):
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError("detector efficiency must be in (0, 1]")
        if self.selected_polarization not in (None, "H", "V"):
            raise ValueError("selected polarization must be 'H', 'V' or None")


@dataclass(frozen=True)
class DetectionRecord:
    """Unnormalized probability plus its value on the scenario's reference scale.

    ``stderr`` (same units as ``probability``) is set only by the sampling
    estimator, whose mean may legitimately fluctuate below zero and is
    therefore not clipped.
    """

    probability: float
    normalized: float
    stderr: float | None = None


def _clipped(value: float) -> float:
    if value < -NEGATIVE_CLIP:
        raise ValueError(f"negative probability beyond round-off: {value}")
    return max(value, 0.0)


def analytic_record(probability: float, reference_scale: float) -> DetectionRecord:
    p = _clipped(probability)
    return DetectionRecord(probability=p, normalized=p / reference_scale)


def vacuum_reference(form: StochasticAmplitude, ensemble: Ensemble) -> StochasticAmplitude:
    """The form with its amplified signal terms removed."""
    kept = {
        key: coeff
        for key, coeff in form.terms.items()
        if not (key[1] and ensemble.kind_of(key[0]) is ModeKind.CRYSTAL)
    }
    return StochasticAmplitude(kept)


def _selected_components(beam: PolarizedBeam, selection: str | None) -> list[StochasticAmplitude]:
    if selection is None:
        return [beam.h, beam.v]
    return [beam.components()[selection]]


def intensity_excess_moment(beam: PolarizedBeam, selection: str | None = None) -> float:
    """Mean intensity above the zeropoint level, summed over components."""
    ctx = beam.ensemble
    total = 0.0
    for form in _selected_components(beam, selection):
        ref = vacuum_reference(form, ctx)
        total += (second_moment(form, form.conjugate(), ctx) - second_moment(ref, ref.conjugate(), ctx)).real
    return total


def single_probability(
    beam: PolarizedBeam,
    detector: DetectorSpec | None = None,
    *,
    reference_scale: float = 1.0,
) -> DetectionRecord:
    """Single detection probability: efficiency times the intensity excess."""
    efficiency = detector.efficiency if detector else 1.0
    selection = detector.selected_polarization if detector else None
    return analytic_record(efficiency * intensity_excess_moment(beam, selection), reference_scale)


def joint_probability_p12(
    beam_a: PolarizedBeam,
    beam_b: PolarizedBeam,
    *,
    component_a: str | None = None,
    component_b: str | None = None,
    detector_a: DetectorSpec | None = None,
    detector_b: DetectorSpec | None = None,
    reference_scale: float = 1.0,
) -> DetectionRecord:
    """Joint detection probability from squared pair correlations."""
    if beam_a.ensemble is not beam_b.ensemble:
        raise ValueError("beams belong to different ensembles")
    ctx = beam_a.ensemble
    if component_a is None and detector_a is not None:
        component_a = detector_a.selected_polarization
    if component_b is None and detector_b is not None:
        component_b = detector_b.selected_polarization
    total = 0.0
    for fa in _selected_components(beam_a, component_a):
        for fb in _selected_components(beam_b, component_b):
            total += abs(second_moment(fa, fb, ctx)) ** 2
    k = (detector_a.efficiency if detector_a else 1.0) * (detector_b.efficiency if detector_b else 1.0)
    return analytic_record(k * total, reference_scale)


def joint_probability_intensity(
    beam_a: PolarizedBeam,
    beam_b: PolarizedBeam,
    *,
    detector_a: DetectorSpec | None = None,
    detector_b: DetectorSpec | None = None,
    reference_scale: float = 1.0,
) -> DetectionRecord:
    """Joint detection probability from the correlated intensity excess.

    Expands ``<(I_a - J_a)(I_b - J_b)>`` over component pairs with Gaussian
    fourth moments; agrees with the pair-correlation route at leading order
    in the coupling.
    """
    if beam_a.ensemble is not beam_b.ensemble:
        raise ValueError("beams belong to different ensembles")
    ctx = beam_a.ensemble
    total = 0.0
    for fa in _selected_components(beam_a, None):
        ref_a = vacuum_reference(fa, ctx)
        mean_a = second_moment(fa, fa.conjugate(), ctx).real
        vac_a = second_moment(ref_a, ref_a.conjugate(), ctx).real
        for fb in _selected_components(beam_b, None):
            ref_b = vacuum_reference(fb, ctx)
            mean_b = second_moment(fb, fb.conjugate(), ctx).real
            vac_b = second_moment(ref_b, ref_b.conjugate(), ctx).real
            joint = fourth_moment(fa, fa.conjugate(), fb, fb.conjugate(), ctx).real
            total += joint - mean_a * vac_b - vac_a * mean_b + vac_a * vac_b
    k = (detector_a.efficiency if detector_a else 1.0) * (detector_b.efficiency if detector_b else 1.0)
    return analytic_record(k * total, reference_scale)


class NetworkSampler:
    """Shared seeded sampling of a whole network.

    Draws one joint realization stream for the live network and an
    independent stream for the vacuum reference, so that many beam pairs
    (a sweep, for instance) can be estimated from one draw.
    """

    def __init__(self, ensemble: Ensemble, seed: int, samples: int):
        if samples < MIN_MC_SAMPLES:
            raise ValueError(f"sample count must be >= {MIN_MC_SAMPLES}")
        root = np.random.SeedSequence(seed)
        live_seq, vacuum_seq = root.spawn(2)
        self.ensemble = ensemble
        self.samples = samples
        self.assignment = sample_stream(ensemble, np.random.default_rng(live_seq), samples)
        self.vacuum_assignment = sample_stream(ensemble, np.random.default_rng(vacuum_seq), samples)
        # The beam is kept in the entry so its id cannot be recycled.
        self._excess_cache: dict[int, tuple[PolarizedBeam, np.ndarray]] = {}

    def _component_intensity(self, form: StochasticAmplitude, assignment) -> np.ndarray:
        if form.is_zero:
            return np.zeros(self.samples)
        values = evaluate(form, assignment)
        return (values * values.conj()).real

    def intensity_excess(self, beam: PolarizedBeam) -> np.ndarray:
        """Per-sample intensity minus the independent vacuum reference intensity."""
        cached = self._excess_cache.get(id(beam))
        if cached is not None and cached[0] is beam:
            return cached[1]
        live = np.zeros(self.samples)
        vacuum = np.zeros(self.samples)
        for form in (beam.h, beam.v):
            live += self._component_intensity(form, self.assignment)
            vacuum += self._component_intensity(vacuum_reference(form, self.ensemble), self.vacuum_assignment)
        excess = live - vacuum
        self._excess_cache[id(beam)] = (beam, excess)
        return excess

    def joint(
        self,
        beam_a: PolarizedBeam,
        beam_b: PolarizedBeam,
        *,
        detector_a: DetectorSpec | None = None,
        detector_b: DetectorSpec | None = None,
        reference_scale: float = 1.0,
    ) -> DetectionRecord:
        k = (detector_a.efficiency if detector_a else 1.0) * (detector_b.efficiency if detector_b else 1.0)
        products = k * self.intensity_excess(beam_a) * self.intensity_excess(beam_b)
        mean = float(products.mean())
        stderr = float(products.std(ddof=1) / math.sqrt(self.samples))
        return DetectionRecord(probability=mean, normalized=mean / reference_scale, stderr=stderr)


def mc_joint_probability(
    beam_a: PolarizedBeam,
    beam_b: PolarizedBeam,
    seed: int,
    samples: int,
    *,
    detector_a: DetectorSpec | None = None,
    detector_b: DetectorSpec | None = None,
    reference_scale: float = 1.0,
) -> DetectionRecord:
    """Sampling estimate of the intensity-route joint probability.

    Deterministic per (seed, samples); reports the standard error of the
    sample mean.
    """
    if beam_a.ensemble is not beam_b.ensemble:
        raise ValueError("beams belong to different ensembles")
    sampler = NetworkSampler(beam_a.ensemble, seed, samples)
    return sampler.joint(
        beam_a,
        beam_b,
        detector_a=detector_a,
        detector_b=detector_b,
        reference_scale=reference_scale,
    )
