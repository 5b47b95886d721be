"""Acceptance suite: one test per release criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion lines.
"""

import math

import numpy as np
import pytest

from romesim.detection import (
    NetworkSampler,
    joint_probability_p12,
    single_probability,
)
from romesim.ledger import audit_bob_station, audit_network, max_distinguishable_classes
from romesim.optics import SPEED_OF_LIGHT, apply_jones
from romesim.oracle import born_joint_probability, prepare
from romesim.scenario import (
    DETECTORS,
    PORTS,
    PreparerSpec,
    TimingSpec,
    build_full_rome,
    build_risco_variant,
    coherence_ok,
    correction_for,
    elliptical_reference,
    ensure_verification_idle,
    joint_detection_records,
    linear_reference,
    verification_analyzer,
    verification_station,
)
from romesim.source import CrystalParams
from romesim.stochastic import (
    Ensemble,
    ModeKind,
    evaluate,
    fourth_moment,
    sample_ensemble,
    second_moment,
)

from _helpers import complex_mean_and_se, random_form, random_unitary, within_se

SWEEP = [7.5 * k for k in range(25)]  # 0..180 degrees


def _report(number: int, name: str, failures: list) -> None:
    status = "PASS" if not failures else "FAIL"
    print(f"[criterion {number}] {name}: {status}")
    assert not failures, f"criterion {number} ({name}): {failures[:5]}"


def test_criterion_1_linear_verification_curves():
    failures = []
    theta = 22.5
    analytic_scenario = build_full_rome(CrystalParams(), PreparerSpec.linear(theta))
    for theta_b in SWEEP:
        records = joint_detection_records(analytic_scenario, theta_b)
        reference = linear_reference(theta, theta_b)
        for pair, expected in reference.items():
            if abs(records[pair].normalized - expected) > 1e-12:
                failures.append(("analytic", theta_b, pair))

    mc_params = CrystalParams(coupling=0.3)
    mc_scenario = build_full_rome(mc_params, PreparerSpec.linear(theta))
    ensure_verification_idle(mc_scenario)
    sampler = NetworkSampler(mc_scenario.ensemble, seed=123, samples=200_000)
    for theta_b in SWEEP:
        records = joint_detection_records(mc_scenario, theta_b, engine="monte-carlo", sampler=sampler)
        reference = linear_reference(theta, theta_b)
        for pair, expected in reference.items():
            rec = records[pair]
            stderr = rec.stderr / mc_params.coincidence_scale
            if abs(rec.normalized - expected) > 3 * stderr:
                failures.append(("monte-carlo", theta_b, pair))
    _report(1, "linear verification curves", failures)


def test_criterion_2_elliptical_verification_curves():
    failures = []
    scenario = build_full_rome(CrystalParams(), PreparerSpec.elliptical(20.0))
    for theta_b in SWEEP:
        records = joint_detection_records(scenario, theta_b)
        reference = elliptical_reference(theta_b)
        for pair, expected in reference.items():
            if abs(records[pair].normalized - expected) > 1e-12:
                failures.append((theta_b, pair))
    _report(2, "elliptical verification curves", failures)


def test_criterion_3_correction_matrices():
    failures = []
    params = CrystalParams(coupling=0.7, pump_amplitude=0.5 + 0.2j)
    inv = 1.0 / math.sqrt(2.0)
    rng = np.random.default_rng(303)
    for trial in range(100):
        preparer = random_unitary(rng)
        scenario = build_full_rome(params, PreparerSpec.generic(preparer))
        ctx = scenario.ensemble
        pair_corr = params.pair_correlation
        for det in DETECTORS:
            correction = correction_for(det)
            restored = apply_jones(correction.jones, scenario.bob_signal)
            alice = scenario.detector_beams[det].h
            got_h = second_moment(alice, restored.h, ctx)
            got_v = second_moment(alice, restored.v, ctx)
            want_h = 1j * preparer.a * correction.constant * pair_corr * inv
            want_v = 1j * preparer.c * correction.constant * pair_corr * inv
            if abs(got_h - want_h) > 1e-12 or abs(got_v - want_v) > 1e-12:
                failures.append((trial, det))
    _report(3, "correction matrices restore the common pattern", failures)


def test_criterion_4_mode_set_ledger():
    failures = []
    scenario = build_full_rome(CrystalParams(), PreparerSpec.linear(22.5))
    ensure_verification_idle(scenario)
    ledger = audit_network(scenario)
    if ledger.as_tuple() != (8, 6, 2, 4):
        failures.append(("rome", ledger.as_tuple()))
    if max_distinguishable_classes(ledger) != 4:
        failures.append(("rome-max", max_distinguishable_classes(ledger)))

    risco = audit_network(build_risco_variant())
    if risco.as_tuple() != (4, 6, 2, 4):
        failures.append(("risco", risco.as_tuple()))
    if max_distinguishable_classes(risco) != 4:
        failures.append(("risco-max", max_distinguishable_classes(risco)))

    bob = audit_bob_station(scenario)
    if (bob.amplified_sets, bob.idle_channels) != (4, 1):
        failures.append(("bob", (bob.amplified_sets, bob.idle_channels)))
    if bob.distinguishable != 3 or bob.sufficient:
        failures.append(("bob-balance", bob.distinguishable))
    _report(4, "zeropoint mode-set ledger", failures)


def test_criterion_5_no_signaling():
    failures = []
    params = CrystalParams(coupling=0.7, pump_amplitude=0.5 + 0.2j)
    single_expected = params.coupling**2 * abs(params.pump_amplitude) ** 2 * params.mu0 / 4.0
    bob_expected = params.mean_intensity_excess
    rng = np.random.default_rng(505)
    for trial in range(100):
        scenario = build_full_rome(params, PreparerSpec.generic(random_unitary(rng)))
        for det in DETECTORS:
            got = single_probability(scenario.detector_beams[det]).probability
            if abs(got - single_expected) > 1e-12:
                failures.append((trial, det, got))
        from romesim.detection import intensity_excess_moment

        for pol in ("H", "V"):
            got = intensity_excess_moment(scenario.bob_signal, pol)
            if abs(got - bob_expected) > 1e-12:
                failures.append((trial, "bob", pol, got))
    _report(5, "no-signaling of singles", failures)


def _normalized_vector(values: dict) -> np.ndarray:
    vec = np.array([values[(det, port)] for det in DETECTORS for port in PORTS], dtype=float)
    return vec / vec.sum()


def test_criterion_6_oracle_equivalence():
    failures = []
    params = CrystalParams()
    rng = np.random.default_rng(606)
    for trial in range(50):
        preparer = random_unitary(rng)
        scenario = build_full_rome(params, PreparerSpec.generic(preparer))
        state = prepare(preparer.a, preparer.c)
        theta_b = float(rng.uniform(0.0, 180.0))
        use_plate = trial % 2 == 1
        plate_angles = {det: float(rng.uniform(0.0, 360.0)) if use_plate else None for det in DETECTORS}

        wigner = {}
        born = {}
        for det in DETECTORS:
            db, dbperp = verification_station(scenario, theta_b, plate_gamma_b_deg=plate_angles[det])
            analyzer = verification_analyzer(theta_b, plate_angles[det])
            for port, beam in (("DB", db), ("DBperp", dbperp)):
                wigner[(det, port)] = joint_probability_p12(
                    scenario.detector_beams[det], beam, reference_scale=params.coincidence_scale
                ).normalized
                born[(det, port)] = born_joint_probability(state, det, analyzer, port)
        mismatch = np.max(np.abs(_normalized_vector(wigner) - _normalized_vector(born)))
        if mismatch > 1e-10:
            failures.append((trial, mismatch))
    _report(6, "field-correlation vs state-vector probabilities", failures)


def test_criterion_7_moment_engine():
    failures = []
    ctx = Ensemble()
    variables = [ctx.new_variable(f"m{i}", ModeKind.IDLE) for i in range(4)]
    rng = np.random.default_rng(707)
    n = 1_000_000
    assignment = sample_ensemble(ctx, 7007, n)
    for trial in range(20):
        quad = [random_form(rng, variables) for _ in range(4)]
        exact = fourth_moment(*quad, ctx)
        products = np.ones(n, dtype=complex)
        for form in quad:
            products = products * evaluate(form, assignment)
        mean, se_re, se_im = complex_mean_and_se(products)
        if not within_se(mean, exact, se_re, se_im, 5.0):
            failures.append(("isserlis", trial))

    coupling = 1e-3
    scenario = build_full_rome(CrystalParams(coupling=coupling), PreparerSpec.linear(22.5))
    bound = 10.0 * coupling**2
    for theta_b in SWEEP:
        p12 = joint_detection_records(scenario, theta_b, engine="p12")
        intensity = joint_detection_records(scenario, theta_b, engine="intensity")
        for pair in p12:
            if abs(intensity[pair].normalized - p12[pair].normalized) > bound:
                failures.append(("intensity-scale", theta_b, pair))
            if p12[pair].normalized > 0.1:
                ratio = intensity[pair].probability / p12[pair].probability
                if abs(ratio - 1.0) > bound:
                    failures.append(("intensity-ratio", theta_b, pair))
    _report(7, "moment engine consistency", failures)


def test_criterion_8_coherence_condition():
    failures = []
    # dyadic correlation time keeps the equality case exactly representable
    tau = 2.0**-40
    cases = [
        (TimingSpec(0.0, 5.0, 5.0, tau), True, tau),
        (TimingSpec(2.0 * tau, 5.0, 5.0, tau), False, -tau),
        (TimingSpec(tau / 2.0, SPEED_OF_LIGHT * tau / 2.0, 0.0, tau), True, 0.0),
    ]
    for timing, expect_ok, expect_margin in cases:
        result = coherence_ok(timing)
        if result.ok is not expect_ok or abs(result.margin - expect_margin) > 1e-24:
            failures.append((timing, result))
    _report(8, "coherence condition", failures)


def test_criterion_9_closure():
    failures = []
    scenarios = (
        build_full_rome(CrystalParams(), PreparerSpec.linear(22.5)),
        build_full_rome(CrystalParams(), PreparerSpec.elliptical(20.0)),
    )
    for scenario in scenarios:
        for theta_b in SWEEP:
            records = joint_detection_records(scenario, theta_b)
            for det in DETECTORS:
                total = records[(det, "DB")].normalized + records[(det, "DBperp")].normalized
                if abs(total - 1.0) > 1e-12:
                    failures.append((scenario.preparer.kind, theta_b, det))
    _report(9, "DB/DBperp closure", failures)
