import math

import numpy as np
import pytest

from romesim.oracle import (
    HilbertState,
    bell_decompose,
    born_joint_probability,
    detection_amplitudes,
    prepare,
)
from romesim.scenario import DETECTORS, PORTS
from romesim.optics import rotator

from _helpers import random_unitary

INV = 1.0 / math.sqrt(2.0)


def _random_qubit(rng):
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    z /= np.linalg.norm(z)
    return z[0], z[1]


def test_prepare_identity_state():
    state = prepare(1.0, 0.0)
    assert state.amplitude(("a1", "H", "a2", "V")) == pytest.approx(1j * INV)
    assert state.amplitude(("b1", "H", "b2", "V")) == pytest.approx(1j * INV)
    assert state.amplitude(("a1", "V", "a2", "V")) == 0
    norm = sum(abs(a) ** 2 for a in state.amplitudes.values())
    assert norm == pytest.approx(1.0)


def test_prepare_linear_state():
    theta = math.radians(22.5)
    state = prepare(math.cos(theta), math.sin(theta))
    assert state.amplitude(("a1", "V", "a2", "V")) == pytest.approx(1j * INV * math.sin(theta))


def test_prepare_rejects_unnormalized():
    with pytest.raises(ValueError):
        prepare(1.0, 1.0)
    with pytest.raises(ValueError):
        HilbertState({("a1", "H", "a2", "V"): 0.5})


def test_bell_decompose_identity_preparation():
    branches = bell_decompose(prepare(1.0, 0.0))
    # with no vertical component only the b2 halves of the c branches survive
    assert branches["c+"] == {("b2", "V"): pytest.approx(0.5j)}
    assert branches["c-"] == {("b2", "V"): pytest.approx(-0.5j)}
    assert branches["d+"] == {("a2", "V"): pytest.approx(0.5j)}
    assert branches["d-"] == {("a2", "V"): pytest.approx(0.5j)}


def test_bell_branches_have_quarter_weight():
    rng = np.random.default_rng(2)
    for _ in range(5):
        alpha, beta = _random_qubit(rng)
        branches = bell_decompose(prepare(alpha, beta))
        for branch in branches.values():
            weight = sum(abs(a) ** 2 for a in branch.values())
            assert weight == pytest.approx(0.25, abs=1e-12)


def test_bell_decompose_reconstructs_state():
    from romesim.oracle import _BELL_BASIS

    rng = np.random.default_rng(3)
    alpha, beta = _random_qubit(rng)
    state = prepare(alpha, beta)
    branches = bell_decompose(state)
    rebuilt = {}
    for name, branch in branches.items():
        for (path1, pol1), basis_coeff in _BELL_BASIS[name].items():
            for (path2, pol2), amp in branch.items():
                key = (path1, pol1, path2, pol2)
                rebuilt[key] = rebuilt.get(key, 0j) + basis_coeff * amp
    for key, amp in state.amplitudes.items():
        assert rebuilt.get(key, 0j) == pytest.approx(amp, abs=1e-12)


def test_bell_decompose_rejects_states_outside_model():
    bad = HilbertState({("a1", "H", "a2", "H"): 1.0})
    with pytest.raises(ValueError, match="model subspace"):
        bell_decompose(bad)
    crossed = HilbertState({("a1", "H", "b2", "V"): 1.0})
    with pytest.raises(ValueError, match="model subspace"):
        detection_amplitudes(crossed)


def test_detection_amplitudes_table():
    rng = np.random.default_rng(4)
    alpha, beta = _random_qubit(rng)
    kets = detection_amplitudes(prepare(alpha, beta))
    assert kets["DT-"]["H"] == pytest.approx(1j * alpha)
    assert kets["DT-"]["V"] == pytest.approx(1j * beta)
    assert kets["DT+"]["H"] == pytest.approx(-alpha)
    assert kets["DT+"]["V"] == pytest.approx(beta)
    assert kets["DR-"]["H"] == pytest.approx(beta)
    assert kets["DR-"]["V"] == pytest.approx(alpha)
    assert kets["DR+"]["H"] == pytest.approx(-1j * beta)
    assert kets["DR+"]["V"] == pytest.approx(1j * alpha)
    for ket in kets.values():
        assert abs(ket["H"]) ** 2 + abs(ket["V"]) ** 2 == pytest.approx(1.0)


def test_conditional_kets_not_orthogonal_in_general():
    rng = np.random.default_rng(5)
    alpha, beta = _random_qubit(rng)
    kets = detection_amplitudes(prepare(alpha, beta))
    overlaps = []
    names = list(kets)
    for i, first in enumerate(names):
        for second in names[i + 1 :]:
            overlap = (
                kets[first]["H"].conjugate() * kets[second]["H"]
                + kets[first]["V"].conjugate() * kets[second]["V"]
            )
            overlaps.append(abs(overlap))
    assert max(overlaps) > 1e-3


def test_born_probabilities_linear_sweep():
    theta = math.radians(22.5)
    state = prepare(math.cos(theta), math.sin(theta))
    for theta_b_deg in (0.0, 10.0, 22.5, 45.0, 90.0):
        analyzer = rotator(math.radians(theta_b_deg))
        tb = math.radians(theta_b_deg)
        assert born_joint_probability(state, "DT+", analyzer, "DB") == pytest.approx(
            math.cos(theta - tb) ** 2 / 4.0, abs=1e-12
        )
        assert born_joint_probability(state, "DT-", analyzer, "DB") == pytest.approx(
            math.cos(theta + tb) ** 2 / 4.0, abs=1e-12
        )
        assert born_joint_probability(state, "DR+", analyzer, "DB") == pytest.approx(
            math.sin(theta + tb) ** 2 / 4.0, abs=1e-12
        )


def test_born_probabilities_total_to_one():
    rng = np.random.default_rng(6)
    alpha, beta = _random_qubit(rng)
    state = prepare(alpha, beta)
    analyzer = random_unitary(rng)
    total = sum(
        born_joint_probability(state, det, analyzer, port) for det in DETECTORS for port in PORTS
    )
    assert total == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError, match="port"):
        born_joint_probability(state, "DT+", analyzer, "DX")


def test_off_diagonal_preparer_entries_never_enter_probabilities():
    # preparers sharing the first column differ only by the free phase of the
    # second column; all eight joint probabilities must coincide
    from romesim.optics import JonesMap
    from romesim.scenario import PreparerSpec, build_full_rome, joint_detection_records
    from romesim.source import CrystalParams

    rng = np.random.default_rng(7)
    alpha, beta = _random_qubit(rng)
    second = np.array([-np.conj(beta), np.conj(alpha)])
    results = []
    for chi in (0.0, 0.9, 2.2):
        b, d = np.exp(1j * chi) * second
        prep = PreparerSpec.generic(JonesMap(alpha, b, beta, d))
        scenario = build_full_rome(CrystalParams(), prep)
        records = joint_detection_records(scenario, 31.0)
        results.append([records[(det, port)].normalized for det in DETECTORS for port in PORTS])
    for other in results[1:]:
        assert np.allclose(other, results[0], atol=1e-12)
