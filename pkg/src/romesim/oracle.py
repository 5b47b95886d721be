"""State-vector oracle over {path x polarization} for the two photons.

Independent cross-check of the field-correlation machinery: the same
experiment expressed as a 16-dimensional ket, a Bell decomposition of
photon 1, and Born-rule joint probabilities at the verification station.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

from .optics import JonesMap

PATHS_1 = ("a1", "b1")
PATHS_2 = ("a2", "b2")
POLARIZATIONS = ("H", "V")

NORM_TOL = 1e-12

BasisKey = tuple[str, str, str, str]  # (path1, pol1, path2, pol2)

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

# Entangled basis of photon 1 over (path1, pol1).
_BELL_BASIS: dict[str, dict[tuple[str, str], float]] = {
    "c+": {("a1", "V"): _INV_SQRT2, ("b1", "H"): _INV_SQRT2},
    "c-": {("a1", "V"): _INV_SQRT2, ("b1", "H"): -_INV_SQRT2},
    "d+": {("a1", "H"): _INV_SQRT2, ("b1", "V"): _INV_SQRT2},
    "d-": {("a1", "H"): _INV_SQRT2, ("b1", "V"): -_INV_SQRT2},
}

# Conditional photon-2 polarization ket and global phase per Alice detector.
_DETECTION_TABLE: dict[str, tuple[complex, tuple[complex, complex]]] = {
    "DT-": (1j, (1.0, 1.0)),    # alpha*H + beta*V
    "DT+": (-1.0, (1.0, -1.0)),  # alpha*H - beta*V
    "DR-": (1.0, (1.0, 1.0)),   # beta*H + alpha*V
    "DR+": (-1j, (1.0, -1.0)),  # beta*H - alpha*V
}


@dataclass(frozen=True)
class HilbertState:
    """Normalized two-photon ket over (path1, pol1, path2, pol2)."""

    amplitudes: Mapping[BasisKey, complex]

    def __post_init__(self):
        cleaned = {}
        for key, amp in self.amplitudes.items():
            path1, pol1, path2, pol2 = key
            if path1 not in PATHS_1 or path2 not in PATHS_2 or pol1 not in POLARIZATIONS or pol2 not in POLARIZATIONS:
                raise ValueError(f"unknown basis label: {key}")
            if amp != 0:
                cleaned[key] = complex(amp)
        norm = math.sqrt(sum(abs(a) ** 2 for a in cleaned.values()))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: |psi| = {norm}")
        object.__setattr__(self, "amplitudes", MappingProxyType(cleaned))

    def amplitude(self, key: BasisKey) -> complex:
        return self.amplitudes.get(key, 0j)


def prepare(alpha: complex, beta: complex) -> HilbertState:
    """Momentum-entangled pair with photon 1 prepared in ``alpha*H + beta*V``.

    The ket is ``(i/sqrt(2)) (|a1 a2> + |b1 b2>) (alpha|H> + beta|V>)_1 |V>_2``.
    """
    alpha, beta = complex(alpha), complex(beta)
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > NORM_TOL:
        raise ValueError("preparation amplitudes must satisfy |alpha|^2 + |beta|^2 = 1")
    weight = 1j * _INV_SQRT2
    amplitudes = {}
    for path1, path2 in (("a1", "a2"), ("b1", "b2")):
        amplitudes[(path1, "H", path2, "V")] = weight * alpha
        amplitudes[(path1, "V", path2, "V")] = weight * beta
    return HilbertState(amplitudes)


def _require_model_subspace(state: HilbertState) -> None:
    leak = sum(abs(a) ** 2 for key, a in state.amplitudes.items() if key[3] == "H")
    if leak > NORM_TOL:
        raise ValueError("state outside the model subspace: photon 2 must be vertical")


def bell_decompose(state: HilbertState) -> dict[str, dict[tuple[str, str], complex]]:
    """Branch amplitudes of the four entangled photon-1 basis states.

    Each branch is a (path2, pol2) ket; summing ``basis x branch`` over the
    four keys reconstructs the state exactly.
    """
    _require_model_subspace(state)
    branches: dict[str, dict[tuple[str, str], complex]] = {}
    for name, basis in _BELL_BASIS.items():
        branch: dict[tuple[str, str], complex] = {}
        for path2 in PATHS_2:
            for pol2 in POLARIZATIONS:
                amp = sum(
                    coeff * state.amplitude((path1, pol1, path2, pol2))
                    for (path1, pol1), coeff in basis.items()
                )
                if amp != 0:
                    branch[(path2, pol2)] = amp
        branches[name] = branch
    return branches


def _preparation_amplitudes(state: HilbertState) -> tuple[complex, complex]:
    weight = 1j * _INV_SQRT2
    alpha = state.amplitude(("a1", "H", "a2", "V")) / weight
    beta = state.amplitude(("a1", "V", "a2", "V")) / weight
    for path1, path2 in (("a1", "a2"), ("b1", "b2")):
        if abs(state.amplitude((path1, "H", path2, "V")) - weight * alpha) > NORM_TOL:
            raise ValueError("state outside the model subspace: momentum branches differ")
        if abs(state.amplitude((path1, "V", path2, "V")) - weight * beta) > NORM_TOL:
            raise ValueError("state outside the model subspace: momentum branches differ")
    cross = sum(
        abs(a) ** 2
        for key, a in state.amplitudes.items()
        if (key[0], key[2]) in (("a1", "b2"), ("b1", "a2"))
    )
    if cross > NORM_TOL:
        raise ValueError("state outside the model subspace: crossed momentum terms")
    _require_model_subspace(state)
    return alpha, beta


def detection_amplitudes(state: HilbertState) -> dict[str, dict[str, complex]]:
    """Unit-norm conditional photon-2 kets, with global phases, per detector."""
    alpha, beta = _preparation_amplitudes(state)
    kets: dict[str, dict[str, complex]] = {}
    for detector, (phase, (sign_h, sign_v)) in _DETECTION_TABLE.items():
        first, second = (alpha, beta) if detector.startswith("DT") else (beta, alpha)
        kets[detector] = {"H": phase * sign_h * first, "V": phase * sign_v * second}
    return kets


def born_joint_probability(
    state: HilbertState,
    detector: str,
    bob_analyzer: JonesMap,
    bob_port: str,
) -> float:
    """Born probability of (Alice detector, Bob port) with branch weight 1/4."""
    ket = detection_amplitudes(state)[detector]
    if bob_port == "DB":
        amp = bob_analyzer.a * ket["H"] + bob_analyzer.b * ket["V"]
    elif bob_port == "DBperp":
        amp = bob_analyzer.c * ket["H"] + bob_analyzer.d * ket["V"]
    else:
        raise ValueError(f"unknown verification port: {bob_port!r}")
    return abs(amp) ** 2 / 4.0
