"""Gaussian zeropoint basis, linear-form algebra, exact moments, sampling.

Every field amplitude in the simulator is a finite complex-linear form over
zeropoint basis variables and their conjugates.  Each basis variable stands
for one set of vacuum modes and is a circularly symmetric complex Gaussian
with pair variance ``<a a*> = 1/2``, so every moment reduces to bookkeeping
over matched variable/conjugate pairs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

# Pair variance of every zeropoint mode set; fixed by the vacuum distribution.
PAIR_VARIANCE = 0.5

# Coefficients below this magnitude are dropped to keep forms canonical.
COEFF_EPS = 1e-15


class ModeKind(Enum):
    """Origin of a zeropoint mode set."""

    CRYSTAL = "crystal-zpf"
    IDLE = "idle-zpf"


@dataclass(frozen=True)
class BasisVariable:
    """One set of vacuum modes, identified by a unique id within an ensemble."""

    id: int
    label: str
    kind: ModeKind

    def __post_init__(self):
        if not self.label:
            raise ValueError("basis variable label must be nonempty")


# Ids are unique across every ensemble in the process, so a form built over
# one ensemble can never silently pass the membership check of another.
_NEXT_VARIABLE_ID = itertools.count()


class Ensemble:
    """Registry of basis variables; owns ids, sampling order and pair variance.

    Instances are append-only: variables can be added but never removed or
    reordered, which keeps sampling deterministic for a fixed seed.
    """

    def __init__(self):
        self._variables: list[BasisVariable] = []
        self._by_id: dict[int, BasisVariable] = {}

    @property
    def pair_variance(self) -> float:
        return PAIR_VARIANCE

    def new_variable(self, label: str, kind: ModeKind) -> BasisVariable:
        var = BasisVariable(id=next(_NEXT_VARIABLE_ID), label=label, kind=kind)
        self._variables.append(var)
        self._by_id[var.id] = var
        return var

    def new_pair(self, prefix: str, kind: ModeKind) -> tuple[BasisVariable, BasisVariable]:
        """Register the H/V pair of mode sets behind one beam or idle channel."""
        return (
            self.new_variable(f"{prefix},H", kind),
            self.new_variable(f"{prefix},V", kind),
        )

    def variables(self) -> tuple[BasisVariable, ...]:
        return tuple(self._variables)

    def kind_of(self, var_id: int) -> ModeKind:
        return self._by_id[var_id].kind

    def __contains__(self, var_id: int) -> bool:
        return var_id in self._by_id

    def __len__(self) -> int:
        return len(self._variables)


TermKey = tuple[int, bool]  # (variable id, conjugated)


def _canonical(terms: Mapping[TermKey, complex]) -> dict[TermKey, complex]:
    return {key: complex(c) for key, c in terms.items() if abs(c) >= COEFF_EPS}


class StochasticAmplitude:
    """Complex linear form over basis variables and their conjugates.

    Immutable; all arithmetic returns new forms with near-zero coefficients
    dropped.  ``terms`` maps ``(variable id, conjugated)`` to a complex
    coefficient.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[TermKey, complex] | None = None):
        object.__setattr__(self, "_terms", _canonical(terms or {}))

    @classmethod
    def of(cls, var: BasisVariable | int, coeff: complex = 1.0, conjugated: bool = False) -> StochasticAmplitude:
        var_id = var.id if isinstance(var, BasisVariable) else var
        return cls({(var_id, conjugated): coeff})

    @classmethod
    def zero(cls) -> StochasticAmplitude:
        return cls({})

    @property
    def terms(self) -> Mapping[TermKey, complex]:
        return MappingProxyType(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, var: BasisVariable | int, conjugated: bool = False) -> complex:
        var_id = var.id if isinstance(var, BasisVariable) else var
        return self._terms.get((var_id, conjugated), 0j)

    def variable_ids(self) -> frozenset[int]:
        return frozenset(var_id for var_id, _ in self._terms)

    def conjugate(self) -> StochasticAmplitude:
        return StochasticAmplitude(
            {(var_id, not conj): c.conjugate() for (var_id, conj), c in self._terms.items()}
        )

    def __add__(self, other: StochasticAmplitude) -> StochasticAmplitude:
        merged = dict(self._terms)
        for key, c in other._terms.items():
            merged[key] = merged.get(key, 0j) + c
        return StochasticAmplitude(merged)

    def __sub__(self, other: StochasticAmplitude) -> StochasticAmplitude:
        return self + (-other)

    def __neg__(self) -> StochasticAmplitude:
        return StochasticAmplitude({key: -c for key, c in self._terms.items()})

    def __mul__(self, scalar: complex) -> StochasticAmplitude:
        return StochasticAmplitude({key: c * scalar for key, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, StochasticAmplitude):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        body = " + ".join(
            f"({c:.3g})*a{var_id}{'~' if conj else ''}" for (var_id, conj), c in sorted(self._terms.items())
        )
        return f"StochasticAmplitude({body or '0'})"


def _require_members(form: StochasticAmplitude, ctx: Ensemble) -> None:
    for var_id in form.variable_ids():
        if var_id not in ctx:
            raise ValueError(f"foreign basis variable: id {var_id}")


def second_moment(f: StochasticAmplitude, g: StochasticAmplitude, ctx: Ensemble) -> complex:
    """Vacuum expectation ``<f g>``.

    Only variable/conjugate matched pairs survive: ``<a a> = <a* a*> = 0`` and
    ``<a a*> = 1/2`` per mode set, so the result is bilinear bookkeeping over
    the two term maps.
    """
    _require_members(f, ctx)
    _require_members(g, ctx)
    small, large = (f, g) if len(f._terms) <= len(g._terms) else (g, f)
    total = 0j
    for (var_id, conj), ca in small._terms.items():
        cb = large._terms.get((var_id, not conj))
        if cb is not None:
            total += ca * cb * ctx.pair_variance
    return total


def fourth_moment(
    f1: StochasticAmplitude,
    f2: StochasticAmplitude,
    f3: StochasticAmplitude,
    f4: StochasticAmplitude,
    ctx: Ensemble,
) -> complex:
    """Vacuum expectation ``<f1 f2 f3 f4>`` by Gaussian (Isserlis) pairing."""
    return (
        second_moment(f1, f2, ctx) * second_moment(f3, f4, ctx)
        + second_moment(f1, f3, ctx) * second_moment(f2, f4, ctx)
        + second_moment(f1, f4, ctx) * second_moment(f2, f3, ctx)
    )


def sample_stream(ctx: Ensemble, rng: np.random.Generator, count: int) -> dict[int, np.ndarray]:
    """Draw ``count`` joint realizations of every variable from ``rng``.

    Each variable is an independent circular complex Gaussian with
    ``<|a|^2> = 1/2`` (quadrature variance 1/4).  Variables are drawn in
    registration order, so the stream is reproducible per (generator state,
    ensemble order).
    """
    if count < 1:
        raise ValueError("sample count must be >= 1")
    out: dict[int, np.ndarray] = {}
    for var in ctx.variables():
        quads = rng.standard_normal((2, count))
        out[var.id] = 0.5 * (quads[0] + 1j * quads[1])
    return out


def sample_ensemble(ctx: Ensemble, seed: int, count: int) -> dict[int, np.ndarray]:
    """Seeded joint sampling of the whole ensemble; deterministic per seed."""
    return sample_stream(ctx, np.random.default_rng(seed), count)


def evaluate(form: StochasticAmplitude, assignment: Mapping[int, complex | np.ndarray]):
    """Substitute variable values (conjugating where flagged) and sum.

    Accepts scalar values or numpy arrays; arrays evaluate the form on every
    sample at once.
    """
    total: complex | np.ndarray = 0j
    for (var_id, conj), coeff in form.terms.items():
        try:
            value = assignment[var_id]
        except KeyError:
            raise ValueError(f"assignment missing basis variable: id {var_id}") from None
        total = total + coeff * (np.conj(value) if conj else value)
    return total


def iter_variable_ids(forms: Iterable[StochasticAmplitude]) -> frozenset[int]:
    """Union of variable ids across several forms."""
    ids: set[int] = set()
    for form in forms:
        ids |= form.variable_ids()
    return frozenset(ids)
