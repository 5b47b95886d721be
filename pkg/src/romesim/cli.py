"""Command-line runner: scenario configuration, sweeps, CSV emission.

Configuration comes from an optional flat ``key=value`` file plus
command-line overrides.  Output is a UTF-8 CSV with one row per
(sweep angle, detector, port), ordered by ascending angle, detector order
DT+, DT-, DR+, DR-, port order DB, DBperp.  The ``stderr`` column is empty
except for the monte-carlo engine, where it holds the standard error of the
``normalized`` column.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from .detection import MIN_MC_SAMPLES, DetectionRecord, NetworkSampler
from .ledger import audit_network, max_distinguishable_classes
from .optics import JonesMap
from .scenario import (
    DETECTORS,
    PORTS,
    PreparerSpec,
    Scenario,
    build_full_rome,
    elliptical_reference,
    ensure_verification_idle,
    joint_detection_records,
    linear_reference,
)
from .source import CrystalParams

SCENARIOS = ("rome-linear", "rome-elliptical", "rome-generic")
ENGINES = ("analytic", "p12", "intensity", "monte-carlo")

CSV_HEADER = ("theta_B_deg", "detector", "port", "probability", "normalized", "stderr")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    scenario: str = "rome-linear"
    theta: float = 22.5
    gamma: float = 20.0
    theta_b: str = "0:180:7.5"
    engine: str = "analytic"
    samples: int = 200_000
    seed: int = 20260810
    g: float = 1.0
    v_re: float = 1.0
    v_im: float = 0.0
    prep_a: str | None = None
    prep_b: str | None = None
    prep_c: str | None = None
    prep_d: str | None = None
    ledger: bool = False
    output: str = "sweep.csv"

    def validate(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario: {self.scenario!r}")
        if self.engine not in ENGINES:
            raise ConfigError(f"unknown engine: {self.engine!r}")
        if self.g <= 0:
            raise ConfigError("coupling g must be > 0")
        if self.engine == "monte-carlo" and self.samples < MIN_MC_SAMPLES:
            raise ConfigError(f"monte-carlo needs at least {MIN_MC_SAMPLES} samples")
        self.sweep_values()
        if self.scenario == "rome-generic":
            self.preparer()

    def sweep_values(self) -> list[float]:
        try:
            start_s, stop_s, step_s = self.theta_b.split(":")
            start, stop, step = float(start_s), float(stop_s), float(step_s)
        except ValueError:
            raise ConfigError(f"theta_b sweep must be 'start:stop:step', got {self.theta_b!r}") from None
        if step <= 0:
            raise ConfigError("theta_b sweep step must be > 0")
        if stop < start:
            raise ConfigError("theta_b sweep stop must be >= start")
        values = []
        k = 0
        while True:
            value = start + k * step
            if value > stop + 1e-9:
                break
            values.append(value)
            k += 1
        return values

    def crystal_params(self) -> CrystalParams:
        return CrystalParams(coupling=self.g, pump_amplitude=complex(self.v_re, self.v_im))

    def preparer(self) -> PreparerSpec:
        if self.scenario == "rome-linear":
            return PreparerSpec.linear(self.theta)
        if self.scenario == "rome-elliptical":
            return PreparerSpec.elliptical(self.gamma)
        entries = (self.prep_a, self.prep_b, self.prep_c, self.prep_d)
        if any(e is None for e in entries):
            raise ConfigError("rome-generic requires prep_a, prep_b, prep_c and prep_d")
        try:
            jones = JonesMap(*(complex(e) for e in entries))
        except ValueError:
            raise ConfigError("preparer entries must parse as complex numbers") from None
        try:
            return PreparerSpec.generic(jones)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def _coerce(name: str, raw: str):
    hints = {f.name: f.type for f in fields(RunConfig)}
    if name not in hints:
        raise ConfigError(f"unknown config key: {name!r}")
    hint = hints[name]
    if hint == "bool":
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"config key {name!r} expects a boolean, got {raw!r}")
    if hint == "int":
        return int(raw)
    if hint == "float":
        return float(raw)
    return raw


def load_config_file(path: str | Path) -> dict:
    """Flat key=value file; '#' starts a comment, dashes and underscores match."""
    values = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected key=value")
        key, raw = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        values[key] = _coerce(key, raw)
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="romesim",
        description="Simulate the Rome teleportation experiment and emit verification curves as CSV.",
    )
    parser.add_argument("--config", help="flat key=value configuration file")
    parser.add_argument("--scenario", choices=SCENARIOS)
    parser.add_argument("--theta", type=float, help="linear preparation angle, degrees")
    parser.add_argument("--gamma", type=float, help="elliptical preparation plate angle, degrees")
    parser.add_argument("--theta-b", dest="theta_b", help="verification sweep start:stop:step, degrees")
    parser.add_argument("--engine", choices=ENGINES)
    parser.add_argument("--samples", type=int, help="monte-carlo sample count")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--g", type=float, help="crystal coupling")
    parser.add_argument("--v-re", dest="v_re", type=float, help="pump amplitude, real part")
    parser.add_argument("--v-im", dest="v_im", type=float, help="pump amplitude, imaginary part")
    parser.add_argument("--prep-a", dest="prep_a", help="generic preparer entry, e.g. '0.707+0.707j'")
    parser.add_argument("--prep-b", dest="prep_b")
    parser.add_argument("--prep-c", dest="prep_c")
    parser.add_argument("--prep-d", dest="prep_d")
    parser.add_argument("--ledger", action="store_true", default=None, help="print the mode-set ledger")
    parser.add_argument("--output")
    return parser


def build_config(argv: list[str] | None = None) -> RunConfig:
    args = _build_parser().parse_args(argv)
    config = RunConfig()
    if args.config:
        for key, value in load_config_file(args.config).items():
            setattr(config, key, value)
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            setattr(config, f.name, value)
    return config


def _reference_records(scenario: Scenario, config: RunConfig, theta_b: float) -> dict[tuple[str, str], DetectionRecord]:
    if config.scenario == "rome-linear":
        reference = linear_reference(config.theta, theta_b)
    else:
        reference = elliptical_reference(theta_b)
    scale = scenario.reference_scale
    return {
        pair: DetectionRecord(probability=value * scale, normalized=value)
        for pair, value in reference.items()
    }


def compute_rows(config: RunConfig) -> tuple[Scenario, list[tuple]]:
    scenario = build_full_rome(config.crystal_params(), config.preparer())
    sampler = None
    if config.engine == "monte-carlo":
        ensure_verification_idle(scenario)
        sampler = NetworkSampler(scenario.ensemble, config.seed, config.samples)

    scale = scenario.reference_scale
    rows = []
    for theta_b in config.sweep_values():
        if config.engine == "analytic" and config.scenario != "rome-generic":
            records = _reference_records(scenario, config, theta_b)
        elif config.engine == "analytic":
            records = joint_detection_records(scenario, theta_b, engine="p12")
        else:
            records = joint_detection_records(scenario, theta_b, engine=config.engine, sampler=sampler)
        for det in DETECTORS:
            for port in PORTS:
                rec = records[(det, port)]
                stderr = "" if rec.stderr is None else f"{rec.stderr / scale:.9f}"
                rows.append(
                    (f"{theta_b:g}", det, port, f"{rec.probability:.9f}", f"{rec.normalized:.9f}", stderr)
                )
    return scenario, rows


def ledger_report(scenario: Scenario) -> str:
    ledger = audit_network(scenario)
    n_max = max_distinguishable_classes(ledger)
    return (
        f"N_ZPF_S={ledger.n_zpf_source} N_ZPF_A={ledger.n_zpf_analyser} "
        f"N_ic={ledger.n_idle_channels} N_max={n_max}"
    )


def run(config: RunConfig) -> int:
    config.validate()
    scenario, rows = compute_rows(config)
    try:
        with open(config.output, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(CSV_HEADER)
            writer.writerows(rows)
    except OSError as exc:
        print(f"romesim: cannot write {config.output}: {exc}", file=sys.stderr)
        return 1
    if config.ledger:
        print(ledger_report(scenario))
    return 0


def main(argv: list[str] | None = None) -> int:
    try:
        config = build_config(argv)
        return run(config)
    except ConfigError as exc:
        print(f"romesim: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
