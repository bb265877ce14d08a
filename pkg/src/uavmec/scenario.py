"""Scenario definition, validation, JSON (de)serialization, and generation.

A scenario bundles the UE layout and tasks, the UAV fleet limits, the
channel constants, and the seed used to generate it. Files are JSON with
an explicit ``schema_version``; all quantities are stored in SI base units
with the unit carried in the key name.

Random generation uses numpy's default bit generator (PCG64) seeded
explicitly, so identical seeds reproduce identical scenarios on any
platform.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams

SCHEMA_VERSION = 1

# Fixed per-bit CPU demand used by the default task spec (cycles/bit).
DEFAULT_CYCLES_PER_BIT = 300.0
DEFAULT_DATA_BITS = 1e6        # task input size; not pinned by our parameter set
DEFAULT_TX_POWER_W = 0.1       # 20 dBm
DEFAULT_CPU_HZ = 2e9


class ScenarioError(ValueError):
    """Raised for invalid scenario files or invariant violations."""


@dataclass(frozen=True)
class Box:
    """Allowed UAV motion range (horizontal rectangle x altitude band)."""

    x_min: float = 0.0
    x_max: float = 100.0
    y_min: float = 0.0
    y_max: float = 100.0
    h_min: float = 40.0
    h_max: float = 80.0

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ScenarioError("box requires x_min < x_max")
        if not self.y_min < self.y_max:
            raise ScenarioError("box requires y_min < y_max")
        if not 0 < self.h_min:
            raise ScenarioError("box requires h_min > 0")
        if not self.h_min <= self.h_max:
            raise ScenarioError("box requires h_min <= h_max")

    def contains_horizontal(self, x, y, tol=1e-9):
        return (self.x_min - tol <= x <= self.x_max + tol
                and self.y_min - tol <= y <= self.y_max + tol)


@dataclass(frozen=True)
class Ue:
    """One ground device: position, task size, CPU demand, uplink power."""

    x: float
    y: float
    data_bits: float
    cycles: float
    tx_power_w: float = DEFAULT_TX_POWER_W

    def __post_init__(self):
        if not self.data_bits > 0:
            raise ScenarioError("data_bits must be > 0")
        if not self.cycles > 0:
            raise ScenarioError("cycles must be > 0")
        if not self.tx_power_w > 0:
            raise ScenarioError("tx_power_w must be > 0")

    @property
    def position(self):
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class FleetConfig:
    num_uavs: int = 3
    cpu_hz: float = DEFAULT_CPU_HZ
    box: Box = field(default_factory=Box)

    def __post_init__(self):
        if not self.num_uavs >= 1:
            raise ScenarioError("num_uavs must be >= 1")
        if not self.cpu_hz > 0:
            raise ScenarioError("cpu_hz must be > 0")


@dataclass(frozen=True)
class TaskSpec:
    """How to draw task sizes: fixed data_bits, or uniform in a range."""

    data_bits_min: float = DEFAULT_DATA_BITS
    data_bits_max: float = DEFAULT_DATA_BITS
    cycles_per_bit: float = DEFAULT_CYCLES_PER_BIT
    tx_power_w: float = DEFAULT_TX_POWER_W

    def __post_init__(self):
        if not 0 < self.data_bits_min <= self.data_bits_max:
            raise ScenarioError("task spec requires 0 < data_bits_min <= data_bits_max")
        if not self.cycles_per_bit > 0:
            raise ScenarioError("cycles_per_bit must be > 0")
        if not self.tx_power_w > 0:
            raise ScenarioError("tx_power_w must be > 0")


@dataclass(frozen=True)
class Scenario:
    ues: tuple
    fleet: FleetConfig
    channel: ChannelParams
    seed: int

    def __post_init__(self):
        if len(self.ues) == 0:
            raise ScenarioError("scenario needs at least one UE")
        box = self.fleet.box
        for i, ue in enumerate(self.ues):
            if not box.contains_horizontal(ue.x, ue.y):
                raise ScenarioError(f"ue[{i}] position outside the area box")

    @property
    def n_ues(self):
        return len(self.ues)

    @property
    def positions(self):
        """(N, 2) array of UE positions."""
        return np.array([[u.x, u.y] for u in self.ues])

    @property
    def data_bits(self):
        return np.array([u.data_bits for u in self.ues])

    @property
    def cycles(self):
        return np.array([u.cycles for u in self.ues])

    @property
    def tx_powers(self):
        return np.array([u.tx_power_w for u in self.ues])


def generate(seed, n_ues, fleet: FleetConfig | None = None,
             channel: ChannelParams | None = None,
             task_spec: TaskSpec | None = None) -> Scenario:
    """Draw a scenario: UE positions i.i.d. uniform over the horizontal box,
    task sizes per task_spec, cycles = cycles_per_bit * data_bits."""
    if n_ues < 1:
        raise ScenarioError("n_ues must be >= 1")
    fleet = fleet or FleetConfig()
    channel = channel or ChannelParams()
    task_spec = task_spec or TaskSpec()
    rng = np.random.default_rng(seed)
    box = fleet.box
    xs = rng.uniform(box.x_min, box.x_max, size=n_ues)
    ys = rng.uniform(box.y_min, box.y_max, size=n_ues)
    if task_spec.data_bits_min == task_spec.data_bits_max:
        bits = np.full(n_ues, task_spec.data_bits_min)
    else:
        bits = rng.uniform(task_spec.data_bits_min, task_spec.data_bits_max,
                           size=n_ues)
    ues = tuple(
        Ue(x=float(xs[i]), y=float(ys[i]), data_bits=float(bits[i]),
           cycles=float(task_spec.cycles_per_bit * bits[i]),
           tx_power_w=task_spec.tx_power_w)
        for i in range(n_ues)
    )
    return Scenario(ues=ues, fleet=fleet, channel=channel, seed=int(seed))


def _to_dict(scenario: Scenario) -> dict:
    ch = scenario.channel
    box = scenario.fleet.box
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": scenario.seed,
        "channel": {
            "bandwidth_hz": ch.bandwidth_hz,
            "ref_gain": ch.ref_gain,
            "pathloss_exp": ch.pathloss_exp,
            "noise_w": ch.noise_w,
            "snr_gap": ch.snr_gap,
            "k1": ch.k1, "k2": ch.k2, "k3": ch.k3, "k4": ch.k4,
            "rician_a1": ch.rician_a1, "rician_a2": ch.rician_a2,
        },
        "fleet": {
            "num_uavs": scenario.fleet.num_uavs,
            "cpu_hz": scenario.fleet.cpu_hz,
            "box": {
                "x_min_m": box.x_min, "x_max_m": box.x_max,
                "y_min_m": box.y_min, "y_max_m": box.y_max,
                "h_min_m": box.h_min, "h_max_m": box.h_max,
            },
        },
        "ues": [
            {"x_m": u.x, "y_m": u.y, "data_bits": u.data_bits,
             "cycles": u.cycles, "tx_power_w": u.tx_power_w}
            for u in scenario.ues
        ],
    }


def _get(d, key, where):
    if key not in d:
        raise ScenarioError(f"missing field '{key}' in {where}")
    return d[key]


def _from_dict(doc: dict) -> Scenario:
    version = _get(doc, "schema_version", "document root")
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema_version {version}")
    ch = _get(doc, "channel", "document root")
    try:
        channel = ChannelParams(
            bandwidth_hz=_get(ch, "bandwidth_hz", "channel"),
            ref_gain=_get(ch, "ref_gain", "channel"),
            pathloss_exp=_get(ch, "pathloss_exp", "channel"),
            noise_w=_get(ch, "noise_w", "channel"),
            snr_gap=_get(ch, "snr_gap", "channel"),
            k1=_get(ch, "k1", "channel"), k2=_get(ch, "k2", "channel"),
            k3=_get(ch, "k3", "channel"), k4=_get(ch, "k4", "channel"),
            rician_a1=ch.get("rician_a1", 1.0),
            rician_a2=ch.get("rician_a2", 1.0),
        )
    except ValueError as exc:
        raise ScenarioError(f"channel: {exc}") from exc
    fl = _get(doc, "fleet", "document root")
    bx = _get(fl, "box", "fleet")
    try:
        box = Box(
            x_min=_get(bx, "x_min_m", "fleet.box"),
            x_max=_get(bx, "x_max_m", "fleet.box"),
            y_min=_get(bx, "y_min_m", "fleet.box"),
            y_max=_get(bx, "y_max_m", "fleet.box"),
            h_min=_get(bx, "h_min_m", "fleet.box"),
            h_max=_get(bx, "h_max_m", "fleet.box"),
        )
        fleet = FleetConfig(num_uavs=_get(fl, "num_uavs", "fleet"),
                            cpu_hz=_get(fl, "cpu_hz", "fleet"), box=box)
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(f"fleet: {exc}") from exc
    ues = []
    for i, u in enumerate(_get(doc, "ues", "document root")):
        where = f"ues[{i}]"
        try:
            ues.append(Ue(x=_get(u, "x_m", where), y=_get(u, "y_m", where),
                          data_bits=_get(u, "data_bits", where),
                          cycles=_get(u, "cycles", where),
                          tx_power_w=_get(u, "tx_power_w", where)))
        except ScenarioError as exc:
            raise ScenarioError(f"{where}: {exc}") from exc
    return Scenario(ues=tuple(ues), fleet=fleet, channel=channel,
                    seed=_get(doc, "seed", "document root"))


def save(scenario: Scenario, path):
    with open(path, "w") as fh:
        json.dump(_to_dict(scenario), fh, indent=2)
        fh.write("\n")


def load(path) -> Scenario:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"parse error in {path}: line {exc.lineno}: {exc.msg}") from exc
    return _from_dict(doc)
