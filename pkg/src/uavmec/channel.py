"""Air-to-ground channel model: geometry, Rician factor, and outage rate.

All functions are pure and accept scalars or numpy arrays (broadcasting).
Units are SI throughout: meters, watts, bits/s.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ChannelParams:
    """Link-budget and logistic-rate constants.

    ``rician_a1`` / ``rician_a2`` feed the elevation-dependent Rician factor
    only, which is a diagnostic; the rate model uses k1..k4 exclusively.
    The defaults for a1/a2 are placeholders (the environment constants are
    not pinned by our parameter set), as is ``pathloss_exp = 2.0``.
    """

    bandwidth_hz: float = 1e7
    ref_gain: float = 1e-3            # channel power gain at d = 1 m, linear
    pathloss_exp: float = 2.0
    noise_w: float = 1e-9
    snr_gap: float = 10.0 ** 0.82     # 8.2 dB, linear
    k1: float = 0.01
    k2: float = 0.99
    k3: float = -4.7
    k4: float = 8.9
    rician_a1: float = 1.0
    rician_a2: float = 1.0

    def __post_init__(self):
        if not self.bandwidth_hz > 0:
            raise ValueError("bandwidth_hz must be > 0")
        if not self.ref_gain > 0:
            raise ValueError("ref_gain must be > 0")
        if not self.noise_w > 0:
            raise ValueError("noise_w must be > 0")
        if not self.snr_gap >= 1:
            raise ValueError("snr_gap must be >= 1 (linear)")
        if not self.pathloss_exp >= 2:
            raise ValueError("pathloss_exp must be >= 2")
        if not (self.k1 > 0 and self.k2 > 0):
            raise ValueError("k1 and k2 must be > 0")
        if abs(self.k1 + self.k2 - 1.0) > 1e-12:
            raise ValueError("k1 + k2 must equal 1 within 1e-12")
        if not self.k3 < 0:
            raise ValueError("k3 must be < 0")
        if not self.k4 > 0:
            raise ValueError("k4 must be > 0")

    def gamma(self, tx_power_w):
        """Reference SNR: p * beta0 / (sigma^2 * Gamma)."""
        return tx_power_w * self.ref_gain / (self.noise_w * self.snr_gap)


@dataclass(frozen=True)
class Geometry:
    """Cached geometry of one UE-UAV link."""

    horiz_dist_sq: float
    altitude: float
    dist: float
    elev_sine: float

    @classmethod
    def at(cls, q, h, w) -> "Geometry":
        q = np.asarray(q, dtype=float)
        w = np.asarray(w, dtype=float)
        horiz_sq = float(np.sum((q - w) ** 2))
        d = float(np.sqrt(horiz_sq + h ** 2))
        return cls(horiz_dist_sq=horiz_sq, altitude=float(h), dist=d,
                   elev_sine=float(h) / d)


def distance(q, h, w):
    """3D distance between a UAV at (q, h) and a ground point w.

    q, w are 2-vectors (or arrays of them along the last axis); h >= 0.
    """
    q = np.asarray(q, dtype=float)
    w = np.asarray(w, dtype=float)
    horiz_sq = np.sum((q - w) ** 2, axis=-1)
    return np.sqrt(horiz_sq + np.asarray(h, dtype=float) ** 2)


def elevation_sine(q, h, w):
    """sin of the elevation angle: h / distance. Requires h > 0."""
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0):
        raise ValueError("elevation_sine requires altitude h > 0")
    return h / distance(q, h, w)


def rician_factor(theta, params: ChannelParams):
    """Elevation-dependent Rician K-factor, a1 * exp(a2 * theta).

    Diagnostic only; the rate model below does not use it.
    """
    return params.rician_a1 * np.exp(params.rician_a2 * np.asarray(theta, dtype=float))


def _logistic_factor(v, params: ChannelParams):
    return params.k1 + params.k2 / (1.0 + np.exp(-(params.k3 + params.k4 * v)))


def outage_rate(horiz_dist_sq, h, v, tx_power_w, params: ChannelParams):
    """Outage-constrained uplink rate in bits/s at the given geometry.

    horiz_dist_sq is the squared horizontal UE-UAV distance (m^2), h the
    altitude, v the elevation sine in (0, 1].
    """
    horiz_dist_sq = np.asarray(horiz_dist_sq, dtype=float)
    h = np.asarray(h, dtype=float)
    v = np.asarray(v, dtype=float)
    tx_power_w = np.asarray(tx_power_w, dtype=float)
    for name, arr in (("horiz_dist_sq", horiz_dist_sq), ("h", h), ("v", v),
                      ("tx_power_w", tx_power_w)):
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"non-finite {name}")
    dist_sq = horiz_dist_sq + h ** 2
    snr = _logistic_factor(v, params) * params.gamma(tx_power_w) \
        / dist_sq ** (params.pathloss_exp / 2.0)
    return params.bandwidth_hz * np.log2(1.0 + snr)


def los_rate(horiz_dist_sq, h, tx_power_w, params: ChannelParams):
    """Idealized pure line-of-sight rate: the angle-dependent factor set to 1."""
    horiz_dist_sq = np.asarray(horiz_dist_sq, dtype=float)
    h = np.asarray(h, dtype=float)
    tx_power_w = np.asarray(tx_power_w, dtype=float)
    for name, arr in (("horiz_dist_sq", horiz_dist_sq), ("h", h),
                      ("tx_power_w", tx_power_w)):
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"non-finite {name}")
    dist_sq = horiz_dist_sq + h ** 2
    snr = params.gamma(tx_power_w) / dist_sq ** (params.pathloss_exp / 2.0)
    return params.bandwidth_hz * np.log2(1.0 + snr)
