"""Statistical cellular channel generation.

Distance attenuation follows the summarized two-slope law (20 dB/km out to
the breakpoint, 38 dB/km beyond), with an explicit intercept and, for
street-level links, a rooftop-to-street excess: links whose endpoints are
both above the rooftop height (BS-relay, by default) skip that component.
Large-scale fading is log-normal shadowing; small-scale fading is Rician on
the above-rooftop links and Rayleigh elsewhere, both normalized to unit mean
power.  Everything is parameterized by :class:`ScenarioConfig` and seeded
explicitly, so draws are reproducible and order-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import InvalidInstance
from .model import ChannelInstance, _as_readonly

_FSPL_1M_1GHZ = 20.0 * math.log10(4.0 * math.pi / 0.299792458)  # ~32.45 dB


@dataclass(frozen=True)
class ScenarioConfig:
    """Cell geometry, radio parameters and fading statistics.

    ``pathloss_intercept_dB`` defaults to the free-space loss at the
    two-slope breakpoint distance; ``rooftop_excess_dB`` defaults to the
    rooftop-to-street diffraction term computed from street width, user
    height and road orientation.  ``noise_power_dBm`` defaults to
    PSD + 10 log10(bandwidth) (about -121 dBm for 200 kHz); set -120 to
    match the rounded figure used in the experiments' source material.
    """

    cell_radius_km: float = 1.0
    relay_ring_fraction: float = 0.4
    num_relays: int = 4
    bs_height_m: float = 50.0
    relay_height_m: float = 50.0
    user_height_m: float = 1.5
    rooftop_height_m: float = 30.0
    frequency_GHz: float = 1.0
    building_spacing_m: float = 50.0
    street_width_m: float = 12.0
    road_orientation_deg: float = 90.0
    tx_power_dBm: float = 20.0
    noise_psd_dBm_per_Hz: float = -174.0
    channel_bandwidth_kHz: float = 200.0
    shadowing_sigma_dB: float = 8.0
    rician_K_dB: float = 10.0
    user_density_per_km2: float = 30.0 / math.pi
    seed: int = 0
    noise_power_dBm: float | None = None
    pathloss_intercept_dB: float | None = None
    pathloss_slope_near_dB_per_km: float = 20.0
    pathloss_slope_far_dB_per_km: float = 38.0
    pathloss_break_km: float = 0.657
    rooftop_excess_dB: float | None = None

    def __post_init__(self):
        positives = ("cell_radius_km", "num_relays", "frequency_GHz",
                     "channel_bandwidth_kHz", "bs_height_m", "relay_height_m",
                     "user_height_m", "rooftop_height_m", "street_width_m",
                     "building_spacing_m", "user_density_per_km2",
                     "pathloss_break_km")
        for name in positives:
            if getattr(self, name) <= 0:
                raise InvalidInstance(f"{name} must be positive")
        if not (0.0 < self.relay_ring_fraction < 1.0):
            raise InvalidInstance("relay_ring_fraction must lie in (0, 1)")
        if self.shadowing_sigma_dB < 0:
            raise InvalidInstance("shadowing_sigma_dB must be >= 0")

    @property
    def noise_power_dBm_effective(self) -> float:
        if self.noise_power_dBm is not None:
            return self.noise_power_dBm
        return self.noise_psd_dBm_per_Hz + 10.0 * math.log10(
            self.channel_bandwidth_kHz * 1e3)

    @property
    def noise_mW(self) -> float:
        return 10.0 ** (self.noise_power_dBm_effective / 10.0)

    @property
    def tx_power_mW(self) -> float:
        return 10.0 ** (self.tx_power_dBm / 10.0)

    @property
    def intercept_dB(self) -> float:
        if self.pathloss_intercept_dB is not None:
            return self.pathloss_intercept_dB
        return (_FSPL_1M_1GHZ + 20.0 * math.log10(self.frequency_GHz)
                + 20.0 * math.log10(self.pathloss_break_km * 1e3))

    @property
    def rooftop_excess_dB_effective(self) -> float:
        if self.rooftop_excess_dB is not None:
            return self.rooftop_excess_dB
        phi = self.road_orientation_deg
        if phi < 35.0:
            l_ori = -10.0 + 0.354 * phi
        elif phi < 55.0:
            l_ori = 2.5 + 0.075 * (phi - 35.0)
        else:
            l_ori = 4.0 - 0.114 * (phi - 55.0)
        delta_h = max(self.rooftop_height_m - self.user_height_m, 1e-6)
        return (-16.9 - 10.0 * math.log10(self.street_width_m)
                + 10.0 * math.log10(self.frequency_GHz * 1e3)
                + 20.0 * math.log10(delta_h) + l_ori)

    def link_is_elevated(self, link_kind: str) -> bool:
        """True when both link endpoints sit above the rooftops."""
        if link_kind == "bs_relay":
            return (self.bs_height_m > self.rooftop_height_m
                    and self.relay_height_m > self.rooftop_height_m)
        return False

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            out[f.name] = getattr(self, f.name)
        return out


_LINK_KINDS = ("bs_relay", "bs_user", "relay_user")


def path_loss_dB(distance_km, link_kind: str, config: ScenarioConfig):
    """Two-slope distance loss plus the street-level rooftop excess.

    PL(d) = PL0 + s_near*min(d, brk) + s_far*max(0, d - brk) [+ excess].
    The same slopes apply to every link kind; the kind only decides whether
    the rooftop-to-street excess applies (it does not for elevated links)
    and, downstream, which small-scale fading statistics are drawn.
    """
    if link_kind not in _LINK_KINDS:
        raise InvalidInstance(f"unknown link kind {link_kind!r}")
    d = np.asarray(distance_km, float)
    if np.any(d < 0):
        raise InvalidInstance("distance must be >= 0")
    brk = config.pathloss_break_km
    pl = (config.intercept_dB
          + config.pathloss_slope_near_dB_per_km * np.minimum(d, brk)
          + config.pathloss_slope_far_dB_per_km * np.maximum(0.0, d - brk))
    if not config.link_is_elevated(link_kind):
        pl = pl + config.rooftop_excess_dB_effective
    if np.ndim(distance_km) == 0:
        return float(pl)
    return pl


@dataclass(frozen=True)
class Placement:
    """BS at the origin; relay and user coordinates in km."""

    relay_xy: np.ndarray
    user_xy: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "relay_xy", _as_readonly(self.relay_xy))
        object.__setattr__(self, "user_xy", _as_readonly(self.user_xy))

    @property
    def num_relays(self) -> int:
        return self.relay_xy.shape[0]

    @property
    def num_users(self) -> int:
        return self.user_xy.shape[0]

    @property
    def bs_user_km(self) -> np.ndarray:
        return np.linalg.norm(self.user_xy, axis=1)

    @property
    def bs_relay_km(self) -> np.ndarray:
        return np.linalg.norm(self.relay_xy, axis=1)

    @property
    def relay_user_km(self) -> np.ndarray:
        diff = self.relay_xy[:, None, :] - self.user_xy[None, :, :]
        return np.linalg.norm(diff, axis=2)


def place_relays(config: ScenarioConfig) -> np.ndarray:
    """Relays equally spaced on the configured ring, first one at 45 deg."""
    radius = config.relay_ring_fraction * config.cell_radius_km
    angles = np.deg2rad(45.0 + 360.0 * np.arange(config.num_relays) / config.num_relays)
    return radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)


def draw_user_positions(rng: np.random.Generator, n: int,
                        r_inner_km: float, r_outer_km: float) -> np.ndarray:
    """Uniform positions over the annulus [r_inner, r_outer]."""
    r = np.sqrt(rng.uniform(r_inner_km ** 2, r_outer_km ** 2, n))
    theta = rng.uniform(0.0, 2.0 * np.pi, n)
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)


@dataclass(frozen=True)
class LargeScaleGains:
    """Linear channel power gains from path loss and shadowing only."""

    bs_user: np.ndarray
    bs_relay: np.ndarray
    relay_user: np.ndarray


def _shadowed_gain(pl_dB, sigma_dB, rng):
    s = rng.normal(0.0, sigma_dB, np.shape(pl_dB)) if sigma_dB > 0 else 0.0
    return 10.0 ** ((-np.asarray(pl_dB) + s) / 10.0)


def draw_large_scale(placement: Placement, config: ScenarioConfig,
                     rng: np.random.Generator) -> LargeScaleGains:
    """Path loss + log-normal shadowing per link.

    Draw order is fixed (bs_user, bs_relay, relay_user row-major) so a given
    generator state always produces the same gains.
    """
    sigma = config.shadowing_sigma_dB
    g_user = _shadowed_gain(path_loss_dB(placement.bs_user_km, "bs_user", config),
                            sigma, rng)
    g_relay = _shadowed_gain(path_loss_dB(placement.bs_relay_km, "bs_relay", config),
                             sigma, rng)
    g_ru = _shadowed_gain(path_loss_dB(placement.relay_user_km, "relay_user", config),
                          sigma, rng)
    return LargeScaleGains(g_user, g_relay, g_ru)


def rician_fade_power(rng: np.random.Generator, k_linear: float, size):
    """|h|^2 with h Rician of K-factor k_linear, normalized to unit mean."""
    los = math.sqrt(k_linear / (k_linear + 1.0))
    sig = math.sqrt(1.0 / (2.0 * (k_linear + 1.0)))
    re = los + sig * rng.standard_normal(size)
    im = sig * rng.standard_normal(size)
    return re ** 2 + im ** 2


def rayleigh_fade_power(rng: np.random.Generator, size):
    """|h|^2 with h circularly-symmetric unit-variance complex Gaussian."""
    return rng.exponential(1.0, size)


def miso_small_scale(rng: np.random.Generator, num_users: int, num_antennas: int):
    """Per-antenna complex fades, CN(0, 1) entries, shape (K, antennas)."""
    h = rng.standard_normal((num_users, num_antennas, 2))
    return (h[..., 0] + 1j * h[..., 1]) / math.sqrt(2.0)


@dataclass(frozen=True)
class SmallScaleFades:
    """Unit-mean fading powers matching LargeScaleGains' shapes."""

    bs_user: np.ndarray
    bs_relay: np.ndarray
    relay_user: np.ndarray


def draw_small_scale(config: ScenarioConfig, num_relays: int, num_users: int,
                     rng: np.random.Generator) -> SmallScaleFades:
    k_lin = 10.0 ** (config.rician_K_dB / 10.0)
    f_user = rayleigh_fade_power(rng, num_users)
    f_relay = rician_fade_power(rng, k_lin, num_relays)
    f_ru = rayleigh_fade_power(rng, (num_relays, num_users))
    return SmallScaleFades(f_user, f_relay, f_ru)


def instance_from_draws(large: LargeScaleGains, fades: SmallScaleFades,
                        config: ScenarioConfig) -> ChannelInstance:
    """Combine gains with the two-slot power split into linear SNRs.

    Slot 1 splits the BS power equally over the K user channels (so the
    relays can decode every message); slot 2 gives each relay 1/J of the
    power as its full budget.
    """
    num_users = large.bs_user.shape[0]
    num_relays = large.bs_relay.shape[0]
    noise = config.noise_mW
    p_slot1 = config.tx_power_mW / num_users
    p_relay = config.tx_power_mW / num_relays
    c = p_slot1 * large.bs_user * fades.bs_user / noise
    sr = p_slot1 * large.bs_relay * fades.bs_relay / noise
    p = p_relay * large.relay_user * fades.relay_user / noise
    return ChannelInstance(c=c, p=p, sr=sr)


def draw_instance(placement: Placement, config: ScenarioConfig,
                  rng: np.random.Generator) -> ChannelInstance:
    """One full statistical channel draw for a placement."""
    large = draw_large_scale(placement, config, rng)
    fades = draw_small_scale(config, placement.num_relays, placement.num_users, rng)
    return instance_from_draws(large, fades, config)


def draw_synthetic_rayleigh(num_relays: int, num_users: int,
                            snr_total_linear: float,
                            rng: np.random.Generator) -> ChannelInstance:
    """I.i.d. unit-mean Rayleigh instance for the bound-tightness runs.

    The total transmit SNR is split 1/J per relay and, for the direct links,
    1/K per user channel; no source-relay SNRs are drawn (the decode
    assumption is taken to hold).
    """
    c = (snr_total_linear / num_users) * rng.exponential(1.0, num_users)
    p = (snr_total_linear / num_relays) * rng.exponential(1.0, (num_relays, num_users))
    return ChannelInstance(c=c, p=p)
