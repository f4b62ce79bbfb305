"""Random network scenarios: iid Rayleigh block-fading gains for every link.

Every link gain is a power gain |h|^2 where the amplitude |h| is
Rayleigh(sigma), so the gain itself is exponential with mean 2*sigma^2.
One scenario is one fading block; gains are independent across links and
across scenarios.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SystemParams",
    "NetworkScenario",
    "rayleigh_power_gain",
    "sample_scenario",
]


@dataclass(frozen=True)
class SystemParams:
    """Global constants of one network configuration.

    Powers are linear (not dB); rates derived from them are in nats per
    slot. All defaults besides ``rayleigh_sigma`` (the reference scenario
    value) are simulator choices.
    """

    n_pu: int  # number of primary transmitter/receiver pairs
    n_su: int  # number of secondary transmitter/receiver pairs
    p_primary: float = 1.0  # fixed primary transmit power
    p_max: float = 1.0  # secondary transmit power cap
    cost_per_energy: float = 0.2  # secondary utility lost per unit of energy spent
    noise_power: float = 0.1  # receiver noise power, identical at all receivers
    rayleigh_sigma: float = 0.5  # amplitude scale of the fading on every link

    def __post_init__(self) -> None:
        for name in ("n_pu", "n_su"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {value!r}")
        if not self.p_primary > 0:
            raise ValueError(f"p_primary must be positive, got {self.p_primary!r}")
        if not self.p_max > 0:
            raise ValueError(f"p_max must be positive, got {self.p_max!r}")
        if not self.cost_per_energy >= 0:
            raise ValueError(f"cost_per_energy must be nonnegative, got {self.cost_per_energy!r}")
        if not self.noise_power > 0:
            raise ValueError(f"noise_power must be positive, got {self.noise_power!r}")
        if not self.rayleigh_sigma >= 0:
            raise ValueError(f"rayleigh_sigma must be nonnegative, got {self.rayleigh_sigma!r}")


@dataclass
class NetworkScenario:
    """One fading realization for every link of an N x M network.

    ``g_ps[i, j]`` is the gain from primary transmitter i to secondary
    transmitter j (the relay's receive side); ``g_sp[i, j]`` is the gain
    from secondary transmitter j to primary receiver i (the relay's
    forward side).
    """

    params: SystemParams
    g_pp: np.ndarray  # (N,) primary transmitter i -> primary receiver i
    g_ss: np.ndarray  # (M,) secondary transmitter j -> secondary receiver j
    g_ps: np.ndarray  # (N, M) primary transmitter i -> secondary transmitter j
    g_sp: np.ndarray  # (N, M) secondary transmitter j -> primary receiver i

    def __post_init__(self) -> None:
        n, m = self.params.n_pu, self.params.n_su
        expected = {"g_pp": (n,), "g_ss": (m,), "g_ps": (n, m), "g_sp": (n, m)}
        for name, shape in expected.items():
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
            if arr.size and (not np.all(np.isfinite(arr)) or float(arr.min()) < 0.0):
                raise ValueError(f"{name} must contain finite nonnegative gains")
            setattr(self, name, arr)


def rayleigh_power_gain(sigma: float, rng: np.random.Generator) -> float:
    """Draw one power gain whose amplitude is Rayleigh(sigma).

    Uses inverse-CDF sampling of the exponential gain distribution
    (mean ``2 * sigma**2``) and consumes exactly one uniform from ``rng``
    per call. ``sigma = 0`` degenerates to a gain of exactly 0.
    """
    if not sigma >= 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma!r}")
    u = rng.random()
    return 2.0 * sigma * sigma * float(-np.log1p(-u))


def sample_scenario(params: SystemParams, seed: int) -> NetworkScenario:
    """Sample every link gain of a scenario from a fresh seeded generator.

    The generator is ``np.random.Generator(np.random.PCG64(seed))`` and is
    consumed in a fixed order, one uniform per gain: ``g_pp[0..N)``, then
    ``g_ss[0..M)``, then ``g_ps`` row by row, then ``g_sp`` row by row.
    Identical ``(params, seed)`` therefore reproduce the scenario exactly.
    """
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool) or seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")
    n, m = params.n_pu, params.n_su
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    u = rng.random(n + m + 2 * n * m)
    gains = 2.0 * params.rayleigh_sigma * params.rayleigh_sigma * (-np.log1p(-u))
    return NetworkScenario(
        params=params,
        g_pp=gains[:n],
        g_ss=gains[n : n + m],
        g_ps=gains[n + m : n + m + n * m].reshape(n, m),
        g_sp=gains[n + m + n * m :].reshape(n, m),
    )
