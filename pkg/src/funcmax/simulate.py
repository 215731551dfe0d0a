"""Simulation data-generating process.

Each channel's curve is a 50-term expansion in the Fourier-type basis with
power-law coefficient decay j^(-alpha), random scores, and a fixed random
permutation of the basis order shared by all Monte Carlo runs of an
experiment.  Channels are mixed with the closed-form square root of an
equicorrelation matrix, and alternatives add a constant mean shift to the
first floor(K * s) channels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from . import rng
from .basis import BASIS_SIZE, basis_matrix
from .errors import DomainError
from .sample import DifferenceMatrix

NOISE_LAWS = ("gaussian", "chisq1")


def _fisher_yates(seed: int) -> tuple[int, ...]:
    gen = rng.generator(seed, rng.TAG_PERMUTATION)
    perm = list(range(1, BASIS_SIZE + 1))
    for i in range(BASIS_SIZE - 1, 0, -1):
        j = int(gen.integers(0, i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    return tuple(perm)


@dataclass(frozen=True)
class DgpConfig:
    """Full parameterization of the simulator.

    sigma_perm is the basis permutation; leave it None to have it drawn by
    Fisher-Yates from a dedicated stream of `seed`, after which the config
    is self-contained and exactly replayable.
    """

    n: int = 100
    K: int = 80
    T: int = 300
    alpha: float = 0.55
    rho: float = 0.0
    noise: str = "gaussian"
    s: float = 0.0
    delta: float = 0.0
    seed: int = 0
    sigma_perm: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.noise not in NOISE_LAWS:
            raise DomainError(f"noise must be one of {NOISE_LAWS}")
        if not 0.0 <= self.rho < 1.0:
            raise DomainError("rho must lie in [0, 1)")
        if not 0.0 <= self.s <= 1.0:
            raise DomainError("s must lie in [0, 1]")
        if self.delta < 0.0:
            raise DomainError("delta must be >= 0")
        if self.alpha <= 0.5:
            raise DomainError("alpha must exceed 1/2")
        if self.sigma_perm is None:
            object.__setattr__(self, "sigma_perm", _fisher_yates(self.seed))
        perm = tuple(int(v) for v in self.sigma_perm)
        if sorted(perm) != list(range(1, BASIS_SIZE + 1)):
            raise DomainError(f"sigma_perm must be a permutation of 1..{BASIS_SIZE}")
        object.__setattr__(self, "sigma_perm", perm)

    def with_cell(self, *, n=None, rho=None, s=None, delta=None, seed=None) -> "DgpConfig":
        """Copy with grid-cell parameters substituted; keeps sigma_perm."""
        return replace(
            self,
            n=self.n if n is None else n,
            rho=self.rho if rho is None else rho,
            s=self.s if s is None else s,
            delta=self.delta if delta is None else delta,
            seed=self.seed if seed is None else seed,
            sigma_perm=self.sigma_perm,
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n, "K": self.K, "T": self.T,
                "alpha": self.alpha, "rho": self.rho, "noise": self.noise,
                "s": self.s, "delta": self.delta, "seed": self.seed,
                "sigma_perm": list(self.sigma_perm),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "DgpConfig":
        raw = json.loads(text)
        if "sigma_perm" in raw and raw["sigma_perm"] is not None:
            raw["sigma_perm"] = tuple(raw["sigma_perm"])
        return cls(**raw)


@dataclass(frozen=True)
class EquicorrelationRoot:
    """Sigma_rho^(1/2) = a*I + b*J for the equicorrelation matrix with
    off-diagonal rho."""

    a: float
    b: float
    K: int

    def apply(self, v: np.ndarray, axis: int = 1) -> np.ndarray:
        """Multiply along `axis` by a*I + b*J in O(K) per slice."""
        return self.a * v + self.b * v.sum(axis=axis, keepdims=True)

    def dense(self) -> np.ndarray:
        return self.a * np.eye(self.K) + self.b * np.ones((self.K, self.K))


def equicorrelation_root(K: int, rho: float) -> EquicorrelationRoot:
    """Closed-form symmetric PSD square root of the K x K equicorrelation
    matrix with off-diagonal entry rho."""
    if not 0.0 <= rho < 1.0:
        raise DomainError("rho must lie in [0, 1)")
    if K < 1:
        raise DomainError("K must be >= 1")
    a = np.sqrt(1.0 - rho)
    b = (np.sqrt(1.0 + (K - 1) * rho) - np.sqrt(1.0 - rho)) / K
    return EquicorrelationRoot(a=float(a), b=float(b), K=K)


def draw_scores(config: DgpConfig, run_index: int) -> np.ndarray:
    """I.i.d. scores g_{ikj}, shape (n, K, 50), from the configured law.

    The standardized chi-square(1) law is (G^2 - 1)/sqrt(2) for standard
    normal G, which has mean zero and variance one.
    """
    gen = rng.generator(config.seed, rng.TAG_SCORES, run_index)
    g = gen.standard_normal((config.n, config.K, BASIS_SIZE))
    if config.noise == "chisq1":
        g = (g * g - 1.0) / np.sqrt(2.0)
    return g


def generate_null(config: DgpConfig, run_index: int) -> DifferenceMatrix:
    """One null-hypothesis data set z (n x K x T) sampled at t_l = l/T."""
    points = np.arange(1, config.T + 1, dtype=np.float64) / config.T
    phi = basis_matrix(points, BASIS_SIZE)
    phi_sigma = phi[np.asarray(config.sigma_perm) - 1]
    coeff = np.arange(1, BASIS_SIZE + 1, dtype=np.float64) ** (-config.alpha)

    g = draw_scores(config, run_index)
    scaled = g.reshape(-1, BASIS_SIZE) * coeff
    v = (scaled @ phi_sigma).reshape(config.n, config.K, config.T)
    root = equicorrelation_root(config.K, config.rho)
    d = v if root.b == 0.0 else root.apply(v, axis=1)
    return DifferenceMatrix.from_z(d)


def mean_shift(config: DgpConfig) -> np.ndarray:
    """Per-channel alternative mean: delta on channels 1..floor(K*s)."""
    signal = int(np.floor(config.K * config.s))
    mu = np.zeros(config.K)
    mu[:signal] = config.delta
    return mu


def apply_alternative(z: DifferenceMatrix, config: DgpConfig) -> DifferenceMatrix:
    """Shift every subject's curve by the alternative mean."""
    if config.delta == 0.0:
        return z
    mu = mean_shift(config)
    return DifferenceMatrix.from_z(z.z + mu[None, :, None])
