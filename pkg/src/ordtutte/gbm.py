"""Monte Carlo check of the chain reduction against integrated GBM moments.

For ``f_s = exp((mu - sigma**2/2) s + sigma W_s)`` the n-th moment of
``I_t = int_0^t f_s ds`` equals ``n! * t**n * s_n(lambda_1..lambda_n)`` with
``lambda_i = t * (mu + (n - i) * sigma**2)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .reductions import s_n_via_generalized

CHUNK_PATHS = 1000


@dataclass(frozen=True)
class GbmParams:
    mu: float
    sigma: float
    t: float = 1.0
    steps: int = 2000
    paths: int = 100_000
    seed: int = 42

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError("t must be positive")
        if self.steps < 1 or self.paths < 1:
            raise ValueError("steps and paths must be at least 1")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


def simulate_integral(p: GbmParams) -> np.ndarray:
    """Trapezoidal ``int_0^t f_s ds`` per path, with exact Brownian increments.

    Paths are drawn in fixed-size chunks, each with its own child of the seed,
    so the samples depend only on ``p``.
    """
    h = p.t / p.steps
    grid = np.linspace(0.0, p.t, p.steps + 1)
    drift = (p.mu - 0.5 * p.sigma**2) * grid
    children = np.random.SeedSequence(p.seed).spawn(-(-p.paths // CHUNK_PATHS))
    out = np.empty(p.paths)
    for c, child in enumerate(children):
        lo = c * CHUNK_PATHS
        m = min(CHUNK_PATHS, p.paths - lo)
        rng = np.random.default_rng(child)
        w = np.zeros((m, p.steps + 1))
        np.cumsum(rng.standard_normal((m, p.steps)) * math.sqrt(h), axis=1, out=w[:, 1:])
        f = np.exp(drift + p.sigma * w)
        inner = f[:, 1:-1].sum(axis=1) + 0.5 * (f[:, 0] + f[:, -1])
        out[lo : lo + m] = p.t * inner / p.steps
    return out


def chain_lambdas(mu: float, sigma: float, t: float, n: int) -> list[float]:
    return [t * (mu + (n - i) * sigma**2) for i in range(1, n + 1)]


def moment_formula(mu: float, sigma: float, t: float, n: int) -> float:
    """``n! t**n s_n`` evaluated through the chain state sum.

    Raises ``SingularWeightError`` (or ``ValueError`` for a zero weight) when
    the chain weights are singular.
    """
    return math.factorial(n) * t**n * s_n_via_generalized(chain_lambdas(mu, sigma, t, n))


@dataclass
class MomentReport:
    n: int
    mc_mean: float
    mc_stderr: float
    formula_value: float
    z_score: float

    def to_dict(self) -> dict:
        return asdict(self)


def moment_vs_s_n(p: GbmParams, n: int, samples: np.ndarray | None = None) -> MomentReport:
    if n < 1:
        raise ValueError("moment order must be positive")
    formula = moment_formula(p.mu, p.sigma, p.t, n)
    if samples is None:
        samples = simulate_integral(p)
    x = samples**n
    mean = float(x.mean())
    stderr = float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else float("inf")
    z = abs(mean - formula) / stderr if stderr > 0 else (0.0 if mean == formula else float("inf"))
    return MomentReport(n, mean, stderr, formula, z)
