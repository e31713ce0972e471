"""Normal and binomial primitives plus reproducible random streams.

Every other module goes through here for Phi, phi, normal quantiles,
binomial masses and random draws, so accuracy and reproducibility are
pinned in one place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _check_finite(x) -> None:
    if not np.all(np.isfinite(x)):
        raise ValueError(f"non-finite input: {x!r}")


def norm_cdf(x):
    """Standard normal distribution function Phi(x).

    Accepts a float or an array. Computed from the complementary error
    function, so both tails keep full relative precision.
    """
    _check_finite(x)
    out = special.ndtr(x)
    return float(out) if np.ndim(out) == 0 else out


def norm_pdf(x):
    """Standard normal density phi(x)."""
    _check_finite(x)
    out = np.exp(-0.5 * np.square(x)) / _SQRT_2PI
    return float(out) if np.ndim(out) == 0 else out


def norm_quantile(p: float) -> float:
    """Inverse of :func:`norm_cdf` on the open interval (0, 1).

    Starts from the Cephes inverse and applies one Newton step against
    :func:`norm_cdf`, so ``norm_cdf(norm_quantile(p)) == p`` to ~1e-15.
    """
    if not (0.0 < p < 1.0) or not math.isfinite(p):
        raise ValueError(f"p must lie strictly between 0 and 1, got {p!r}")
    x = float(special.ndtri(p))
    dens = math.exp(-0.5 * x * x) / _SQRT_2PI
    if dens > 0.0:
        x -= (float(special.ndtr(x)) - p) / dens
    return x


def z_upper(level: float) -> float:
    """``z_{1-level}``, the upper ``level`` critical value."""
    return norm_quantile(1.0 - level)


# vectorised helpers without input validation, for quadrature integrands
ndtr = special.ndtr


def npdf(x):
    return np.exp(-0.5 * np.square(x)) / _SQRT_2PI


def _validate_binom(n: int, p: float) -> None:
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0, 1], got {p!r}")


def binom_pmf(x, n: int, p: float):
    """Binomial mass ``C(n, x) p^x (1-p)^(n-x)``, evaluated in log space.

    ``x`` may be an integer or an integer array; every entry must lie in
    ``0..n``. Degenerate ``p`` in {0, 1} gives exact point masses.
    """
    _validate_binom(n, p)
    xa = np.asarray(x)
    if np.any(xa < 0) or np.any(xa > n) or np.any(xa != np.floor(xa)):
        raise ValueError(f"x must be integers in 0..{n}")
    xa = xa.astype(float)
    log_c = special.gammaln(n + 1.0) - special.gammaln(xa + 1.0) - special.gammaln(n - xa + 1.0)
    # xlogy / xlog1py give 0*log(0) = 0, which handles p in {0, 1}
    logp = log_c + special.xlogy(xa, p) + special.xlog1py(n - xa, -p)
    out = np.exp(logp)
    return float(out) if out.ndim == 0 else out


def binom_pmf_vector(n: int, p: float) -> np.ndarray:
    """Full mass vector ``[g(0, n, p), ..., g(n, n, p)]``."""
    return binom_pmf(np.arange(n + 1), n, p)


@dataclass
class RngStream:
    """A reproducible random stream identified by ``(seed, stream_id)``.

    Streams are Philox (counter-based) generators keyed through
    ``numpy.random.SeedSequence(seed, spawn_key=(stream_id,))``, so any two
    distinct stream ids give independent substreams and the same pair
    always replays the same draws.

    Single-owner mutable state: hand it to a worker, don't share it.
    """

    seed: int
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if int(v) != v or not (0 <= v < 2**64):
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {v!r}")
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        self.generator = np.random.Generator(np.random.Philox(ss))

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self.generator.normal(loc, scale, size)

    def uniform(self, size=None):
        return self.generator.random(size)

    def binomial(self, n, p, size=None):
        return self.generator.binomial(n, p, size)


def sample_binomial(rng: RngStream, n: int, p: float, size=None):
    """Binomial draw(s) from ``rng``.

    numpy's sampler uses inversion when ``n*min(p, 1-p) < 30`` and the BTPE
    acceptance/rejection scheme otherwise.
    """
    _validate_binom(n, p)
    return rng.binomial(n, p, size)
