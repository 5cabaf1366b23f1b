"""
Powers-Rieffel projection in A_θ, θ12 = α, and the unitaries built from it.

    e = U1 f(U2) + g(U2) + (U1 f(U2))*

with U1 h(U2) U1* = h(t + α)(U2). Expanding e² = e in powers of U1 gives

    f · f(t - α) = 0
    f · (g + g(t - α)) = f
    g² + f² + f(t + α)² = g

which the smooth bump below satisfies with g rising on [0, ε], equal to 1 on
[ε, α], falling as 1 - g(t - α) on [α, α + ε], and f = sqrt(g - g²) on the
falling window.
"""

import dataclasses
import logging
import typing as t

import numpy as np
from scipy import fft

from nctorus import algebra, kernel
from nctorus.algebra import DeformationMatrix, TorusElement
from nctorus.errors import ArgumentError, ConfigError, PreconditionError


logger = logging.getLogger(__name__)

# Pairings of the objects built here, with U1 U2 = exp(2iπα) U2 U1
CHERN_NUMBER = -1
SYMMETRIC_UNITARY_WINDING = 2 * CHERN_NUMBER
BOTT_UNITARY_WINDING = CHERN_NUMBER

TOL_PROJ = 1e-6


@dataclasses.dataclass(frozen=True)
class PRConfig:
    alpha: float = 0.25
    eps: float = 0.125
    trunc: int = 64
    samples: int = 1024

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 0.5:
            raise ConfigError(f"alpha must lie in (0, 1/2), got {self.alpha}")
        if not 0 < self.eps <= self.alpha:
            raise ConfigError(f"eps must lie in (0, alpha], got {self.eps}")
        if not self.eps < 1 - 2 * self.alpha:
            raise ConfigError(f"eps must be below 1 - 2 alpha, got {self.eps}")
        if self.trunc < 1:
            raise ConfigError(f"trunc must be positive, got {self.trunc}")
        if self.samples < 8 * self.trunc:
            raise ConfigError(f"samples must be at least 8 * trunc = {8 * self.trunc}, got {self.samples}")

    @property
    def theta(self) -> DeformationMatrix:
        return DeformationMatrix(theta12=self.alpha)


@dataclasses.dataclass(frozen=True)
class CircleFunction:
    """
    h(t) = Σ_k ĥ(k) exp(2iπkt), |k| <= trunc. coeffs[trunc + k] holds ĥ(k).
    """

    coeffs: np.ndarray
    real: bool = True

    def __post_init__(self) -> None:
        if len(self.coeffs) % 2 != 1:
            raise ArgumentError("coefficient array must have odd length")
        if self.real and not np.array_equal(self.coeffs[::-1], np.conj(self.coeffs)):
            raise ArgumentError("real-valued function needs ĥ(-k) = conj(ĥ(k))")

    @property
    def trunc(self) -> int:
        return len(self.coeffs) // 2

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.trunc, self.trunc + 1)

    def coefficient(self, k: int) -> complex:
        if abs(k) > self.trunc:
            return 0j
        return complex(self.coeffs[self.trunc + k])

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        waves = np.exp(2j * np.pi * np.multiply.outer(x, self.frequencies))
        values = waves @ self.coeffs
        return values.real if self.real else values

    def shifted(self, s: float) -> "CircleFunction":
        """t -> h(t + s)."""
        return CircleFunction(self.coeffs * kernel.unit_phase(self.frequencies * s), False)

    def to_element(self, theta: DeformationMatrix, p1: int = 0) -> TorusElement:
        """U1^p1 h(U2)."""
        modes = np.zeros((len(self.coeffs), 3), dtype=np.int64)
        modes[:, 0] = p1
        modes[:, 1] = self.frequencies
        return algebra.canonical(theta, 1, modes, self.coeffs.reshape(-1, 1, 1).astype(complex))


def conjugation_shift(alpha: float) -> float:
    """s with U1 h(U2) U1* = h(t + s)(U2) when U1 U2 = exp(2iπα) U2 U1."""
    return alpha


def smooth_step(x: np.ndarray) -> np.ndarray:
    """C^∞ step: 0 for x <= 0, 1 for x >= 1, σ(x) / (σ(x) + σ(1 - x)) between."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore"):
        rise = np.where(x > 0, np.exp(-1 / np.where(x > 0, x, 1)), 0.0)
        fall = np.where(x < 1, np.exp(-1 / np.where(x < 1, 1 - x, 1)), 0.0)
    return rise / (rise + fall)


def bump_profile(x: np.ndarray, cfg: PRConfig) -> t.Tuple[np.ndarray, np.ndarray]:
    """
    Closed-form (g(x), f(x)), x taken mod 1. g falls where its rise lands after
    one conjugation by U1, and f lives on that falling window, so that
    g + g(x - shift) = 1 on the support of f.
    """
    s = np.mod(np.asarray(x, dtype=float), 1.0)
    shift, eps = conjugation_shift(cfg.alpha), cfg.eps

    g = np.zeros_like(s)
    rising = s < eps
    g[rising] = smooth_step(s[rising] / eps)
    g[(s >= eps) & (s <= shift)] = 1.0
    falling = (s > shift) & (s < shift + eps)
    g[falling] = 1 - smooth_step((s[falling] - shift) / eps)

    f = np.zeros_like(s)
    f[falling] = np.sqrt(np.maximum(g[falling] - g[falling] ** 2, 0.0))
    return g, f


def bump_residuals(cfg: PRConfig) -> t.Dict[str, float]:
    """Projection conditions evaluated on the sample grid, before truncation."""
    x = np.arange(cfg.samples) / cfg.samples
    shift = conjugation_shift(cfg.alpha)
    g, f = bump_profile(x, cfg)
    g_back, f_back = bump_profile(x - shift, cfg)
    _, f_fwd = bump_profile(x + shift, cfg)

    return {
        "disjoint": float(np.max(np.abs(f * f_back))),
        "partition": float(np.max(np.abs(f * (g + g_back - 1)))),
        "idempotent": float(np.max(np.abs(g**2 + f**2 + f_fwd**2 - g))),
        "range": float(max(-g.min(), g.max() - 1, 0.0)),
    }


def fourier_coefficients(values: np.ndarray, trunc: int) -> np.ndarray:
    """ĥ(k), |k| <= trunc, of real samples on an equispaced grid, symmetrised."""
    spectrum = fft.fft(values) / len(values)
    k = np.arange(-trunc, trunc + 1)
    coeffs = spectrum[k % len(values)]
    return (coeffs + np.conj(coeffs[::-1])) / 2


def build_bump(cfg: PRConfig) -> t.Tuple[CircleFunction, CircleFunction]:
    """(g, f) truncated to |k| <= trunc, with ĝ(0) = alpha exactly."""
    x = np.arange(cfg.samples) / cfg.samples
    g_values, f_values = bump_profile(x, cfg)

    g_coeffs = fourier_coefficients(g_values, cfg.trunc)
    g_coeffs[cfg.trunc] = cfg.alpha
    f_coeffs = fourier_coefficients(f_values, cfg.trunc)

    logger.debug(
        "bump: alpha=%s eps=%s K=%d, tail |ĝ(K)|=%.2e |f̂(K)|=%.2e",
        cfg.alpha, cfg.eps, cfg.trunc, abs(g_coeffs[-1]), abs(f_coeffs[-1]),
    )
    return CircleFunction(g_coeffs), CircleFunction(f_coeffs)


def build_projection(cfg: PRConfig) -> TorusElement:
    g, f = build_bump(cfg)
    theta = cfg.theta
    lifted = f.to_element(theta, p1=1)
    return g.to_element(theta) + lifted + algebra.adjoint(lifted)


def projection_defect(e: TorusElement) -> float:
    """l1(e² - e)."""
    return algebra.distance(algebra.mul(e, e), e)


def check_projection(e: TorusElement, tol_proj: float) -> float:
    if not algebra.is_hermitian(e, 1e-12 * max(1.0, algebra.l1(e))):
        raise PreconditionError("e is not hermitian")
    defect = projection_defect(e)
    if defect > tol_proj:
        raise PreconditionError(f"e is not a projection: l1(e² - e) = {defect:.3e} > {tol_proj:.1e}", defect)
    return defect


def build_unitary(e: TorusElement, tol_proj: float = TOL_PROJ) -> TorusElement:
    """U = (U3 + U3*)/2 + (2e - 1)(U3 - U3*)/2 = e U3 + (1 - e) U3*."""
    check_projection(e, tol_proj)
    u3 = algebra.monomial(e.theta, e.n, (0, 0, 1))
    rest = algebra.one(e.theta, e.n) - e
    return algebra.mul(e, u3) + algebra.mul(rest, algebra.adjoint(u3))


def build_bott_unitary(e: TorusElement, tol_proj: float = TOL_PROJ) -> TorusElement:
    """(1 - e) + e U3."""
    check_projection(e, tol_proj)
    u3 = algebra.monomial(e.theta, e.n, (0, 0, 1))
    return algebra.one(e.theta, e.n) - e + algebra.mul(e, u3)


def unitary_derivative_residuals(e: TorusElement, u: TorusElement) -> t.Dict[str, float]:
    """
    l1 residuals of ∂1U = ∂1e (U3 - U3*), ∂2U = ∂2e (U3 - U3*) and
    U ∂3(U*) = 2iπ (1 - 2e) for U = build_unitary(e).
    """
    u3 = algebra.monomial(e.theta, e.n, (0, 0, 1))
    odd = u3 - algebra.adjoint(u3)
    unit = algebra.one(e.theta, e.n)

    residuals = {}
    for axis in (1, 2):
        expected = algebra.mul(algebra.derive(axis, e), odd)
        residuals[f"d{axis}"] = algebra.distance(algebra.derive(axis, u), expected)
    current = algebra.mul(u, algebra.derive(3, algebra.adjoint(u)))
    expected = 2j * np.pi * (unit - 2 * e)
    residuals["d3"] = algebra.distance(current, expected)
    return residuals


def power(u: TorusElement, n: int, radius: t.Optional[int] = None) -> TorusElement:
    """u^n by binary exponentiation."""
    if n < 1:
        raise ArgumentError(f"exponent must be positive, got {n}")
    result = None
    base = u
    while True:
        if n & 1:
            result = base if result is None else algebra.mul(result, base, radius)
        n >>= 1
        if not n:
            return result
        base = algebra.mul(base, base, radius)
