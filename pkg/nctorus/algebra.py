"""
Smooth noncommutative 3-torus with matrix coefficients, M_N(A_θ).

An element is a finitely supported Fourier series

    a = Σ_p a_p U1^p1 U2^p2 U3^p3,      a_p ∈ M_N(C),

with U_i U_j = exp(2iπ θ_ij) U_j U_i. Monomials are kept in the canonical order
U1 U2 U3, which gives

    U^p U^q = exp(2iπ Σ_{i>j} θ_ij p_i q_j) U^{p+q}
    (U^p)*  = exp(2iπ Σ_{i>j} θ_ij p_i p_j) U^{-p}.
"""

import collections as co
import dataclasses
import functools
import logging
import math
import typing as t

import numpy as np
import numpy.typing as npt

from nctorus import kernel
from nctorus.errors import ArgumentError, CompatibilityError


logger = logging.getLogger(__name__)

# Coefficients with operator norm at or below PRUNE_RTOL * (largest norm) are dropped
PRUNE_RTOL = 1e-15

# (λ, μ, ν, ε_λμν) in lexicographic order, ε_123 = +1
EPSILON_TERMS = [
    (1, 2, 3, 1),
    (1, 3, 2, -1),
    (2, 1, 3, -1),
    (2, 3, 1, 1),
    (3, 1, 2, 1),
    (3, 2, 1, -1),
]

MultiIndex = co.namedtuple("MultiIndex", ["p1", "p2", "p3"])


@dataclasses.dataclass(frozen=True)
class DeformationMatrix:
    """Antisymmetric θ, stored by its upper triangle."""

    theta12: float = 0.0
    theta13: float = 0.0
    theta23: float = 0.0

    @classmethod
    def from_matrix(cls, matrix: npt.ArrayLike) -> "DeformationMatrix":
        m = np.asarray(matrix, dtype=float)
        if m.shape != (3, 3):
            raise ArgumentError(f"theta must be 3x3, got shape {m.shape}")
        if np.any(m != -m.T):
            raise ArgumentError("theta must be antisymmetric with zero diagonal")
        return cls(float(m[0, 1]), float(m[0, 2]), float(m[1, 2]))

    @functools.cached_property
    def matrix(self) -> np.ndarray:
        m = np.zeros((3, 3))
        m[0, 1], m[0, 2], m[1, 2] = self.theta12, self.theta13, self.theta23
        m -= m.T
        m.flags.writeable = False
        return m

    def __str__(self) -> str:
        return f"theta=({self.theta12!r}, {self.theta13!r}, {self.theta23!r})"


class TorusElement:
    """
    Immutable element of M_N(A_θ). Modes are stored sorted lexicographically
    with no zero coefficient.
    """

    def __init__(
        self, theta: DeformationMatrix, n: int, modes: np.ndarray, values: np.ndarray
    ) -> None:
        self.theta = theta
        self.n = n
        self.modes = modes
        self.values = values
        self.modes.flags.writeable = False
        self.values.flags.writeable = False

    @classmethod
    def from_coeffs(
        cls, theta: DeformationMatrix, n: int, coeffs: t.Mapping[t.Tuple[int, int, int], t.Any]
    ) -> "TorusElement":
        """Build from {(p1, p2, p3): n×n matrix}; scalars are allowed when n == 1."""
        if n < 1:
            raise ArgumentError(f"matrix size must be positive, got {n}")

        modes = np.zeros((len(coeffs), 3), dtype=np.int64)
        values = np.zeros((len(coeffs), n, n), dtype=complex)
        for idx, (p, coeff) in enumerate(coeffs.items()):
            if len(p) != 3:
                raise ArgumentError(f"mode must be a triple, got {p}")
            matrix = np.asarray(coeff, dtype=complex)
            if matrix.ndim == 0 and n == 1:
                matrix = matrix.reshape(1, 1)
            if matrix.shape != (n, n):
                raise ArgumentError(f"coefficient at {p} has shape {matrix.shape}, expected {(n, n)}")
            modes[idx] = p
            values[idx] = matrix
        return canonical(theta, n, modes, values)

    @property
    def coeffs(self) -> t.Dict[MultiIndex, np.ndarray]:
        return {MultiIndex(*map(int, p)): v.copy() for p, v in zip(self.modes, self.values)}

    def coefficient(self, p: t.Tuple[int, int, int]) -> np.ndarray:
        """Coefficient at mode p (zero matrix when not stored)."""
        hits = np.nonzero(np.all(self.modes == np.asarray(p), axis=1))[0]
        if len(hits) == 0:
            return np.zeros((self.n, self.n), dtype=complex)
        return self.values[hits[0]].copy()

    def support_radius(self) -> int:
        if len(self.modes) == 0:
            return 0
        return int(np.abs(self.modes).max())

    def is_zero(self) -> bool:
        return len(self.modes) == 0

    @functools.cached_property
    def rods(self) -> t.List[kernel.Rod]:
        return kernel.split_rods(self.modes, self.values)

    def __len__(self) -> int:
        return len(self.modes)

    def __add__(self, other: "TorusElement") -> "TorusElement":
        return add(self, other)

    def __sub__(self, other: "TorusElement") -> "TorusElement":
        return add(self, scale(-1, other))

    def __neg__(self) -> "TorusElement":
        return scale(-1, self)

    def __mul__(self, other: t.Any) -> "TorusElement":
        if isinstance(other, TorusElement):
            return mul(self, other)
        return scale(other, self)

    def __rmul__(self, other: t.Any) -> "TorusElement":
        return scale(other, self)

    def __repr__(self) -> str:
        return f"TorusElement(n={self.n}, {self.theta}, modes={len(self)})"


def canonical(
    theta: DeformationMatrix,
    n: int,
    modes: np.ndarray,
    values: np.ndarray,
    radius: t.Optional[int] = None,
) -> TorusElement:
    """Merge duplicate modes, sort, truncate to radius and prune."""
    if len(modes) == 0:
        return zero(theta, n)

    if radius is not None:
        inside = np.all(np.abs(modes) <= radius, axis=1)
        modes, values = modes[inside], values[inside]
        if len(modes) == 0:
            return zero(theta, n)

    unique, inverse = np.unique(modes, axis=0, return_inverse=True)
    if len(unique) != len(modes):
        merged = np.zeros((len(unique), n, n), dtype=complex)
        np.add.at(merged, inverse.reshape(-1), values)
        modes, values = unique, merged
    else:
        order = np.lexsort((modes[:, 2], modes[:, 1], modes[:, 0]))
        modes, values = modes[order], values[order]

    norms = operator_norms(values)
    keep = norms > PRUNE_RTOL * norms.max()
    return TorusElement(theta, n, np.ascontiguousarray(modes[keep]), np.ascontiguousarray(values[keep]))


def operator_norms(values: np.ndarray) -> np.ndarray:
    """Spectral norm of each stacked coefficient matrix."""
    if len(values) == 0:
        return np.zeros(0)
    if values.shape[1] == 1:
        return np.abs(values[:, 0, 0])
    return np.linalg.norm(values, ord=2, axis=(1, 2))


def check_compatible(a: TorusElement, b: TorusElement) -> None:
    if a.theta != b.theta or a.n != b.n:
        raise CompatibilityError(
            f"elements are not composable: n={a.n} {a.theta} vs n={b.n} {b.theta}"
        )


def zero(theta: DeformationMatrix, n: int) -> TorusElement:
    return TorusElement(theta, n, np.zeros((0, 3), dtype=np.int64), np.zeros((0, n, n), dtype=complex))


def one(theta: DeformationMatrix, n: int) -> TorusElement:
    return monomial(theta, n, (0, 0, 0))


def monomial(
    theta: DeformationMatrix, n: int, p: t.Tuple[int, int, int], coeff: t.Any = 1
) -> TorusElement:
    """coeff * U1^p1 U2^p2 U3^p3; a scalar coeff means coeff * I_n."""
    matrix = np.asarray(coeff, dtype=complex)
    if matrix.ndim == 0:
        matrix = matrix * np.eye(n)
    return TorusElement.from_coeffs(theta, n, {tuple(p): matrix})


def generators(theta: DeformationMatrix, n: int = 1) -> t.Tuple[TorusElement, TorusElement, TorusElement]:
    """U1, U2, U3."""
    return tuple(monomial(theta, n, p) for p in ((1, 0, 0), (0, 1, 0), (0, 0, 1)))


def add(a: TorusElement, b: TorusElement) -> TorusElement:
    check_compatible(a, b)
    return canonical(
        a.theta, a.n, np.concatenate((a.modes, b.modes)), np.concatenate((a.values, b.values))
    )


def scale(z: complex, a: TorusElement) -> TorusElement:
    if z == 0:
        return zero(a.theta, a.n)
    return TorusElement(a.theta, a.n, a.modes.copy(), a.values * complex(z))


def mul(a: TorusElement, b: TorusElement, radius: t.Optional[int] = None) -> TorusElement:
    """
    Twisted product. With radius set, modes with some |p_i| > radius are
    dropped from the result.
    """
    check_compatible(a, b)
    if a.is_zero() or b.is_zero():
        return zero(a.theta, a.n)
    modes, values = kernel.twisted_convolution(a.theta.matrix, a.rods, b.rods, a.n)
    return canonical(a.theta, a.n, modes, values, radius=radius)


def adjoint(a: TorusElement) -> TorusElement:
    """(a*)_r = ω(r) (a_{-r})†."""
    phases = kernel.star_phase(a.theta.matrix, a.modes)
    values = np.conj(np.swapaxes(a.values, 1, 2)) * phases[:, None, None]
    return canonical(a.theta, a.n, -a.modes, values)


def derive(axis: int, a: TorusElement) -> TorusElement:
    """∂_axis, multiplying the mode-p coefficient by 2iπ p_axis."""
    if axis not in (1, 2, 3):
        raise ArgumentError(f"axis must be 1, 2 or 3, got {axis}")
    factors = 2j * np.pi * a.modes[:, axis - 1]
    keep = factors != 0
    return TorusElement(
        a.theta, a.n, a.modes[keep].copy(), a.values[keep] * factors[keep][:, None, None]
    )


def trace(a: TorusElement) -> complex:
    """Matrix trace of the constant mode, so trace(one) = n."""
    return complex(np.trace(a.coefficient((0, 0, 0))))


def trace_mul(a: TorusElement, b: TorusElement) -> complex:
    """
    trace(a·b) without forming the product:
    Σ_p tr(a_p b_{-p}) exp(-2iπ Σ_{i>j} θ_ij p_i p_j).
    """
    check_compatible(a, b)
    if a.is_zero() or b.is_zero():
        return 0j

    idx_a, idx_b = kernel.match_modes(a.modes, -b.modes)
    if len(idx_a) == 0:
        return 0j

    phases = np.conj(kernel.star_phase(a.theta.matrix, a.modes[idx_a]))
    traces = np.einsum("mij,mji->m", a.values[idx_a], b.values[idx_b])
    return complex(np.sum(traces * phases))


def norms(a: TorusElement) -> t.Tuple[float, float]:
    """(l1, linf) of the coefficient operator norms; l1 bounds the C*-norm."""
    op = operator_norms(a.values)
    if len(op) == 0:
        return 0.0, 0.0
    return float(np.sum(op)), float(np.max(op))


def l1(a: TorusElement) -> float:
    return norms(a)[0]


def distance(a: TorusElement, b: TorusElement) -> float:
    """l1 norm of a - b."""
    return l1(add(a, scale(-1, b)))


def is_hermitian(a: TorusElement, tol: float) -> bool:
    return distance(a, adjoint(a)) <= tol


def is_skew_hermitian(a: TorusElement, tol: float) -> bool:
    return l1(add(a, adjoint(a))) <= tol


def defect_unitary(a: TorusElement) -> float:
    """max(l1(a a* - 1), l1(a* a - 1))."""
    star = adjoint(a)
    unit = one(a.theta, a.n)
    return max(distance(mul(a, star), unit), distance(mul(star, a), unit))


def is_unitary(a: TorusElement, tol: float) -> bool:
    return defect_unitary(a) <= tol


def truncate(a: TorusElement, radius: int) -> TorusElement:
    """Drop every mode with some |p_i| > radius."""
    inside = np.all(np.abs(a.modes) <= radius, axis=1)
    return TorusElement(a.theta, a.n, a.modes[inside].copy(), a.values[inside].copy())


def exp_taylor(a: TorusElement, degree: int = 20) -> TorusElement:
    """Degree-limited Taylor polynomial of exp(a), evaluated by Horner's rule."""
    unit = one(a.theta, a.n)
    result = unit
    for k in range(degree, 0, -1):
        result = add(unit, scale(1 / k, mul(a, result)))
    return result


def random_element(
    rng: np.random.Generator,
    theta: DeformationMatrix,
    n: int = 1,
    radius: int = 3,
    terms: int = 8,
    kind: str = "general",
) -> TorusElement:
    """
    Random element with support inside the cube of given radius.
    kind: "general", "hermitian" or "skew" (skew-hermitian).
    """
    modes = rng.integers(-radius, radius + 1, size=(terms, 3))
    values = rng.normal(size=(terms, n, n)) + 1j * rng.normal(size=(terms, n, n))
    a = canonical(theta, n, modes.astype(np.int64), values)
    if kind == "hermitian":
        return scale(0.5, add(a, adjoint(a)))
    if kind == "skew":
        return scale(0.5, add(a, scale(-1, adjoint(a))))
    if kind != "general":
        raise ArgumentError(f"unknown kind: {kind}")
    return a


def cocycle(a0: TorusElement, a1: TorusElement, a2: TorusElement, a3: TorusElement) -> complex:
    """Φ(a0, a1, a2, a3) = Σ ε_λμν trace(a0 ∂_λa1 ∂_μa2 ∂_νa3)."""
    total = 0j
    for lam, mu, nu, sign in EPSILON_TERMS:
        left = mul(a0, derive(lam, a1))
        right = mul(derive(mu, a2), derive(nu, a3))
        total += sign * trace_mul(left, right)
    return total


def epsilon_contraction(term: t.Callable[[int, int, int], complex]) -> complex:
    """Σ_λμν ε_λμν term(λ, μ, ν), summed in lexicographic order."""
    total = 0j
    for lam, mu, nu, sign in EPSILON_TERMS:
        total += sign * term(lam, mu, nu)
    return total


def is_finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)
