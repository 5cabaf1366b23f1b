"""
Gauge theory over M_N(A_θ): potentials, Chern-Simons action, curvature,
gauge transformations and the winding functional.

Potentials are skew-hermitian (A* = -A), the class preserved by
A -> u A u* + u ∂u*.
"""

import dataclasses
import logging
import math
import typing as t

from nctorus import algebra
from nctorus.algebra import TorusElement
from nctorus.errors import ArgumentError, PreconditionError


logger = logging.getLogger(__name__)

AXES = (1, 2, 3)

# Relative tolerance of the skew-hermiticity check on construction
SKEW_RTOL = 1e-12
UNITARY_TOL = 1e-10


@dataclasses.dataclass(frozen=True)
class GaugePotential:
    """(A1, A2, A3), all over the same algebra."""

    components: t.Tuple[TorusElement, TorusElement, TorusElement]
    tol: float = dataclasses.field(default=SKEW_RTOL, compare=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.components) != 3:
            raise ArgumentError(f"potential needs 3 components, got {len(self.components)}")
        object.__setattr__(self, "components", tuple(self.components))

        first = self.components[0]
        for comp in self.components[1:]:
            algebra.check_compatible(first, comp)
        for mu, comp in zip(AXES, self.components):
            scale = max(1.0, algebra.l1(comp))
            if not algebra.is_skew_hermitian(comp, self.tol * scale):
                raise PreconditionError(f"component A{mu} is not skew-hermitian")

    @classmethod
    def zero(cls, theta: algebra.DeformationMatrix, n: int) -> "GaugePotential":
        z = algebra.zero(theta, n)
        return cls((z, z, z))

    @property
    def theta(self) -> algebra.DeformationMatrix:
        return self.components[0].theta

    @property
    def n(self) -> int:
        return self.components[0].n

    def __getitem__(self, mu: int) -> TorusElement:
        """A_mu for mu in 1..3."""
        if mu not in AXES:
            raise ArgumentError(f"axis must be 1, 2 or 3, got {mu}")
        return self.components[mu - 1]

    def l1(self) -> float:
        return max(algebra.l1(comp) for comp in self.components)


def check_unitary(u: TorusElement, tol_u: float) -> float:
    defect = algebra.defect_unitary(u)
    if defect > tol_u:
        raise PreconditionError(f"u is not unitary: defect {defect:.3e} > {tol_u:.1e}", defect)
    return defect


def cs_action(A: GaugePotential, k: float) -> complex:
    """(k/4π) Σ ε_λμν trace(A_λ ∂_μA_ν + (2/3) A_λ A_μ A_ν)."""
    if not math.isfinite(k):
        raise ArgumentError(f"coupling must be finite, got {k}")

    def term(lam: int, mu: int, nu: int) -> complex:
        quadratic = algebra.trace_mul(A[lam], algebra.derive(mu, A[nu]))
        cubic = algebra.trace_mul(algebra.mul(A[lam], A[mu]), A[nu])
        return quadratic + 2 / 3 * cubic

    return k / (4 * math.pi) * algebra.epsilon_contraction(term)


def curvature(A: GaugePotential) -> t.Dict[t.Tuple[int, int], TorusElement]:
    """F_μν = ∂_μA_ν - ∂_νA_μ + [A_μ, A_ν] for all μ, ν in 1..3."""
    F = {}
    for mu in AXES:
        F[mu, mu] = algebra.zero(A.theta, A.n)
        for nu in AXES:
            if nu <= mu:
                continue
            linear = algebra.derive(mu, A[nu]) - algebra.derive(nu, A[mu])
            commutator = algebra.mul(A[mu], A[nu]) - algebra.mul(A[nu], A[mu])
            F[mu, nu] = linear + commutator
            F[nu, mu] = -F[mu, nu]
    return F


def gauge_transform(A: GaugePotential, u: TorusElement, tol_u: float = UNITARY_TOL) -> GaugePotential:
    """A_μ -> u A_μ u* + u ∂_μ(u*)."""
    algebra.check_compatible(A.components[0], u)
    defect = check_unitary(u, tol_u)
    u_star = algebra.adjoint(u)

    components = []
    for mu in AXES:
        conj = algebra.mul(algebra.mul(u, A[mu]), u_star)
        components.append(conj + algebra.mul(u, algebra.derive(mu, u_star)))

    # Skewness of the result degrades with the unitarity defect of u
    return GaugePotential(tuple(components), tol=SKEW_RTOL + 4 * defect)


def winding(u: TorusElement, tol_u: float = UNITARY_TOL) -> complex:
    """W[u] = (1/24π²) Σ ε_λμν trace(u ∂_λu* ∂_μu ∂_νu*)."""
    check_unitary(u, tol_u)
    u_star = algebra.adjoint(u)
    du = {mu: algebra.derive(mu, u) for mu in AXES}
    du_star = {mu: algebra.derive(mu, u_star) for mu in AXES}

    left = {lam: algebra.mul(u, du_star[lam]) for lam in AXES}
    right = {}

    def term(lam: int, mu: int, nu: int) -> complex:
        if (mu, nu) not in right:
            right[mu, nu] = algebra.mul(du[mu], du_star[nu])
        return algebra.trace_mul(left[lam], right[mu, nu])

    w = algebra.epsilon_contraction(term) / (24 * math.pi**2)
    logger.debug("winding over %d modes: %s", len(u), w)
    return w


def gamma(u: TorusElement, k: float, tol_u: float = UNITARY_TOL) -> complex:
    """
    Γ[u] = (k/12π) Σ ε_λμν trace(∂_λu ∂_μu* u ∂_νu*), the Chern-Simons action
    of the pure gauge u ∂u*. Equals 2πk W[u].
    """
    check_unitary(u, tol_u)
    u_star = algebra.adjoint(u)

    def term(lam: int, mu: int, nu: int) -> complex:
        left = algebra.mul(algebra.derive(lam, u), algebra.derive(mu, u_star))
        return algebra.trace_mul(left, algebra.mul(u, algebra.derive(nu, u_star)))

    return k / (12 * math.pi) * algebra.epsilon_contraction(term)


def gauge_variation_defect(
    A: GaugePotential, u: TorusElement, k: float, tol_u: float = UNITARY_TOL
) -> float:
    """|S(A^u) - S(A) - Γ[u]|."""
    transformed = gauge_transform(A, u, tol_u)
    variation = cs_action(transformed, k) - cs_action(A, k)
    return abs(variation - gamma(u, k, tol_u))


def variation_scale(A: GaugePotential, u: TorusElement, k: float) -> float:
    """Magnitude bound of the cubic terms entering the variation identity."""
    derivative = 2 * math.pi * max(1, u.support_radius()) * algebra.l1(u)
    return max(1.0, abs(k)) * (1 + A.l1() + derivative) ** 3


def chern2(e: TorusElement) -> complex:
    """(1/2iπ) trace(e (∂1e ∂2e - ∂2e ∂1e))."""
    d1, d2 = algebra.derive(1, e), algebra.derive(2, e)
    value = algebra.trace_mul(algebra.mul(e, d1), d2) - algebra.trace_mul(algebra.mul(e, d2), d1)
    return value / (2j * math.pi)
