"""
Clock-and-shift representation of A_θ for θ12 = m / n_rep, θ13 = θ23 = 0.

U1 -> C = diag(exp(2iπ j m / n_rep)), U2 -> S (S e_j = e_{j+1}), U3 -> exp(2iπφ).
Used as a brute-force reference for products, adjoints and traces.
"""

import dataclasses
import logging
import math

import numpy as np

from nctorus import algebra
from nctorus.algebra import TorusElement
from nctorus.errors import ArgumentError, PreconditionError


logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class ClockShiftRep:
    n_rep: int = 17
    m: int = 1
    phi: float = 0.0

    def __post_init__(self) -> None:
        if self.n_rep < 1:
            raise ArgumentError(f"n_rep must be positive, got {self.n_rep}")
        if math.gcd(self.m, self.n_rep) != 1:
            raise ArgumentError(f"gcd({self.m}, {self.n_rep}) must be 1")

    @property
    def theta(self) -> algebra.DeformationMatrix:
        return algebra.DeformationMatrix(theta12=self.m / self.n_rep)

    def clock(self, power: int = 1) -> np.ndarray:
        j = np.arange(self.n_rep)
        return np.diag(np.exp(2j * np.pi * np.mod(j * self.m * power, self.n_rep) / self.n_rep))

    def shift(self, power: int = 1) -> np.ndarray:
        return np.roll(np.eye(self.n_rep, dtype=complex), power, axis=0)

    def central(self, power: int = 1) -> complex:
        return complex(np.exp(2j * np.pi * np.mod(self.phi * power, 1.0)))

    def monomial(self, p1: int, p2: int, p3: int) -> np.ndarray:
        """Image of U1^p1 U2^p2 U3^p3."""
        return self.clock(p1) @ self.shift(p2) * self.central(p3)


def check_theta(a: TorusElement, rep: ClockShiftRep) -> None:
    if a.theta != rep.theta:
        raise PreconditionError(f"element has {a.theta}, representation needs {rep.theta}")


def represent(a: TorusElement, rep: ClockShiftRep) -> np.ndarray:
    """Σ_p a_p ⊗ C^p1 S^p2 exp(2iπ φ p3)."""
    check_theta(a, rep)
    size = a.n * rep.n_rep
    out = np.zeros((size, size), dtype=complex)
    for p, coeff in zip(a.modes, a.values):
        out += np.kron(coeff, rep.monomial(*map(int, p)))
    return out


def oracle_trace(a: TorusElement, rep: ClockShiftRep) -> complex:
    """
    Normalized matrix trace of the representation, averaged over
    φ = j / n_rep. Equals trace(a) when every |p_i| < n_rep.
    """
    check_theta(a, rep)
    if a.support_radius() >= rep.n_rep:
        raise PreconditionError(
            f"support radius {a.support_radius()} aliases in dimension {rep.n_rep}"
        )

    total = 0j
    for j in range(rep.n_rep):
        shifted = dataclasses.replace(rep, phi=j / rep.n_rep)
        total += np.trace(represent(a, shifted))
    return complex(total / rep.n_rep**2)
