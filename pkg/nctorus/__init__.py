"""Gauge theory on the noncommutative 3-torus: algebra, Chern-Simons action,
Powers-Rieffel projection and winding numbers."""

from nctorus.algebra import DeformationMatrix, MultiIndex, TorusElement
from nctorus.errors import (
    ArgumentError,
    CompatibilityError,
    ConfigError,
    ElementFormatError,
    NcTorusError,
    PreconditionError,
)
from nctorus.gauge import GaugePotential
from nctorus.oracle import ClockShiftRep
from nctorus.powers_rieffel import CircleFunction, PRConfig
