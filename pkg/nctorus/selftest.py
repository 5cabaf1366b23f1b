"""
Seeded invariant suites. Every suite draws its own generator from
(seed, suite index), so results do not depend on how suites are scheduled.
"""

import dataclasses
import logging
import math
import sys
import typing as t
from multiprocessing import Pool

import numpy as np
from tqdm import tqdm

from nctorus import algebra, gauge, oracle, powers_rieffel
from nctorus.algebra import DeformationMatrix, TorusElement
from nctorus.config import RunConfig, worker_count


logger = logging.getLogger(__name__)

TRIALS = 25
RADIUS = 3

# Used when the run config leaves theta at zero
GENERIC_THETA = DeformationMatrix(1 / math.sqrt(2), (math.sqrt(5) - 1) / 2, 1 / math.pi)
ORACLE_REP = oracle.ClockShiftRep(n_rep=17, m=3)


@dataclasses.dataclass(frozen=True)
class SuiteResult:
    name: str
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance

    def as_dict(self) -> t.Dict[str, t.Any]:
        return {**dataclasses.asdict(self), "passed": self.passed}


@dataclasses.dataclass(frozen=True)
class SuiteContext:
    rng: np.random.Generator
    theta: DeformationMatrix
    n: int

    def element(self, kind: str = "general", radius: int = RADIUS) -> TorusElement:
        return algebra.random_element(self.rng, self.theta, self.n, radius=radius, kind=kind)

    def monomial(self, radius: int = 2) -> TorusElement:
        p = tuple(int(x) for x in self.rng.integers(-radius, radius + 1, size=3))
        return algebra.monomial(self.theta, self.n, p, np.exp(2j * np.pi * self.rng.random()))


def _rel(value: float, scale: float) -> float:
    return value / max(scale, 1e-300)


def suite_star_laws(ctx: SuiteContext) -> float:
    err = 0.0
    for _ in range(TRIALS):
        a, b = ctx.element(), ctx.element()
        z = complex(*ctx.rng.normal(size=2))
        scale = algebra.l1(a) * algebra.l1(b)
        product = algebra.adjoint(algebra.mul(a, b))
        err = max(err, _rel(algebra.distance(product, algebra.mul(algebra.adjoint(b), algebra.adjoint(a))), scale))
        err = max(err, _rel(algebra.distance(algebra.adjoint(algebra.adjoint(a)), a), algebra.l1(a)))
        scaled = algebra.adjoint(algebra.scale(z, a))
        err = max(err, _rel(algebra.distance(scaled, algebra.scale(z.conjugate(), algebra.adjoint(a))), abs(z) * algebra.l1(a)))
    return err


def suite_associativity(ctx: SuiteContext) -> float:
    err = 0.0
    for _ in range(TRIALS):
        a, b, c = ctx.element(), ctx.element(), ctx.element()
        left = algebra.mul(algebra.mul(a, b), c)
        right = algebra.mul(a, algebra.mul(b, c))
        err = max(err, _rel(algebra.distance(left, right), algebra.l1(a) * algebra.l1(b) * algebra.l1(c)))
    return err


def suite_traciality(ctx: SuiteContext) -> float:
    err = 0.0
    for _ in range(TRIALS):
        a, b = ctx.element(), ctx.element()
        diff = algebra.trace(algebra.mul(a, b)) - algebra.trace(algebra.mul(b, a))
        err = max(err, _rel(abs(diff), algebra.l1(a) * algebra.l1(b)))
    return err


def suite_trace_mul(ctx: SuiteContext) -> float:
    err = 0.0
    for _ in range(TRIALS):
        a, b = ctx.element(), ctx.element()
        diff = algebra.trace_mul(a, b) - algebra.trace(algebra.mul(a, b))
        err = max(err, _rel(abs(diff), algebra.l1(a) * algebra.l1(b)))
    return err


def suite_leibniz(ctx: SuiteContext) -> float:
    err = 0.0
    for _ in range(TRIALS):
        a, b = ctx.element(), ctx.element()
        scale = 2 * math.pi * 2 * RADIUS * algebra.l1(a) * algebra.l1(b)
        for axis in (1, 2, 3):
            left = algebra.derive(axis, algebra.mul(a, b))
            right = algebra.mul(algebra.derive(axis, a), b) + algebra.mul(a, algebra.derive(axis, b))
            err = max(err, _rel(algebra.distance(left, right), scale))
    return err


def suite_derivation_star(ctx: SuiteContext) -> float:
    err = 0.0
    for _ in range(TRIALS):
        a = ctx.element()
        for axis in (1, 2, 3):
            diff = algebra.distance(algebra.derive(axis, algebra.adjoint(a)), algebra.adjoint(algebra.derive(axis, a)))
            err = max(err, _rel(diff, 2 * math.pi * RADIUS * algebra.l1(a)))
            err = max(err, abs(algebra.trace(algebra.derive(axis, a))))
    return err


def _cocycle_scale(*elements: TorusElement) -> float:
    return (2 * math.pi * RADIUS) ** 3 * math.prod(algebra.l1(a) for a in elements)


def suite_closedness(ctx: SuiteContext) -> float:
    err = 0.0
    unit = algebra.one(ctx.theta, ctx.n)
    for _ in range(TRIALS):
        a1, a2, a3 = ctx.element(), ctx.element(), ctx.element()
        err = max(err, _rel(abs(algebra.cocycle(unit, a1, a2, a3)), _cocycle_scale(a1, a2, a3)))
    return err


def suite_cyclicity(ctx: SuiteContext) -> float:
    err = 0.0
    for _ in range(TRIALS):
        a0, a1, a2, a3 = (ctx.element() for _ in range(4))
        total = algebra.cocycle(a0, a1, a2, a3) + algebra.cocycle(a3, a0, a1, a2)
        err = max(err, _rel(abs(total), _cocycle_scale(a0, a1, a2, a3)))
    return err


def suite_oracle(ctx: SuiteContext) -> float:
    err = 0.0
    rep = ORACLE_REP
    oracle_ctx = dataclasses.replace(ctx, theta=rep.theta)
    for _ in range(TRIALS):
        a, b = oracle_ctx.element(), oracle_ctx.element()
        scale = algebra.l1(a) * algebra.l1(b)
        product = oracle.represent(algebra.mul(a, b), rep)
        expected = oracle.represent(a, rep) @ oracle.represent(b, rep)
        err = max(err, _rel(np.abs(product - expected).max(), scale))
        star = oracle.represent(algebra.adjoint(a), rep)
        err = max(err, _rel(np.abs(star - oracle.represent(a, rep).conj().T).max(), algebra.l1(a)))
        err = max(err, _rel(abs(oracle.oracle_trace(a, rep) - algebra.trace(a)), algebra.l1(a)))
    return err


def suite_gauge_variation(ctx: SuiteContext) -> float:
    err = 0.0
    for _ in range(TRIALS // 5):
        A = gauge.GaugePotential(tuple(ctx.element("skew", radius=2) for _ in range(3)))
        u = ctx.monomial()
        k = float(ctx.rng.normal())
        defect = gauge.gauge_variation_defect(A, u, k)
        err = max(err, _rel(defect, gauge.variation_scale(A, u, k)))
    return err


def suite_chern_conjugation(ctx: SuiteContext) -> float:
    cfg = powers_rieffel.PRConfig(trunc=16, samples=128)
    e = powers_rieffel.build_projection(cfg)
    base = gauge.chern2(e)
    err = 0.0
    for _ in range(3):
        p = tuple(int(x) for x in ctx.rng.integers(-2, 3, size=3))
        u = algebra.monomial(e.theta, e.n, p)
        conj = algebra.mul(algebra.mul(u, e), algebra.adjoint(u))
        err = max(err, abs(gauge.chern2(conj) - base))
    return err


# (name, suite, tolerance on its relative error)
SUITES: t.List[t.Tuple[str, t.Callable[[SuiteContext], float], float]] = [
    ("star_laws", suite_star_laws, 1e-14),
    ("associativity", suite_associativity, 1e-12),
    ("traciality", suite_traciality, 1e-13),
    ("trace_mul", suite_trace_mul, 1e-13),
    ("leibniz", suite_leibniz, 1e-13),
    ("derivation_star", suite_derivation_star, 1e-13),
    ("closedness", suite_closedness, 1e-12),
    ("cyclicity", suite_cyclicity, 1e-12),
    ("oracle", suite_oracle, 1e-12),
    ("gauge_variation", suite_gauge_variation, 1e-10),
    ("chern_conjugation", suite_chern_conjugation, 1e-10),
]


def worker_run_suite(args: t.Tuple[int, int, DeformationMatrix, int]) -> SuiteResult:
    """Worker used by multiprocessing pool."""
    index, seed, theta, n = args
    name, suite, tol = SUITES[index]
    ctx = SuiteContext(np.random.default_rng([seed, index]), theta, n)
    max_error = float(suite(ctx))
    logger.debug("suite %s: %.3e", name, max_error)
    return SuiteResult(name, max_error, tol)


def run_selftest(cfg: RunConfig, progress: bool = True) -> t.List[SuiteResult]:
    theta = cfg.theta if cfg.theta != DeformationMatrix() else GENERIC_THETA
    input_data = [(idx, cfg.seed, theta, cfg.n) for idx in range(len(SUITES))]

    workers = worker_count()
    results = []
    with tqdm(total=len(input_data), file=sys.stderr, disable=not progress) as bar:
        if workers == 1:
            for args in input_data:
                results.append(worker_run_suite(args))
                bar.update(1)
        else:
            with Pool(processes=min(workers, len(input_data))) as pool:
                for result in pool.imap(worker_run_suite, input_data):
                    results.append(result)
                    bar.update(1)
    return results
