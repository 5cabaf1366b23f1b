"""
Line-oriented text format for elements and gauge potentials.

Element file:

    nctorus v1 N=<n> theta=<θ12> <θ13> <θ23>
    p1 p2 p3 row col re im
    ...

One record per nonzero entry of a stored coefficient. Floats are written with
repr, which round-trips doubles exactly.

Potential manifest:

    A1=<path> A2=<path> A3=<path> k=<real>
"""

import logging
import math
import pathlib
import typing as t

import numpy as np

from nctorus import algebra, gauge
from nctorus.errors import ElementFormatError


logger = logging.getLogger(__name__)

MAGIC = "nctorus"
VERSION = "v1"


def dumps(a: algebra.TorusElement) -> str:
    th = a.theta
    lines = [f"{MAGIC} {VERSION} N={a.n} theta={th.theta12!r} {th.theta13!r} {th.theta23!r}"]
    for p, coeff in zip(a.modes, a.values):
        for row, col in zip(*np.nonzero(coeff)):
            z = coeff[row, col]
            lines.append(
                f"{p[0]} {p[1]} {p[2]} {row} {col} {float(z.real)!r} {float(z.imag)!r}"
            )
    return "\n".join(lines) + "\n"


def _parse_header(line: str) -> t.Tuple[int, algebra.DeformationMatrix]:
    fields = line.split()
    if len(fields) != 6 or fields[0] != MAGIC:
        raise ElementFormatError(1, f"expected '{MAGIC} {VERSION} N=<n> theta=<a> <b> <c>'")
    if fields[1] != VERSION:
        raise ElementFormatError(1, f"unsupported version {fields[1]}")
    if not fields[2].startswith("N=") or not fields[3].startswith("theta="):
        raise ElementFormatError(1, "malformed header fields")

    try:
        n = int(fields[2][2:])
        thetas = [float(fields[3][6:]), float(fields[4]), float(fields[5])]
    except ValueError as e:
        raise ElementFormatError(1, str(e)) from e
    if n < 1:
        raise ElementFormatError(1, f"matrix size must be positive, got {n}")
    if not all(math.isfinite(x) for x in thetas):
        raise ElementFormatError(1, "theta must be finite")
    return n, algebra.DeformationMatrix(*thetas)


def loads(text: str) -> algebra.TorusElement:
    """Parse an element; every invariant violation names the offending line."""
    lines = text.splitlines()
    if not lines:
        raise ElementFormatError(1, "empty input")
    n, theta = _parse_header(lines[0])

    coeffs: t.Dict[t.Tuple[int, int, int], np.ndarray] = {}
    seen = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != 7:
            raise ElementFormatError(lineno, f"expected 7 fields, got {len(fields)}")
        try:
            p1, p2, p3, row, col = (int(x) for x in fields[:5])
            z = complex(float(fields[5]), float(fields[6]))
        except ValueError as e:
            raise ElementFormatError(lineno, str(e)) from e

        if not algebra.is_finite(z):
            raise ElementFormatError(lineno, "coefficient is not finite")
        if not (0 <= row < n and 0 <= col < n):
            raise ElementFormatError(lineno, f"entry ({row}, {col}) outside {n}x{n}")
        key = (p1, p2, p3, row, col)
        if key in seen:
            raise ElementFormatError(lineno, f"duplicate entry {key}")
        seen.add(key)

        coeff = coeffs.setdefault((p1, p2, p3), np.zeros((n, n), dtype=complex))
        coeff[row, col] = z

    for p, coeff in coeffs.items():
        if not np.any(coeff):
            raise ElementFormatError(
                _first_line(lines, p), f"coefficient at {p} is the zero matrix"
            )

    return algebra.TorusElement.from_coeffs(theta, n, coeffs)


def _first_line(lines: t.List[str], p: t.Tuple[int, int, int]) -> int:
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split()
        if len(fields) >= 3 and tuple(int(x) for x in fields[:3]) == p:
            return lineno
    return 1


def save(a: algebra.TorusElement, path: t.Union[str, pathlib.Path]) -> None:
    pathlib.Path(path).write_text(dumps(a))
    logger.info("wrote %d modes to %s", len(a), path)


def load(path: t.Union[str, pathlib.Path]) -> algebra.TorusElement:
    a = loads(pathlib.Path(path).read_text())
    logger.info("read %d modes from %s", len(a), path)
    return a


def dump_manifest(paths: t.Sequence[str], k: float) -> str:
    a1, a2, a3 = paths
    return f"A1={a1} A2={a2} A3={a3} k={k!r}\n"


def parse_manifest(text: str) -> t.Tuple[t.List[str], float]:
    """Returns ([A1, A2, A3] paths, k)."""
    fields = {}
    for token in text.split():
        key, sep, value = token.partition("=")
        if not sep or key not in ("A1", "A2", "A3", "k") or key in fields:
            raise ElementFormatError(1, f"unexpected manifest token '{token}'")
        fields[key] = value
    if len(fields) != 4:
        raise ElementFormatError(1, "manifest needs A1, A2, A3 and k")
    try:
        k = float(fields["k"])
    except ValueError as e:
        raise ElementFormatError(1, str(e)) from e
    return [fields["A1"], fields["A2"], fields["A3"]], k


def save_potential(
    A: "gauge.GaugePotential", k: float, manifest: t.Union[str, pathlib.Path]
) -> None:
    """Writes <stem>.A1 .. <stem>.A3 next to the manifest; paths are stored relative."""
    manifest = pathlib.Path(manifest)
    names = []
    for mu in gauge.AXES:
        path = manifest.with_name(f"{manifest.stem}.A{mu}")
        save(A[mu], path)
        names.append(path.name)
    manifest.write_text(dump_manifest(names, k))


def load_potential(manifest: t.Union[str, pathlib.Path]) -> t.Tuple["gauge.GaugePotential", float]:
    manifest = pathlib.Path(manifest)
    paths, k = parse_manifest(manifest.read_text())
    components = tuple(load(manifest.parent / path) for path in paths)
    return gauge.GaugePotential(components), k
