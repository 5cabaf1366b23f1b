import numpy as np
import pytest

from nctorus import algebra, gauge, serialization
from nctorus.errors import ElementFormatError

from conftest import GENERIC_THETA


HEADER = "nctorus v1 N=2 theta=0.5 0.0 0.0"


def test_round_trip_is_exact(rng):
    a = algebra.random_element(rng, GENERIC_THETA, 2, radius=3, terms=10)
    b = serialization.loads(serialization.dumps(a))
    assert b.theta == a.theta and b.n == a.n
    np.testing.assert_array_equal(b.modes, a.modes)
    np.testing.assert_array_equal(b.values, a.values)


def test_header_format(theta):
    text = serialization.dumps(algebra.one(theta, 1))
    header, record = text.splitlines()
    assert header == f"nctorus v1 N=1 theta={theta.theta12!r} {theta.theta13!r} {theta.theta23!r}"
    assert record == "0 0 0 0 0 1.0 0.0"


def test_zero_element_has_header_only():
    text = serialization.dumps(algebra.zero(GENERIC_THETA, 3))
    assert len(text.splitlines()) == 1
    assert serialization.loads(text).is_zero()


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("nctorus v2 N=2 theta=0.5 0.0 0.0\n", 1),
        ("nctorus v1 N=0 theta=0.5 0.0 0.0\n", 1),
        ("nctorus v1 N=2 theta=nan 0.0 0.0\n", 1),
        ("torus v1 N=2 theta=0.5 0.0 0.0\n", 1),
        (f"{HEADER}\n0 0 0 0 0 1.0\n", 2),
        (f"{HEADER}\n0 0 0 0 0 1.0 0.0\n0 0 0 2 0 1.0 0.0\n", 3),
        (f"{HEADER}\n0 0 0 0 0 1.0 0.0\n0 0 0 0 0 2.0 0.0\n", 3),
        (f"{HEADER}\n1 0 0 0 1 inf 0.0\n", 2),
        (f"{HEADER}\n1 0 0 0 1 x 0.0\n", 2),
        (f"{HEADER}\n0 0 0 0 0 1.0 0.0\n1 2 3 0 1 0.0 0.0\n", 3),
    ],
)
def test_reader_reports_offending_line(text, line):
    with pytest.raises(ElementFormatError) as info:
        serialization.loads(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_file_round_trip(tmp_path, theta):
    u1, u2, _ = algebra.generators(theta, 2)
    a = u1 + 0.5j * u2
    path = tmp_path / "a.nct"
    serialization.save(a, path)
    assert algebra.distance(serialization.load(path), a) == 0


def test_potential_round_trip(tmp_path, rng, theta):
    A = gauge.GaugePotential(
        tuple(algebra.random_element(rng, theta, 2, radius=2, kind="skew") for _ in range(3))
    )
    manifest = tmp_path / "pot.manifest"
    serialization.save_potential(A, 3.0, manifest)

    assert manifest.read_text() == "A1=pot.A1 A2=pot.A2 A3=pot.A3 k=3.0\n"
    loaded, k = serialization.load_potential(manifest)
    assert k == 3.0
    for mu in (1, 2, 3):
        assert algebra.distance(loaded[mu], A[mu]) == 0


@pytest.mark.parametrize(
    "text",
    ["A1=a A2=b A3=c", "A1=a A2=b A3=c k=one", "A1=a A2=b A3=c A4=d k=1", "A1=a A1=b A3=c k=1"],
)
def test_manifest_errors(text):
    with pytest.raises(ElementFormatError):
        serialization.parse_manifest(text)
