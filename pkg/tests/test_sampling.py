import math
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from primset import (
    BoxFamily,
    BoxSpec,
    DomainError,
    SeededSampler,
    SizeGuardError,
    crt_blind_box,
    is_primitive,
    make_box,
    sample_pointset,
)
from primset.errors import ParseError, ShapeError
from primset.sampling import crt


def test_single_point_box():
    box = BoxSpec(3, 2, 1, [[5, -7, 2], [0, 0, 9]])
    for t in range(20):
        assert sample_pointset(box, SeededSampler(3), t) == ((5, -7, 2), (0, 0, 9))


def test_replay_is_deterministic():
    box = make_box("centered", 4, 3, 10**9)
    a = [sample_pointset(box, SeededSampler(42), t) for t in range(50)]
    b = [sample_pointset(box, SeededSampler(42), t) for t in reversed(range(50))]
    assert a == b[::-1]
    assert a != [sample_pointset(box, SeededSampler(43), t) for t in range(50)]


def test_uniform_frequencies():
    box = BoxSpec(1, 1, 10, [[0]])
    sampler = SeededSampler(7)
    trials = 10**5
    freq = Counter(sample_pointset(box, sampler, t)[0][0] for t in range(trials))
    sigma = math.sqrt(trials * 0.1 * 0.9)
    assert set(freq) == set(range(10))
    assert all(abs(c - trials / 10) < 5 * sigma for c in freq.values())


@settings(max_examples=100, deadline=None)
@given(
    d=st.integers(1, 5),
    m=st.integers(1, 4),
    n=st.integers(1, 10**30),
    offset=st.integers(-(10**40), 10**40),
    seed=st.integers(0, 2**64 - 1),
    trial=st.integers(0, 10**9),
)
def test_samples_stay_in_box(d, m, n, offset, seed, trial):
    box = BoxSpec(d, m, n, [[offset + k * i for i in range(d)] for k in range(m)])
    pts = sample_pointset(box, SeededSampler(seed), trial)
    assert box.contains(pts)


def test_make_box_examples():
    assert make_box("origin", 2, 1, 4).lower == ((0, 0),)
    assert make_box("centered", 2, 1, 5).lower == ((-2, -2),)
    assert make_box("poly", 2, 1, 10, degree=2).lower == ((100, -100),)
    assert make_box("poly", 2, 2, 3, degree=1).lower == ((3, -3), (-3, 3))
    assert make_box("explicit", 2, 1, 3, lower=[[7, 8]]).lower == ((7, 8),)
    with pytest.raises(DomainError):
        make_box("spiral", 2, 1, 3)
    with pytest.raises(ShapeError):
        make_box("explicit", 2, 2, 3, lower=[[7, 8]])


def test_poly_offsets_polynomially_bounded():
    for n in (1, 7, 100):
        box = make_box("poly", 3, 2, n, degree=3)
        assert all(abs(b) <= n**3 for row in box.lower for b in row)


def test_box_family_parse():
    assert BoxFamily.parse("poly:2") == BoxFamily("poly", degree=2)
    assert str(BoxFamily.parse("centered")) == "centered"
    with pytest.raises(ParseError):
        BoxFamily.parse("poly:x")
    with pytest.raises(ParseError):
        BoxFamily.parse("nope")


def test_box_family_from_file(tmp_path):
    path = tmp_path / "box.txt"
    path.write_text("# lower bounds\n1 2\n3 4\n")
    fam = BoxFamily.parse(f"file={path}")
    assert fam.box(2, 2, 5).lower == ((1, 2), (3, 4))


def test_crt_solver():
    assert crt([2, 3, 2], [3, 5, 7]) == 23


def test_crt_box_trivial():
    box = crt_blind_box(2, 1)
    assert box.lower == ((0, 0),)
    assert not is_primitive([box.lower[0]])


def test_crt_box_2x2_matches_worked_example():
    box = crt_blind_box(2, 2)
    assert box.lower == ((174, 20),)
    primes = {(174, 20): 2, (174, 21): 3, (175, 20): 5, (175, 21): 7}
    for p in box.points(0):
        assert all(x % primes[p] == 0 for x in p)


@pytest.mark.parametrize("d, n", [(2, 2), (2, 3), (2, 4), (3, 2), (2, 8), (3, 4)])
def test_crt_box_has_no_visible_points(d, n):
    box = crt_blind_box(d, n)
    pts = list(box.points(0))
    assert len(pts) == n**d
    assert all(math.gcd(*p) > 1 and not is_primitive([p]) for p in pts)


def test_crt_box_guards():
    with pytest.raises(SizeGuardError):
        crt_blind_box(2, 9)
    with pytest.raises(DomainError):
        crt_blind_box(1, 2)
    with pytest.raises(DomainError):
        make_box("crt", 2, 2, 2)
