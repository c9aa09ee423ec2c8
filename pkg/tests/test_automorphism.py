from fractions import Fraction

import pytest

from rootcone.automorphism import (
    averaged_root,
    fixed_subspace_basis,
    make_automorphism,
    perm_orbits,
    standard_automorphism,
    validate,
)
from rootcone.exact import RatMat
from rootcone.root_datum import build
from rootcone.weyl import longest_element

PAIRS = [
    ("A1", "identity", 1), ("A2", "flip", 2), ("A5", "flip", 2), ("D4", "swap", 2), ("D5", "swap", 2),
    ("D4", "triality", 3), ("E6", "e6", 2), ("A2xA2", "cycle", 2), ("A1xA1xA1", "cycle:3", 3),
    ("F4", "identity", 1),
]


@pytest.mark.parametrize("name,auto,order", PAIRS)
def test_standard_automorphisms(name, auto, order):
    d = build(name)
    th = standard_automorphism(d, auto)
    assert th.order == order
    assert validate(th)
    # induced map has the stated order and inverse
    assert (th.induced ** order).is_identity()
    assert (th.induced @ th.inverse_induced).is_identity()
    for i, p in enumerate(th.perm):
        assert th.apply(d.simple_roots[i]) == d.simple_roots[p]


def test_identity_induces_identity():
    d = build("B3")
    th = standard_automorphism(d, "identity")
    assert th.perm == (0, 1, 2) and th.induced.is_identity()
    assert averaged_root(th, 1) == d.simple_roots[1]


def test_e6_involution_perm():
    th = standard_automorphism(build("E6"), "e6")
    assert [p + 1 for p in th.perm] == [6, 2, 5, 4, 3, 1]
    assert th.perm[1] == 1 and th.perm[3] == 3


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_flip_is_minus_longest_on_root_span(n):
    d = build(f"A{n}")
    th = standard_automorphism(d, "flip")
    w0 = longest_element(d).action
    proj = d.span_projector
    assert th.induced @ proj == w0.scale(-1) @ proj


def test_orbit_averages():
    d = build("D4")
    th = standard_automorphism(d, "triality")
    a = d.simple_roots
    assert averaged_root(th, 0) == (a[0] + a[2] + a[3]) / 3
    d3 = build("A3")
    f = standard_automorphism(d3, "flip")
    assert averaged_root(f, 0) == (d3.simple_roots[0] + d3.simple_roots[2]) * Fraction(1, 2)


@pytest.mark.parametrize("name,auto", [(n, a) for n, a, _ in PAIRS])
def test_fixed_space_dimension_is_orbit_count(name, auto):
    d = build(name)
    th = standard_automorphism(d, auto)
    basis = fixed_subspace_basis(th)
    assert len(basis) == len(perm_orbits(th.perm))
    for v in basis:
        assert th.apply(v) == v


def test_a2_flip_fixed_space():
    d = build("A2")
    (v,) = fixed_subspace_basis(standard_automorphism(d, "flip"))
    target = d.fundamental_weights[0] + d.fundamental_weights[1]
    # v spans the same line
    ratio = {v[k] / target[k] for k in range(3) if target[k] != 0}
    assert len(ratio) == 1 and all(v[k] == 0 for k in range(3) if target[k] == 0)


def test_d4_triality_fixed_space_dimension():
    assert len(fixed_subspace_basis(standard_automorphism(build("D4"), "triality"))) == 2


def test_invalid_permutations():
    d = build("A3")
    assert not validate(make_automorphism(d, (1, 0, 2)))
    with pytest.raises(ValueError):
        standard_automorphism(d, "triality")
    with pytest.raises(ValueError):
        make_automorphism(d, (0, 0, 1))
    with pytest.raises(ValueError):
        standard_automorphism(build("A2xA3"), "cycle")


def test_json_form():
    th = standard_automorphism(build("D4"), "triality")
    assert th.to_json() == {"name": "triality", "perm": [3, 2, 4, 1], "order": 3}
    assert th.inverse_induced == th.induced @ th.induced
    assert isinstance(th.induced, RatMat)
