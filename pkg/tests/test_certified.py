import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rootcone import certified as C
from rootcone.cone import solve_strict, verify_witness
from rootcone.errors import GridExhausted, StrategyUnavailable
from rootcone.exact import RatVec
from rootcone.rcl import build_instance, eta_rows, make_setup, verify_all
from rootcone.weyl import to_signed_permutation


def test_b_for_n2():
    assert C.a_vector(2, frozenset({1})) == (0, 0)
    b = C.b_vector(2, frozenset({1}))
    assert b == (5, 0)
    # mean inequality for i = 1 with tau = id: (5 + 5)/2 > (5 + 0)/2
    assert Fraction(b[0] + b[0], 2) > Fraction(sum(b), 2)


def test_identity_has_empty_delta():
    s = make_setup("A2", "flip")
    td = C.tau_of(s.group[0])
    # tau = w0 is the long element, which the construction excludes
    assert td.tau == (2, 1, 0)
    assert C.delta_set(td) == frozenset()


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_b_invariants_and_delta_is_support(n):
    s = make_setup(f"A{n - 1}", "flip")
    for w in s.group:
        td = C.tau_of(w)
        delta = C.delta_set(td)
        assert delta == {i + 1 for i in build_instance(s, w).support}
        a = C.a_vector(n, delta)
        b = C.b_vector(n, delta)
        assert all(abs(v) <= 2 for v in a)
        assert b[-1] == 0 and all(b[j] > b[j + 1] for j in range(n - 1))


@given(st.permutations(list(range(6))))
def test_delta_duality(perm):
    td = C.TauData(tuple(perm))
    inv = C.TauData(td.inverse)
    n = td.n
    d, dinv = C.delta_set(td), C.delta_set(inv)
    for i in range(1, n):
        assert (i in d) == ((n - i) in dinv)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_rows_reproduce_nc_formula(n):
    s = make_setup(f"A{n - 1}", "flip")
    for w in s.group.elements[1:]:
        x, _ = C.witness_type_a(w)
        td = C.tau_of(w)
        b = C.b_vector(n, C.delta_set(td))
        nc = C.nc_values(b, td)
        assert eta_rows(s, w) @ x == RatVec(Fraction(v, n) for v in nc)
        for i in C.delta_set(td):
            lhs = Fraction(sum(b[:i]) + sum(b[td.inverse[k]] for k in range(i)), 2 * i)
            assert lhs > Fraction(sum(b), n)


def test_random_tau_n5_passes_verification():
    s = make_setup("A4", "flip")
    rng = random.Random(5)
    for w in rng.sample(s.group.elements[1:], 25):
        inst = build_instance(s, w)
        x, _ = C.witness_type_a(w)
        assert all(v > 0 for v in verify_witness(inst.problem, x))


def _find(setup, pred):
    for w in setup.group.elements[1:]:
        sp = to_signed_permutation(setup.datum, w)
        supp = build_instance(setup, w).support
        if pred(sp, supp):
            return w, sp, supp
    raise LookupError


def test_type_d_empty_inversion_branch():
    s = make_setup("D4", "swap")
    w, sp, supp = _find(s, lambda sp, supp: not sp.inverted_set() and 2 in supp)
    ((i, rows),) = C.type_d_alternatives(sp, supp)
    assert i is None and [0, 0, 1, -1] in rows  # c3 > c4


def test_type_d_last_row_with_two_sign_changes():
    s = make_setup("D4", "swap")
    count = 0
    rng = random.Random(0)
    for w in s.group.elements[1:]:
        sp = to_signed_permutation(s.datum, w)
        supp = build_instance(s, w).support
        if sp.eta[3] != -1 or 3 not in supp:
            continue
        count += 1
        row = eta_rows(s, w).row(3)
        # a positive combination of the e_i: positive once c3 < c4
        for _ in range(10):
            x = [Fraction(rng.randint(1, 9)) for _ in range(4)]
            x[3] = x[2] + rng.randint(1, 5)
            assert row.dot(RatVec(x)) > 0
        for _, rows in C.type_d_alternatives(sp, supp):
            assert [0, 0, -1, 1] in rows
    assert count > 0


@pytest.mark.parametrize("ell", [3, 4, 5])
def test_type_d_recipe_full(ell):
    s = make_setup(f"D{ell}", "swap")
    certs, summary = verify_all(s, "all")
    assert summary.failed == 0 and summary.verified == len(s.group) - 1
    assert all(c.strategy == "certified" for c in certs[1:])


def test_triality_fixed_first_coordinate_branch():
    s = make_setup("D4", "triality")
    w, sp, supp = _find(s, lambda sp, supp: sp.sigma[0] == 0 and sp.eta[0] == 1 and 3 in supp)
    rows = C.triality_constraints(sp, supp)
    assert [-1, 0, 0, 1] in rows  # c1 < c4
    assert 0 not in supp  # w fixes varpi_1, so no row pairs varpi_1
    assert [1, 0, -1, 0] not in rows


def test_triality_middle_row_direction():
    s = make_setup("D4", "triality")
    w = s.group.from_word((2,))
    inst = build_instance(s, w)
    # the single row is (c3 - c4)/2
    assert list(inst.problem.rows.row(0)) == [0, 0, Fraction(1, 2), Fraction(-1, 2)]
    assert C.triality_constraints(to_signed_permutation(s.datum, w), inst.support) == [[0, 0, 1, -1]]


def test_triality_full_with_lp_and_grid5():
    s = make_setup("D4", "triality")
    certs, summary = verify_all(s, "all", grid_max=5)
    assert len(certs) == 192 and summary.failed == 0
    assert all(c.checked_by == ("certified", "lp", "grid") for c in certs[1:])


@pytest.mark.parametrize("name", ["A2xA2", "A1xA1xA1", "A1xA1"])
def test_cycle_products(name):
    s = make_setup(name, "cycle")
    certs, summary = verify_all(s, "all")
    assert summary.failed == 0 and all(c.strategy == "certified" for c in certs[1:])


def test_available_dispatch():
    assert C.available(make_setup("A3", "flip")) == "type_a"
    assert C.available(make_setup("A3")) is None
    assert C.available(make_setup("D4", "triality")) == "triality"
    assert C.available(make_setup("B3")) is None
    s = make_setup("B3")
    with pytest.raises(StrategyUnavailable):
        C.certified_witness(s, build_instance(s, s.group[1]))


def test_e6_grid_exhaustion_falls_back():
    s = make_setup("E6", "e6")
    idx = list(range(0, len(s.group), 997))
    inst = build_instance(s, s.group[idx[3]])
    with pytest.raises(GridExhausted):
        C.witness_e6(inst, 1)
    certs, summary = verify_all(s, "certified", grid_max=1, indices=idx)
    assert summary.failed == 0
    lp = [c for c in certs if c.strategy == "lp"]
    assert lp and all("exhausted" in c.note for c in lp)
    for c in lp:
        assert solve_strict(build_instance(s, s.group.from_word(c.word)).problem).feasible
