import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rootcone import rcl
from rootcone.cone import StrictConeProblem, verify_witness
from rootcone.errors import CounterexampleFound, StrategyUnavailable
from rootcone.exact import RatMat, RatVec, dot
from rootcone.rcl import (
    RclInstance,
    build_instance,
    coefficient_sum,
    eta_rows,
    eta_rows_ambient,
    gamma_pairings,
    gamma_shift_scale,
    gamma_vector,
    gamma_weight_coords_batch,
    make_setup,
    product_reduction,
    sum_coeffs_check,
    t_cone_check,
    verify_all,
    verify_element,
)
from rootcone.root_datum import build
from rootcone.weyl import weyl_group

PAIRS = [("A1", "identity"), ("A2", "flip"), ("A3", "flip"), ("B3", "identity"), ("G2", "identity"),
         ("D4", "swap"), ("D4", "triality"), ("A2xA2", "cycle"), ("C3", "identity")]


@pytest.mark.parametrize("name,auto", PAIRS)
def test_rows_match_ambient_oracle(name, auto):
    s = make_setup(name, auto)
    for w in s.group.elements[:: max(1, len(s.group) // 60)]:
        assert eta_rows(s, w) == eta_rows_ambient(s, w)


@pytest.mark.parametrize("name,auto", PAIRS)
def test_scaled_rows_match_exact(name, auto):
    s = make_setup(name, auto)
    n, den = s.eta_rows_scaled
    for k in range(0, len(s.group), max(1, len(s.group) // 30)):
        exact = eta_rows(s, s.group[k])
        assert exact == RatMat([[Fraction(int(v), den) for v in row] for row in n[k]])


def test_a1_single_row():
    s = make_setup("A1")
    inst = build_instance(s, s.group.from_word((0,)))
    # lam - s1 lam = 2 lam and <2 x varpi, varpi^vee> = x
    assert inst.support == (0,)
    assert inst.problem.rows == RatMat([[1]])


def test_identity_is_vacuous():
    for name, auto in PAIRS:
        s = make_setup(name, auto)
        inst = build_instance(s, s.group[0])
        assert inst.vacuous
        cert = verify_element(s, s.group[0])
        assert cert.vacuous and cert.status == "vacuous" and cert.witness is None


def test_gamma_identity_and_trivial_theta():
    s = make_setup("A3", "flip")
    d = s.datum
    rho = sum(d.positive_roots, RatVec.zeros(d.ambient_dim)) * Fraction(1, 2)
    assert gamma_vector(s, s.group[0]) == rho - s.theta.inverse_induced @ rho
    t = make_setup("B3")
    for w in t.group.elements[:10]:
        assert gamma_vector(t, w).is_zero()


def test_gamma_a2_flip_coefficient_sum_zero():
    s = make_setup("A2", "flip")
    g = gamma_vector(s, s.group.from_word((0,)))
    assert not g.is_zero()
    assert coefficient_sum(s, g) == 0


@pytest.mark.parametrize("name,auto", [("A3", "flip"), ("D4", "triality"), ("D4", "swap"), ("A2xA2", "cycle")])
def test_gamma_batch_matches_ambient(name, auto):
    s = make_setup(name, auto)
    batch = gamma_weight_coords_batch(s)
    for k in range(0, len(s.group), 7):
        g = gamma_vector(s, s.group[k])
        assert s.datum.weight_coords(g) == RatVec(batch[k].tolist())


def test_strategies_agree_on_a2_flip_s1():
    s = make_setup("A2", "flip")
    w = s.group.from_word((0,))
    for strat in ("certified", "lp", "grid", "all"):
        c = verify_element(s, w, strat)
        assert c.status == "verified" and all(m > 0 for m in c.margins)
        inst = build_instance(s, w)
        assert all(v > 0 for v in verify_witness(inst.problem, c.witness))
    assert verify_element(s, w, "all").checked_by == ("certified", "lp", "grid")


def test_certified_unavailable_for_identity_on_b3():
    s = make_setup("B3")
    with pytest.raises(StrategyUnavailable):
        verify_element(s, s.group[1], "certified")
    with pytest.raises(StrategyUnavailable):
        verify_all(s, "certified")


def test_verify_all_a1():
    certs, summary = verify_all(make_setup("A1"), "all")
    assert len(certs) == 2 and (summary.verified, summary.vacuous, summary.failed) == (1, 1, 0)


def test_verify_all_order_and_jobs():
    s = make_setup("A3", "flip")
    a, _ = verify_all(s, "all", jobs=1)
    b, _ = verify_all(s, "all", jobs=2)
    assert [c.word for c in a] == [w.word for w in s.group]
    assert a == b


def test_counterexample_reported():
    s = make_setup("A2", "flip")
    w = s.group.from_word((0,))
    bad = RclInstance(w, (0,), None, StrictConeProblem(RatMat([[1, -1], [-1, 1]]), chamber=True))
    with pytest.raises(CounterexampleFound) as e:
        rcl._certify(s, bad, "lp", 3)
    assert e.value.certificate is not None and e.value.word == (0,)


def test_counterexample_recorded_without_abort(monkeypatch):
    s = make_setup("A2", "flip")
    orig = rcl._instance_from_scaled

    def patched(setup, w, supp, rows, den):
        inst = orig(setup, w, supp, rows, den)
        if w.word == (1,):
            p = StrictConeProblem(RatMat([[1, -1], [-1, 1]]), chamber=True)
            return RclInstance(w, inst.support, None, p)
        return inst

    monkeypatch.setattr(rcl, "_instance_from_scaled", patched)
    certs, summary = verify_all(s, "lp")
    assert summary.failed == 1 and summary.verified == 4 and summary.vacuous == 1
    failed = [c for c in certs if c.status == "failed"]
    assert failed[0].word == (1,) and failed[0].counterexample == (1, 1, 0, 0)


def test_grid_escalates_to_lp():
    s = make_setup("A3", "flip")
    certs, summary = verify_all(s, "grid", grid_max=1)
    assert summary.failed == 0
    escalated = [c for c in certs if c.strategy == "lp"]
    assert escalated and all("escalated" in c.note for c in escalated)


def _random_chamber_point(rng, r):
    return [Fraction(rng.randint(1, 40), rng.randint(1, 7)) for _ in range(r)]


@pytest.mark.parametrize("name,auto", [("A3", "flip"), ("D4", "triality"), ("D5", "swap"), ("A2xA2", "cycle")])
def test_sum_coeffs(name, auto):
    s = make_setup(name, auto)
    rng = random.Random(hash(name) % 1000)
    for _ in range(40):
        lam = s.datum.from_weight_coords(_random_chamber_point(rng, s.rank))
        w = rng.choice(s.group.elements[1:])
        s1, s2 = sum_coeffs_check(s, lam, w)
        assert s1 == 0 and s2 > 0


def test_sum_coeffs_preconditions():
    s = make_setup("A2", "flip")
    lam = s.datum.from_weight_coords([1, 1])
    with pytest.raises(ValueError):
        sum_coeffs_check(s, lam, s.group[0])
    with pytest.raises(ValueError):
        sum_coeffs_check(s, s.datum.from_weight_coords([1, -1]), s.group[1])


def test_t_cone_identity_theta_is_coefficient_sum():
    s = make_setup("B3")
    for w in s.group.elements[1:12]:
        x = [1, 2, 3]
        lam = s.datum.from_weight_coords(x)
        diff = lam - s.group.inverse(w).action @ lam
        rep = t_cone_check(s, w, x)
        assert rep.value == coefficient_sum(s, diff) > 0 and rep.scale == 1


def test_t_cone_a2_flip():
    s = make_setup("A2", "flip")
    w = s.group.from_word((0,))
    x = verify_element(s, w, "grid").witness
    rep = t_cone_check(s, w, x)
    assert rep.scaled_value > 0 and rep.scale >= 1
    with pytest.raises(ValueError):
        t_cone_check(s, s.group[0], x)


def test_gamma_shift_scale_trivial():
    assert gamma_shift_scale([1, 2], [0, 0]) == 1
    assert gamma_shift_scale([1, 2], [-3, 0]) == 1
    assert gamma_shift_scale([1], [1]) == 2
    assert gamma_shift_scale([Fraction(1, 2)], [Fraction(7, 4)]) == 4
    with pytest.raises(ValueError):
        gamma_shift_scale([0], [1])


@given(st.lists(st.tuples(st.fractions(min_value=Fraction(1, 9), max_value=10, max_denominator=9),
                          st.fractions(min_value=-10, max_value=10, max_denominator=9)), min_size=1, max_size=6))
def test_gamma_shift_scale_is_least(pairs):
    m = [p[0] for p in pairs]
    g = [p[1] for p in pairs]
    t = gamma_shift_scale(m, g)
    assert all(t * a - b > 0 for a, b in zip(m, g))
    if t > 1:
        assert not all((t - 1) * a - b > 0 for a, b in zip(m, g))


@pytest.mark.parametrize("name,auto", [("A3", "flip"), ("D4", "triality")])
def test_gamma_shifted_witnesses_verify(name, auto):
    s = make_setup(name, auto)
    for w in s.group.elements[1::5]:
        c = verify_element(s, w, "lp", gamma_mode="gamma-w")
        gamma = gamma_vector(s, w)
        inst = build_instance(s, w, gamma)
        vals = verify_witness(inst.problem, c.witness)
        assert all(v > 0 for v in vals)
        assert list(vals[: len(inst.support)]) == list(c.margins)


def test_product_reduction_examples():
    h = build("A1")
    hg = weyl_group(h)
    x, cases = product_reduction(h, [hg[0], hg[1]])
    assert cases == ["chain@0"]
    s = make_setup("A1xA1", "cycle")
    w = s.group.from_word((1,))
    assert all(v > 0 for v in verify_witness(build_instance(s, w).problem, x))

    h = build("A2")
    hg = weyl_group(h)
    u = hg.from_word((0, 1))
    x, cases = product_reduction(h, [u, u])
    assert cases == ["all", "all"] and x[:2] == x[2:]
    s = make_setup("A2xA2", "cycle")
    w = s.group.from_word((0, 1, 2, 3))
    assert all(v > 0 for v in verify_witness(build_instance(s, w).problem, x))


def test_product_reduction_errors():
    h = build("A1")
    with pytest.raises(ValueError):
        product_reduction(h, [weyl_group(h)[1]])
    with pytest.raises(ValueError):
        product_reduction(h, [weyl_group(h)[1], weyl_group(build("A2"))[1]])


def test_gamma_offsets():
    s = make_setup("A3", "flip")
    w = s.group[5]
    g = gamma_vector(s, w)
    inst = build_instance(s, w, g)
    pair = gamma_pairings(s, g)
    assert list(inst.problem.offsets) == [-pair[b] for b in inst.support]
    assert pair == RatVec(dot(g, c) for c in s.datum.fundamental_coweights)
