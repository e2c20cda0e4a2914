"""Rewrite engine: normal forms, termination, confluence, completion, tensors."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmink.dsl import builtin, parse_expression, render_poly
from qmink.ncalg import (Generator, NCPolynomial, Presentation, RewriteRule,
                         StepLimitExceeded, UnorientableRuleError,
                         check_local_confluence, check_termination, complete,
                         orient, star_closure, tensor)
from qmink.scalars import GaussianRational, Scalar


def lorentz():
    return builtin("lorentz").presentation("lorentz")


def minkowski():
    return builtin("minkowski").presentation("minkowski")


def nf(pres, text):
    return pres.normalize(parse_expression(text, pres))


# -- abstract helpers ---------------------------------------------------------


def abstract_presentation(names, rules_spec, star_closed=False):
    """Self-adjoint generators named in order; rules as (lhs, rhs-poly) strings."""
    gens = tuple(Generator(n, i) for i, n in enumerate(names))
    pres = Presentation("abstract", gens)
    rules = []
    for lhs_text, rhs_text in rules_spec:
        lhs = tuple(names.index(ch) for ch in lhs_text)
        rules.append(RewriteRule(lhs, parse_expression(rhs_text, pres)))
    return pres.with_rules(rules, star_closed=star_closed)


# -- normal forms -------------------------------------------------------------


def test_commutation_normal_forms():
    p = lorentz()
    assert nf(p, "b a") == parse_expression("a b", p)
    assert nf(p, "d a") == parse_expression("1 + b c", p)
    assert nf(p, "b' a") == parse_expression("q^4 a b'", p)


def test_minkowski_pair_constants():
    p = minkowski()
    assert nf(p, "w x") == parse_expression("q^-4 x w", p)
    assert nf(p, "w' x") == parse_expression("q^4 x w'", p)
    assert nf(p, "w y") == parse_expression("q^4 y w", p)
    assert nf(p, "w' y") == parse_expression("q^-4 y w'", p)
    assert nf(p, "w' w") == parse_expression("w w'", p)


def random_poly(pres, rng, terms=3, max_len=5):
    out = NCPolynomial.zero()
    n = len(pres.generators)
    for _ in range(terms):
        word = tuple(rng.randrange(n) for _ in range(rng.randint(0, max_len)))
        coeff = Scalar.of(GaussianRational.of(rng.randint(-3, 3), rng.randint(-1, 1)),
                          rng.randint(-2, 2))
        out = out + NCPolynomial.word(word, coeff)
    return out


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_normalize_is_idempotent(seed):
    p = lorentz()
    poly = random_poly(p, random.Random(seed))
    once = p.normalize(poly)
    assert p.normalize(once) == once


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_normalize_commutes_with_star_after_closure(seed):
    p = lorentz()
    poly = random_poly(p, random.Random(seed))
    assert p.normalize(p.star(poly)) == p.normalize(p.star(p.normalize(poly)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9))
def test_dual_strategies_agree(seed):
    p = lorentz()
    rng = random.Random(seed)
    word = tuple(rng.randrange(8) for _ in range(rng.randint(0, 8)))
    poly = NCPolynomial.word(word)
    assert p.normalize(poly) == p.normalize(poly, rng=random.Random(seed + 1))


def test_step_limit_reports_nontermination():
    bad = abstract_presentation("ab", [("ab", "b a"), ("ba", "a b")])
    with pytest.raises(StepLimitExceeded):
        bad.normalize(parse_expression("a b", bad), step_limit=50)


# -- classical limit oracle ---------------------------------------------------


def classical_oracle(word, pres):
    """Independent commutative normal form with determinant substitution.

    Counts letters, then expands every (a, d) pair into 1 + b c recursively;
    the result is a dict sorted-word -> integer coefficient.
    """
    names = [g.display() for g in pres.generators]
    ia, id_, ib, ic = (names.index(k) for k in ("a", "d", "b", "c"))

    def expand(counts):
        counts = list(counts)
        if counts[ia] > 0 and counts[id_] > 0:
            counts[ia] -= 1
            counts[id_] -= 1
            out = {}
            with_bc = list(counts)
            with_bc[ib] += 1
            with_bc[ic] += 1
            for branch in (tuple(counts), tuple(with_bc)):
                for w, c in expand(branch).items():
                    out[w] = out.get(w, 0) + c
            return out
        sorted_word = tuple(i for i in range(len(names)) for _ in range(counts[i]))
        return {sorted_word: 1}

    counts = [0] * len(names)
    for i in word:
        counts[i] += 1
    # starred block: same expansion for (a', d')
    ia2, id2, ib2, ic2 = (names.index(k) for k in ("a'", "d'", "b'", "c'"))

    def expand2(counts):
        counts = list(counts)
        if counts[ia2] > 0 and counts[id2] > 0:
            counts[ia2] -= 1
            counts[id2] -= 1
            out = {}
            with_bc = list(counts)
            with_bc[ib2] += 1
            with_bc[ic2] += 1
            for branch in (tuple(counts), tuple(with_bc)):
                for w, c in expand2(branch).items():
                    out[w] = out.get(w, 0) + c
            return out
        return expand(counts)

    return expand2(counts)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_classical_limit_is_commutative_sort_with_determinant(seed):
    pres = builtin("classical").presentation("classical_lorentz")
    rng = random.Random(seed)
    word = tuple(rng.randrange(8) for _ in range(rng.randint(0, 6)))
    got = pres.normalize(NCPolynomial.word(word))
    expected = {w: Scalar.of(c) for w, c in classical_oracle(word, pres).items()
                if c != 0}
    assert got.terms == expected


# -- homogeneity --------------------------------------------------------------


def _counts(word, n):
    out = [0] * n
    for i in word:
        out[i] += 1
    return out


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_normal_form_preserves_letters_modulo_determinant(seed):
    p = lorentz()
    names = [g.display() for g in p.generators]
    ia, id_, ib, ic = (names.index(k) for k in ("a", "d", "b", "c"))
    sa, sd, sb, sc = (names.index(k) for k in ("a'", "d'", "b'", "c'"))
    rng = random.Random(seed)
    word = tuple(rng.randrange(8) for _ in range(rng.randint(0, 6)))
    before = _counts(word, 8)
    for w in p.normalize(NCPolynomial.word(word)).words():
        diff = [b - a for b, a in zip(before, _counts(w, 8))]
        for (i1, i2, j1, j2) in ((ia, id_, ib, ic), (sa, sd, sb, sc)):
            assert diff[i1] == diff[i2] >= 0
            assert diff[j1] == diff[j2] <= 0
            assert -diff[j1] <= diff[i1]
            diff[i1] = diff[i2] = diff[j1] = diff[j2] = 0
        assert not any(diff)


# -- termination / confluence ---------------------------------------------------


def test_builtin_presentations_terminate_and_conflue():
    for pres in (lorentz(), minkowski()):
        assert check_termination(pres).ok
        assert check_local_confluence(pres) == []


def test_two_cycle_fails_termination():
    bad = abstract_presentation("ab", [("ab", "b a"), ("ba", "a b")])
    report = check_termination(bad)
    assert not report.ok
    assert len(report.violations) == 1  # only ab -> ba increases


def test_empty_rule_set_passes():
    assert check_termination(abstract_presentation("ab", [])).ok
    assert check_local_confluence(abstract_presentation("ab", [])) == []


def test_no_overlap_no_critical_pair():
    # {ba -> ab, cb -> bc} with no (c, a) rule: the only overlap cba resolves
    # to distinct normal forms, so it IS a critical pair; without an overlap
    # ({ba -> ab} alone) there is nothing to check.
    assert check_local_confluence(
        abstract_presentation("abc", [("ba", "a b")])) == []
    pairs = check_local_confluence(
        abstract_presentation("abc", [("ba", "a b"), ("cb", "b c")]))
    assert [p.word for p in pairs] == [(2, 1, 0)]


def test_declaring_determinant_generators_nonadjacent_breaks_confluence():
    """Ordering the generators a < b < c < d hides the determinant redex
    inside sorted words (e.g. a b d), which leaves genuinely unresolved
    critical pairs; this is why the builtin order is a < d < b < c."""
    names = "abcd"
    gens = tuple(Generator(n, i, heavy=n in "ad") for i, n in enumerate(names))
    pres = Presentation("wrong-order", gens)
    rules_spec = [("ba", "a b"), ("ca", "a c"), ("cb", "b c"),
                  ("db", "b d"), ("dc", "c d"),
                  ("da", "1 + b c"), ("ad", "1 + b c")]
    rules = []
    for lhs_text, rhs_text in rules_spec:
        lhs = tuple(names.index(ch) for ch in lhs_text)
        rules.append(RewriteRule(lhs, parse_expression(rhs_text, pres)))
    pres = pres.with_rules(rules)
    assert check_termination(pres).ok
    assert check_local_confluence(pres) != []


# -- star closure ---------------------------------------------------------------


def test_star_closure_of_lorentz_derives_thirteen_rules():
    from qmink.dsl import parse, _load_source
    parsed = parse(_load_source("lorentz"), "lorentz.qalg")
    pres = parsed.presentations["lorentz"]
    assert len(pres.rules) == 17
    closed = star_closure(pres)
    assert len(closed.rules) == 30
    # starred determinant rule, from starring a d = 1 + b c
    assert nf_rule(closed, "a' d'") == parse_expression("1 + b' c'", closed)
    # star of the mixed rule b' a = q^4 a b'
    assert nf_rule(closed, "a' b") == parse_expression("q^4 b a'", closed)


def nf_rule(pres, text):
    return pres.normalize(parse_expression(text, pres))


def test_star_closure_of_minkowski_is_trivial():
    from qmink.dsl import parse, _load_source
    parsed = parse(_load_source("minkowski"), "minkowski.qalg")
    pres = parsed.presentations["minkowski"]
    closed = star_closure(pres)
    assert len(closed.rules) == len(pres.rules) == 6


def test_star_closure_respects_star_of_every_rule():
    p = lorentz()
    for rule in p.rules:
        assert p.normalize(p.star(rule.as_polynomial())).is_zero()


# -- orientation / completion ----------------------------------------------------


def test_orient_rejects_non_unit_leading_coefficient():
    pres = abstract_presentation("ab", [])
    bad = parse_expression("(1 + q^2) b a - a b", pres)
    with pytest.raises(UnorientableRuleError):
        orient(bad, pres)


def test_completion_of_left_right_absorbers():
    # {ab -> a, ba -> b} completes with exactly {aa -> a, bb -> b}
    pres = abstract_presentation("ab", [("ab", "a"), ("ba", "b")])
    result = complete(pres, max_new_rules=5)
    assert result.locally_confluent
    added = {(r.lhs, render_poly(r.rhs, pres)) for r in result.added}
    assert added == {((0, 0), "a"), ((1, 1), "b")}


def test_completion_respects_budget():
    pres = abstract_presentation("ab", [("ab", "a"), ("ba", "b")])
    result = complete(pres, max_new_rules=0)
    assert not result.locally_confluent
    assert result.presentation.rules == pres.rules


def test_completion_fixes_confluent_input():
    p = minkowski()
    result = complete(p, max_new_rules=3)
    assert result.locally_confluent
    assert result.added == ()
    assert result.presentation.rules == p.rules


def test_completion_restores_missing_star_derived_rule():
    p = lorentz()
    dropped = p.index_of("a'"), p.index_of("b")
    kept = [r for r in p.rules if r.lhs != dropped]
    assert len(kept) == len(p.rules) - 1
    broken = p.with_rules(kept)  # still flagged star-closed
    assert broken.star_closed
    result = complete(broken, max_new_rules=4)
    assert result.locally_confluent
    assert [r.lhs for r in result.added] == [dropped]
    assert result.added[0].rhs == parse_expression("q^4 b a'", p)


# -- tensor products ---------------------------------------------------------------


def test_tensor_square_has_sixteen_generators():
    p = lorentz()
    t = tensor(p, p)
    assert len(t.generators) == 16
    assert t.nlegs == 2


def test_cross_leg_letters_commute():
    p = lorentz()
    t = tensor(p, p)
    lhs = parse_expression("1@c", t) * parse_expression("a@1", t)
    assert t.normalize(lhs) == parse_expression("a@c", t)


def test_tensor_of_minkowski_and_lorentz_supports_the_coaction():
    t = tensor(minkowski(), lorentz())
    assert len(t.generators) == 12
    poly = parse_expression("x@a' a + w@a' c", t)
    # a' a and a' c are themselves reducible (normality resp. q-commutation)
    assert t.normalize(poly) == parse_expression("x@a a' + q^-4 w@c a'", t)


def test_tensor_is_associative_on_the_nose():
    p = lorentz()
    assert tensor(tensor(p, p), p) == tensor(p, tensor(p, p))


def test_tensor_preserves_confluence():
    t = tensor(minkowski(), lorentz())
    assert check_termination(t).ok
    assert check_local_confluence(t) == []


# -- star on bare polynomials -----------------------------------------------------


def test_star_reverses_and_stars_letters():
    p = lorentz()
    ab = parse_expression("a b", p)
    assert p.star(ab) == parse_expression("b' a'", p)


def test_star_fixes_selfadjoint_coordinates():
    m = minkowski()
    x = parse_expression("x", m)
    assert m.star(x) == x


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_star_is_involutive_on_polynomials(seed):
    p = lorentz()
    poly = random_poly(p, random.Random(seed))
    assert p.star(p.star(poly)) == poly


def test_triple_tensors_stay_confluent():
    # the codomains of the coassociativity / coaction squares
    lor, mink = lorentz(), minkowski()
    for t in (tensor(tensor(lor, lor), lor), tensor(tensor(mink, lor), lor)):
        assert check_termination(t).ok
        assert check_local_confluence(t) == []


def test_tensor_rules_are_star_stable():
    t = tensor(minkowski(), lorentz())
    assert t.star_closed
    for rule in t.rules:
        assert t.normalize(t.star(rule.as_polynomial())).is_zero()


def test_completion_reports_divergence_under_budget():
    # {ba -> ab, cb -> bc} without a (c,a) rule: completion keeps finding
    # longer superposition rules, so а budget cap reports non-confluence
    pres = abstract_presentation("abc", [("ba", "a b"), ("cb", "b c")])
    result = complete(pres, max_new_rules=3)
    assert not result.locally_confluent
    assert len(result.added) == 3
