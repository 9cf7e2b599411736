import random

from hypothesis import given, settings, strategies as st
import pytest

from pfv.bdd import BddManager, OrderError
from pfv.families import (
    CATALOG, FamilyError, FamilyId, FamilyKind, FamilySpec, Ordering, Rule,
    build, evaluate, parse_family, parse_template, resolve_order,
    truth_table, variable_count, variable_labels,
)
from pfv.families import PRESETS

from brute import assignments, formula

BRUTE_KIND = {
    FamilyKind.F2_PAIRS: 'F2', FamilyKind.F3_TRIPLES: 'F3',
    FamilyKind.SYM_EXACTLY: 'EXACTLY', FamilyKind.SYM_THRESHOLD: 'THRESHOLD',
    FamilyKind.PARITY: 'PARITY', FamilyKind.ALL_AND: 'AND',
    FamilyKind.ALL_OR: 'OR', FamilyKind.MUL_BIT: 'MUL',
}


def brute(spec, x):
    rule = spec.rule_value() if spec.kind.rule_symbol else None
    return formula(BRUTE_KIND[spec.kind], spec.n, x, rule)


def small_specs(max_vars):
    for fam in CATALOG:
        for n in range(1, 8):
            for ordering in PRESETS:
                spec = FamilySpec(fam, n, ordering)
                if variable_count(spec) > max_vars:
                    continue
                try:
                    spec.rule_value() if fam.rule else None
                except FamilyError:
                    continue
                yield spec


def test_variable_counts():
    assert variable_count(parse_family('F2@k=5')) == 10
    assert variable_count(parse_family('F3@k=4')) == 12
    assert variable_count(parse_family('MUL_BIT@n=3/MUL_BLOCKED')) == 6
    assert variable_count(parse_family('PARITY@n=7')) == 7


@pytest.mark.parametrize('text, expected', [
    ('F2@k=3/NATURAL', [1, 2, 3, 4, 5, 6]),
    ('F2@k=3/F2_SPLIT', [1, 3, 5, 2, 4, 6]),
    ('F2@k=2/REVERSED', [4, 3, 2, 1]),
    ('MUL_BIT@n=3/MUL_INTERLEAVED', [1, 4, 2, 5, 3, 6]),
    ('MUL_BIT@n=3/MUL_BLOCKED', [1, 2, 3, 4, 5, 6]),
    ('PARITY@n=5/MUL_INTERLEAVED', [1, 4, 2, 5, 3]),
    ('PARITY@n=3/EXPLICIT(3,1,2)', [3, 1, 2]),
])
def test_resolve_order(text, expected):
    assert list(resolve_order(parse_family(text))) == expected


def test_explicit_order_wrong_length():
    with pytest.raises(OrderError):
        resolve_order(parse_family('PARITY@n=3/EXPLICIT(1,2)'))


def test_build_rejects_other_order():
    spec = parse_family('F2@k=2/F2_SPLIT')
    with pytest.raises(OrderError):
        build(spec, BddManager([1, 2, 3, 4]))


def test_labels():
    assert variable_labels(parse_family('MUL_BIT@n=2/MUL_BLOCKED')) == {
        1: 'a0', 2: 'a1', 3: 'b0', 4: 'b1'}
    assert variable_labels(parse_family('PARITY@n=2')) == {1: 'x1', 2: 'x2'}


def test_rule_values():
    assert parse_family('SYM_EXACTLY@n=7').rule_value() == 3
    assert parse_family('SYM_THRESHOLD[k=n-1]@n=7').rule_value() == 6
    assert parse_family('MUL_BIT@n=4/MUL_BLOCKED').rule_value() == 3
    with pytest.raises(FamilyError):
        parse_family('SYM_THRESHOLD[k=2]@n=1').rule_value()


@pytest.mark.parametrize('text', [
    'F9@k=2', 'F2[k=3]@k=2', 'F2@k=0', 'SYM_EXACTLY[m=1]@n=3',
    'F2@k=2/SIDEWAYS', 'F2@k=2/NATURAL(1,2)', 'PARITY@n=3/EXPLICIT',
    'SYM_EXACTLY[k=n*2]@n=3', 'garbage',
])
def test_bad_family_strings(text):
    with pytest.raises(FamilyError):
        parse_family(text)


def test_template_and_instance_are_distinct():
    with pytest.raises(FamilyError):
        parse_template('F2@k=3/NATURAL')
    with pytest.raises(FamilyError):
        parse_family('F2@k/NATURAL')
    t = parse_template('F2@k')
    assert t.ordering is Ordering.NATURAL
    assert str(t.at(4)) == 'F2@k=4/NATURAL'


def test_default_rules():
    assert FamilyId(FamilyKind.MUL_BIT).rule == Rule.N_MINUS_1_RULE
    assert FamilyId(FamilyKind.SYM_EXACTLY).rule == Rule.HALF_RULE
    with pytest.raises(FamilyError):
        FamilyId(FamilyKind.PARITY, Rule.HALF_RULE)


def test_string_round_trip_over_catalog():
    for spec in small_specs(8):
        assert parse_family(str(spec)) == spec
        assert parse_template(str(spec.template)) == spec.template
    spec = parse_family('PARITY@n=3/EXPLICIT(2,3,1)')
    assert parse_family(str(spec)) == spec


def test_builders_match_brute_formula():
    # every catalog family, every preset, up to 10 variables
    for spec in small_specs(10):
        order = resolve_order(spec)
        mgr = BddManager(order)
        f = build(spec, mgr)
        total = variable_count(spec)
        for x in assignments(range(1, total + 1)):
            want = brute(spec, x)
            assert mgr.evaluate(f, x) == want, (str(spec), x)
            assert evaluate(spec, x) == want


def test_truth_table_index_convention():
    spec = parse_family('MUL_BIT[m=1]@n=2/MUL_INTERLEAVED')
    order = resolve_order(spec)
    table = truth_table(spec, order)
    total = variable_count(spec)
    for t in range(1 << total):
        x = {v: (t >> (total - 1 - p)) & 1 for p, v in enumerate(order)}
        assert table[t] == brute(spec, x)


def test_multiplier_bits_small():
    for n in range(1, 6):
        for m in range(2 * n):
            spec = FamilySpec(FamilyId(FamilyKind.MUL_BIT, Rule(Rule.CONST, m)),
                              n, Ordering.MUL_INTERLEAVED)
            mgr = BddManager(resolve_order(spec))
            f = build(spec, mgr)
            rng = random.Random(n * 100 + m)
            for _ in range(40):
                a, b = rng.randrange(1 << n), rng.randrange(1 << n)
                x = {i + 1: (a >> i) & 1 for i in range(n)}
                x.update({n + i + 1: (b >> i) & 1 for i in range(n)})
                assert mgr.evaluate(f, x) == (a * b >> m) & 1


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_symmetric_families_invariant_under_permutation(data):
    fam = data.draw(st.sampled_from([f for f in CATALOG if f.kind.symmetric]))
    n = data.draw(st.integers(2, 9))
    spec = FamilySpec(fam, n)
    try:
        spec.rule_value() if fam.rule else None
    except FamilyError:
        return
    perm = data.draw(st.permutations(list(range(1, n + 1))))
    other = FamilySpec(fam, n, Ordering.EXPLICIT, tuple(perm))
    a, b = BddManager(resolve_order(spec)), BddManager(resolve_order(other))
    fa, fb = build(spec, a), build(other, b)
    # same function; for symmetric functions also the same size
    assert a.internal_node_count(fa) == b.internal_node_count(fb)
    for x in data.draw(st.lists(
            st.fixed_dictionaries({i: st.integers(0, 1)
                                   for i in range(1, n + 1)}),
            min_size=1, max_size=10)):
        assert a.evaluate(fa, x) == b.evaluate(fb, x)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(CATALOG), st.integers(1, 6),
       st.sampled_from(PRESETS), st.randoms(use_true_random=False))
def test_function_does_not_depend_on_order(fam, n, ordering, rng):
    spec = FamilySpec(fam, n, ordering)
    try:
        spec.rule_value() if fam.rule else None
    except FamilyError:
        return
    if variable_count(spec) > 12:
        return
    base = FamilySpec(fam, n)
    m1, m2 = BddManager(resolve_order(base)), BddManager(resolve_order(spec))
    f1, f2 = build(base, m1), build(spec, m2)
    total = variable_count(spec)
    for _ in range(20):
        x = {i: rng.randint(0, 1) for i in range(1, total + 1)}
        assert m1.evaluate(f1, x) == m2.evaluate(f2, x)
