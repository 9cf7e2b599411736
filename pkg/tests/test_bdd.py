import itertools

from hypothesis import given, settings, strategies as st
import pytest

from pfv.bdd import (
    AND, OR, XOR, AssignmentError, BddManager, ManagerMismatch,
    NodeBudgetExceeded, OrderError, VarOrder, new_manager,
)

from brute import assignments, cofactor_profile


def test_new_manager_is_empty():
    mgr = new_manager(VarOrder([1, 2, 3]))
    assert len(mgr) == 0
    assert mgr.internal_node_count(mgr.one) == 0


def test_position_is_inverse_lookup():
    order = VarOrder([1, 3, 2, 4])
    assert order.position(3) == 1
    assert [order.position(v) for v in order] == [0, 1, 2, 3]


@pytest.mark.parametrize('seq', [[1, 1, 2], [0, 1], [1, 2, 4], [1, 2.0]])
def test_bad_orders(seq):
    with pytest.raises(OrderError):
        VarOrder(seq)


def test_var_is_hash_consed():
    mgr = BddManager([1, 2, 3, 4])
    assert mgr.var(1) == mgr.var(1)
    assert mgr.internal_node_count(mgr.var(1)) == 1
    assert len(mgr) == 1


def test_var_outside_order():
    mgr = BddManager([1, 2, 3, 4])
    with pytest.raises(OrderError):
        mgr.var(9)


def test_apply_examples():
    mgr = BddManager([1, 2])
    x1, x2 = mgr.var(1), mgr.var(2)
    f = mgr.apply(AND, x1, x2)
    assert mgr.internal_node_count(f) == 2
    assert mgr.apply(OR, f, mgr.zero) == f
    assert mgr.apply(XOR, x1, x1) == mgr.zero


def test_apply_rejects_unknown_operator():
    mgr = BddManager([1])
    with pytest.raises(ValueError):
        mgr.apply('NAND', mgr.var(1), mgr.var(1))


def test_foreign_handle():
    a = BddManager([1, 2])
    b = BddManager([1, 2])
    with pytest.raises(ManagerMismatch):
        a.apply(AND, a.var(1), b.var(1))
    with pytest.raises(ManagerMismatch):
        a.negate(b.var(1))
    with pytest.raises(ManagerMismatch):
        a.internal_node_count(b.one)
    with pytest.raises(ManagerMismatch):
        a.level_profile(b.var(2))
    with pytest.raises(ManagerMismatch):
        a.cofactor(b.var(2), 2, 1)


def test_negation_examples():
    mgr = BddManager([1, 2])
    assert mgr.negate(mgr.zero) == mgr.one
    x1 = mgr.var(1)
    assert mgr.node(~x1) == (1, mgr.one, mgr.zero)
    x2 = mgr.var(2)
    assert ~~x2 == x2


def test_cofactor_examples():
    mgr = BddManager([1, 2, 3])
    x1, x2, x3 = mgr.var(1), mgr.var(2), mgr.var(3)
    f = x1 & x2
    assert mgr.cofactor(f, 1, 1) == x2
    assert mgr.cofactor(f, 1, 0) == mgr.zero
    assert mgr.cofactor(f, 3, 1) == f
    g = (x1 & x3) | (~x1 & x2)
    assert mgr.cofactor(g, 3, 0) == ~x1 & x2
    with pytest.raises(OrderError):
        mgr.cofactor(f, 7, 0)


def test_eval_examples():
    mgr = BddManager([1, 2])
    f = mgr.var(1) & mgr.var(2)
    assert mgr.evaluate(f, {1: 1, 2: 1}) == 1
    assert mgr.evaluate(f, {1: 1, 2: 0}) == 0
    assert mgr.evaluate(mgr.one, {1: 0, 2: 0}) == 1
    with pytest.raises(AssignmentError):
        mgr.evaluate(f, {1: 1})


def test_count_and_profile_examples():
    mgr = BddManager([1, 2])
    f = mgr.var(1) & mgr.var(2)
    assert mgr.internal_node_count(mgr.zero) == 0
    assert list(mgr.level_profile(f)) == [1, 1]
    assert list(mgr.level_profile(mgr.one)) == [0, 0]


def test_f2_two_pairs_has_four_nodes():
    # value frozen from brute.cofactor_profile
    mgr = BddManager([1, 2, 3, 4])
    x = {i: mgr.var(i) for i in range(1, 5)}
    f = (x[1] & x[2]) | (x[3] & x[4])
    assert mgr.internal_node_count(f) == 4


def test_exactly_two_of_four_profile():
    mgr = BddManager([1, 2, 3, 4])
    xs = [mgr.var(i) for i in range(1, 5)]
    f = mgr.zero
    for pair in itertools.combinations(range(4), 2):
        term = mgr.one
        for i in range(4):
            term = term & (xs[i] if i in pair else ~xs[i])
        f = f | term
    assert list(mgr.level_profile(f)) == [1, 2, 3, 2]


def test_deep_chain_does_not_recurse():
    n = 2000
    mgr = BddManager(range(1, n + 1))
    f = mgr.zero
    for i in range(n - 1, 0, -2):
        f = (mgr.var(i) & mgr.var(i + 1)) | f
    assert mgr.internal_node_count(f) == n
    g = mgr.zero
    for i in range(n, 0, -1):
        g = mgr.var(i) ^ g
    assert mgr.internal_node_count(g) == 2 * n - 1
    assert ~~g == g
    h = f ^ g
    assert mgr.evaluate(h, {i: 1 for i in range(1, n + 1)}) == 1
    assert mgr.cofactor(f, n, 1) != f


def test_node_cap():
    mgr = BddManager(range(1, 11), node_cap=5)
    with pytest.raises(NodeBudgetExceeded):
        f = mgr.one
        for i in range(1, 11):
            f = f & mgr.var(i)


# -- properties over random formulas ---------------------------------------

def formulas(nvars):
    leaves = st.one_of(
        st.integers(1, nvars).map(lambda i: ('var', i)),
        st.sampled_from([('const', 0), ('const', 1)]))
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.tuples(st.sampled_from([AND, OR, XOR]), sub, sub),
            st.tuples(st.just('not'), sub)),
        max_leaves=12)


def build(mgr, expr):
    tag = expr[0]
    if tag == 'var':
        return mgr.var(expr[1])
    if tag == 'const':
        return mgr.constant(expr[1])
    if tag == 'not':
        return ~build(mgr, expr[1])
    return mgr.apply(tag, build(mgr, expr[1]), build(mgr, expr[2]))


def semantics(expr, x):
    tag = expr[0]
    if tag == 'var':
        return x[expr[1]]
    if tag == 'const':
        return expr[1]
    if tag == 'not':
        return 1 - semantics(expr[1], x)
    a, b = semantics(expr[1], x), semantics(expr[2], x)
    return {AND: a & b, OR: a | b, XOR: a ^ b}[tag]


def from_minterms(mgr, table):
    """Build the same function by a different route: OR of minterms."""
    r = mgr.zero
    for x, value in table:
        if value:
            term = mgr.one
            for v, bit in x.items():
                term = term & (mgr.var(v) if bit else ~mgr.var(v))
            r = r | term
    return r


def walk(mgr, f):
    seen = {}
    stack = [f]
    while stack:
        g = stack.pop()
        if g.is_terminal or g.id in seen:
            continue
        var, lo, hi = mgr.node(g)
        seen[g.id] = (var, lo, hi)
        stack += [lo, hi]
    return seen


orders = st.integers(2, 6).flatmap(
    lambda n: st.permutations(list(range(1, n + 1))))


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_semantics_canonicity_and_structure(data):
    order = data.draw(orders)
    n = len(order)
    expr = data.draw(formulas(n))
    mgr = BddManager(order)
    f = build(mgr, expr)
    table = [(x, semantics(expr, x)) for x in assignments(range(1, n + 1))]
    for x, value in table:
        assert mgr.evaluate(f, x) == value
    # canonicity: a different construction gives the identical handle
    assert from_minterms(mgr, table) == f
    nodes = walk(mgr, f)
    keys = set()
    pos = mgr.order.position
    for var, lo, hi in nodes.values():
        assert lo != hi
        key = (var, lo.id, hi.id)
        assert key not in keys
        keys.add(key)
        for child in (lo, hi):
            if not child.is_terminal:
                assert pos(var) < pos(mgr.node(child)[0])
    assert mgr.internal_node_count(f) == sum(mgr.level_profile(f)) == len(nodes)
    assert ~~f == f


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_profile_matches_brute_oracle(data):
    order = data.draw(orders)
    expr = data.draw(formulas(len(order)))
    mgr = BddManager(order)
    f = build(mgr, expr)
    expected = cofactor_profile(lambda x: semantics(expr, x), order)
    assert list(mgr.level_profile(f)) == expected


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_cofactor_semantics(data):
    order = data.draw(orders)
    n = len(order)
    expr = data.draw(formulas(n))
    var = data.draw(st.integers(1, n))
    bit = data.draw(st.integers(0, 1))
    mgr = BddManager(order)
    g = mgr.cofactor(build(mgr, expr), var, bit)
    assert var not in mgr.support(g)
    for x in assignments(range(1, n + 1)):
        assert mgr.evaluate(g, x) == semantics(expr, {**x, var: bit})


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_equal_functions_share_handles(data):
    n = 4
    a = data.draw(formulas(n))
    b = data.draw(formulas(n))
    mgr = BddManager(range(1, n + 1))
    fa, fb = build(mgr, a), build(mgr, b)
    same = all(semantics(a, x) == semantics(b, x)
               for x in assignments(range(1, n + 1)))
    assert (fa == fb) == same
