"""Slow, obviously-correct reference computations used as test oracles.

Nothing here imports the BDD engine or the numpy oracle.
"""
import itertools


def formula(kind, n, x, rule=None):
    """Defining formula of a family on ``x``, a dict var -> bit."""
    if kind == 'F2':
        return int(any(x[2 * i + 1] and x[2 * i + 2] for i in range(n)))
    if kind == 'F3':
        return int(any(x[3 * i + 1] and x[3 * i + 2] and x[3 * i + 3]
                       for i in range(n)))
    weight = sum(x[i] for i in range(1, n + 1)) if kind != 'MUL' else None
    if kind == 'EXACTLY':
        return int(weight == rule)
    if kind == 'THRESHOLD':
        return int(weight >= rule)
    if kind == 'PARITY':
        return weight % 2
    if kind == 'AND':
        return int(weight == n)
    if kind == 'OR':
        return int(weight > 0)
    if kind == 'MUL':
        a = sum(x[i + 1] << i for i in range(n))
        b = sum(x[n + i + 1] << i for i in range(n))
        return (a * b >> rule) & 1
    raise ValueError(kind)


def assignments(variables):
    variables = list(variables)
    for bits in itertools.product((0, 1), repeat=len(variables)):
        yield dict(zip(variables, bits))


def cofactor_profile(f, order):
    """Per-level count of distinct subfunctions that depend on that level.

    `f` maps a full assignment dict to a bit; `order` lists variables
    root first.
    """
    order = list(order)
    counts = []
    for i, var in enumerate(order):
        prefix, rest = order[:i], order[i + 1:]
        seen = set()
        for fixed in assignments(prefix):
            lo, hi = [], []
            for tail in assignments(rest):
                a = {**fixed, **tail}
                lo.append(f({**a, var: 0}))
                hi.append(f({**a, var: 1}))
            if lo != hi:
                seen.add((tuple(lo), tuple(hi)))
        counts.append(len(seen))
    return counts
