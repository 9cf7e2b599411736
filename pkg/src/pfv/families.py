"""Parametric Boolean function families and variable-ordering presets.

A family instance is written as a short string::

    F2@k=8/NATURAL
    SYM_EXACTLY[k=n/2]@n=10/REVERSED
    MUL_BIT[m=n-1]@n=6/MUL_BLOCKED
    PARITY@n=5/EXPLICIT(3,1,2,5,4)

Dropping ``=<int>`` gives a template (``F2@k/NATURAL``) that stands
for the whole sequence of instances. The ordering part defaults to
NATURAL when omitted.

Parameters: F2 and F3 count monomials (pairs/triples), the symmetric
families, PARITY, ALL_AND and ALL_OR count variables, MUL_BIT counts
the operand width. Multiplier operands map ``a_i -> x_{i+1}`` and
``b_i -> x_{n+i+1}``.
"""
from dataclasses import dataclass, field
import enum
import re

import numpy as np

from pfv.bdd import OrderError, VarOrder


__all__ = [
    'FamilyError', 'FamilyKind', 'Rule', 'FamilyId', 'Ordering',
    'FamilyTemplate', 'FamilySpec', 'parse_family', 'parse_template',
    'variable_count', 'variable_labels', 'resolve_order', 'build',
    'evaluate', 'truth_table', 'CATALOG',
]


class FamilyError(ValueError):
    """Unknown family, malformed family string, or parameter out of range."""


class FamilyKind(enum.Enum):
    F2_PAIRS = 'F2'
    F3_TRIPLES = 'F3'
    SYM_EXACTLY = 'SYM_EXACTLY'
    SYM_THRESHOLD = 'SYM_THRESHOLD'
    PARITY = 'PARITY'
    ALL_AND = 'ALL_AND'
    ALL_OR = 'ALL_OR'
    MUL_BIT = 'MUL_BIT'

    @property
    def rule_symbol(self):
        if self in (FamilyKind.SYM_EXACTLY, FamilyKind.SYM_THRESHOLD):
            return 'k'
        if self is FamilyKind.MUL_BIT:
            return 'm'
        return None

    @property
    def parameter_symbol(self):
        if self in (FamilyKind.F2_PAIRS, FamilyKind.F3_TRIPLES):
            return 'k'
        return 'n'

    @property
    def symmetric(self):
        return self in (FamilyKind.SYM_EXACTLY, FamilyKind.SYM_THRESHOLD,
                        FamilyKind.PARITY, FamilyKind.ALL_AND,
                        FamilyKind.ALL_OR)


_KIND_ALIASES = {k.value: k for k in FamilyKind}
_KIND_ALIASES.update({k.name: k for k in FamilyKind})


@dataclass(frozen=True)
class Rule:
    """A parameter as a function of n: a constant, ``n/2`` or ``n-1``."""

    kind: str
    const: int = 0

    CONST = 'CONST'
    HALF = 'HALF'
    N_MINUS_1 = 'N_MINUS_1'

    def __post_init__(self):
        if self.kind not in (self.CONST, self.HALF, self.N_MINUS_1):
            raise FamilyError(f'unknown rule {self.kind!r}')
        if self.kind == self.CONST and self.const < 0:
            raise FamilyError('rule constant must be non-negative')

    def __call__(self, n):
        if self.kind == self.HALF:
            return n // 2
        if self.kind == self.N_MINUS_1:
            return n - 1
        return self.const

    def __str__(self):
        if self.kind == self.HALF:
            return 'n/2'
        if self.kind == self.N_MINUS_1:
            return 'n-1'
        return str(self.const)

    @classmethod
    def parse(cls, text):
        text = text.replace(' ', '')
        if text in ('n/2', 'HALF'):
            return cls(cls.HALF)
        if text in ('n-1', 'N_MINUS_1'):
            return cls(cls.N_MINUS_1)
        if text.isdigit():
            return cls(cls.CONST, int(text))
        raise FamilyError(f'bad rule {text!r}; expected <int>, n/2 or n-1')


Rule.HALF_RULE = Rule(Rule.HALF)
Rule.N_MINUS_1_RULE = Rule(Rule.N_MINUS_1)


@dataclass(frozen=True)
class FamilyId:
    kind: FamilyKind
    rule: Rule = None

    def __post_init__(self):
        symbol = self.kind.rule_symbol
        if symbol is None and self.rule is not None:
            raise FamilyError(f'{self.kind.value} takes no rule')
        if symbol is not None and self.rule is None:
            default = (Rule.N_MINUS_1_RULE if self.kind is FamilyKind.MUL_BIT
                       else Rule.HALF_RULE)
            object.__setattr__(self, 'rule', default)

    def __str__(self):
        if self.rule is None:
            return self.kind.value
        return f'{self.kind.value}[{self.kind.rule_symbol}={self.rule}]'


class Ordering(enum.Enum):
    NATURAL = 'NATURAL'
    F2_SPLIT = 'F2_SPLIT'
    MUL_INTERLEAVED = 'MUL_INTERLEAVED'
    MUL_BLOCKED = 'MUL_BLOCKED'
    REVERSED = 'REVERSED'
    EXPLICIT = 'EXPLICIT'


PRESETS = tuple(o for o in Ordering if o is not Ordering.EXPLICIT)


@dataclass(frozen=True)
class FamilyTemplate:
    """A family with an ordering preset, but no parameter value."""

    family: FamilyId
    ordering: Ordering = Ordering.NATURAL

    def __post_init__(self):
        if self.ordering is Ordering.EXPLICIT:
            raise FamilyError('EXPLICIT orderings need a concrete parameter')

    def at(self, n):
        return FamilySpec(self.family, n, self.ordering)

    def __str__(self):
        return (f'{self.family}@{self.family.kind.parameter_symbol}'
                f'/{self.ordering.value}')


@dataclass(frozen=True)
class FamilySpec:
    family: FamilyId
    n: int
    ordering: Ordering = Ordering.NATURAL
    explicit: tuple = field(default=None)

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise FamilyError(f'parameter must be a positive int, got {self.n!r}')
        if self.ordering is Ordering.EXPLICIT:
            if self.explicit is None:
                raise FamilyError('EXPLICIT ordering requires a sequence')
            object.__setattr__(self, 'explicit', tuple(self.explicit))
        elif self.explicit is not None:
            raise FamilyError('explicit sequence given for a preset ordering')

    @property
    def kind(self):
        return self.family.kind

    @property
    def template(self):
        return FamilyTemplate(self.family, self.ordering)

    def rule_value(self):
        """The k (symmetric) or m (multiplier) value at this n."""
        value = self.family.rule(self.n)
        upper = 2 * self.n - 1 if self.kind is FamilyKind.MUL_BIT else self.n
        if not 0 <= value <= upper:
            raise FamilyError(
                f'{self.family.kind.rule_symbol}={value} out of range '
                f'[0, {upper}] for n={self.n}')
        return value

    def __str__(self):
        if self.ordering is Ordering.EXPLICIT:
            order = 'EXPLICIT(' + ','.join(map(str, self.explicit)) + ')'
        else:
            order = self.ordering.value
        return (f'{self.family}@{self.family.kind.parameter_symbol}'
                f'={self.n}/{order}')


_FAMILY_RE = re.compile(r"""
    ^\s*(?P<name>[A-Z0-9_]+)
    (?:\[\s*(?P<rsym>[a-z])\s*=\s*(?P<rule>[^\]]+)\])?
    \s*@\s*(?P<psym>[a-z])(?:\s*=\s*(?P<n>\d+))?
    (?:\s*/\s*(?P<order>[A-Z0-9_]+)(?:\((?P<seq>[\d,\s]*)\))?)?
    \s*$""", re.VERBOSE)


def _parse(text):
    m = _FAMILY_RE.match(text)
    if m is None:
        raise FamilyError(f'malformed family string {text!r}')
    kind = _KIND_ALIASES.get(m['name'])
    if kind is None:
        raise FamilyError(f'unknown family id {m["name"]!r}')
    rule = None
    if m['rule'] is not None:
        if kind.rule_symbol is None:
            raise FamilyError(f'{kind.value} takes no rule')
        if m['rsym'] != kind.rule_symbol:
            raise FamilyError(
                f'{kind.value} rule must be named {kind.rule_symbol!r}')
        rule = Rule.parse(m['rule'])
    if m['psym'] not in ('n', 'k'):
        raise FamilyError(f'unknown parameter symbol {m["psym"]!r}')
    family = FamilyId(kind, rule)
    ordering = Ordering.NATURAL
    if m['order'] is not None:
        try:
            ordering = Ordering(m['order'])
        except ValueError:
            raise FamilyError(f'unknown ordering {m["order"]!r}') from None
    if (m['seq'] is not None) != (ordering is Ordering.EXPLICIT):
        raise FamilyError('only EXPLICIT takes a variable sequence')
    seq = None
    if m['seq'] is not None:
        seq = tuple(int(s) for s in m['seq'].split(',') if s.strip())
    n = int(m['n']) if m['n'] is not None else None
    return family, n, ordering, seq


def parse_template(text):
    """Parse ``NAME[rule]@n/ORDERING`` into a :class:`FamilyTemplate`.

    A concrete ``@n=<int>`` part is rejected.
    """
    family, n, ordering, _ = _parse(text)
    if n is not None:
        raise FamilyError(f'template must not fix the parameter: {text!r}')
    return FamilyTemplate(family, ordering)


def parse_family(text):
    """Parse a concrete instance string into a :class:`FamilySpec`."""
    family, n, ordering, seq = _parse(text)
    if n is None:
        raise FamilyError(f'instance needs a parameter value: {text!r}')
    return FamilySpec(family, n, ordering, seq)


def variable_count(spec):
    kind = spec.kind
    if kind is FamilyKind.F2_PAIRS or kind is FamilyKind.MUL_BIT:
        return 2 * spec.n
    if kind is FamilyKind.F3_TRIPLES:
        return 3 * spec.n
    return spec.n


def variable_labels(spec):
    """Role names of variables ``1..N``, stable as n grows.

    Multiplier indices shift with n, so ``a0``/``b0`` style names are
    the stable identity there.
    """
    if spec.kind is FamilyKind.MUL_BIT:
        n = spec.n
        return {**{i + 1: f'a{i}' for i in range(n)},
                **{n + i + 1: f'b{i}' for i in range(n)}}
    return {i: f'x{i}' for i in range(1, variable_count(spec) + 1)}


def resolve_order(spec):
    """Concrete :class:`VarOrder` for `spec`'s ordering preset.

    F2_SPLIT puts odd-indexed variables before even-indexed ones.
    MUL_INTERLEAVED alternates the first and second half of the index
    range (``a0, b0, a1, b1, ...`` for multipliers); MUL_BLOCKED keeps
    the halves contiguous, which is the natural order.
    """
    total = variable_count(spec)
    natural = list(range(1, total + 1))
    o = spec.ordering
    if o is Ordering.NATURAL or o is Ordering.MUL_BLOCKED:
        seq = natural
    elif o is Ordering.REVERSED:
        seq = natural[::-1]
    elif o is Ordering.F2_SPLIT:
        seq = natural[0::2] + natural[1::2]
    elif o is Ordering.MUL_INTERLEAVED:
        half = (total + 1) // 2
        first, second = natural[:half], natural[half:]
        seq = []
        for i, v in enumerate(first):
            seq.append(v)
            if i < len(second):
                seq.append(second[i])
    else:
        seq = list(spec.explicit)
        if len(seq) != total:
            raise OrderError(
                f'explicit order has {len(seq)} variables, '
                f'{spec} needs {total}')
    return VarOrder(seq)


# -- BDD construction -------------------------------------------------------

# folding from the last operand keeps each step near constant cost under
# the natural order, where later operands sit deeper in the diagram

def _or_all(mgr, fs):
    r = mgr.zero
    for f in reversed(fs):
        r = f | r
    return r


def _and_all(mgr, fs):
    r = mgr.one
    for f in reversed(fs):
        r = f & r
    return r


def _monomials(mgr, k, width):
    return [_and_all(mgr, [mgr.var(width * i + j) for j in range(1, width + 1)])
            for i in range(k)]


def _exactly_counts(mgr, xs, upto):
    """BDDs for "exactly j ones among xs", j = 0..upto."""
    counts = [mgr.one] + [mgr.zero] * upto
    for x in xs:
        nx = ~x
        new = [counts[0] & nx]
        for j in range(1, upto + 1):
            new.append((counts[j] & nx) | (counts[j - 1] & x))
        counts = new
    return counts


def _at_least(mgr, xs, k):
    # ge[j]: at least j ones seen so far, for j = 0..k
    ge = [mgr.one] + [mgr.zero] * k
    for x in xs:
        nx = ~x
        ge = [mgr.one] + [(ge[j] & nx) | (ge[j - 1] & x)
                          for j in range(1, k + 1)]
    return ge[k]


def _add(a, b):
    """Ripple-carry sum of two equal-length BDD vectors, truncated."""
    out = []
    carry = None
    for x, y in zip(a, b):
        if carry is None:
            out.append(x ^ y)
            carry = x & y
        else:
            t = x ^ y
            out.append(t ^ carry)
            carry = (x & y) | (carry & t)
    return out


def _product_bits(mgr, n, width):
    """Low `width` bits of a*b as BDDs, by shift-add of partial products."""
    a = [mgr.var(i + 1) for i in range(n)]
    b = [mgr.var(n + i + 1) for i in range(n)]
    acc = [mgr.zero] * width
    for i in range(n):
        if i >= width:
            break
        row = [mgr.zero] * width
        for j in range(n):
            if i + j < width:
                row[i + j] = a[j] & b[i]
        acc = _add(acc, row)
    return acc


def build(spec, mgr):
    """Build the BDD of `spec` inside `mgr`.

    `mgr` must use exactly the order :func:`resolve_order` gives.
    """
    if mgr.order != resolve_order(spec):
        raise OrderError(
            f'manager order {list(mgr.order)} does not match {spec}')
    kind = spec.kind
    n = spec.n
    total = variable_count(spec)
    xs = [mgr.var(i) for i in range(1, total + 1)]
    if kind is FamilyKind.F2_PAIRS:
        return _or_all(mgr, _monomials(mgr, n, 2))
    if kind is FamilyKind.F3_TRIPLES:
        return _or_all(mgr, _monomials(mgr, n, 3))
    if kind is FamilyKind.PARITY:
        r = mgr.zero
        for x in reversed(xs):
            r = x ^ r
        return r
    if kind is FamilyKind.ALL_AND:
        return _and_all(mgr, xs)
    if kind is FamilyKind.ALL_OR:
        return _or_all(mgr, xs)
    k = spec.rule_value()
    if kind is FamilyKind.SYM_EXACTLY:
        return _exactly_counts(mgr, xs, k)[k]
    if kind is FamilyKind.SYM_THRESHOLD:
        return _at_least(mgr, xs, k)
    if kind is FamilyKind.MUL_BIT:
        return _product_bits(mgr, n, k + 1)[k]
    raise FamilyError(f'no builder for {kind}')


# -- direct formula evaluation (never touches BDDs) ------------------------

def evaluate(spec, assignment):
    """Evaluate the defining formula of `spec` on ``{var: bit}``."""
    total = variable_count(spec)
    bits = [1 if assignment[i] else 0 for i in range(1, total + 1)]
    return _formula(spec, [np.asarray(b) for b in bits]).item()


def truth_table(spec, order=None):
    """Truth table of `spec` as a uint8 array of length ``2**N``.

    Entry ``t`` assigns the variable at level ``p`` of `order` the bit
    ``(t >> (N - 1 - p)) & 1``, so the root variable is the most
    significant index bit.
    """
    if order is None:
        order = resolve_order(spec)
    total = variable_count(spec)
    idx = np.arange(1 << total, dtype=np.int64)
    columns = [None] * total
    for p, v in enumerate(order.variables):
        columns[v - 1] = ((idx >> (total - 1 - p)) & 1).astype(np.uint8)
    return _formula(spec, columns).astype(np.uint8)


def _formula(spec, x):
    """Evaluate on bit columns; ``x[i]`` holds variable ``i + 1``."""
    kind = spec.kind
    n = spec.n
    if kind is FamilyKind.F2_PAIRS or kind is FamilyKind.F3_TRIPLES:
        width = 2 if kind is FamilyKind.F2_PAIRS else 3
        r = np.zeros_like(x[0])
        for i in range(n):
            term = np.ones_like(x[0])
            for j in range(width):
                term = term & x[width * i + j]
            r = r | term
        return r
    if kind is FamilyKind.ALL_AND:
        r = np.ones_like(x[0])
        for c in x:
            r = r & c
        return r
    if kind is FamilyKind.ALL_OR:
        r = np.zeros_like(x[0])
        for c in x:
            r = r | c
        return r
    weight = np.zeros(np.shape(x[0]), dtype=np.int64)
    for c in x:
        weight = weight + c
    if kind is FamilyKind.PARITY:
        return (weight & 1).astype(np.uint8)
    if kind is FamilyKind.SYM_EXACTLY:
        return (weight == spec.rule_value()).astype(np.uint8)
    if kind is FamilyKind.SYM_THRESHOLD:
        return (weight >= spec.rule_value()).astype(np.uint8)
    if kind is FamilyKind.MUL_BIT:
        a = np.zeros(np.shape(x[0]), dtype=np.int64)
        b = np.zeros(np.shape(x[0]), dtype=np.int64)
        for i in range(n):
            a = a + (x[i].astype(np.int64) << i)
            b = b + (x[n + i].astype(np.int64) << i)
        return (((a * b) >> spec.rule_value()) & 1).astype(np.uint8)
    raise FamilyError(f'no formula for {kind}')


CATALOG = (
    FamilyId(FamilyKind.F2_PAIRS),
    FamilyId(FamilyKind.F3_TRIPLES),
    FamilyId(FamilyKind.SYM_EXACTLY, Rule.HALF_RULE),
    FamilyId(FamilyKind.SYM_EXACTLY, Rule.N_MINUS_1_RULE),
    FamilyId(FamilyKind.SYM_EXACTLY, Rule(Rule.CONST, 1)),
    FamilyId(FamilyKind.SYM_THRESHOLD, Rule.HALF_RULE),
    FamilyId(FamilyKind.SYM_THRESHOLD, Rule.N_MINUS_1_RULE),
    FamilyId(FamilyKind.SYM_THRESHOLD, Rule(Rule.CONST, 2)),
    FamilyId(FamilyKind.PARITY),
    FamilyId(FamilyKind.ALL_AND),
    FamilyId(FamilyKind.ALL_OR),
    FamilyId(FamilyKind.MUL_BIT, Rule.N_MINUS_1_RULE),
    FamilyId(FamilyKind.MUL_BIT, Rule.HALF_RULE),
    FamilyId(FamilyKind.MUL_BIT, Rule(Rule.CONST, 0)),
)
