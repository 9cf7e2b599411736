"""Inductive size claims: bound expressions, the claim file format, and
rendering of checked claims as readable induction proofs.

A claim document is a flat JSON object::

    {
      "family": "F2@k/NATURAL",
      "base_n": 1,
      "base_size": 2,
      "step_delta": "2",
      "bound": "2*k",
      "bound_scale_denominator": 1,
      "growth_class": "LINEAR",
      "narrative": "..."
    }

Bound expressions use the grammar::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := INT | 'n' | 'n' '^' INT | INT '^' 'n' | '(' expr ')'

with ``k`` accepted as a synonym for ``n``. There is no division; a
halved bound is written with ``bound_scale_denominator`` set to 2.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import json
import math

from pfv.families import FamilyError, FamilyTemplate, parse_template
from pfv.measurement import Confirmed, GrowthClass, Refuted


__all__ = [
    'ParseError', 'EvalOverflow', 'NegativeBound', 'ClaimFormatError',
    'ReportMismatch', 'INT64_MAX',
    'BoundExpr', 'Lit', 'N', 'Add', 'Sub', 'Mul', 'Pow', 'Exp',
    'parse_bound_expr', 'eval_bound_expr', 'growth_rank',
    'ClaimSource', 'ProofClaim', 'CLAIM_KEYS',
    'parse_claim', 'serialize_claim', 'claim_to_dict', 'render_proof',
]

INT64_MAX = 2 ** 63 - 1
_DIGITS = '0123456789'


class ParseError(ValueError):
    def __init__(self, message, position):
        super().__init__(f'{message} at position {position}')
        self.position = position


class EvalOverflow(ArithmeticError):
    """A bound value exceeds the signed 64-bit range."""


class NegativeBound(ArithmeticError):
    pass


class ClaimFormatError(ValueError):
    def __init__(self, field_name, message=None):
        super().__init__(field_name if message is None
                         else f'{field_name}: {message}')
        self.field = field_name


class ReportMismatch(ValueError):
    pass


# -- bound expressions ------------------------------------------------------

class BoundExpr:
    """Base class of bound expression trees."""

    precedence = 3

    def evaluate(self, n):
        value = self._eval(n)
        if value < 0:
            raise NegativeBound(f'{self} is negative ({value}) at n={n}')
        return value

    def __str__(self):
        raise NotImplementedError


def _checked(value):
    if abs(value) > INT64_MAX:
        raise EvalOverflow(value)
    return value


@dataclass(frozen=True)
class Lit(BoundExpr):
    value: int

    def _eval(self, n):
        return _checked(self.value)

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class N(BoundExpr):
    def _eval(self, n):
        return _checked(n)

    def __str__(self):
        return 'n'


@dataclass(frozen=True)
class Pow(BoundExpr):
    """``n ** exponent``."""

    exponent: int

    def _eval(self, n):
        if n >= 2 and self.exponent * math.log2(n) > 64:
            raise EvalOverflow(f'n^{self.exponent} at n={n}')
        return _checked(n ** self.exponent)

    def __str__(self):
        return f'n^{self.exponent}'


@dataclass(frozen=True)
class Exp(BoundExpr):
    """``base ** n``."""

    base: int

    def _eval(self, n):
        if self.base >= 2 and n * math.log2(self.base) > 64:
            raise EvalOverflow(f'{self.base}^n at n={n}')
        return _checked(self.base ** n)

    def __str__(self):
        return f'{self.base}^n'


@dataclass(frozen=True)
class _Binary(BoundExpr):
    left: BoundExpr
    right: BoundExpr

    symbol = '?'

    def __str__(self):
        left = str(self.left)
        if self.left.precedence < self.precedence:
            left = f'({left})'
        right = str(self.right)
        if self.right.precedence <= self.precedence:
            right = f'({right})'
        return f'{left} {self.symbol} {right}'


@dataclass(frozen=True)
class Add(_Binary):
    precedence = 1
    symbol = '+'

    def _eval(self, n):
        return _checked(self.left._eval(n) + self.right._eval(n))


@dataclass(frozen=True)
class Sub(_Binary):
    precedence = 1
    symbol = '-'

    def _eval(self, n):
        return _checked(self.left._eval(n) - self.right._eval(n))


@dataclass(frozen=True)
class Mul(_Binary):
    precedence = 2
    symbol = '*'

    def _eval(self, n):
        return _checked(self.left._eval(n) * self.right._eval(n))


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ''

    def expect(self, ch):
        if self.peek() != ch:
            found = self.peek() or 'end of input'
            raise ParseError(f'expected {ch!r}, found {found!r}', self.pos)
        self.pos += 1

    def integer(self):
        self._skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] in _DIGITS:
            self.pos += 1
        if start == self.pos:
            found = self.peek() or 'end of input'
            raise ParseError(f'expected integer, found {found!r}', start)
        return int(self.text[start:self.pos])

    def expr(self):
        node = self.term()
        while self.peek() in ('+', '-'):
            op = self.peek()
            self.pos += 1
            right = self.term()
            node = Add(node, right) if op == '+' else Sub(node, right)
        return node

    def term(self):
        node = self.factor()
        while self.peek() == '*':
            self.pos += 1
            node = Mul(node, self.factor())
        return node

    def factor(self):
        ch = self.peek()
        if ch == '(':
            self.pos += 1
            node = self.expr()
            self.expect(')')
            return node
        if ch in ('n', 'k'):
            self.pos += 1
            if self.peek() == '^':
                self.pos += 1
                return Pow(self.integer())
            return N()
        if ch and ch in _DIGITS:
            value = self.integer()
            if self.peek() == '^':
                self.pos += 1
                if self.peek() not in ('n', 'k'):
                    raise ParseError('exponent of a literal base must be n',
                                     self.pos)
                self.pos += 1
                return Exp(value)
            return Lit(value)
        raise ParseError(f'unexpected {ch or "end of input"!r}', self.pos)


def parse_bound_expr(text):
    if not isinstance(text, str):
        raise TypeError(f'expected str, got {type(text).__name__}')
    parser = _Parser(text)
    node = parser.expr()
    if parser.peek():
        raise ParseError(f'unexpected {parser.peek()!r}', parser.pos)
    return node


def eval_bound_expr(expr, n):
    """Exact value of `expr` at `n`.

    Raises EvalOverflow past the signed 64-bit range and NegativeBound
    for a negative result.
    """
    if n < 1:
        raise ValueError(f'n must be >= 1, got {n}')
    return expr.evaluate(n)


def growth_rank(expr):
    """Syntactic dominant term: ``('exp', None)`` or ``('poly', degree)``."""
    if isinstance(expr, Lit):
        return ('poly', 0)
    if isinstance(expr, N):
        return ('poly', 1)
    if isinstance(expr, Pow):
        return ('poly', expr.exponent)
    if isinstance(expr, Exp):
        return ('exp', None) if expr.base >= 2 else ('poly', 0)
    left, right = growth_rank(expr.left), growth_rank(expr.right)
    if left[0] == 'exp' or right[0] == 'exp':
        return ('exp', None)
    if isinstance(expr, Mul):
        return ('poly', left[1] + right[1])
    return ('poly', max(left[1], right[1]))


# -- claims -----------------------------------------------------------------

FIXTURE = 'FIXTURE'
LLM = 'LLM'
USER = 'USER'


@dataclass(frozen=True)
class ClaimSource:
    """Where a claim came from; LLM claims keep the raw completion."""

    origin: str = USER
    provider: str = None
    model: str = None
    timestamp: str = None
    raw: str = None

    def __post_init__(self):
        if self.origin not in (FIXTURE, LLM, USER):
            raise ValueError(f'unknown claim origin {self.origin!r}')
        if self.origin == LLM and not self.raw:
            raise ValueError('LLM claims must retain the raw completion text')


CLAIM_KEYS = ('family', 'base_n', 'base_size', 'step_delta', 'bound',
              'bound_scale_denominator', 'growth_class', 'narrative')
_REQUIRED = ('family', 'base_n', 'base_size', 'step_delta', 'bound',
             'growth_class')


@dataclass(frozen=True)
class ProofClaim:
    family: FamilyTemplate
    base_n: int
    base_size: int
    step_delta: BoundExpr
    bound: BoundExpr
    growth_class: GrowthClass
    narrative: str = ''
    bound_scale_denominator: int = 1
    source: ClaimSource = field(default=ClaimSource(), compare=False)

    def __post_init__(self):
        if self.base_n < 1:
            raise ClaimFormatError('base_n', 'must be >= 1')
        if self.base_size < 0:
            raise ClaimFormatError('base_size', 'must be >= 0')
        if self.bound_scale_denominator not in (1, 2):
            raise ClaimFormatError('bound_scale_denominator', 'must be 1 or 2')
        g = self.growth_class
        if g.kind == GrowthClass.INCONCLUSIVE:
            raise ClaimFormatError('growth_class', 'a claim must commit')
        kind, degree = growth_rank(self.bound)
        if g.kind == GrowthClass.EXPONENTIAL and kind != 'exp':
            raise ClaimFormatError(
                'growth_class', f'EXPONENTIAL claim with bound {self.bound}')
        if g.is_polynomial and (kind == 'exp' or degree > g.degree):
            raise ClaimFormatError(
                'growth_class', f'{g} claim with bound {self.bound}')

    def bound_at(self, n):
        """Claimed size bound at `n` as an exact fraction."""
        return Fraction(eval_bound_expr(self.bound, n),
                        self.bound_scale_denominator)

    def with_source(self, source):
        return ProofClaim(self.family, self.base_n, self.base_size,
                          self.step_delta, self.bound, self.growth_class,
                          self.narrative, self.bound_scale_denominator, source)


def _int_field(data, key, minimum):
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ClaimFormatError(key, f'expected an integer, got {value!r}')
    if value < minimum:
        raise ClaimFormatError(key, f'must be >= {minimum}')
    return value


def _expr_field(data, key):
    value = data[key]
    if not isinstance(value, str):
        raise ClaimFormatError(key, 'expected an expression string')
    try:
        return parse_bound_expr(value)
    except ParseError as exc:
        raise ClaimFormatError(key, str(exc)) from None


def claim_from_dict(data, source=None):
    if not isinstance(data, dict):
        raise ClaimFormatError('document', 'expected a JSON object')
    unknown = sorted(set(data) - set(CLAIM_KEYS))
    if unknown:
        raise ClaimFormatError(unknown[0], 'unknown key')
    for key in _REQUIRED:
        if key not in data:
            raise ClaimFormatError(key, 'missing')
    if not isinstance(data['family'], str):
        raise ClaimFormatError('family', 'expected a string')
    try:
        family = parse_template(data['family'])
    except FamilyError as exc:
        raise ClaimFormatError('family', str(exc)) from None
    if not isinstance(data['growth_class'], str):
        raise ClaimFormatError('growth_class', 'expected a string')
    try:
        growth = GrowthClass.parse(data['growth_class'])
    except ValueError as exc:
        raise ClaimFormatError('growth_class', str(exc)) from None
    narrative = data.get('narrative', '')
    if not isinstance(narrative, str):
        raise ClaimFormatError('narrative', 'expected a string')
    denominator = data.get('bound_scale_denominator', 1)
    if isinstance(denominator, bool) or not isinstance(denominator, int):
        raise ClaimFormatError('bound_scale_denominator',
                               'expected an integer')
    return ProofClaim(
        family=family,
        base_n=_int_field(data, 'base_n', 1),
        base_size=_int_field(data, 'base_size', 0),
        step_delta=_expr_field(data, 'step_delta'),
        bound=_expr_field(data, 'bound'),
        growth_class=growth,
        narrative=narrative,
        bound_scale_denominator=denominator,
        source=source or ClaimSource(),
    )


def parse_claim(document, source=None):
    """Parse a claim document (JSON text) into a :class:`ProofClaim`."""
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ClaimFormatError('document', f'invalid JSON: {exc}') from None
    return claim_from_dict(data, source)


def claim_to_dict(claim):
    return {
        'family': str(claim.family),
        'base_n': claim.base_n,
        'base_size': claim.base_size,
        'step_delta': str(claim.step_delta),
        'bound': str(claim.bound),
        'bound_scale_denominator': claim.bound_scale_denominator,
        'growth_class': str(claim.growth_class),
        'narrative': claim.narrative,
    }


def serialize_claim(claim):
    return json.dumps(claim_to_dict(claim), indent=2, sort_keys=True,
                      ensure_ascii=False) + '\n'


# -- proof rendering --------------------------------------------------------

VALIDATION_RULE = (
    'A claim is VALIDATED when no aspect is refuted and both the size bound '
    'and the growth class are confirmed on the measured range. '
    'Confirmation is bounded: nothing is asserted beyond the largest '
    'tested parameter.'
)
SIZE_MEASURE = (
    'Sizes count internal (non-terminal) nodes of the reduced ordered BDD; '
    'the two terminal nodes are excluded.'
)


def _fmt(value):
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f'{value.numerator}/{value.denominator}'
    return str(value)


def _bound_text(claim):
    if claim.bound_scale_denominator == 1:
        return str(claim.bound)
    return f'({claim.bound})/{claim.bound_scale_denominator}'


def _evidence(status, what):
    if isinstance(status, Confirmed):
        return f'Confirmed: {what} holds for all tested n ≤ {status.n_max}.'
    if isinstance(status, Refuted):
        return (f'Refuted at n = {status.n}: claim stated '
                f'{_fmt(status.claimed)}, measurement shows '
                f'{_fmt(status.measured)}.')
    return f'Not established: {status.reason}.'


def render_proof(claim, report):
    """Render `claim` with the verifier's evidence as a Markdown proof.

    Refuted aspects are shown side by side with the measured values;
    the claim is never rewritten to fit the measurements.
    """
    if report.claim != claim:
        raise ReportMismatch('report was produced for a different claim')
    v = report.verdict_map()
    series = report.series
    lines = [f'# Inductive size proof for {claim.family}', '']
    lines.append(f'Overall verdict: {report.overall}')
    lines.append('')
    lines.append(VALIDATION_RULE)
    lines.append(SIZE_MEASURE)
    if series.points:
        lines.append(f'Measured range: n = {series.points[0].n}..'
                     f'{series.points[-1].n} ({series.source}).')
    if series.truncated_at is not None:
        lines.append(f'Measurement stopped at n = {series.truncated_at}: '
                     'node budget exceeded.')
    lines.append('')

    base = v['BASE_CASE']
    lines += ['## Base Case', '',
              f'Claim: for n = {claim.base_n} the BDD has '
              f'{claim.base_size} internal nodes.',
              _evidence(base, f'the base size {claim.base_size}')]
    if isinstance(base, Refuted):
        with_terminals = base.measured + 2
        if with_terminals == claim.base_size:
            lines.append(f'Counting the two terminals as well gives '
                         f'{with_terminals}, so the stated figure uses a '
                         'different size convention.')
        else:
            lines.append(f'Counting the two terminals as well would give '
                         f'{with_terminals}, which does not match either.')
    lines.append('')

    bound = v['BOUND']
    lines += ['## Inductive Hypothesis', '',
              f'Assume the BDD for parameter n has at most {_bound_text(claim)} '
              'internal nodes.',
              _evidence(bound, f'the bound {_bound_text(claim)}'), '']

    step = v['STEP_RECURRENCE']
    pattern = v['LEVEL_PATTERN']
    lines += ['## Inductive Step', '',
              f'Claim: going from n - 1 to n adds {claim.step_delta} nodes.',
              _evidence(step, f'the increment {claim.step_delta}')]
    p = report.pattern
    if p is not None and p.stable:
        lines.append(f'Level profiles: from n = {p.n0} on, every step adds '
                     f'the per-level increments {list(p.pattern)}.')
    elif p is not None and p.bounded:
        lines.append(f'Level profiles: from n = {p.n0} on, no existing level '
                     f'grows by more than {p.max_level_increment} node per step.')
    else:
        lines.append(_evidence(pattern, 'a regular level pattern'))
    lines.append('')

    growth = v['GROWTH_CLASS']
    lines += ['## Conclusion', '',
              f'Claimed growth class: {claim.growth_class}.']
    g = report.growth
    if g is not None:
        lines.append(f'Measured growth class: {g.growth} '
                     f'(window n = {g.window[0]}..{g.window[1]}).')
        if g.growth.kind == GrowthClass.EXPONENTIAL:
            ratios = ', '.join(f'{r:.3f}' for r in g.evidence['window_ratios'])
            lines.append(f'Successive size ratios in the window: {ratios}; '
                         f'all exceed {g.evidence["ratio_threshold"]:g}.')
        elif 'degree' in g.evidence:
            lines.append(f'Dominating constant for n^{g.evidence["degree"]}: '
                         f'{g.evidence["dominating_constant"]:.4f}.')
    lines.append(_evidence(growth, f'the growth class {claim.growth_class}'))
    lines.append('')
    lines += ['| aspect | status |', '| --- | --- |']
    for verdict in report.verdicts:
        lines.append(f'| {verdict.aspect} | {verdict.status} |')
    lines.append('')
    lines += ['## Sketch', '', claim.narrative, '']
    return '\n'.join(lines)
