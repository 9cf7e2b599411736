"""Size measurement, an independent truth-table oracle, and growth tests."""
from dataclasses import dataclass, field
from fractions import Fraction
import csv
import io
import logging
import math
import re

import numpy as np

from pfv.bdd import BddManager, LevelProfile, NodeBudgetExceeded
from pfv.families import (
    FamilyTemplate, build, resolve_order, truth_table,
    variable_count,
)


__all__ = [
    'ENGINE', 'ORACLE', 'DEFAULT_NODE_CAP', 'DEFAULT_RATIO_THRESHOLD',
    'DEFAULT_POLY_CMAX', 'ORACLE_MAX_VARS',
    'InsufficientData', 'OracleCapacityError',
    'Confirmed', 'Refuted', 'Inconclusive',
    'Point', 'SizeSeries', 'GrowthClass', 'GrowthVerdict',
    'measure_point', 'measure_series', 'oracle_size', 'oracle_series',
    'classify_growth', 'check_poly_bound',
]

logger = logging.getLogger(__name__)

ENGINE = 'ENGINE'
ORACLE = 'ORACLE'

DEFAULT_NODE_CAP = 5_000_000
DEFAULT_RATIO_THRESHOLD = Fraction(3, 2)
DEFAULT_POLY_CMAX = 64
DEFAULT_SLACK = Fraction(5, 100)
MAX_DEGREE = 4
ORACLE_MAX_VARS = 20


class InsufficientData(ValueError):
    pass


class OracleCapacityError(ValueError):
    pass


# -- verdict statuses, shared with the verifier ----------------------------

@dataclass(frozen=True)
class Confirmed:
    """Holds at every checked point up to and including `n_max`."""

    n_max: int

    def __str__(self):
        return f'CONFIRMED_UP_TO({self.n_max})'


@dataclass(frozen=True)
class Refuted:
    """Fails at `n`: the claim says `claimed`, measurement says `measured`."""

    n: int
    claimed: object
    measured: object

    def __str__(self):
        return f'REFUTED({self.n}, {_fmt(self.claimed)}, {_fmt(self.measured)})'


@dataclass(frozen=True)
class Inconclusive:
    reason: str

    def __str__(self):
        return f'INCONCLUSIVE({self.reason})'


def _fmt(value):
    if isinstance(value, Fraction) and value.denominator == 1:
        return str(value.numerator)
    return str(value)


# -- series -----------------------------------------------------------------

@dataclass(frozen=True)
class Point:
    n: int
    count: int
    profile: LevelProfile

    def __post_init__(self):
        object.__setattr__(self, 'profile', LevelProfile(self.profile))
        if sum(self.profile) != self.count:
            raise ValueError(
                f'profile {list(self.profile)} does not sum to {self.count}')


@dataclass(frozen=True)
class SizeSeries:
    """Internal node counts of one template over consecutive parameters.

    `truncated_at` names the first parameter that could not be measured
    within the node budget; the series stops before it.
    """

    template: FamilyTemplate
    points: tuple
    source: str = ENGINE
    truncated_at: int = None

    def __post_init__(self):
        object.__setattr__(self, 'points', tuple(self.points))
        ns = [p.n for p in self.points]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError(f'parameters must strictly increase: {ns}')
        if self.source not in (ENGINE, ORACLE):
            raise ValueError(f'unknown source {self.source!r}')

    def __len__(self):
        return len(self.points)

    @property
    def ns(self):
        return [p.n for p in self.points]

    @property
    def counts(self):
        return [p.count for p in self.points]

    def at(self, n):
        for p in self.points:
            if p.n == n:
                return p
        return None

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator='\n')
        writer.writerow(['n', 'count', 'profile', 'source'])
        for p in self.points:
            writer.writerow(
                [p.n, p.count, ';'.join(map(str, p.profile)), self.source])
        return buf.getvalue()

    def to_dict(self):
        return {
            'template': str(self.template),
            'source': self.source,
            'truncated_at': self.truncated_at,
            'points': [{'n': p.n, 'count': p.count,
                        'profile': list(p.profile)} for p in self.points],
        }

    @classmethod
    def from_dict(cls, data):
        from pfv.families import parse_template
        points = [Point(p['n'], p['count'], p['profile'])
                  for p in data['points']]
        return cls(parse_template(data['template']), points,
                   data['source'], data.get('truncated_at'))


def measure_point(spec, node_cap=DEFAULT_NODE_CAP):
    """Build `spec` in a fresh manager; return ``(count, profile)``."""
    mgr = BddManager(resolve_order(spec), node_cap=node_cap)
    f = build(spec, mgr)
    return mgr.internal_node_count(f), mgr.level_profile(f)


def measure_series(template, n_from, n_to, node_cap=DEFAULT_NODE_CAP):
    if n_from < 1 or n_to < n_from:
        raise ValueError(f'bad parameter range {n_from}..{n_to}')
    points = []
    truncated_at = None
    for n in range(n_from, n_to + 1):
        try:
            count, profile = measure_point(template.at(n), node_cap)
        except NodeBudgetExceeded:
            logger.warning('%s: node cap %d hit at n=%d', template, node_cap, n)
            truncated_at = n
            break
        points.append(Point(n, count, profile))
    return SizeSeries(template, points, ENGINE, truncated_at)


def oracle_size(spec):
    """Count distinct essential subfunctions per level from the truth table.

    At level i the subfunctions are the blocks of the level-ordered
    truth table obtained by fixing the first i variables; a block gets a
    node only if its two halves (the cofactors on the level-i variable)
    differ.
    """
    total = variable_count(spec)
    if total > ORACLE_MAX_VARS:
        raise OracleCapacityError(
            f'{spec} has {total} variables; oracle limit is {ORACLE_MAX_VARS}')
    tt = np.ascontiguousarray(truth_table(spec, resolve_order(spec)))
    counts = []
    for i in range(total):
        width = 1 << (total - i)
        blocks = tt.reshape(-1, width)
        half = width // 2
        essential = np.any(blocks[:, :half] != blocks[:, half:], axis=1)
        rows = np.ascontiguousarray(blocks[essential])
        if len(rows) == 0:
            counts.append(0)
            continue
        keys = rows.view(np.dtype((np.void, width))).ravel()
        counts.append(len(np.unique(keys)))
    profile = LevelProfile(counts)
    return profile.total, profile


def oracle_series(template, n_from, n_to):
    points = []
    for n in range(n_from, n_to + 1):
        count, profile = oracle_size(template.at(n))
        points.append(Point(n, count, profile))
    return SizeSeries(template, points, ORACLE)


# -- growth classification --------------------------------------------------

_GROWTH_RE = re.compile(r'^\s*(LINEAR|EXPONENTIAL|INCONCLUSIVE|'
                        r'POLYNOMIAL\s*\(\s*(\d+)\s*\))\s*$')


@dataclass(frozen=True)
class GrowthClass:
    kind: str
    degree: int = None

    LINEAR = 'LINEAR'
    POLYNOMIAL = 'POLYNOMIAL'
    EXPONENTIAL = 'EXPONENTIAL'
    INCONCLUSIVE = 'INCONCLUSIVE'

    def __post_init__(self):
        if self.kind == self.LINEAR:
            object.__setattr__(self, 'degree', 1)
        elif self.kind == self.POLYNOMIAL:
            if self.degree is None or self.degree < 0:
                raise ValueError('POLYNOMIAL needs a degree >= 0')
        elif self.kind in (self.EXPONENTIAL, self.INCONCLUSIVE):
            object.__setattr__(self, 'degree', None)
        else:
            raise ValueError(f'unknown growth class {self.kind!r}')

    def __str__(self):
        if self.kind == self.POLYNOMIAL:
            return f'POLYNOMIAL({self.degree})'
        return self.kind

    @classmethod
    def parse(cls, text):
        m = _GROWTH_RE.match(text)
        if m is None:
            raise ValueError(f'bad growth class {text!r}')
        if m[2] is not None:
            return cls(cls.POLYNOMIAL, int(m[2]))
        return cls(m[1])

    @property
    def is_polynomial(self):
        return self.kind in (self.LINEAR, self.POLYNOMIAL)

    def admits(self, measured):
        """Whether a measured class is compatible with this claimed class."""
        if self.kind == self.EXPONENTIAL:
            return measured.kind == self.EXPONENTIAL
        if self.is_polynomial and measured.is_polynomial:
            return measured.degree <= self.degree
        return False


@dataclass(frozen=True)
class GrowthVerdict:
    growth: GrowthClass
    evidence: dict = field(compare=False)
    window: tuple

    @property
    def kind(self):
        return self.growth.kind


def _series_data(series):
    if isinstance(series, SizeSeries):
        return series.ns, series.counts
    counts = list(series)
    return list(range(1, len(counts) + 1)), counts


def _ratio(prev, cur):
    if prev == 0:
        return Fraction(1) if cur == 0 else Fraction(cur)
    return Fraction(cur, prev)


def classify_growth(series, ratio_threshold=DEFAULT_RATIO_THRESHOLD,
                    c_max=DEFAULT_POLY_CMAX, slack=DEFAULT_SLACK,
                    max_degree=MAX_DEGREE):
    """Classify size growth as exponential, polynomial of degree d, or neither.

    `series` is a :class:`SizeSeries` or a plain list of counts taken at
    n = 1, 2, ...

    Exponential: every successive ratio in the trailing window (the last
    ``max(3, ceil(points/2))`` ratios) strictly exceeds `ratio_threshold`.

    Polynomial of degree d: with ``r(n) = count(n) / n**d``, the
    dominating constant ``max r`` over all points is at most `c_max`,
    and over the trailing window the largest r in the later half is at
    most ``(1 + slack)`` times the largest r in the earlier half, i.e.
    the bound fitted on the start of the window still covers its end.
    The smallest such d wins.
    """
    ns, counts = _series_data(series)
    if len(counts) < 4:
        raise InsufficientData(f'need at least 4 points, got {len(counts)}')
    ratio_threshold = Fraction(ratio_threshold)
    slack = Fraction(slack)
    ratios = [_ratio(a, b) for a, b in zip(counts, counts[1:])]
    width = min(len(ratios), max(3, math.ceil(len(counts) / 2)))
    tail = ratios[-width:]
    window_ns = ns[-(width + 1):]
    evidence = {
        'ratios': [float(r) for r in ratios],
        'window_ratios': [float(r) for r in tail],
        'ratio_threshold': float(ratio_threshold),
    }
    window = (window_ns[0], window_ns[-1])
    if all(r > ratio_threshold for r in tail):
        evidence['min_window_ratio'] = float(min(tail))
        return GrowthVerdict(GrowthClass(GrowthClass.EXPONENTIAL),
                             evidence, window)

    start = len(counts) - len(window_ns)
    half = len(window_ns) // 2
    for d in range(max_degree + 1):
        r = [Fraction(c, n ** d) for n, c in zip(ns, counts)]
        c_dom = max(r)
        early = max(r[start:start + half])
        late = max(r[start + half:])
        if c_dom <= c_max and late <= (1 + slack) * early:
            denom = sum(n ** (2 * d) for n in ns)
            c_ls = sum(c * n ** d for n, c in zip(ns, counts)) / denom
            evidence.update({
                'degree': d,
                'dominating_constant': float(c_dom),
                'least_squares_constant': float(c_ls),
                'window_early_max': float(early),
                'window_late_max': float(late),
            })
            growth = (GrowthClass(GrowthClass.LINEAR) if d == 1
                      else GrowthClass(GrowthClass.POLYNOMIAL, d))
            return GrowthVerdict(growth, evidence, window)
    return GrowthVerdict(GrowthClass(GrowthClass.INCONCLUSIVE), evidence, window)


def check_poly_bound(series, c, d):
    """Check ``count(n) <= c * n**d`` at every point of `series`."""
    if len(series) == 0:
        raise ValueError('empty series')
    c = Fraction(c)
    if c < 0 or d < 0:
        raise ValueError('bound constant and degree must be non-negative')
    for p in series.points:
        bound = c * p.n ** d
        if p.count > bound:
            return Refuted(p.n, bound, p.count)
    return Confirmed(series.points[-1].n)
