"""Check inductive size claims against measured BDD sizes.

Every aspect of a claim gets one of three statuses: confirmed up to the
largest tested parameter, refuted with a concrete witness, or
inconclusive. Confirmation is never extrapolated.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import json

from pfv.claims import (
    EvalOverflow, NegativeBound, VALIDATION_RULE, claim_from_dict,
    claim_to_dict, eval_bound_expr,
)
from pfv.families import resolve_order, variable_labels
from pfv.measurement import (
    DEFAULT_NODE_CAP, DEFAULT_POLY_CMAX, DEFAULT_RATIO_THRESHOLD, Confirmed,
    GrowthClass, GrowthVerdict, Inconclusive, Refuted, SizeSeries,
    classify_growth, measure_series,
)


__all__ = [
    'BASE_CASE', 'STEP_RECURRENCE', 'BOUND', 'GROWTH_CLASS', 'LEVEL_PATTERN',
    'ASPECTS', 'VALIDATED', 'REFUTED', 'INCONCLUSIVE',
    'VerifierConfig', 'AspectVerdict', 'PatternReport', 'VerificationReport',
    'check_base_case', 'check_recurrence', 'check_bound',
    'check_growth_class', 'check_level_pattern', 'pattern_from_series',
    'verify', 'report_to_json', 'report_from_json',
]

BASE_CASE = 'BASE_CASE'
STEP_RECURRENCE = 'STEP_RECURRENCE'
BOUND = 'BOUND'
GROWTH_CLASS = 'GROWTH_CLASS'
LEVEL_PATTERN = 'LEVEL_PATTERN'
ASPECTS = (BASE_CASE, STEP_RECURRENCE, BOUND, GROWTH_CLASS, LEVEL_PATTERN)

VALIDATED = 'VALIDATED'
REFUTED = 'REFUTED'
INCONCLUSIVE = 'INCONCLUSIVE'


@dataclass(frozen=True)
class VerifierConfig:
    ratio_threshold: Fraction = DEFAULT_RATIO_THRESHOLD
    poly_cmax: int = DEFAULT_POLY_CMAX
    node_cap: int = DEFAULT_NODE_CAP


@dataclass(frozen=True)
class AspectVerdict:
    aspect: str
    status: object

    def __post_init__(self):
        if self.aspect not in ASPECTS:
            raise ValueError(f'unknown aspect {self.aspect!r}')


def check_base_case(claim, series):
    point = series.at(claim.base_n)
    if point is None:
        return AspectVerdict(BASE_CASE, Inconclusive('base point not measured'))
    if point.count == claim.base_size:
        return AspectVerdict(BASE_CASE, Confirmed(claim.base_n))
    return AspectVerdict(
        BASE_CASE, Refuted(claim.base_n, claim.base_size, point.count))


def check_recurrence(claim, series):
    """Compare measured increments ``count(n) - count(n-1)`` with the
    claimed step delta evaluated at the new parameter n."""
    points = [p for p in series.points if p.n >= claim.base_n]
    if len(points) < 2:
        return AspectVerdict(
            STEP_RECURRENCE, Inconclusive('fewer than two points measured'))
    for prev, cur in zip(points, points[1:]):
        if cur.n != prev.n + 1:
            return AspectVerdict(
                STEP_RECURRENCE, Inconclusive(f'gap in series after n={prev.n}'))
        try:
            claimed = eval_bound_expr(claim.step_delta, cur.n)
        except NegativeBound:
            return AspectVerdict(
                STEP_RECURRENCE, Inconclusive(f'negative step delta at n={cur.n}'))
        except EvalOverflow:
            return AspectVerdict(
                STEP_RECURRENCE, Inconclusive(f'step delta overflows at n={cur.n}'))
        measured = cur.count - prev.count
        if measured != claimed:
            return AspectVerdict(STEP_RECURRENCE, Refuted(cur.n, claimed, measured))
    return AspectVerdict(STEP_RECURRENCE, Confirmed(points[-1].n))


def check_bound(claim, series):
    if len(series) == 0:
        return AspectVerdict(BOUND, Inconclusive('empty series'))
    denominator = claim.bound_scale_denominator
    for p in series.points:
        try:
            value = eval_bound_expr(claim.bound, p.n)
        except EvalOverflow:
            continue
        except NegativeBound:
            return AspectVerdict(BOUND, Inconclusive(f'negative bound at n={p.n}'))
        if p.count * denominator > value:
            return AspectVerdict(
                BOUND, Refuted(p.n, Fraction(value, denominator), p.count))
    return AspectVerdict(BOUND, Confirmed(series.points[-1].n))


def _classify(series, config):
    if len(series) < 4:
        return None
    return classify_growth(series, ratio_threshold=config.ratio_threshold,
                           c_max=config.poly_cmax)


def check_growth_class(claim, series, config=VerifierConfig(), verdict=None):
    if len(series) < 4:
        return AspectVerdict(
            GROWTH_CLASS, Inconclusive('fewer than four points measured'))
    if verdict is None:
        verdict = _classify(series, config)
    if verdict.growth.kind == GrowthClass.INCONCLUSIVE:
        return AspectVerdict(
            GROWTH_CLASS, Inconclusive('growth classifier was inconclusive'))
    last = series.points[-1].n
    if claim.growth_class.admits(verdict.growth):
        return AspectVerdict(GROWTH_CLASS, Confirmed(last))
    return AspectVerdict(GROWTH_CLASS, Refuted(
        last, str(claim.growth_class), str(verdict.growth)))


# -- level profile regularity -----------------------------------------------

@dataclass(frozen=True)
class PatternReport:
    """Per-step level-profile increments of a family.

    Profiles of consecutive parameters are aligned by variable identity.
    Each step's increment vector lists, in the larger instance's order,
    the change in node count at every level, with zero runs at both ends
    trimmed. `stable` means that vector is the same for every step from
    `n0` on. `bounded` means that from `n0` on no pre-existing level
    gains more than one node per step and the levels of new variables do
    not grow.
    """

    template: str
    n_from: int
    n_to: int
    deltas: tuple
    stable: bool
    bounded: bool
    n0: int = None
    pattern: tuple = None
    max_level_increment: int = None
    truncated: bool = False

    def to_dict(self):
        return {
            'template': self.template,
            'n_from': self.n_from,
            'n_to': self.n_to,
            'deltas': [[n, list(d)] for n, d in self.deltas],
            'stable': self.stable,
            'bounded': self.bounded,
            'n0': self.n0,
            'pattern': None if self.pattern is None else list(self.pattern),
            'max_level_increment': self.max_level_increment,
            'truncated': self.truncated,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            data['template'], data['n_from'], data['n_to'],
            tuple((n, tuple(d)) for n, d in data['deltas']),
            data['stable'], data['bounded'], data['n0'],
            None if data['pattern'] is None else tuple(data['pattern']),
            data['max_level_increment'], data['truncated'])


def _trim(values):
    lo, hi = 0, len(values)
    while lo < hi and values[lo] == 0:
        lo += 1
    while hi > lo and values[hi - 1] == 0:
        hi -= 1
    return tuple(values[lo:hi])


def _labelled_profile(template, point):
    spec = template.at(point.n)
    order = resolve_order(spec)
    labels = variable_labels(spec)
    return [(labels[v], c) for v, c in zip(order.variables, point.profile)]


def pattern_from_series(series):
    template = series.template
    points = series.points
    truncated = series.truncated_at is not None
    if not points:
        return PatternReport(str(template), None, None, (), False, False,
                             truncated=truncated)
    steps = []
    for prev, cur in zip(points, points[1:]):
        if cur.n != prev.n + 1:
            steps = []
            continue
        old = dict(_labelled_profile(template, prev))
        new = _labelled_profile(template, cur)
        delta = [c - old.get(label, 0) for label, c in new]
        existing = [c - old[label] for label, c in new if label in old]
        fresh = [c for label, c in new if label not in old]
        steps.append((cur.n, _trim(delta), max(existing, default=0),
                      max(fresh, default=0)))
    deltas = tuple((n, d) for n, d, _, _ in steps)
    n_from, n_to = points[0].n, points[-1].n

    stable_at = None
    bounded_at = None
    for i in range(len(steps) - 1):
        tail = steps[i:]
        if stable_at is None and all(s[1] == tail[0][1] for s in tail):
            stable_at = i
        if bounded_at is None and all(
                s[2] <= 1 and s[3] <= tail[0][3] for s in tail):
            bounded_at = i
    stable = stable_at is not None and not truncated
    bounded = bounded_at is not None and not truncated
    start = stable_at if stable else bounded_at if bounded else None
    if start is None:
        return PatternReport(str(template), n_from, n_to, deltas, False, False,
                             truncated=truncated)
    # n0 is the parameter the first regular step starts from
    n0 = steps[start][0] - 1
    return PatternReport(
        str(template), n_from, n_to, deltas, stable, bounded, n0,
        steps[start][1] if stable else None,
        max(s[2] for s in steps[start:]), truncated)


def check_level_pattern(template, n_from, n_to, node_cap=DEFAULT_NODE_CAP):
    if n_to < n_from + 2:
        raise ValueError('need at least three parameters (n_to >= n_from + 2)')
    return pattern_from_series(measure_series(template, n_from, n_to, node_cap))


def _pattern_verdict(pattern, series):
    if len(series) < 3:
        return AspectVerdict(
            LEVEL_PATTERN, Inconclusive('fewer than three points measured'))
    if pattern.stable or pattern.bounded:
        return AspectVerdict(LEVEL_PATTERN, Confirmed(series.points[-1].n))
    return AspectVerdict(
        LEVEL_PATTERN, Inconclusive('no stable per-step level pattern'))


# -- full verification ------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    claim: object
    series: SizeSeries
    verdicts: tuple
    overall: str
    growth: GrowthVerdict = None
    pattern: PatternReport = None
    n_to: int = None
    config: VerifierConfig = field(default=VerifierConfig(), compare=False)

    def verdict_map(self):
        return {v.aspect: v.status for v in self.verdicts}

    def status(self, aspect):
        return self.verdict_map()[aspect]


def _overall(verdicts):
    statuses = {v.aspect: v.status for v in verdicts}
    if any(isinstance(s, Refuted) for s in statuses.values()):
        return REFUTED
    if (isinstance(statuses[BOUND], Confirmed)
            and isinstance(statuses[GROWTH_CLASS], Confirmed)):
        return VALIDATED
    return INCONCLUSIVE


def _truncate(verdict, series):
    if series.truncated_at is None or not isinstance(verdict.status, Confirmed):
        return verdict
    return AspectVerdict(verdict.aspect, Inconclusive(
        f'measurement truncated at n={series.truncated_at}'))


def verify(claim, n_to, config=VerifierConfig()):
    """Measure `claim`'s family from its base case to `n_to` and check
    every aspect of the claim."""
    if n_to < claim.base_n:
        raise ValueError(f'n_to={n_to} is below base_n={claim.base_n}')
    series = measure_series(claim.family, claim.base_n, n_to, config.node_cap)
    growth = _classify(series, config)
    pattern = pattern_from_series(series)
    verdicts = [
        check_base_case(claim, series),
        check_recurrence(claim, series),
        check_bound(claim, series),
        check_growth_class(claim, series, config, growth),
        _pattern_verdict(pattern, series),
    ]
    verdicts = tuple(_truncate(v, series) for v in verdicts)
    return VerificationReport(claim, series, verdicts, _overall(verdicts),
                              growth, pattern, n_to, config)


# -- serialization ------------------------------------------------------------

def _value(value):
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return value.numerator
        return f'{value.numerator}/{value.denominator}'
    return value


def _status_to_dict(status):
    if isinstance(status, Confirmed):
        return {'status': 'CONFIRMED_UP_TO', 'n_max': status.n_max}
    if isinstance(status, Refuted):
        return {'status': 'REFUTED', 'n': status.n,
                'claimed': _value(status.claimed),
                'measured': _value(status.measured)}
    return {'status': 'INCONCLUSIVE', 'reason': status.reason}


def _status_from_dict(data):
    if data['status'] == 'CONFIRMED_UP_TO':
        return Confirmed(data['n_max'])
    if data['status'] == 'REFUTED':
        def value(v):
            return Fraction(v) if isinstance(v, str) and '/' in v else v
        return Refuted(data['n'], value(data['claimed']), value(data['measured']))
    return Inconclusive(data['reason'])


def report_to_dict(report):
    growth = None
    if report.growth is not None:
        growth = {'class': str(report.growth.growth),
                  'window': list(report.growth.window),
                  'evidence': report.growth.evidence}
    return {
        'validation_rule': VALIDATION_RULE,
        'overall': report.overall,
        'n_to': report.n_to,
        'claim': claim_to_dict(report.claim),
        'config': {'ratio_threshold': str(report.config.ratio_threshold),
                   'poly_cmax': report.config.poly_cmax,
                   'node_cap': report.config.node_cap},
        'verdicts': {v.aspect: _status_to_dict(v.status)
                     for v in report.verdicts},
        'growth': growth,
        'level_pattern': (None if report.pattern is None
                          else report.pattern.to_dict()),
        'series': report.series.to_dict(),
    }


def report_to_json(report):
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True,
                      ensure_ascii=False) + '\n'


def report_from_json(text):
    data = json.loads(text)
    claim = claim_from_dict(data['claim'])
    config = VerifierConfig(Fraction(data['config']['ratio_threshold']),
                            data['config']['poly_cmax'],
                            data['config']['node_cap'])
    verdicts = tuple(AspectVerdict(a, _status_from_dict(data['verdicts'][a]))
                     for a in ASPECTS)
    growth = None
    if data['growth'] is not None:
        g = data['growth']
        growth = GrowthVerdict(GrowthClass.parse(g['class']), g['evidence'],
                               tuple(g['window']))
    pattern = None
    if data['level_pattern'] is not None:
        pattern = PatternReport.from_dict(data['level_pattern'])
    return VerificationReport(
        claim, SizeSeries.from_dict(data['series']), verdicts,
        data['overall'], growth, pattern, data['n_to'], config)
