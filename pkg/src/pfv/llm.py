"""Prompting a language model for inductive size claims.

The model is asked to reason in prose and to finish with exactly one
fenced block tagged ``pfv-claim`` that holds a claim document. Only the
block is machine-checked; the surrounding prose is kept as narrative.

Two providers exist. MOCK reads a canned completion per family from a
fixture directory (one ``<FAMILY_KIND>.txt`` file each). HTTP sends one
chat-completion request; the API key comes from ``PFV_LLM_API_KEY``.
"""
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
import json
import logging
import os
from pathlib import Path
import re
import socket
import urllib.error
import urllib.request

from pfv.claims import (
    CLAIM_KEYS, FIXTURE, LLM, ClaimFormatError, ClaimSource, parse_claim,
)
from pfv.families import FamilyKind, Ordering


__all__ = [
    'API_KEY_ENV', 'PROMPT_VERSION', 'BLOCK_TAG',
    'ProviderError', 'ConfigError', 'NoClaimBlock', 'AmbiguousClaim',
    'ProviderConfig', 'PromptBundle', 'SketchResult',
    'build_prompt', 'request_sketch', 'extract_claim', 'builtin_fixtures',
]

logger = logging.getLogger(__name__)

API_KEY_ENV = 'PFV_LLM_API_KEY'
PROMPT_VERSION = '1'
BLOCK_TAG = 'pfv-claim'
_RETRYABLE_STATUS = {408, 429, 500, 502, 503, 504}


class ProviderError(RuntimeError):
    def __init__(self, message, retryable=False, status=None):
        super().__init__(message)
        self.retryable = retryable
        self.status = status


class ConfigError(ValueError):
    pass


class NoClaimBlock(ValueError):
    pass


class AmbiguousClaim(ValueError):
    pass


def builtin_fixtures(name):
    """Directory of a bundled fixture set: ``block`` or ``prose``."""
    return Path(str(resources.files('pfv') / 'fixtures' / name))


@dataclass(frozen=True)
class ProviderConfig:
    kind: str
    fixture_dir: str = None
    endpoint: str = None
    model: str = None
    timeout: float = 60.0

    MOCK = 'MOCK'
    HTTP = 'HTTP'

    def __post_init__(self):
        if self.kind == self.MOCK:
            if not self.fixture_dir:
                raise ConfigError('MOCK provider needs a fixture directory')
        elif self.kind == self.HTTP:
            if not self.endpoint or not self.model:
                raise ConfigError('HTTP provider needs an endpoint and a model')
        else:
            raise ConfigError(f'unknown provider kind {self.kind!r}')

    @classmethod
    def parse(cls, text):
        """Parse ``mock:<dir>`` or ``http:<url>#<model>``.

        A mock directory that does not exist is looked up among the
        bundled fixture sets.
        """
        kind, sep, rest = text.partition(':')
        if not sep:
            raise ConfigError(f'bad provider {text!r}')
        if kind == 'mock':
            path = Path(rest)
            if not path.is_dir() and builtin_fixtures(rest).is_dir():
                path = builtin_fixtures(rest)
            return cls(cls.MOCK, fixture_dir=str(path))
        if kind == 'http':
            url, _, model = rest.partition('#')
            return cls(cls.HTTP, endpoint=url, model=model)
        raise ConfigError(f'unknown provider kind {kind!r}')

    @property
    def provider_id(self):
        if self.kind == self.MOCK:
            return f'mock:{self.fixture_dir}'
        return f'http:{self.endpoint}'

    def to_dict(self):
        return {'kind': self.kind, 'fixture_dir': self.fixture_dir,
                'endpoint': self.endpoint, 'model': self.model,
                'timeout': self.timeout}


@dataclass(frozen=True)
class PromptBundle:
    system: str
    user: str
    version: str = PROMPT_VERSION

    def messages(self):
        return [{'role': 'system', 'content': self.system},
                {'role': 'user', 'content': self.user}]


@dataclass(frozen=True)
class SketchResult:
    raw: str
    claim: object = None
    diagnostics: str = ''
    error: Exception = field(default=None, compare=False)


# -- prompts ------------------------------------------------------------------

SYSTEM_TEXT = (
    'You are an expert in binary decision diagrams (BDDs) and formal '
    'verification. You write short, human-readable induction proofs about '
    'the size of reduced ordered BDDs. Size means the number of internal '
    '(non-terminal) nodes. First explain your reasoning in prose. Then end '
    f'your answer with exactly one fenced code block tagged {BLOCK_TAG} '
    'containing a JSON claim document, and nothing after it.'
)

_SYMMETRIC_NOTE = (
    'The function is totally symmetric: it depends only on the Hamming '
    'weight of its input.'
)

_ORDERING_TEXT = {
    Ordering.NATURAL: 'the natural order x1 < x2 < ... < xN',
    Ordering.REVERSED: 'the reversed order xN < ... < x2 < x1',
    Ordering.F2_SPLIT: ('all odd-indexed variables first, then all '
                        'even-indexed ones (x1, x3, ..., x2, x4, ...)'),
    Ordering.MUL_INTERLEAVED: 'the interleaved order a0, b0, a1, b1, ...',
    Ordering.MUL_BLOCKED: ('the blocked order a0, a1, ..., a(n-1), '
                           'b0, b1, ..., b(n-1)'),
}


def _rule_text(rule):
    return {'n/2': 'floor(n/2)', 'n-1': 'n-1'}.get(str(rule), str(rule))


def _family_text(template):
    family = template.family
    kind = family.kind
    if kind is FamilyKind.F2_PAIRS:
        return ('f_k = x1*x2 + x3*x4 + ... + x(2k-1)*x(2k), a disjunction '
                'of k two-variable products over 2k variables.')
    if kind is FamilyKind.F3_TRIPLES:
        return ('f_k = x1*x2*x3 + x4*x5*x6 + ... + x(3k-2)*x(3k-1)*x(3k), '
                'a disjunction of k three-variable products over 3k '
                'variables.')
    if kind is FamilyKind.SYM_EXACTLY:
        return (f'f_n(x1, ..., xn) = 1 iff exactly {_rule_text(family.rule)} '
                f'of the n inputs are 1. {_SYMMETRIC_NOTE}')
    if kind is FamilyKind.SYM_THRESHOLD:
        return (f'f_n(x1, ..., xn) = 1 iff at least {_rule_text(family.rule)} '
                f'of the n inputs are 1. {_SYMMETRIC_NOTE}')
    if kind is FamilyKind.PARITY:
        return f'f_n = x1 XOR x2 XOR ... XOR xn. {_SYMMETRIC_NOTE}'
    if kind is FamilyKind.ALL_AND:
        return f'f_n = x1 * x2 * ... * xn. {_SYMMETRIC_NOTE}'
    if kind is FamilyKind.ALL_OR:
        return f'f_n = x1 + x2 + ... + xn. {_SYMMETRIC_NOTE}'
    return (f'f_n = bit {_rule_text(family.rule)} (bit 0 is least '
            'significant) of the unsigned 2n-bit product a * b of two n-bit '
            'operands a = (a(n-1) ... a1 a0) and b = (b(n-1) ... b1 b0).')


def build_prompt(template):
    """Deterministic prompt asking for an inductive size claim."""
    kind = template.family.kind
    symbol = kind.parameter_symbol
    lines = [
        f'Consider the Boolean function family {template.family}:',
        _family_text(template),
        f'Use the variable ordering {_ORDERING_TEXT[template.ordering]}.',
        '',
        f'Give an induction proof on {symbol} of how the BDD size grows:',
        '1. Base case: the BDD size for the smallest parameter.',
        f'2. Inductive hypothesis: a size bound for parameter {symbol}.',
        f'3. Inductive step: how many nodes are added going from {symbol} '
        f'to {symbol}+1 (split the BDD at the root into its then/else '
        'branches if that helps).',
        '4. Conclusion: the growth class of the size.',
    ]
    if kind is FamilyKind.MUL_BIT:
        lines += [
            '',
            'State the growth class explicitly (LINEAR, POLYNOMIAL(d) or '
            'EXPONENTIAL). Variable ordering can change BDD sizes '
            'dramatically, so say whether your answer depends on the '
            'ordering chosen above.',
        ]
    lines += [
        '',
        f'End with one fenced block tagged {BLOCK_TAG} holding a JSON '
        'object with exactly these keys (omit narrative, your prose is kept):',
        ', '.join(k for k in CLAIM_KEYS),
        f'family must be "{template}". Expressions may use integers, '
        f'{symbol}, +, -, *, parentheses, {symbol}^<int> and <int>^{symbol}; '
        'there is no division, use bound_scale_denominator 2 to halve a '
        'bound. growth_class is LINEAR, POLYNOMIAL(d) or EXPONENTIAL. '
        f'step_delta is the node increment when going from {symbol}-1 to '
        f'{symbol}, written in terms of the new {symbol}.',
        '',
        'Example:',
        f'```{BLOCK_TAG}',
        json.dumps({'family': str(template), 'base_n': 1, 'base_size': 1,
                    'step_delta': '1', 'bound': symbol,
                    'bound_scale_denominator': 1,
                    'growth_class': 'LINEAR'}, indent=2),
        '```',
    ]
    return PromptBundle(SYSTEM_TEXT, '\n'.join(lines))


# -- providers -----------------------------------------------------------------

def _mock_completion(config, template):
    path = Path(config.fixture_dir) / f'{template.family.kind.name}.txt'
    try:
        return path.read_bytes().decode('utf-8')
    except FileNotFoundError:
        raise ProviderError(f'no fixture {path.name} in {config.fixture_dir}') from None


def _http_completion(config, prompt):
    key = os.environ.get(API_KEY_ENV)
    if not key:
        raise ConfigError(f'{API_KEY_ENV} is not set')
    body = json.dumps({'model': config.model, 'messages': prompt.messages(),
                       'temperature': 0}).encode('utf-8')
    request = urllib.request.Request(
        config.endpoint, data=body, method='POST',
        headers={'Content-Type': 'application/json',
                 'Authorization': f'Bearer {key}'})
    try:
        with urllib.request.urlopen(request, timeout=config.timeout) as resp:
            payload = resp.read()
    except urllib.error.HTTPError as exc:
        raise ProviderError(f'provider returned HTTP {exc.code}',
                            retryable=exc.code in _RETRYABLE_STATUS,
                            status=exc.code) from None
    except (urllib.error.URLError, socket.timeout, TimeoutError,
            ConnectionError) as exc:
        raise ProviderError(f'request failed: {exc}', retryable=True) from None
    try:
        return json.loads(payload)['choices'][0]['message']['content']
    except (ValueError, KeyError, IndexError, TypeError):
        raise ProviderError('malformed chat-completion response') from None


def request_sketch(config, template, prompt=None):
    """Obtain a completion for `template` and try to extract its claim."""
    if prompt is None:
        prompt = build_prompt(template)
    if config.kind == ProviderConfig.MOCK:
        raw = _mock_completion(config, template)
        source = ClaimSource(FIXTURE, config.provider_id, None, None, raw)
    else:
        raw = _http_completion(config, prompt)
        stamp = datetime.now(timezone.utc).isoformat(timespec='seconds')
        source = ClaimSource(LLM, config.provider_id, config.model, stamp, raw)
    try:
        claim = extract_claim(raw, source)
    except (NoClaimBlock, AmbiguousClaim, ValueError) as exc:
        return SketchResult(raw, None, f'{type(exc).__name__}: {exc}', exc)
    return SketchResult(raw, claim, 'extracted one claim block')


_BLOCK_RE = re.compile(
    r'^[ \t]*```' + re.escape(BLOCK_TAG) + r'[ \t]*\n(.*?)^[ \t]*```[ \t]*$\n?',
    re.MULTILINE | re.DOTALL)


def extract_claim(raw, source=None):
    """Parse the single ``pfv-claim`` block of `raw`.

    The prose outside the block becomes the claim's narrative. Nothing is
    repaired: no block, several blocks or a malformed block all raise.
    """
    blocks = list(_BLOCK_RE.finditer(raw))
    if not blocks:
        raise NoClaimBlock(f'no {BLOCK_TAG} block found')
    if len(blocks) > 1:
        raise AmbiguousClaim(f'{len(blocks)} {BLOCK_TAG} blocks found')
    block = blocks[0]
    try:
        data = json.loads(block.group(1))
    except ValueError:
        data = None
    if isinstance(data, dict) and 'narrative' in data:
        raise ClaimFormatError('narrative', 'belongs outside the claim block')
    narrative = (raw[:block.start()] + raw[block.end():]).strip()
    document = block.group(1)
    if isinstance(data, dict):
        data['narrative'] = narrative
        document = json.dumps(data)
    return parse_claim(document, source)
