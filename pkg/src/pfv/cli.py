"""Command-line entry point.

Exit codes: 0 success / VALIDATED, 1 REFUTED, 2 bad input,
3 truncated measurement / INCONCLUSIVE, 4 no usable claim block in a
sketch, 5 provider or provider-configuration failure. The last line
printed is always ``status=<WORD>``.
"""
import argparse
from fractions import Fraction
import json
import logging
from pathlib import Path
import sys

from pfv.claims import ClaimFormatError, parse_claim, render_proof, serialize_claim
from pfv.families import FamilyError, parse_template
from pfv.llm import ConfigError, ProviderConfig, ProviderError, request_sketch
from pfv.measurement import (
    DEFAULT_NODE_CAP, DEFAULT_POLY_CMAX, DEFAULT_RATIO_THRESHOLD,
    measure_series,
)
from pfv.verifier import (
    INCONCLUSIVE, REFUTED, VALIDATED, VerifierConfig, report_from_json,
    report_to_json, verify,
)

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3
EXIT_NO_CLAIM = 4
EXIT_PROVIDER = 5

_VERDICT_EXIT = {VALIDATED: EXIT_OK, REFUTED: EXIT_REFUTED,
                 INCONCLUSIVE: EXIT_INCONCLUSIVE}

DEFAULT_SKETCH_TO = 12


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _finish(code, word):
    print(f'status={word}')
    return code


def _write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding='utf-8')


def _config(args):
    return VerifierConfig(Fraction(args.ratio_threshold), args.poly_cmax,
                          args.node_cap)


def run_measure(template, n_from, n_to, out=None, fmt='csv',
                node_cap=DEFAULT_NODE_CAP):
    series = measure_series(template, n_from, n_to, node_cap)
    if fmt == 'json':
        text = json.dumps(series.to_dict(), indent=2, sort_keys=True) + '\n'
    else:
        text = series.to_csv()
    if out:
        _write(out, text)
    else:
        sys.stdout.write(text)
    if series.truncated_at is not None:
        print(f'truncated at n={series.truncated_at}', file=sys.stderr)
        return _finish(EXIT_INCONCLUSIVE, 'TRUNCATED')
    return _finish(EXIT_OK, 'OK')


def _emit_report(report, out, fmt, extra=None):
    proof = render_proof(report.claim, report)
    report_json = report_to_json(report)
    if out:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        _write(out / 'report.json', report_json)
        _write(out / 'proof.md', proof)
        for name, text in (extra or {}).items():
            _write(out / name, text)
    sys.stdout.write(report_json if fmt == 'json' else proof)
    return _finish(_VERDICT_EXIT[report.overall], report.overall)


def run_verify(claim_path, n_to, out=None, fmt='text', config=VerifierConfig()):
    try:
        text = Path(claim_path).read_text(encoding='utf-8')
        claim = parse_claim(text)
    except (OSError, ClaimFormatError) as exc:
        print(f'error: {exc}', file=sys.stderr)
        return _finish(EXIT_USAGE, 'ERROR')
    if n_to < claim.base_n:
        print(f'error: --to {n_to} is below base_n {claim.base_n}',
              file=sys.stderr)
        return _finish(EXIT_USAGE, 'ERROR')
    return _emit_report(verify(claim, n_to, config), out, fmt)


def run_sketch(template, provider, out=None, fmt='text', n_to=None,
               config=VerifierConfig()):
    try:
        result = request_sketch(provider, template)
    except (ProviderError, ConfigError) as exc:
        print(f'error: {exc}', file=sys.stderr)
        return _finish(EXIT_PROVIDER, 'PROVIDER_ERROR')
    if result.claim is None:
        if out:
            Path(out).mkdir(parents=True, exist_ok=True)
            _write(Path(out) / 'sketch.txt', result.raw)
        print(f'error: {result.diagnostics}', file=sys.stderr)
        return _finish(EXIT_NO_CLAIM, 'NO_CLAIM_BLOCK')
    claim = result.claim
    if claim.family != template:
        print(f'warning: sketch claims {claim.family}, requested {template}',
              file=sys.stderr)
    if n_to is None:
        n_to = max(DEFAULT_SKETCH_TO, claim.base_n + 3)
    report = verify(claim, n_to, config)
    return _emit_report(report, out, fmt,
                        {'sketch.txt': result.raw,
                         'claim.json': serialize_claim(claim)})


def run_check(claim_path):
    try:
        claim = parse_claim(Path(claim_path).read_text(encoding='utf-8'))
    except (OSError, ClaimFormatError) as exc:
        print(f'error: {exc}', file=sys.stderr)
        return _finish(EXIT_USAGE, 'ERROR')
    sys.stdout.write(serialize_claim(claim))
    return _finish(EXIT_OK, 'WELLFORMED')


def run_report(report_path, out=None):
    try:
        report = report_from_json(Path(report_path).read_text(encoding='utf-8'))
    except (OSError, ValueError, KeyError) as exc:
        print(f'error: {exc}', file=sys.stderr)
        return _finish(EXIT_USAGE, 'ERROR')
    proof = render_proof(report.claim, report)
    if out:
        _write(out, proof)
    else:
        sys.stdout.write(proof)
    return _finish(_VERDICT_EXIT[report.overall], report.overall)


def _parser():
    parser = _Parser(prog='pfv', description=(
        'Measure BDD sizes of Boolean function families and check inductive '
        'size claims against them.'))
    parser.add_argument('-v', '--verbose', action='store_true')
    sub = parser.add_subparsers(dest='command', required=True,
                                parser_class=_Parser)

    def tuning(p):
        p.add_argument('--ratio-threshold', default=str(DEFAULT_RATIO_THRESHOLD),
                       help='successive-size ratio that counts as exponential')
        p.add_argument('--poly-cmax', type=int, default=DEFAULT_POLY_CMAX,
                       help='largest constant allowed in a polynomial fit')
        p.add_argument('--node-cap', type=int, default=DEFAULT_NODE_CAP,
                       help='per-measurement node budget')

    p = sub.add_parser('measure', help='write a size series')
    p.add_argument('--family', required=True, help='e.g. F2@k/NATURAL')
    p.add_argument('--from', dest='n_from', type=int, required=True)
    p.add_argument('--to', dest='n_to', type=int, required=True)
    p.add_argument('--out')
    p.add_argument('--format', choices=('csv', 'json'), default='csv')
    tuning(p)

    p = sub.add_parser('check', help='validate a claim file')
    p.add_argument('--claim', required=True)

    p = sub.add_parser('verify', help='verify a claim file')
    p.add_argument('--claim', required=True)
    p.add_argument('--to', dest='n_to', type=int, required=True)
    p.add_argument('--out', help='directory for report.json and proof.md')
    p.add_argument('--format', choices=('text', 'json'), default='text')
    tuning(p)

    p = sub.add_parser('sketch', help='ask a provider for a claim and verify it')
    p.add_argument('--family', required=True)
    p.add_argument('--provider', required=True,
                   help='mock:<dir> or http:<url>#<model>')
    p.add_argument('--to', dest='n_to', type=int)
    p.add_argument('--out', help='directory for sketch, report and proof')
    p.add_argument('--format', choices=('text', 'json'), default='text')
    tuning(p)

    p = sub.add_parser('report', help='render a saved report as a proof')
    p.add_argument('--report', required=True)
    p.add_argument('--out')
    return parser


def main(argv=None):
    try:
        args = _parser().parse_args(argv)
    except _UsageError as exc:
        print(f'error: {exc}', file=sys.stderr)
        return _finish(EXIT_USAGE, 'ERROR')
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        if args.command == 'check':
            return run_check(args.claim)
        if args.command == 'report':
            return run_report(args.report, args.out)
        config = _config(args)
        if args.command == 'verify':
            return run_verify(args.claim, args.n_to, args.out, args.format,
                              config)
        template = parse_template(args.family)
        if args.command == 'measure':
            if args.n_from < 1 or args.n_to < args.n_from:
                raise _UsageError(f'bad range {args.n_from}..{args.n_to}')
            return run_measure(template, args.n_from, args.n_to, args.out,
                               args.format, config.node_cap)
        try:
            provider = ProviderConfig.parse(args.provider)
        except ConfigError as exc:
            print(f'error: {exc}', file=sys.stderr)
            return _finish(EXIT_PROVIDER, 'PROVIDER_ERROR')
        return run_sketch(template, provider, args.out, args.format,
                          args.n_to, config)
    except (_UsageError, FamilyError, ValueError) as exc:
        print(f'error: {exc}', file=sys.stderr)
        return _finish(EXIT_USAGE, 'ERROR')


if __name__ == '__main__':
    sys.exit(main())
