"""Polynomial formal verification toolkit: BDD size measurement and
checking of inductive size claims."""
from pfv.bdd import AND, OR, XOR, BddManager, VarOrder, new_manager
from pfv.claims import ProofClaim, parse_bound_expr, parse_claim, render_proof
from pfv.families import FamilySpec, FamilyTemplate, parse_family, parse_template
from pfv.measurement import classify_growth, measure_series, oracle_size
from pfv.verifier import verify

__all__ = [
    'AND', 'OR', 'XOR', 'BddManager', 'VarOrder', 'new_manager',
    'ProofClaim', 'parse_bound_expr', 'parse_claim', 'render_proof',
    'FamilySpec', 'FamilyTemplate', 'parse_family', 'parse_template',
    'classify_growth', 'measure_series', 'oracle_size', 'verify',
]

__version__ = '0.1.0'
