"""Interpreter and toolchain for higher-order Datalog with negation.

    >>> from hodatalog import parse_program, parse_database, well_founded_model
    >>> prog = parse_program('''
    ... #pred e : i -> i -> o.
    ... #pred reach : i -> i -> o.
    ... reach(X,Y) :- e(X,Y).
    ... reach(X,Y) :- e(X,Z), reach(Z,Y).
    ... ''')
    >>> db = parse_database("e(a,b). e(b,c).")
    >>> well_founded_model(prog, db).true_atoms("reach")
    [('a', 'b'), ('a', 'c'), ('b', 'c')]
"""

from .analysis import choice_block, classify_order, stratify, typecheck
from .domains import PairValue, SemVal, ThreeVal, Universe
from .engine import (Interp, PairInterp, TabledModel, ap_step, bottom_pair, eval_pair,
                     is_stable_fixpoint, is_stable_model, lfp_first, lfp_second, query,
                     stable_models, tp_three_valued, well_founded_model)
from .errors import (BudgetExceeded, DomainExplosion, EvaluationError, GeneratorError,
                     HodlError, NonMonotoneStep, ParseError, TransformError, TypeCheckError)
from .syntax import (Database, Program, Rule, format_program, make_database, parse_atom,
                     parse_database, parse_program)
from .transform import eliminate_all, eliminate_existential, verify_equivalence

__version__ = "0.1.0"
