"""Quantitative mu-calculus over game structures."""

from .semantics import Evaluation, FixpointStats, dpre, evaluate, pre
from .syntax import (
    And,
    Const,
    Fix,
    Formula,
    FormulaError,
    Not,
    Obs,
    Or,
    Pre,
    Shift,
    Var,
    WellformednessReport,
    check_wellformed,
    format_formula,
    formula_size,
    parse_formula,
    pre_depth,
)
from .random import random_formula
from .witness import Witness, synthesize_witness, witness_report
