"""Hash single-qubit unitaries into Fibonacci-anyon braids via the icosahedral group."""

from braidhash.braid import BraidWord, concat_reduce, evaluate, generator_matrix, parse
from braidhash.compiler import (
    Approximation,
    CompileResult,
    HashParams,
    bootstrap_table,
    compile_gate,
    predicted_reduction,
    preprocess,
    refine,
)
from braidhash.errors import (
    BraidhashError,
    ConfigurationError,
    CorruptTableError,
    InvalidInputError,
    OutOfDomainError,
    ResourceLimitError,
)
from braidhash.icosa import IcosaGroup, build_group
from braidhash.pseudogroup import PseudoGroupTable, load_table, save_table
from braidhash.su2 import distance, haar_random, project_su2

__version__ = "0.1.0"

__all__ = [
    "Approximation",
    "BraidWord",
    "BraidhashError",
    "CompileResult",
    "ConfigurationError",
    "CorruptTableError",
    "HashParams",
    "IcosaGroup",
    "InvalidInputError",
    "OutOfDomainError",
    "PseudoGroupTable",
    "ResourceLimitError",
    "bootstrap_table",
    "build_group",
    "compile_gate",
    "concat_reduce",
    "distance",
    "evaluate",
    "generator_matrix",
    "haar_random",
    "load_table",
    "parse",
    "predicted_reduction",
    "preprocess",
    "project_su2",
    "refine",
    "save_table",
]
