from .fragments import (CollisionReport, Fragment, fragment_inclusion, pairing_collisions,
                        semantic_fragment)
from .pairing import (Evaluator, TypeTable, count_satisfying, stone_pairing_classical,
                      stone_pairing_gamma, type_table)
from .parser import parse_formula, parse_formula_file
from .structures import (FinStructure, all_structures, isomorphic, load_structure,
                         structure_from_json)
from .syntax import (FALSE, TRUE, And, Bot, Eq, Exists, Forall, Formula, Implies, Not, Or, Rel,
                     Signature, Top, free_vars, min_vars, to_text, variable_slots)

__all__ = [
    "CollisionReport", "Fragment", "fragment_inclusion", "pairing_collisions", "semantic_fragment",
    "Evaluator", "TypeTable", "count_satisfying", "stone_pairing_classical",
    "stone_pairing_gamma", "type_table",
    "parse_formula", "parse_formula_file",
    "FinStructure", "all_structures", "isomorphic", "load_structure", "structure_from_json",
    "FALSE", "TRUE", "And", "Bot", "Eq", "Exists", "Forall", "Formula", "Implies", "Not", "Or",
    "Rel", "Signature", "Top", "free_vars", "min_vars", "to_text", "variable_slots",
]
