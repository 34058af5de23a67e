"""Laminar set systems, their trees, and the MSO transduction between them."""
from .laminar import (IdentifyingColouring, LaminarTree, SetSystem, build_laminar_tree,
                      build_representative_sets, check_laminar, identifying_colouring,
                      system_from_nested, thin_partition, tip)
from .logic import Assignment, Evaluator, evaluate, parse_formula, to_text
from .structures import Structure, Symbol, Vocabulary, make_structure
from .transduction import laminar_to_tree, rooted_tree_iso, tree_structure, tree_to_setsystem

__all__ = [
    "Assignment", "Evaluator", "IdentifyingColouring", "LaminarTree", "SetSystem", "Structure",
    "Symbol", "Vocabulary", "build_laminar_tree", "build_representative_sets", "check_laminar",
    "evaluate", "identifying_colouring", "laminar_to_tree", "make_structure", "parse_formula",
    "rooted_tree_iso", "system_from_nested", "thin_partition", "tip", "to_text",
    "tree_structure", "tree_to_setsystem",
]
