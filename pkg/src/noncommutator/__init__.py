"""Permutation-group engine for checking which elements of a group are commutators.

The headline use is the degree-44 group of order 16609443840 whose only
noncommutator is its central involution; see ``machale.run_pipeline``.
"""

from ._jit import BACKEND
from .backtrack import BudgetExhausted, SearchBudget, centralizer, conjugating_element
from .bsgs import PermGroup, StabilizerChain, build_chain, contains, group_order, make_rng, uniform_random
from .classes import ClassInventory, assign_class, class_multiplication_by_central, enumerate_classes
from .groupops import (center, central_quotient, derived_subgroup, direct_product, is_perfect,
                       normal_closure, wreath_imprimitive)
from .machale import (build_machale_group, check_central_noncommutator, check_commutators,
                      generate_witnesses, locate_t, run_pipeline)
from .perm import (Permutation, commutator, compose, cycle_type, element_order, inverse,
                   parse_cycles, print_cycles)

__version__ = "0.1.0"
