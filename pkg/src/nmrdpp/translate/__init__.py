"""Translations from NMRDPs to equivalent MDPs, and their checker."""
from .equivalence import EquivalenceReport, bisimulation_quotient, check_equivalence, quotient_size
from .fltl_expand import FltlGenerator, fltl_expand
from .pltl_expand import PltlGenerator, pltlmin_expand, pltlmin_preprocess, pltlsim_expand
from .pltlstr import (
    FactoredGenerator, FactoredMDP, expand_factored, pltlstr_reachability, pltlstr_translate,
)
from .xmdp import XMDP, expand, prune_dead

__all__ = [
    "XMDP", "EquivalenceReport", "FactoredGenerator", "FactoredMDP", "FltlGenerator",
    "PltlGenerator", "bisimulation_quotient", "check_equivalence", "expand", "expand_factored",
    "fltl_expand", "pltlmin_expand", "pltlmin_preprocess", "pltlsim_expand",
    "pltlstr_reachability", "pltlstr_translate", "prune_dead", "quotient_size",
]
