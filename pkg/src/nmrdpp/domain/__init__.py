"""Factored NMRDP model, domain file format and benchmark generators."""
from .generators import FAMILIES, gen_builtin
from .model import FactoredNMRDP, keep
from .parser import parse_domain

__all__ = ["FAMILIES", "FactoredNMRDP", "gen_builtin", "keep", "parse_domain"]
