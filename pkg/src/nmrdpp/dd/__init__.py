"""Reduced ordered binary and algebraic decision diagrams."""
from .manager import Diagram, Manager
from .reach import image, reachable_estates, reachable_set

__all__ = ["Diagram", "Manager", "image", "reachable_estates", "reachable_set"]
