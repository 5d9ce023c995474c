"""Strongly-orthogonal-set graphs of exceptional root systems, in exact integers."""

from sosgraphs.roots import RootSystem, build_root_system, parse_label

__version__ = "0.1.0"

__all__ = ["RootSystem", "build_root_system", "parse_label", "__version__"]
