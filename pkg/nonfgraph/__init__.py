"""
Non-F graph engine.

Explicit finite groups, group classes and the graphs joining two elements
when the subgroup they generate lies outside the class.
"""

__version__ = "0.1.0"
