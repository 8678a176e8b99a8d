"""
Services package.

This package contains the engine's service layer: subgroups, class
predicates, graphs, module actions, analysis, families and group files.
"""

from .analysis import AnalysisService
from .class_predicates import ClassService, parse_class_spec
from .families import construct_family, corpus
from .graph import GraphService
from .group_file import GroupFileService
from .subgroups import SubgroupService

__all__ = [
    "AnalysisService",
    "ClassService",
    "GraphService",
    "GroupFileService",
    "SubgroupService",
    "construct_family",
    "corpus",
    "parse_class_spec",
]
