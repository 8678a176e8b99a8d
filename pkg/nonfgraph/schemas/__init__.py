"""
Schemas package.

This package contains Pydantic schemas for reports and group files.
"""

from .group_file import GroupFile
from .reports import AnalysisReport, CounterexampleReport, LemmaResult, SuiteReport, Verdict

__all__ = [
    "AnalysisReport",
    "CounterexampleReport",
    "GroupFile",
    "LemmaResult",
    "SuiteReport",
    "Verdict",
]
