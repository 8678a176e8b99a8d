"""
Workers package.

Parallel execution of verification suites over the corpus.
"""

from .suite_runner import run_suite

__all__ = ["run_suite"]
