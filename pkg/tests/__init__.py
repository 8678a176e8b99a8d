"""
Tests package for nonfgraph.
"""
