"""
CLI entry point.

This module allows running the CLI as a module:
    python -m nonfgraph
"""

from nonfgraph.main import main

if __name__ == "__main__":
    main()
