"""Query-complexity experiments for correlated equilibria in bi-strategy games."""

__version__ = "0.1.0"
