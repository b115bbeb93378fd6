"""Volatility harness for black-box machine translation systems.

Generates meaning-preserving variations of test sentences, translates them
through a pluggable adapter, and measures how much the translations move:
subword edit distances and spans, minor/major change classification,
sentence-metric oscillations over variation families, and a human
annotation workflow.
"""

__version__ = "0.1.0"
