"""Synthetic-lethality prediction workbench.

Knowledge-graph-backed partner ranking with attention-path explanations,
metapath-granularity pruning, and an iterative prune/retrain/compare loop.
"""

__version__ = "0.1.0"
