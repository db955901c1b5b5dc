"""mlassist: a self-hosted data science assistant.

Upload tabular datasets, launch supervised learning runs from a curated
algorithm menu, keep every result in a queryable experiment store, and let
a meta-learning recommender suggest (or autonomously launch) new analyses.
"""

__version__ = "0.1.0"
