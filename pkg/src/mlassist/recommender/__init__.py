"""The AI engine: knowledge base, expert rules, and the recommender."""

from mlassist.recommender.engine import (
    Recommendation,
    compare_algorithms,
    export_results_table,
    recommend,
)
from mlassist.recommender.feedback import apply_feedback
from mlassist.recommender.kb import KBEntry, KnowledgeBase, load_knowledge_base
from mlassist.recommender.rules import ExpertRule, load_rules
from mlassist.recommender.session import AiAction, AiRunner, AiSession

__all__ = [
    "AiAction",
    "AiRunner",
    "AiSession",
    "ExpertRule",
    "apply_feedback",
    "KBEntry",
    "KnowledgeBase",
    "Recommendation",
    "compare_algorithms",
    "export_results_table",
    "load_knowledge_base",
    "load_rules",
    "recommend",
]
