"""Claim-reason structured, quantified summaries of discussion threads."""

from .clustering import ClusterConfig, cluster_thread
from .entailment import EntailmentScorer, aggregate_score, normalize
from .extraction import Extractor, extract_propositions
from .llm import GenerationRequest, LLMGateway, ResponseCache, ScriptedBackend
from .model import (ClaimCluster, Comment, Proposition, ReasonCluster, StructuredSummary, Thread,
                    validate_thread)
from .pipeline import PipelineConfig, run_eval, run_pipeline
from .summary import SummaryGenerator, render_summary

__version__ = "0.1.0"

__all__ = [
    "ClaimCluster", "ClusterConfig", "Comment", "EntailmentScorer", "Extractor", "GenerationRequest",
    "LLMGateway", "PipelineConfig", "Proposition", "ReasonCluster", "ResponseCache", "ScriptedBackend",
    "StructuredSummary", "SummaryGenerator", "Thread", "aggregate_score", "cluster_thread",
    "extract_propositions", "normalize", "render_summary", "run_eval", "run_pipeline", "validate_thread",
]
