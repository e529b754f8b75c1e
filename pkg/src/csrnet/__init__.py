"""Hashtag co-occurrence networks of firm accounts, validated against a bipartite null model."""
from . import _kernels
from .bicm import BicmModel, SolverConfig, fit, fit_graph, graph_probability, link_probability, load_model, sample_graph, save_model
from .communities import CommunityPartition, louvain, modularity
from .config import PipelineConfig, load_config
from .csr import CsrLexicon, community_csr_accounts, community_csr_occurrences, engagement
from .errors import (AbortIngest, ConfigError, CsrnetError, DataError, EmptyGraph, InsufficientData,
                     InvalidDegrees, InvalidInput, InvalidPartition, NumericalError, SolverDiverged,
                     StageDependencyError)
from .graph import BipartiteGraph, DegreeClasses, DegreeSequence, build_graph, degrees, reduce_by_degree
from .ingest import PeriodFilter, TweetRecord, filter_accounts, load_tweets
from .normalize import MergeMap, NormalizationConfig, build_merge_map, is_mergeable, relative_edit_distance
from .pipeline import STAGES, Pipeline
from .rankstats import CorrelationMatrix, FirmRecord, correlation_matrix, spearman
from .validate import (ValidatedProjection, ValidationReport, fdr_select, poisson_binomial_pvalue,
                       poisson_pvalue, v_motifs, validate_projection)

__version__ = "0.1.0"
KERNEL_BACKEND = _kernels.BACKEND
