"""Toolkit for versioned, release-tagged technical specification corpora."""

from .errors import (
    ConflictingAliasError,
    DevelopmentNotPresentError,
    RegistryError,
    SpecError,
    UnknownDevelopmentError,
    UnknownReleaseError,
)
from .model import (
    ContentSegment,
    DeploymentSpan,
    DeploymentType,
    DevBlock,
    DevelopmentRegistry,
    PlainText,
    ReleaseId,
    Requirement,
    RequirementVersion,
    Section,
    SpecDocument,
    compare_releases,
    release_universe,
    version_at,
)
from .parser import (
    ParseError,
    ParseErrorKind,
    ParseResult,
    load_registry,
    parse_content,
    parse_document,
    serialize,
    validate_corpus,
)
from .resolver import (
    BehaviorDiff,
    DiffKind,
    DiffSegment,
    ResolvedRequirement,
    baseline,
    diff_behavior,
    materialize,
)
from .tokenizer import Token, TokenKind, normalize, tokenize
from .lexicon import Lexicon, Mention, build_lexicon, find_mentions, load_lexicon
from .lint import (
    LintConfig,
    LintFinding,
    LintRule,
    Severity,
    lint_corpus,
)
from .index import (
    SpecIndex,
    build_index,
    index_from_json,
    index_to_json,
    query_behavior,
    query_deployment,
    query_dev_changes,
    query_release_diff,
    query_requirements,
)
from .dataset import ReleaseDataset, extract_all, extract_release_dataset

__version__ = "0.1.0"

__all__ = [
    "BehaviorDiff",
    "ConflictingAliasError",
    "ContentSegment",
    "DeploymentSpan",
    "DeploymentType",
    "DevBlock",
    "DevelopmentNotPresentError",
    "DevelopmentRegistry",
    "DiffKind",
    "DiffSegment",
    "Lexicon",
    "LintConfig",
    "LintFinding",
    "LintRule",
    "Mention",
    "ParseError",
    "ParseErrorKind",
    "ParseResult",
    "PlainText",
    "RegistryError",
    "ReleaseDataset",
    "ReleaseId",
    "Requirement",
    "RequirementVersion",
    "ResolvedRequirement",
    "Section",
    "Severity",
    "SpecDocument",
    "SpecError",
    "SpecIndex",
    "Token",
    "TokenKind",
    "UnknownDevelopmentError",
    "UnknownReleaseError",
    "baseline",
    "build_index",
    "build_lexicon",
    "compare_releases",
    "diff_behavior",
    "extract_all",
    "extract_release_dataset",
    "find_mentions",
    "index_from_json",
    "index_to_json",
    "lint_corpus",
    "load_lexicon",
    "load_registry",
    "materialize",
    "normalize",
    "parse_content",
    "parse_document",
    "query_behavior",
    "query_deployment",
    "query_dev_changes",
    "query_release_diff",
    "query_requirements",
    "release_universe",
    "serialize",
    "tokenize",
    "validate_corpus",
    "version_at",
]
