"""Corpus lint rules with fixed severities.

Rules:
    L1 duplication      (High)   near-copied requirement text, shingle Jaccard
    L2 length           (High)   over-long or multi-procedure/mixed-deployment versions
    L3 standardization  (High)   non-canonical procedure names and tag styles
    L4 grammar          (Medium) id/tag grammar slips, missing terminal punctuation
    L5 dispersion       (Low)    one procedure scattered across many sections
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

from .lexicon import Lexicon, find_mentions
from .model import (
    ContentSegment,
    DeploymentSpan,
    DeploymentType,
    DevBlock,
    DevelopmentRegistry,
    PlainText,
    Requirement,
    RequirementVersion,
    SpecDocument,
    is_valid_requirement_id,
    release_universe,
)
from .parser import render_segments
from .resolver import materialize
from .tokenizer import TAG_RE, Token, TokenKind, normalize, tokenize


class LintRule(Enum):
    L1_DUPLICATION = "L1_Duplication"
    L2_LENGTH = "L2_Length"
    L3_STANDARDIZATION = "L3_Standardization"
    L4_GRAMMAR = "L4_Grammar"
    L5_DISPERSION = "L5_Dispersion"


class Severity(Enum):
    HIGH = "High"
    MEDIUM = "Medium"
    LOW = "Low"

    @property
    def rank(self) -> int:
        return {"Low": 0, "Medium": 1, "High": 2}[self.value]


SEVERITY_BY_RULE = {
    LintRule.L1_DUPLICATION: Severity.HIGH,
    LintRule.L2_LENGTH: Severity.HIGH,
    LintRule.L3_STANDARDIZATION: Severity.HIGH,
    LintRule.L4_GRAMMAR: Severity.MEDIUM,
    LintRule.L5_DISPERSION: Severity.LOW,
}

_RULE_SHORT = {
    "L1": LintRule.L1_DUPLICATION,
    "L2": LintRule.L2_LENGTH,
    "L3": LintRule.L3_STANDARDIZATION,
    "L4": LintRule.L4_GRAMMAR,
    "L5": LintRule.L5_DISPERSION,
}


@dataclass(frozen=True)
class Location:
    document: str
    requirement: str
    version: str = ""


@dataclass(frozen=True)
class LintFinding:
    rule: LintRule
    severity: Severity
    location: Location
    message: str
    related: Optional[Location] = None
    score: Optional[float] = None

    def to_dict(self) -> dict:
        data = {
            "rule": self.rule.value,
            "severity": self.severity.value,
            "document": self.location.document,
            "requirement": self.location.requirement,
            "version": self.location.version,
            "message": self.message,
        }
        if self.related is not None:
            data["related"] = {
                "document": self.related.document,
                "requirement": self.related.requirement,
                "version": self.related.version,
            }
        if self.score is not None:
            data["score"] = self.score
        return data


def _finding(
    rule: LintRule,
    location: Location,
    message: str,
    related: Optional[Location] = None,
    score: Optional[float] = None,
) -> LintFinding:
    return LintFinding(
        rule=rule,
        severity=SEVERITY_BY_RULE[rule],
        location=location,
        message=message,
        related=related,
        score=score,
    )


@dataclass(frozen=True)
class LintConfig:
    shingle_k: int = 5
    dup_threshold: float = 0.7
    max_tokens: int = 250
    max_procedures: int = 3
    max_sections: int = 2
    enabled: frozenset[LintRule] = frozenset(LintRule)

    def __post_init__(self) -> None:
        if self.shingle_k < 2:
            raise ValueError("shingle_k must be >= 2")
        if not 0 < self.dup_threshold <= 1:
            raise ValueError("dup_threshold must be in (0, 1]")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")
        if self.max_procedures < 1:
            raise ValueError("max_procedures must be >= 1")
        if self.max_sections < 1:
            raise ValueError("max_sections must be >= 1")

    @classmethod
    def from_json(cls, source: str) -> "LintConfig":
        data = json.loads(source)
        if not isinstance(data, dict):
            raise ValueError("lint config must be a JSON object")
        kwargs = {}
        for key in ("shingle_k", "max_tokens", "max_procedures", "max_sections"):
            if key in data:
                if not isinstance(data[key], int) or isinstance(data[key], bool):
                    raise ValueError(f"{key} must be an integer")
                kwargs[key] = data[key]
        if "dup_threshold" in data:
            if not isinstance(data["dup_threshold"], (int, float)):
                raise ValueError("dup_threshold must be a number")
            kwargs["dup_threshold"] = float(data["dup_threshold"])
        if "rules" in data:
            rules = data["rules"]
            if not isinstance(rules, dict):
                raise ValueError("rules must be an object of rule: bool")
            enabled = set(LintRule)
            for name, flag in rules.items():
                if name not in _RULE_SHORT:
                    raise ValueError(f"unknown rule {name!r}")
                if not isinstance(flag, bool):
                    raise ValueError(f"rule {name!r} flag must be a boolean")
                if not flag:
                    enabled.discard(_RULE_SHORT[name])
            kwargs["enabled"] = frozenset(enabled)
        unknown = set(data) - {
            "shingle_k",
            "dup_threshold",
            "max_tokens",
            "max_procedures",
            "max_sections",
            "rules",
        }
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**kwargs)


# ---------------------------------------------------------------------------
# Shared walks
# ---------------------------------------------------------------------------


def _plain_leaves(segments: tuple[ContentSegment, ...]) -> Iterator[str]:
    for seg in segments:
        if isinstance(seg, PlainText):
            yield seg.text
        elif isinstance(seg, DevBlock):
            yield from _plain_leaves(seg.before)
            yield from _plain_leaves(seg.after)
        else:
            yield from _plain_leaves(seg.body)


def _span_sequence(segments: tuple[ContentSegment, ...]) -> list[DeploymentType]:
    seq: list[DeploymentType] = []
    for seg in segments:
        if isinstance(seg, DeploymentSpan):
            seq.append(seg.dep)
            seq.extend(_span_sequence(seg.body))
        elif isinstance(seg, DevBlock):
            seq.extend(_span_sequence(seg.before))
            seq.extend(_span_sequence(seg.after))
    return seq


def _dev_blocks(segments: tuple[ContentSegment, ...]) -> Iterator[DevBlock]:
    for seg in segments:
        if isinstance(seg, DevBlock):
            yield seg
        elif isinstance(seg, DeploymentSpan):
            yield from _dev_blocks(seg.body)


def _version_tokens(version: RequirementVersion) -> list[Token]:
    """Non-tag tokens of the version's full written content."""
    text = " ".join(_plain_leaves(version.content))
    return [t for t in tokenize(text) if t.kind is not TokenKind.TAG]


def _iter_versions(
    docs: list[SpecDocument],
) -> Iterator[tuple[SpecDocument, Requirement, RequirementVersion]]:
    for doc in docs:
        for req in doc.iter_requirements():
            for version in req.versions:
                yield doc, req, version


def _version_label(version: RequirementVersion) -> str:
    return str(version.first_release)


# ---------------------------------------------------------------------------
# L1: duplication
# ---------------------------------------------------------------------------


def shingle_set(tokens: list[Token], k: int) -> frozenset[tuple[str, ...]]:
    texts = [t.text for t in tokens]
    if not texts:
        return frozenset()
    if len(texts) < k:
        return frozenset({tuple(texts)})
    return frozenset(tuple(texts[i : i + k]) for i in range(len(texts) - k + 1))


def jaccard(a: frozenset, b: frozenset) -> float:
    if not a and not b:
        return 1.0
    union = len(a | b)
    return len(a & b) / union if union else 0.0


def _prefix_renames(ids_a: set[str], ids_b: set[str]) -> list[tuple[str, str]]:
    """Pair up identifiers unique to each side where one is a prefix of the other."""
    only_a = sorted(ids_a - ids_b)
    only_b = sorted(ids_b - ids_a)
    if not only_a or not only_b:
        return []
    pairs: list[tuple[str, str]] = []
    remaining = list(only_b)
    for ident in only_a:
        match = next(
            (
                other
                for other in remaining
                if (other.startswith(ident) or ident.startswith(other))
                and other != ident
            ),
            None,
        )
        if match is None:
            return []
        remaining.remove(match)
        pairs.append((ident, match))
    if remaining:
        return []
    return pairs


def detect_duplication(
    docs: list[SpecDocument],
    registry: DevelopmentRegistry,
    config: LintConfig,
) -> list[LintFinding]:
    """Pairwise near-duplicate detection over materialized version texts."""
    universe = release_universe(docs, registry)
    latest = universe[-1] if universe else None

    records = []
    for doc, req, version in _iter_versions(docs):
        ref = version.last_release if version.last_release is not None else latest
        if ref is None:
            continue
        resolved = materialize(req, ref, None, registry)
        if resolved is None:
            continue
        tokens = normalize(tokenize(resolved.text))
        records.append(
            {
                "location": Location(doc.name, req.id, _version_label(version)),
                "req_id": req.id,
                "shingles": shingle_set(tokens, config.shingle_k),
                "identifiers": {
                    t.text for t in tokens if t.kind is TokenKind.IDENTIFIER
                },
            }
        )

    findings: list[LintFinding] = []
    for i in range(len(records)):
        for j in range(i + 1, len(records)):
            a, b = records[i], records[j]
            if a["req_id"] == b["req_id"]:
                continue
            similarity = jaccard(a["shingles"], b["shingles"])
            if similarity < config.dup_threshold:
                continue
            score = round(similarity, 4)
            findings.append(
                _finding(
                    LintRule.L1_DUPLICATION,
                    a["location"],
                    f"near-duplicate of {b['req_id']} "
                    f"(shingle Jaccard {score})",
                    related=b["location"],
                    score=score,
                )
            )
            renames = _prefix_renames(a["identifiers"], b["identifiers"])
            if renames:
                detail = ", ".join(f"{x} / {y}" for x, y in renames)
                findings.append(
                    _finding(
                        LintRule.L1_DUPLICATION,
                        a["location"],
                        f"renamed-parameter duplication of {b['req_id']}: {detail}",
                        related=b["location"],
                        score=score,
                    )
                )
    return findings


# ---------------------------------------------------------------------------
# L2: requirement length
# ---------------------------------------------------------------------------


def check_length(
    doc_name: str, req: Requirement, config: LintConfig, lexicon: Lexicon
) -> list[LintFinding]:
    findings: list[LintFinding] = []
    for version in req.versions:
        loc = Location(doc_name, req.id, _version_label(version))
        tokens = _version_tokens(version)
        if len(tokens) > config.max_tokens:
            findings.append(
                _finding(
                    LintRule.L2_LENGTH,
                    loc,
                    f"version has {len(tokens)} tokens "
                    f"(limit {config.max_tokens})",
                    score=float(len(tokens)),
                )
            )
        procedures = {m.canonical for m in find_mentions(tokens, lexicon)}
        if len(procedures) > config.max_procedures:
            findings.append(
                _finding(
                    LintRule.L2_LENGTH,
                    loc,
                    f"version covers {len(procedures)} procedures "
                    f"(limit {config.max_procedures}): "
                    + ", ".join(sorted(procedures)),
                    score=float(len(procedures)),
                )
            )
        spans = _span_sequence(version.content)
        if DeploymentType.SA in spans and DeploymentType.NSA in spans:
            findings.append(
                _finding(
                    LintRule.L2_LENGTH,
                    loc,
                    "version mixes SA and NSA deployment behavior",
                )
            )
            alternations = sum(
                1 for x, y in zip(spans, spans[1:]) if x is not y
            )
            if alternations > 1:
                findings.append(
                    _finding(
                        LintRule.L2_LENGTH,
                        loc,
                        f"deployment behavior alternates {alternations} times "
                        "between SA and NSA",
                        score=float(alternations),
                    )
                )
    return findings


# ---------------------------------------------------------------------------
# L3: standardization
# ---------------------------------------------------------------------------

_BRACKET_RE = re.compile(r"\[[^\[\]]{1,40}\]")
_VARIANT_PATTERNS = (
    re.compile(r"before\s+cb[0-9a-z]{6}", re.IGNORECASE),
    re.compile(r"end\s+cb[0-9a-z]{6}", re.IGNORECASE),
    re.compile(r"cb[0-9a-z]{6}", re.IGNORECASE),
    re.compile(r"end\s+(?:sa|nsa)", re.IGNORECASE),
    re.compile(r"sa|nsa", re.IGNORECASE),
)
_VARIANT_DEV_RE = re.compile(r"cb[0-9a-z]{6}", re.IGNORECASE)


def _recognizable_variant(candidate: str) -> bool:
    inner = candidate[1:-1].strip()
    collapsed = re.sub(r"\s+", " ", inner)
    return any(p.fullmatch(collapsed) for p in _VARIANT_PATTERNS)


def canonical_phrase(lexicon: Lexicon, canonical: str) -> str:
    return " ".join(t.text for t in tokenize(canonical))


def check_standardization(
    docs: list[SpecDocument], lexicon: Lexicon
) -> list[LintFinding]:
    findings: list[LintFinding] = []
    for doc in docs:
        for req in doc.iter_requirements():
            # tag style variants seen per development id, across all versions
            styles: dict[str, set[str]] = {}
            for version in req.versions:
                loc = Location(doc.name, req.id, _version_label(version))
                tokens = _version_tokens(version)
                for mention in find_mentions(tokens, lexicon):
                    if mention.surface != canonical_phrase(lexicon, mention.canonical):
                        findings.append(
                            _finding(
                                LintRule.L3_STANDARDIZATION,
                                loc,
                                f"non-canonical name {mention.surface!r}; "
                                f"use {mention.canonical!r}",
                            )
                        )
                raw = render_segments(version.content)
                for m in _BRACKET_RE.finditer(raw):
                    candidate = m.group()
                    if TAG_RE.fullmatch(candidate):
                        continue
                    if _recognizable_variant(candidate):
                        findings.append(
                            _finding(
                                LintRule.L3_STANDARDIZATION,
                                loc,
                                f"non-canonical tag style {candidate!r}",
                            )
                        )
                        dev_match = _VARIANT_DEV_RE.search(candidate)
                        if dev_match:
                            styles.setdefault(
                                dev_match.group().upper(), set()
                            ).add(candidate)
                for block in _dev_blocks(version.content):
                    styles.setdefault(block.dev.upper(), set()).add("canonical")
            for dev, forms in sorted(styles.items()):
                if len(forms) > 1:
                    findings.append(
                        _finding(
                            LintRule.L3_STANDARDIZATION,
                            Location(doc.name, req.id),
                            f"development {dev} tagged in {len(forms)} styles "
                            "within one requirement",
                        )
                    )
    return findings


# ---------------------------------------------------------------------------
# L4: grammar
# ---------------------------------------------------------------------------

_TERMINAL_PUNCT = (".", "!", "?")


def check_grammar(doc_name: str, req: Requirement) -> list[LintFinding]:
    findings: list[LintFinding] = []
    if not is_valid_requirement_id(req.id):
        findings.append(
            _finding(
                LintRule.L4_GRAMMAR,
                Location(doc_name, req.id),
                f"requirement id {req.id!r} violates the id grammar "
                "(uppercase alphanumerics and underscores, 3-64 chars)",
            )
        )
    for version in req.versions:
        loc = Location(doc_name, req.id, _version_label(version))
        flagged_devs = set()
        for block in _dev_blocks(version.content):
            if block.dev not in flagged_devs and any(
                c.islower() for c in block.dev
            ):
                flagged_devs.add(block.dev)
                findings.append(
                    _finding(
                        LintRule.L4_GRAMMAR,
                        loc,
                        f"development id {block.dev} contains lowercase letters",
                    )
                )
            if not block.before:
                findings.append(
                    _finding(
                        LintRule.L4_GRAMMAR,
                        loc,
                        f"development block {block.dev} has an empty before-part",
                    )
                )
            if not block.after:
                findings.append(
                    _finding(
                        LintRule.L4_GRAMMAR,
                        loc,
                        f"development block {block.dev} has an empty after-part",
                    )
                )
        leaves = list(_plain_leaves(version.content))
        if leaves and not leaves[-1].rstrip().endswith(_TERMINAL_PUNCT):
            findings.append(
                _finding(
                    LintRule.L4_GRAMMAR,
                    loc,
                    "version content does not end with terminal punctuation",
                )
            )
    return findings


# ---------------------------------------------------------------------------
# L5: dispersion
# ---------------------------------------------------------------------------


def check_dispersion(
    docs: list[SpecDocument], lexicon: Lexicon, config: LintConfig
) -> list[LintFinding]:
    sections: dict[str, dict[tuple[str, tuple[str, ...]], Location]] = {}
    first_seen: dict[str, Location] = {}
    for doc, req, version in _iter_versions(docs):
        tokens = _version_tokens(version)
        for mention in find_mentions(tokens, lexicon):
            key = (doc.name, req.section_path)
            loc = Location(doc.name, req.id, _version_label(version))
            per_proc = sections.setdefault(mention.canonical, {})
            per_proc.setdefault(key, loc)
            first_seen.setdefault(mention.canonical, loc)

    findings: list[LintFinding] = []
    for canonical in sorted(sections):
        spots = sections[canonical]
        if len(spots) <= config.max_sections:
            continue
        places = "; ".join(
            f"{doc}:{'/'.join(path) or '(root)'}" for doc, path in sorted(spots)
        )
        findings.append(
            _finding(
                LintRule.L5_DISPERSION,
                first_seen[canonical],
                f"procedure {canonical!r} is mentioned in {len(spots)} sections "
                f"(limit {config.max_sections}): {places}",
                score=float(len(spots)),
            )
        )
    return findings


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------


def lint_corpus(
    docs: list[SpecDocument],
    registry: DevelopmentRegistry,
    lexicon: Lexicon,
    config: LintConfig,
) -> list[LintFinding]:
    """Run every enabled rule, deterministically ordered."""
    findings: list[LintFinding] = []
    if LintRule.L1_DUPLICATION in config.enabled:
        findings.extend(detect_duplication(docs, registry, config))
    for doc in docs:
        for req in doc.iter_requirements():
            if LintRule.L2_LENGTH in config.enabled:
                findings.extend(check_length(doc.name, req, config, lexicon))
            if LintRule.L4_GRAMMAR in config.enabled:
                findings.extend(check_grammar(doc.name, req))
    if LintRule.L3_STANDARDIZATION in config.enabled:
        findings.extend(check_standardization(docs, lexicon))
    if LintRule.L5_DISPERSION in config.enabled:
        findings.extend(check_dispersion(docs, lexicon, config))
    findings.sort(
        key=lambda f: (
            f.location.document,
            f.location.requirement,
            f.rule.value,
            f.location.version,
            f.message,
        )
    )
    return findings
