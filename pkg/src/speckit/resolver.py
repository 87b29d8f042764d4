"""Release resolution: effective requirement text at a release and deployment.

A development block reads as its `after` text from the release that
introduces the development onward, and as its `before` text earlier.
Deployment spans are kept or dropped depending on the requested deployment.
`baseline` performs the editorial equivalent: it deletes a development's
tags while keeping the behavior the development introduced, splitting the
requirement into a closed and a new open version.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional

from .errors import DevelopmentNotPresentError, UnknownDevelopmentError
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
    iter_dev_ids,
    previous_release,
    version_at,
)

_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.;])\s+")


@dataclass(frozen=True)
class ResolvedRequirement:
    """Tag-free effective text of one requirement at one release."""

    id: str
    release: ReleaseId
    deployment: Optional[DeploymentType]  # None means both deployments
    text: str
    contributing_devs: frozenset[str]


class DiffKind(Enum):
    ADDED = "added"
    REMOVED = "removed"
    UNCHANGED = "unchanged"


@dataclass(frozen=True)
class DiffSegment:
    kind: DiffKind
    text: str


@dataclass(frozen=True)
class BehaviorDiff:
    id: str
    release_a: ReleaseId
    release_b: ReleaseId
    segments: tuple[DiffSegment, ...]
    causes: frozenset[str]

    @property
    def has_changes(self) -> bool:
        return any(s.kind is not DiffKind.UNCHANGED for s in self.segments)

    def added(self) -> list[str]:
        return [s.text for s in self.segments if s.kind is DiffKind.ADDED]

    def removed(self) -> list[str]:
        return [s.text for s in self.segments if s.kind is DiffKind.REMOVED]


def _resolve_segments(
    segments: tuple[ContentSegment, ...],
    r: ReleaseId,
    dep: Optional[DeploymentType],
    registry: DevelopmentRegistry,
    contributing: set[str],
    seen: set[str],
) -> str:
    parts: list[str] = []
    for seg in segments:
        if isinstance(seg, PlainText):
            parts.append(seg.text)
        elif isinstance(seg, DevBlock):
            if seg.dev not in registry:
                raise UnknownDevelopmentError(seg.dev)
            seen.add(seg.dev)
            if registry.release_of(seg.dev) <= r:
                contributing.add(seg.dev)
                chosen = seg.after
            else:
                chosen = seg.before
            text = _resolve_segments(chosen, r, dep, registry, contributing, seen)
            if text:
                parts.append(text)
        else:
            if dep is None or seg.dep is dep:
                text = _resolve_segments(seg.body, r, dep, registry, contributing, seen)
                if text:
                    parts.append(text)
    return " ".join(parts)


def materialize(
    req: Requirement,
    r: ReleaseId,
    dep: Optional[DeploymentType],
    registry: DevelopmentRegistry,
) -> Optional[ResolvedRequirement]:
    """Effective text of `req` at release `r`, or None when no version is valid."""
    version = version_at(req, r)
    if version is None:
        return None
    contributing: set[str] = set()
    seen: set[str] = set()
    text = _resolve_segments(version.content, r, dep, registry, contributing, seen)
    return ResolvedRequirement(
        id=req.id,
        release=r,
        deployment=dep,
        text=text,
        contributing_devs=frozenset(contributing),
    )


def resolve_details(
    req: Requirement,
    r: ReleaseId,
    dep: Optional[DeploymentType],
    registry: DevelopmentRegistry,
) -> Optional[tuple[str, frozenset[str], frozenset[str]]]:
    """Like materialize, but returns (text, contributing devs, reachable devs)."""
    version = version_at(req, r)
    if version is None:
        return None
    contributing: set[str] = set()
    seen: set[str] = set()
    text = _resolve_segments(version.content, r, dep, registry, contributing, seen)
    return text, frozenset(contributing), frozenset(seen)


def _inline_dev(
    segments: tuple[ContentSegment, ...], dev: str
) -> tuple[ContentSegment, ...]:
    out: list[ContentSegment] = []
    for seg in segments:
        if isinstance(seg, DevBlock) and seg.dev == dev:
            out.extend(seg.after)
        elif isinstance(seg, DeploymentSpan):
            out.append(DeploymentSpan(seg.dep, _inline_dev(seg.body, dev)))
        else:
            out.append(seg)
    return _merge_plain(out)


def _merge_plain(segments: list[ContentSegment]) -> tuple[ContentSegment, ...]:
    merged: list[ContentSegment] = []
    for seg in segments:
        if (
            isinstance(seg, PlainText)
            and merged
            and isinstance(merged[-1], PlainText)
        ):
            merged[-1] = PlainText(merged[-1].text + " " + seg.text)
        else:
            merged.append(seg)
    return tuple(merged)


def baseline(
    req: Requirement,
    dev: str,
    registry: DevelopmentRegistry,
    universe: Optional[list[ReleaseId]] = None,
) -> Requirement:
    """Delete `dev`'s tags from the open version, keeping the introduced behavior.

    The open version is closed at the release preceding the development's
    introducing release, and a new open version starting at that release
    carries the development's after-text inline.
    """
    if dev not in registry:
        raise UnknownDevelopmentError(dev)
    open_version = req.open_version()
    if open_version is None or dev not in set(iter_dev_ids(open_version.content)):
        raise DevelopmentNotPresentError(req.id, dev)

    if universe is None:
        releases = registry.releases()
        for v in req.versions:
            releases.add(v.first_release)
            if v.last_release is not None:
                releases.add(v.last_release)
        universe = sorted(releases)
    introduced = registry.release_of(dev)
    prev = previous_release(universe, introduced)
    if prev is None or prev < open_version.first_release:
        raise ValueError(
            f"cannot close open version of {req.id}: no release in the universe "
            f"lies between {open_version.first_release} and {introduced}"
        )

    closed = RequirementVersion(
        first_release=open_version.first_release,
        last_release=prev,
        content=open_version.content,
    )
    fresh = RequirementVersion(
        first_release=introduced,
        last_release=None,
        content=_inline_dev(open_version.content, dev),
    )
    versions = tuple(closed if v is open_version else v for v in req.versions) + (fresh,)
    return Requirement(
        id=req.id,
        versions=versions,
        section_path=req.section_path,
        source_line=req.source_line,
    )


def split_sentences(text: str) -> list[str]:
    """Sentence-ish segments: split after '.'/';' followed by whitespace."""
    return [s for s in _SENTENCE_SPLIT_RE.split(text) if s]


def lcs_diff(a: list[str], b: list[str]) -> list[DiffSegment]:
    """LCS-aligned diff with a swap-symmetric tie break.

    At DP ties the lexicographically larger element is dropped, which makes
    the alignment invariant under swapping the inputs: the added segments of
    diff(a, b) equal the removed segments of diff(b, a) in order.
    """
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        row = table[i]
        prev = table[i - 1]
        ai = a[i - 1]
        for j in range(1, m + 1):
            if ai == b[j - 1]:
                row[j] = prev[j - 1] + 1
            else:
                row[j] = prev[j] if prev[j] >= row[j - 1] else row[j - 1]

    ops: list[DiffSegment] = []
    i, j = n, m
    while i > 0 and j > 0:
        if a[i - 1] == b[j - 1]:
            ops.append(DiffSegment(DiffKind.UNCHANGED, a[i - 1]))
            i -= 1
            j -= 1
        elif table[i - 1][j] > table[i][j - 1]:
            ops.append(DiffSegment(DiffKind.REMOVED, a[i - 1]))
            i -= 1
        elif table[i - 1][j] < table[i][j - 1]:
            ops.append(DiffSegment(DiffKind.ADDED, b[j - 1]))
            j -= 1
        elif a[i - 1] > b[j - 1]:
            ops.append(DiffSegment(DiffKind.REMOVED, a[i - 1]))
            i -= 1
        else:
            ops.append(DiffSegment(DiffKind.ADDED, b[j - 1]))
            j -= 1
    while i > 0:
        ops.append(DiffSegment(DiffKind.REMOVED, a[i - 1]))
        i -= 1
    while j > 0:
        ops.append(DiffSegment(DiffKind.ADDED, b[j - 1]))
        j -= 1
    ops.reverse()
    return ops


def diff_texts(
    req_id: str,
    release_a: ReleaseId,
    release_b: ReleaseId,
    text_a: Optional[str],
    text_b: Optional[str],
    devs_a: set[str],
    devs_b: set[str],
    dev_releases: Mapping[str, ReleaseId],
) -> BehaviorDiff:
    """Build a BehaviorDiff from two already-resolved texts."""
    sentences_a = split_sentences(text_a) if text_a is not None else []
    sentences_b = split_sentences(text_b) if text_b is not None else []
    segments = tuple(lcs_diff(sentences_a, sentences_b))
    causes: set[str] = set()
    if any(s.kind is not DiffKind.UNCHANGED for s in segments):
        for dev in devs_a | devs_b:
            introduced = dev_releases[dev]
            if (introduced <= release_a) != (introduced <= release_b):
                causes.add(dev)
    return BehaviorDiff(
        id=req_id,
        release_a=release_a,
        release_b=release_b,
        segments=segments,
        causes=frozenset(causes),
    )


def diff_behavior(
    req: Requirement,
    a: ReleaseId,
    b: ReleaseId,
    dep: Optional[DeploymentType],
    registry: DevelopmentRegistry,
) -> BehaviorDiff:
    """Sentence-level behavior diff of one requirement between two releases."""
    devs_a: set[str] = set()
    devs_b: set[str] = set()
    text_a: Optional[str] = None
    text_b: Optional[str] = None

    version_a = version_at(req, a)
    if version_a is not None:
        text_a = _resolve_segments(version_a.content, a, dep, registry, set(), devs_a)
    version_b = version_at(req, b)
    if version_b is not None:
        text_b = _resolve_segments(version_b.content, b, dep, registry, set(), devs_b)

    return diff_texts(req.id, a, b, text_a, text_b, devs_a, devs_b, registry.entries)
