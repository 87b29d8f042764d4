"""Domain model for versioned, release-tagged specification requirements."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, Optional, Union

RELEASE_ID_RE = re.compile(r"^(\d{2})R(\d+)$")
DEVELOPMENT_ID_RE = re.compile(r"^CB[0-9A-Za-z]{6}$")
REQUIREMENT_ID_RE = re.compile(r"^(?=.*[A-Z])[A-Z0-9_]{3,64}$")


@dataclass(frozen=True, order=True)
class ReleaseId:
    """Software release identifier, rendered as "NNRk" (e.g. "01R1").

    Ordering is lexicographic on (major, revision) as integers, so
    "02R1" > "01R9".
    """

    major: int
    revision: int

    def __post_init__(self) -> None:
        if self.major < 0 or self.major > 99:
            raise ValueError(f"release major out of range: {self.major}")
        if self.revision < 1:
            raise ValueError(f"release revision must be positive: {self.revision}")

    @classmethod
    def parse(cls, text: str) -> "ReleaseId":
        m = RELEASE_ID_RE.match(text)
        if not m:
            raise ValueError(f"malformed release id: {text!r}")
        return cls(major=int(m.group(1)), revision=int(m.group(2)))

    def __str__(self) -> str:
        return f"{self.major:02d}R{self.revision}"


def compare_releases(a: ReleaseId, b: ReleaseId) -> int:
    """Total order on releases: -1 if a < b, 0 if equal, 1 if a > b."""
    if (a.major, a.revision) < (b.major, b.revision):
        return -1
    if (a.major, a.revision) > (b.major, b.revision):
        return 1
    return 0


def is_valid_development_id(text: str) -> bool:
    return bool(DEVELOPMENT_ID_RE.match(text))


def is_valid_requirement_id(text: str) -> bool:
    return bool(REQUIREMENT_ID_RE.match(text))


class DeploymentType(Enum):
    SA = "SA"
    NSA = "NSA"


@dataclass(frozen=True)
class PlainText:
    """Untagged requirement text; never empty after trimming."""

    text: str

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("PlainText must be non-empty after trimming")


@dataclass(frozen=True)
class DevBlock:
    """A development-change block: replaced behavior and its replacement.

    `before` holds the behavior valid until the development's release,
    `after` the behavior valid from it.  Neither part may contain another
    DevBlock.
    """

    dev: str
    before: tuple["ContentSegment", ...]
    after: tuple["ContentSegment", ...]

    def __post_init__(self) -> None:
        if not is_valid_development_id(self.dev):
            raise ValueError(f"malformed development id: {self.dev!r}")
        for part in (self.before, self.after):
            for seg in part:
                if _contains_dev_block(seg):
                    raise ValueError("DevBlock parts must not nest DevBlocks")


@dataclass(frozen=True)
class DeploymentSpan:
    """Content valid only for one deployment type (SA or NSA)."""

    dep: DeploymentType
    body: tuple["ContentSegment", ...]

    def __post_init__(self) -> None:
        for seg in self.body:
            if _contains_span_of(seg, self.dep):
                raise ValueError(f"nested [{self.dep.value}] span")


ContentSegment = Union[PlainText, DevBlock, DeploymentSpan]


def _contains_dev_block(seg: ContentSegment) -> bool:
    if isinstance(seg, DevBlock):
        return True
    if isinstance(seg, DeploymentSpan):
        return any(_contains_dev_block(s) for s in seg.body)
    return False


def _contains_span_of(seg: ContentSegment, dep: DeploymentType) -> bool:
    if isinstance(seg, DeploymentSpan):
        if seg.dep is dep:
            return True
        return any(_contains_span_of(s, dep) for s in seg.body)
    if isinstance(seg, DevBlock):
        return any(_contains_span_of(s, dep) for s in seg.before + seg.after)
    return False


def iter_dev_ids(segments: tuple[ContentSegment, ...]) -> Iterator[str]:
    """Yield every development id tagged anywhere in `segments`, in order."""
    for seg in segments:
        if isinstance(seg, DevBlock):
            yield seg.dev
            yield from iter_dev_ids(seg.before)
            yield from iter_dev_ids(seg.after)
        elif isinstance(seg, DeploymentSpan):
            yield from iter_dev_ids(seg.body)


@dataclass(frozen=True)
class RequirementVersion:
    """One release-scoped version of a requirement.

    `last_release` is None while the version is still valid (open-ended).
    """

    first_release: ReleaseId
    last_release: Optional[ReleaseId]
    content: tuple[ContentSegment, ...]

    def __post_init__(self) -> None:
        if self.last_release is not None and self.last_release < self.first_release:
            raise ValueError(
                f"version range inverted: {self.first_release} > {self.last_release}"
            )

    def contains(self, r: ReleaseId) -> bool:
        if r < self.first_release:
            return False
        return self.last_release is None or r <= self.last_release

    def overlaps(self, other: "RequirementVersion") -> bool:
        a_last = self.last_release
        b_last = other.last_release
        if a_last is not None and a_last < other.first_release:
            return False
        if b_last is not None and b_last < self.first_release:
            return False
        return True


@dataclass(frozen=True)
class Requirement:
    """Uniquely identified unit with release-scoped versions of tagged content."""

    id: str
    versions: tuple[RequirementVersion, ...]
    section_path: tuple[str, ...] = ()
    source_line: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        if not self.versions:
            raise ValueError(f"requirement {self.id!r} has no versions")
        open_count = sum(1 for v in self.versions if v.last_release is None)
        if open_count > 1:
            raise ValueError(f"requirement {self.id!r} has {open_count} open versions")
        ordered = sorted(self.versions, key=lambda v: v.first_release)
        for a, b in zip(ordered, ordered[1:]):
            if a.overlaps(b):
                raise ValueError(
                    f"requirement {self.id!r} versions overlap at {b.first_release}"
                )

    def open_version(self) -> Optional[RequirementVersion]:
        for v in self.versions:
            if v.last_release is None:
                return v
        return None


def version_at(req: Requirement, r: ReleaseId) -> Optional[RequirementVersion]:
    """Return the unique version valid at release `r`, or None."""
    for v in req.versions:
        if v.contains(r):
            return v
    return None


@dataclass(frozen=True)
class Section:
    """A titled document section holding requirements and subsections."""

    title: str
    requirements: tuple[Requirement, ...] = ()
    subsections: tuple["Section", ...] = ()

    def __post_init__(self) -> None:
        if not self.title.strip():
            raise ValueError("section title must be non-empty")


@dataclass(frozen=True)
class SpecDocument:
    """A named specification document: a tree of sections with requirements."""

    name: str
    sections: tuple[Section, ...] = ()

    def iter_requirements(self) -> Iterator[Requirement]:
        def walk(sections: tuple[Section, ...]) -> Iterator[Requirement]:
            for sec in sections:
                yield from sec.requirements
                yield from walk(sec.subsections)

        yield from walk(self.sections)


@dataclass(frozen=True)
class DevelopmentRegistry:
    """Maps each development id to the release that introduces it."""

    entries: Mapping[str, ReleaseId]

    def __contains__(self, dev: str) -> bool:
        return dev in self.entries

    def release_of(self, dev: str) -> ReleaseId:
        return self.entries[dev]

    def releases(self) -> set[ReleaseId]:
        return set(self.entries.values())


def release_universe(
    docs: list[SpecDocument], registry: DevelopmentRegistry
) -> list[ReleaseId]:
    """Ordered list of every release known to the corpus or the registry."""
    releases = registry.releases()
    for doc in docs:
        for req in doc.iter_requirements():
            for v in req.versions:
                releases.add(v.first_release)
                if v.last_release is not None:
                    releases.add(v.last_release)
    return sorted(releases)


def previous_release(universe: list[ReleaseId], r: ReleaseId) -> Optional[ReleaseId]:
    """The release immediately before `r` in the ordered universe, if any."""
    prev = None
    for candidate in sorted(universe):
        if candidate >= r:
            break
        prev = candidate
    return prev
