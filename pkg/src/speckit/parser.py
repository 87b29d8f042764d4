"""Parser and serializer for the `.spec` text format.

A document is line-oriented:

    === SPEC FORMAT 1 ===
    # Section title
    ## Subsection title
    === REQ <ID> ===
    --- VERSION first=<release> last=<release|open> ---
    content lines with inline tags
    === END ===

Inline content tags:

    [Before CBxxxxxx] old text [CBxxxxxx] new text [End CBxxxxxx]
    [SA] standalone-only text [End SA]     (likewise [NSA])

A deployment span with no matching end tag extends to the end of its
enclosing part.  Tag matching is case-sensitive and exact; case or spacing
variants are left in plain text for the lint stage to flag.  Parsing
recovers per requirement block: a malformed block is reported and dropped,
and parsing continues with the next block.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import RegistryError
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
    is_valid_development_id,
    iter_dev_ids,
)

FORMAT_HEADER = "=== SPEC FORMAT 1 ==="

_FORMAT_RE = re.compile(r"^=== SPEC FORMAT \d+ ===$")
_REQ_OPEN_RE = re.compile(r"^=== REQ (\S+) ===$")
_END_RE = re.compile(r"^=== END ===$")
_VERSION_RE = re.compile(r"^--- VERSION first=(\S+) last=(\S+) ---$")
_HEADING_RE = re.compile(r"^(#+)\s+(\S.*)$")
_MARKERISH_RE = re.compile(r"^(===.*===|---.*---)$")

_TAG_EVENT_RE = re.compile(
    r"\[(?:"
    r"Before (?P<before>CB[0-9A-Za-z]{6})"
    r"|End (?P<end_dev>CB[0-9A-Za-z]{6})"
    r"|(?P<mid>CB[0-9A-Za-z]{6})"
    r"|End (?P<end_dep>SA|NSA)"
    r"|(?P<dep>SA|NSA)"
    r")\]"
)


class ParseErrorKind(Enum):
    UNBALANCED_TAG = "UnbalancedTag"
    NESTED_DEV_BLOCK = "NestedDevBlock"
    BAD_RELEASE_ID = "BadReleaseId"
    BAD_REQUIREMENT_HEADER = "BadRequirementHeader"
    DUPLICATE_ID = "DuplicateId"
    DANGLING_END = "DanglingEnd"
    UNKNOWN_DEVELOPMENT = "UnknownDevelopment"


@dataclass(frozen=True)
class ParseError:
    kind: ParseErrorKind
    line: int
    message: str
    document: str = ""

    def __str__(self) -> str:
        where = f"{self.document}:{self.line}" if self.document else f"line {self.line}"
        return f"{where}: {self.kind.value}: {self.message}"


@dataclass
class ParseResult:
    """Outcome of parsing one document: the well-formed blocks plus all errors."""

    document: SpecDocument
    errors: list[ParseError]

    @property
    def ok(self) -> bool:
        return not self.errors


# ---------------------------------------------------------------------------
# Content (inline tag) parsing
# ---------------------------------------------------------------------------


@dataclass
class _Frame:
    kind: str  # "root" | "dev" | "span"
    segments: list[ContentSegment] = field(default_factory=list)
    dev: str = ""
    phase: str = "before"  # dev frames only
    after_segments: list[ContentSegment] = field(default_factory=list)
    dep: Optional[DeploymentType] = None
    open_line: int = 0
    # A frame opened by an invalidly nested tag; flattened on close so that
    # model invariants are never violated while error recovery continues.
    bad: bool = False

    def active(self) -> list[ContentSegment]:
        if self.kind == "dev" and self.phase == "after":
            return self.after_segments
        return self.segments


class _ContentParser:
    """State machine over the inline tag grammar, tracking source lines."""

    def __init__(self) -> None:
        self.stack: list[_Frame] = [_Frame(kind="root")]
        self.errors: list[ParseError] = []
        self.buffer: list[str] = []

    def _error(self, kind: ParseErrorKind, line: int, message: str) -> None:
        self.errors.append(ParseError(kind=kind, line=line, message=message))

    def _flush_text(self) -> None:
        text = "".join(self.buffer).strip()
        self.buffer.clear()
        if text:
            self.stack[-1].active().append(PlainText(text))

    def _pop_frame(self) -> None:
        frame = self.stack.pop()
        parent = self.stack[-1].active()
        if frame.bad:
            parent.extend(frame.segments)
            parent.extend(frame.after_segments)
        elif frame.kind == "span":
            assert frame.dep is not None
            parent.append(DeploymentSpan(frame.dep, tuple(frame.segments)))
        elif frame.kind == "dev":
            parent.append(
                DevBlock(frame.dev, tuple(frame.segments), tuple(frame.after_segments))
            )

    def _close_spans_in_part(self) -> None:
        # Unclosed deployment spans extend to the end of the enclosing part.
        while self.stack[-1].kind == "span":
            self._pop_frame()

    def feed_line(self, line_no: int, line: str) -> None:
        text = line.strip()
        if not text:
            return
        if self.buffer:
            self.buffer.append(" ")
        pos = 0
        for m in _TAG_EVENT_RE.finditer(text):
            self.buffer.append(text[pos : m.start()])
            pos = m.end()
            self._handle_tag(line_no, m)
        self.buffer.append(text[pos:])

    def _handle_tag(self, line: int, m: "re.Match[str]") -> None:
        self._flush_text()
        tag = m.group(0)
        if m.group("before"):
            dev = m.group("before")
            nested = any(f.kind == "dev" for f in self.stack)
            if nested:
                self._error(
                    ParseErrorKind.NESTED_DEV_BLOCK,
                    line,
                    f"{tag} opened inside another development block",
                )
            self.stack.append(_Frame(kind="dev", dev=dev, open_line=line, bad=nested))
        elif m.group("mid"):
            dev = m.group("mid")
            self._close_spans_in_part()
            top = self.stack[-1]
            if top.kind == "dev" and top.dev == dev and top.phase == "before":
                top.phase = "after"
            elif top.kind == "dev" and top.dev == dev:
                self._error(
                    ParseErrorKind.UNBALANCED_TAG, line, f"duplicate {tag} tag"
                )
            else:
                self._error(
                    ParseErrorKind.UNBALANCED_TAG,
                    line,
                    f"{tag} without matching [Before {dev}]",
                )
        elif m.group("end_dev"):
            dev = m.group("end_dev")
            self._close_spans_in_part()
            top = self.stack[-1]
            if top.kind == "dev" and top.dev == dev:
                if top.phase == "before":
                    self._error(
                        ParseErrorKind.UNBALANCED_TAG,
                        line,
                        f"{tag} before the [{dev}] tag",
                    )
                self._pop_frame()
            elif top.kind == "dev":
                self._error(
                    ParseErrorKind.UNBALANCED_TAG,
                    line,
                    f"{tag} does not close open block [Before {top.dev}]",
                )
            else:
                self._error(
                    ParseErrorKind.DANGLING_END, line, f"{tag} without opener"
                )
        elif m.group("dep"):
            dep = DeploymentType(m.group("dep"))
            nested = any(f.kind == "span" and f.dep is dep for f in self.stack)
            if nested:
                self._error(
                    ParseErrorKind.UNBALANCED_TAG,
                    line,
                    f"{tag} opened inside another {tag} span",
                )
            self.stack.append(_Frame(kind="span", dep=dep, open_line=line, bad=nested))
        else:
            dep = DeploymentType(m.group("end_dep"))
            top = self.stack[-1]
            if top.kind == "span" and top.dep is dep:
                self._pop_frame()
            else:
                in_part = False
                for f in reversed(self.stack):
                    if f.kind == "dev":
                        break
                    if f.kind == "span" and f.dep is dep:
                        in_part = True
                        break
                if in_part:
                    self._error(
                        ParseErrorKind.UNBALANCED_TAG,
                        line,
                        f"{tag} closes an improperly nested span",
                    )
                else:
                    self._error(
                        ParseErrorKind.DANGLING_END, line, f"{tag} without opener"
                    )

    def finish(self, end_line: int) -> list[ContentSegment]:
        self._flush_text()
        while len(self.stack) > 1:
            top = self.stack[-1]
            if top.kind == "dev":
                missing = f"[{top.dev}]" if top.phase == "before" else f"[End {top.dev}]"
                self._error(
                    ParseErrorKind.UNBALANCED_TAG,
                    top.open_line or end_line,
                    f"[Before {top.dev}] never closed: missing {missing}",
                )
            self._pop_frame()
        return self.stack[0].segments


def parse_content(text: str) -> tuple[list[ContentSegment], list[ParseError]]:
    """Parse one version's content body into segments; errors use 1-based lines."""
    machine = _ContentParser()
    lines = text.split("\n")
    for i, line in enumerate(lines, start=1):
        machine.feed_line(i, line)
    segments = machine.finish(len(lines))
    return segments, machine.errors


# ---------------------------------------------------------------------------
# Document parsing
# ---------------------------------------------------------------------------


@dataclass
class _VersionDraft:
    line: int
    first: Optional[ReleaseId]
    last: Optional[ReleaseId]
    last_open: bool
    content_lines: list[tuple[int, str]] = field(default_factory=list)
    bad: bool = False


@dataclass
class _BlockDraft:
    line: int
    req_id: str
    versions: list[_VersionDraft] = field(default_factory=list)
    errors: list[ParseError] = field(default_factory=list)


@dataclass
class _SectionDraft:
    level: int
    title: str
    requirements: list[Requirement] = field(default_factory=list)
    subsections: list["_SectionDraft"] = field(default_factory=list)

    def build(self) -> Section:
        return Section(
            title=self.title,
            requirements=tuple(self.requirements),
            subsections=tuple(s.build() for s in self.subsections),
        )


def parse_document(source: str, name: str = "") -> ParseResult:
    """Parse a `.spec` document; collects every error found in one pass."""
    errors: list[ParseError] = []
    roots: list[_SectionDraft] = []
    stack: list[_SectionDraft] = []
    seen_ids: dict[str, int] = {}
    block: Optional[_BlockDraft] = None

    def current_version(b: _BlockDraft) -> Optional[_VersionDraft]:
        return b.versions[-1] if b.versions else None

    def close_block(b: _BlockDraft) -> None:
        """Assemble a requirement from a finished block; drop it on any error."""
        block_errors = list(b.errors)
        versions: list[RequirementVersion] = []
        for draft in b.versions:
            machine = _ContentParser()
            for line_no, line in draft.content_lines:
                machine.feed_line(line_no, line)
            end_line = draft.content_lines[-1][0] if draft.content_lines else draft.line
            segments = machine.finish(end_line)
            block_errors.extend(machine.errors)
            if draft.bad or draft.first is None:
                continue
            versions.append(
                RequirementVersion(
                    first_release=draft.first,
                    last_release=draft.last,
                    content=tuple(segments),
                )
            )
        if not b.versions:
            block_errors.append(
                ParseError(
                    ParseErrorKind.BAD_REQUIREMENT_HEADER,
                    b.line,
                    f"requirement {b.req_id} has no versions",
                )
            )
        if b.req_id in seen_ids:
            block_errors.append(
                ParseError(
                    ParseErrorKind.DUPLICATE_ID,
                    b.line,
                    f"duplicate requirement id {b.req_id} "
                    f"(first defined at line {seen_ids[b.req_id]})",
                )
            )
        if not stack:
            block_errors.append(
                ParseError(
                    ParseErrorKind.BAD_REQUIREMENT_HEADER,
                    b.line,
                    f"requirement {b.req_id} appears outside any section",
                )
            )
        errors.extend(block_errors)
        if block_errors:
            return
        section_path = tuple(s.title for s in stack)
        try:
            req = Requirement(
                id=b.req_id,
                versions=tuple(versions),
                section_path=section_path,
                source_line=b.line,
            )
        except ValueError as exc:
            errors.append(
                ParseError(ParseErrorKind.BAD_RELEASE_ID, b.line, str(exc))
            )
            return
        seen_ids[b.req_id] = b.line
        stack[-1].requirements.append(req)

    for line_no, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()

        if block is not None:
            if _END_RE.match(line):
                close_block(block)
                block = None
                continue
            m = _VERSION_RE.match(line)
            if m:
                draft = _VersionDraft(line=line_no, first=None, last=None, last_open=False)
                try:
                    draft.first = ReleaseId.parse(m.group(1))
                except ValueError as exc:
                    errors.append(ParseError(ParseErrorKind.BAD_RELEASE_ID, line_no, str(exc)))
                    draft.bad = True
                last_text = m.group(2)
                if last_text == "open":
                    draft.last = None
                else:
                    try:
                        draft.last = ReleaseId.parse(last_text)
                    except ValueError as exc:
                        errors.append(
                            ParseError(ParseErrorKind.BAD_RELEASE_ID, line_no, str(exc))
                        )
                        draft.bad = True
                if draft.bad:
                    block.errors.append(
                        ParseError(
                            ParseErrorKind.BAD_RELEASE_ID,
                            line_no,
                            "version header has malformed release id",
                        )
                    )
                block.versions.append(draft)
                continue
            m = _REQ_OPEN_RE.match(line)
            if m:
                block.errors.append(
                    ParseError(
                        ParseErrorKind.BAD_REQUIREMENT_HEADER,
                        line_no,
                        f"requirement {block.req_id} not closed before next block",
                    )
                )
                close_block(block)
                block = _BlockDraft(line=line_no, req_id=m.group(1))
                continue
            version = current_version(block)
            if version is None:
                if line:
                    block.errors.append(
                        ParseError(
                            ParseErrorKind.BAD_REQUIREMENT_HEADER,
                            line_no,
                            "content before the first version header",
                        )
                    )
                continue
            if line:
                version.content_lines.append((line_no, line))
            continue

        # Outside any requirement block.
        if not line or _FORMAT_RE.match(line):
            continue
        m = _HEADING_RE.match(line)
        if m:
            level = len(m.group(1))
            title = m.group(2).strip()
            while stack and stack[-1].level >= level:
                stack.pop()
            draft = _SectionDraft(level=level, title=title)
            if stack:
                stack[-1].subsections.append(draft)
            else:
                roots.append(draft)
            stack.append(draft)
            continue
        m = _REQ_OPEN_RE.match(line)
        if m:
            block = _BlockDraft(line=line_no, req_id=m.group(1))
            continue
        if _END_RE.match(line):
            errors.append(
                ParseError(
                    ParseErrorKind.DANGLING_END, line_no, "=== END === without open block"
                )
            )
            continue
        if _VERSION_RE.match(line):
            errors.append(
                ParseError(
                    ParseErrorKind.BAD_REQUIREMENT_HEADER,
                    line_no,
                    "version header outside requirement block",
                )
            )
            continue
        if _MARKERISH_RE.match(line):
            errors.append(
                ParseError(
                    ParseErrorKind.BAD_REQUIREMENT_HEADER,
                    line_no,
                    f"malformed block marker: {line}",
                )
            )
            continue
        errors.append(
            ParseError(
                ParseErrorKind.BAD_REQUIREMENT_HEADER,
                line_no,
                "unexpected text outside requirement block",
            )
        )

    if block is not None:
        block.errors.append(
            ParseError(
                ParseErrorKind.BAD_REQUIREMENT_HEADER,
                block.line,
                f"requirement {block.req_id} not closed at end of document",
            )
        )
        close_block(block)

    doc = SpecDocument(name=name, sections=tuple(s.build() for s in roots))
    return ParseResult(document=doc, errors=errors)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def render_segments(segments: tuple[ContentSegment, ...]) -> str:
    parts: list[str] = []
    for seg in segments:
        if isinstance(seg, PlainText):
            parts.append(seg.text)
        elif isinstance(seg, DevBlock):
            inner = [f"[Before {seg.dev}]"]
            before = render_segments(seg.before)
            if before:
                inner.append(before)
            inner.append(f"[{seg.dev}]")
            after = render_segments(seg.after)
            if after:
                inner.append(after)
            inner.append(f"[End {seg.dev}]")
            parts.append(" ".join(inner))
        else:
            body = render_segments(seg.body)
            if body:
                parts.append(f"[{seg.dep.value}] {body} [End {seg.dep.value}]")
            else:
                parts.append(f"[{seg.dep.value}] [End {seg.dep.value}]")
    return " ".join(parts)


def serialize(doc: SpecDocument) -> str:
    """Render a document in canonical form: LF lines, one content line per version."""
    lines: list[str] = [FORMAT_HEADER]

    def emit_requirement(req: Requirement) -> None:
        lines.append("")
        lines.append(f"=== REQ {req.id} ===")
        for v in req.versions:
            last = "open" if v.last_release is None else str(v.last_release)
            lines.append(f"--- VERSION first={v.first_release} last={last} ---")
            content = render_segments(v.content)
            if content:
                lines.append(content)
        lines.append("=== END ===")

    def emit_section(sec: Section, level: int) -> None:
        lines.append("")
        lines.append("#" * level + " " + sec.title)
        for req in sec.requirements:
            emit_requirement(req)
        for sub in sec.subsections:
            emit_section(sub, level + 1)

    for sec in doc.sections:
        emit_section(sec, 1)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Corpus-level validation and registry loading
# ---------------------------------------------------------------------------


def validate_corpus(
    docs: list[SpecDocument], registry: DevelopmentRegistry
) -> list[ParseError]:
    """Cross-document checks: id uniqueness and development registration."""
    findings: list[ParseError] = []
    seen: dict[str, str] = {}
    for doc in docs:
        for req in doc.iter_requirements():
            if req.id in seen:
                findings.append(
                    ParseError(
                        ParseErrorKind.DUPLICATE_ID,
                        req.source_line or 1,
                        f"requirement id {req.id} already defined in {seen[req.id]}",
                        document=doc.name,
                    )
                )
            else:
                seen[req.id] = doc.name
            for version in req.versions:
                for dev in dict.fromkeys(iter_dev_ids(version.content)):
                    if dev not in registry:
                        findings.append(
                            ParseError(
                                ParseErrorKind.UNKNOWN_DEVELOPMENT,
                                req.source_line or 1,
                                f"requirement {req.id} references unregistered "
                                f"development {dev}",
                                document=doc.name,
                            )
                        )
                    elif registry.release_of(dev) < version.first_release:
                        findings.append(
                            ParseError(
                                ParseErrorKind.BAD_RELEASE_ID,
                                req.source_line or 1,
                                f"development {dev} ({registry.release_of(dev)}) "
                                f"predates first release {version.first_release} "
                                f"of requirement {req.id}",
                                document=doc.name,
                            )
                        )
    return findings


def load_registry(source: str) -> DevelopmentRegistry:
    """Parse a registry file: `<DevelopmentId> <ReleaseId>` lines, `#` comments."""
    entries: dict[str, ReleaseId] = {}
    for line_no, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise RegistryError(f"line {line_no}: expected '<dev> <release>', got {raw!r}")
        dev, release_text = fields
        if not is_valid_development_id(dev):
            raise RegistryError(f"line {line_no}: malformed development id {dev!r}")
        try:
            release = ReleaseId.parse(release_text)
        except ValueError as exc:
            raise RegistryError(f"line {line_no}: {exc}") from exc
        if dev in entries and entries[dev] != release:
            raise RegistryError(
                f"line {line_no}: development {dev} registered twice with "
                f"different releases"
            )
        entries[dev] = release
    return DevelopmentRegistry(entries=entries)


def dump_registry(registry: DevelopmentRegistry) -> str:
    lines = [f"{dev} {release}" for dev, release in sorted(registry.entries.items())]
    return "\n".join(lines) + ("\n" if lines else "")
