"""Deterministic synthetic corpus generator with ground truth by construction.

Generates a parse-clean corpus (documents, development registry, lexicon)
plus a ground-truth record naming every injected defect and every
procedure-to-requirement mapping, so lint and query results can be checked
exactly.  All randomness flows from one seeded `random.Random`, so equal
seeds produce byte-identical corpora.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .lexicon import Lexicon, build_lexicon, dump_lexicon
from .lint import jaccard, shingle_set
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
)
from .parser import dump_registry, serialize
from .tokenizer import tokenize, normalize

RELEASES = (
    ReleaseId(1, 1),
    ReleaseId(1, 2),
    ReleaseId(2, 1),
    ReleaseId(2, 2),
)

# Procedure pool: canonical name plus alias surface forms.  None of the
# distinctive words below may appear in the filler vocabulary, so mentions
# only occur where the generator puts them.
PROCEDURES: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("A2 measurement", ("A2 measurement for Handover", "A2 measurement for the activation of downlink events")),
    ("A3 measurement", ("A3 measurement for Handover", "A3 measurement comparison")),
    ("handover preparation", ("handover preparation phase", "preparation of handover")),
    ("cell reselection", ("cell reselection evaluation", "idle cell reselection")),
    ("beam management", ("beam management loop", "beam refinement management")),
    ("power ramping", ("power ramping sequence", "preamble power ramping")),
    ("paging monitoring", ("paging monitoring occasion", "idle paging monitoring")),
    ("bearer establishment", ("bearer establishment exchange", "default bearer establishment")),
    ("uplink grant allocation", ("uplink grant allocation loop", "dynamic uplink grant allocation")),
    ("random access", ("random access attempt", "contention random access")),
    ("carrier aggregation", ("carrier aggregation setup", "downlink carrier aggregation")),
    ("admission handling", ("admission handling decision", "admission handling of bearers")),
    ("link adaptation", ("link adaptation loop", "outer link adaptation")),
    ("timing advance", ("timing advance maintenance", "initial timing advance")),
    ("channel sounding", ("channel sounding cycle", "periodic channel sounding")),
    ("interference coordination", ("interference coordination exchange", "inter cell interference coordination")),
    ("mobility anchoring", ("mobility anchoring selection", "anchoring of mobility contexts")),
    ("dual connectivity", ("dual connectivity split", "dual connectivity addition")),
    ("bandwidth part switching", ("bandwidth part switching rule", "active bandwidth part switching")),
    ("neighbor discovery", ("neighbor discovery scan", "automatic neighbor discovery")),
    ("measurement gap coordination", ("measurement gap coordination pattern", "gap coordination for measurement")),
    ("radio bearer teardown", ("radio bearer teardown exchange", "signaling radio bearer teardown")),
    ("session continuity", ("session continuity handling", "continuity of sessions")),
    ("spectrum sharing", ("spectrum sharing arbitration", "dynamic spectrum sharing")),
    ("beam failure detection", ("beam failure detection loop", "detection of beam failure")),
    ("conditional handover", ("conditional handover evaluation", "early conditional handover")),
    ("secondary node addition", ("secondary node addition exchange", "addition of the secondary node")),
    ("buffer status reporting", ("buffer status reporting cycle", "periodic buffer status reporting")),
    ("drx alignment", ("drx alignment procedure", "connected drx alignment")),
    ("prach partitioning", ("prach partitioning scheme", "rach prach partitioning")),
)

_FILLER_NOUNS = (
    "timer", "counter", "value", "state", "trigger", "threshold", "parameter",
    "window", "limit", "request", "response", "indication", "record", "table",
    "entry", "field", "flag", "profile", "policy", "margin", "offset",
    "budget", "quota", "filter", "interval", "duration", "retry",
    "queue", "pool", "slot", "frame", "context", "instance",
)
_FILLER_VERBS = (
    "apply", "configure", "update", "verify", "reset", "start", "stop",
    "monitor", "adjust", "evaluate", "compute", "derive", "select", "assign",
    "enable", "disable", "notify", "validate", "enforce", "restore", "extend",
    "reject", "accept", "suspend", "resume",
)
_FILLER_MODS = (
    "immediately", "periodically", "internally", "strictly", "gradually",
    "temporarily", "accordingly", "once", "twice", "repeatedly",
)
_IDENTIFIERS = (
    "timerValue", "retryCount", "maxWindowSize", "pollLimit", "syncOffset",
    "guardMargin", "probeInterval", "queueDepth", "driftBound", "wakeBudget",
)

_SLOTS: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("SPEC_A", ("General Requirements",)),
    ("SPEC_A", ("Measurement Procedures",)),
    ("SPEC_A", ("Measurement Procedures", "Event Configuration")),
    ("SPEC_A", ("Mobility Control",)),
    ("SPEC_B", ("Deployment Behavior",)),
    ("SPEC_B", ("Scheduling And Power",)),
    ("SPEC_B", ("Session Management",)),
)

# Four distinct (document, section) homes per dispersed procedure.
_DISPERSED_SLOTS = (
    (0, 1, 4, 5),
    (1, 2, 5, 6),
    (0, 3, 4, 6),
)


def build_generator_lexicon() -> Lexicon:
    return build_lexicon({canonical: list(aliases) for canonical, aliases in PROCEDURES})


# ---------------------------------------------------------------------------
# Sentence and content builders
# ---------------------------------------------------------------------------


def _sentence(rng: random.Random) -> str:
    pattern = rng.randrange(4)
    n1, n2 = rng.choice(_FILLER_NOUNS), rng.choice(_FILLER_NOUNS)
    verb = rng.choice(_FILLER_VERBS)
    mod = rng.choice(_FILLER_MODS)
    if pattern == 0:
        return f"The {n1} shall {verb} the {n2} {mod}."
    if pattern == 1:
        return f"The {rng.choice(_IDENTIFIERS)} {n1} shall {verb} the {n2}."
    if pattern == 2:
        return f"Each {n1} shall {verb} every {n2} {mod}."
    return f"The {n1} and the {n2} shall {verb} {mod}."


def _mention_sentence(rng: random.Random, surface: str) -> str:
    verb = rng.choice(_FILLER_VERBS)
    noun = rng.choice(_FILLER_NOUNS)
    return f"The {surface} shall {verb} the {noun}."


def _token_count(text: str) -> int:
    return len(tokenize(text))


def _filler_sentences(rng: random.Random, min_tokens: int) -> list[str]:
    sentences: list[str] = []
    count = 0
    while count < min_tokens:
        sentence = _sentence(rng)
        sentences.append(sentence)
        count += _token_count(sentence)
    return sentences


def _fresh_sentence(rng: random.Random, avoid: str) -> str:
    sentence = _sentence(rng)
    while sentence == avoid:
        sentence = _sentence(rng)
    return sentence


# ---------------------------------------------------------------------------
# Object-level generators (also used directly by tests)
# ---------------------------------------------------------------------------


def random_tagged_requirement(
    rng: random.Random,
    req_id: str,
    n_devblocks: int,
    dev_start: int = 1,
) -> tuple[Requirement, dict[str, ReleaseId]]:
    """One open-version requirement carrying `n_devblocks` development blocks.

    Returns the requirement plus the registry entries for its developments,
    each introduced at a random release after the first.
    """
    registry: dict[str, ReleaseId] = {}
    segments: list[ContentSegment] = [PlainText(_sentence(rng))]
    for i in range(n_devblocks):
        dev = f"CB{dev_start + i:06d}"
        registry[dev] = rng.choice(RELEASES[1:])
        before: list[ContentSegment] = [PlainText(_sentence(rng))]
        after: list[ContentSegment] = [PlainText(_sentence(rng))]
        if rng.random() < 0.3:
            dep = rng.choice(list(DeploymentType))
            after.append(DeploymentSpan(dep, (PlainText(_sentence(rng)),)))
        segments.append(DevBlock(dev, tuple(before), tuple(after)))
        segments.append(PlainText(_sentence(rng)))
    if rng.random() < 0.3:
        dep = rng.choice(list(DeploymentType))
        segments.append(DeploymentSpan(dep, (PlainText(_sentence(rng)),)))
        segments.append(PlainText(_sentence(rng)))
    version = RequirementVersion(
        first_release=RELEASES[0], last_release=None, content=tuple(segments)
    )
    req = Requirement(id=req_id, versions=(version,), section_path=("Generated",))
    return req, registry


def _merge_adjacent_plain(segments: list[ContentSegment]) -> tuple[ContentSegment, ...]:
    merged: list[ContentSegment] = []
    for seg in segments:
        if isinstance(seg, PlainText) and merged and isinstance(merged[-1], PlainText):
            merged[-1] = PlainText(merged[-1].text + " " + seg.text)
        else:
            merged.append(seg)
    return tuple(merged)


def random_document(rng: random.Random, name: str, req_start: int = 1) -> SpecDocument:
    """A random well-formed document in canonical form, for round-trip testing."""
    counter = req_start

    def _content() -> tuple[ContentSegment, ...]:
        segments: list[ContentSegment] = [PlainText(_sentence(rng))]
        for _ in range(rng.randrange(3)):
            roll = rng.random()
            if roll < 0.4:
                dev = f"CB{rng.randrange(10**6):06d}"
                segments.append(
                    DevBlock(
                        dev,
                        (PlainText(_sentence(rng)),),
                        (PlainText(_sentence(rng)),),
                    )
                )
            elif roll < 0.7:
                dep = rng.choice(list(DeploymentType))
                segments.append(DeploymentSpan(dep, (PlainText(_sentence(rng)),)))
            else:
                segments.append(PlainText(_sentence(rng)))
        if not isinstance(segments[-1], PlainText):
            segments.append(PlainText(_sentence(rng)))
        return _merge_adjacent_plain(segments)

    def make_requirement(path: tuple[str, ...]) -> Requirement:
        nonlocal counter
        req_id = f"REQ_{counter:04d}"
        counter += 1
        versions: list[RequirementVersion] = []
        start = 0
        while start < len(RELEASES):
            first = RELEASES[start]
            if rng.random() < 0.6 or start == len(RELEASES) - 1:
                versions.append(
                    RequirementVersion(first_release=first, last_release=None, content=_content())
                )
                break
            end = rng.randrange(start, len(RELEASES) - 1)
            versions.append(
                RequirementVersion(
                    first_release=first, last_release=RELEASES[end], content=_content()
                )
            )
            start = end + 1
            if rng.random() < 0.3:
                break
        return Requirement(id=req_id, versions=tuple(versions), section_path=path)

    def make_section(level: int, prefix: tuple[str, ...]) -> Section:
        title = f"Section {rng.randrange(1000)}"
        path = prefix + (title,)
        requirements = tuple(
            make_requirement(path) for _ in range(rng.randrange(1, 4))
        )
        subsections = ()
        if level < 2 and rng.random() < 0.4:
            subsections = (make_section(level + 1, path),)
        return Section(title=title, requirements=requirements, subsections=subsections)

    sections = tuple(make_section(1, ()) for _ in range(rng.randrange(1, 4)))
    return SpecDocument(name=name, sections=sections)


# ---------------------------------------------------------------------------
# Seeded corpus with injected defects
# ---------------------------------------------------------------------------


@dataclass
class CorpusBundle:
    documents: list[SpecDocument]
    sources: dict[str, str]
    registry: DevelopmentRegistry
    registry_text: str
    lexicon: Lexicon
    lexicon_text: str
    ground_truth: dict


@dataclass
class _Draft:
    req_id: str
    slot: int
    procedure: str
    surface: str
    versions: list[tuple[ReleaseId, ReleaseId | None, tuple[ContentSegment, ...]]]
    devs: dict[str, ReleaseId]
    deployment: str | None = None
    span_sentence: str | None = None
    overlength: bool = False
    sentences: list[str] | None = None  # plain bodies only, for duplication


def generate_corpus(
    seed: int,
    size: int = 200,
    dup_pairs: int = 10,
    overlength: int = 8,
    alias_usages: int = 12,
    dispersed_procs: int = 3,
) -> CorpusBundle:
    if dispersed_procs > len(_DISPERSED_SLOTS):
        raise ValueError(f"at most {len(_DISPERSED_SLOTS)} dispersed procedures supported")
    n_injected = dup_pairs + overlength + alias_usages + 4 * dispersed_procs
    n_base = size - n_injected
    if n_base < max(dup_pairs, 1) + 6:
        raise ValueError(f"size {size} too small for the requested injections")

    rng = random.Random(seed)
    lexicon = build_generator_lexicon()
    normal_procs = [canonical for canonical, _ in PROCEDURES[: len(PROCEDURES) - len(_DISPERSED_SLOTS)]]
    dispersed_pool = [canonical for canonical, _ in PROCEDURES[len(PROCEDURES) - len(_DISPERSED_SLOTS):]]

    proc_home = {
        canonical: i % len(_SLOTS) for i, canonical in enumerate(normal_procs)
    }
    proc_cycle = 0
    dev_counter = 1
    req_counter = 1
    drafts: list[_Draft] = []
    registry_entries: dict[str, ReleaseId] = {}

    truth_changes: dict[str, dict[str, list[str]]] = {
        f"{a}->{b}": {} for a, b in zip(RELEASES, RELEASES[1:])
    }
    truth: dict = {
        "seed": seed,
        "size": size,
        "universe": [str(r) for r in RELEASES],
        "documents": sorted({doc for doc, _ in _SLOTS}),
        "duplicates": [],
        "overlength": [],
        "alias_usages": [],
        "dispersed": {},
        "dev_changes": {},
        "procedures": {canonical: [] for canonical, _ in PROCEDURES},
        "requirements": {},
    }

    def next_id() -> str:
        nonlocal req_counter
        req_id = f"REQ_{req_counter:04d}"
        req_counter += 1
        return req_id

    def next_proc() -> str:
        nonlocal proc_cycle
        canonical = normal_procs[proc_cycle % len(normal_procs)]
        proc_cycle += 1
        return canonical

    def plain_body(surface: str, min_tokens: int) -> list[str]:
        lead = _mention_sentence(rng, surface)
        return [lead] + _filler_sentences(rng, min_tokens - _token_count(lead))

    def add_draft(draft: _Draft) -> None:
        drafts.append(draft)
        truth["procedures"][draft.procedure].append(draft.req_id)

    # --- base plain requirements (duplication sources come from these) ----
    n_dev = max(3, n_base // 5)
    n_span = max(2, n_base // 10)
    n_multi = max(2, n_base // 10)
    n_plain = n_base - n_dev - n_span - n_multi

    plain_drafts: list[_Draft] = []
    for _ in range(n_plain):
        canonical = next_proc()
        sentences = plain_body(canonical, 60)
        body = " ".join(sentences)
        draft = _Draft(
            req_id=next_id(),
            slot=proc_home[canonical],
            procedure=canonical,
            surface=canonical,
            versions=[(RELEASES[0], None, (PlainText(body),))],
            devs={},
            sentences=sentences,
        )
        add_draft(draft)
        plain_drafts.append(draft)

    # --- requirements carrying development blocks ------------------------
    release_cycle = list(RELEASES[1:])
    for i in range(n_dev):
        canonical = next_proc()
        req_id = next_id()
        segments: list[ContentSegment] = [
            PlainText(
                _mention_sentence(rng, canonical) + " " + " ".join(
                    _filler_sentences(rng, 30)
                )
            )
        ]
        devs: dict[str, ReleaseId] = {}
        for _ in range(rng.randrange(1, 4)):
            dev = f"CB{dev_counter:06d}"
            dev_counter += 1
            introduced = release_cycle[(len(registry_entries) + len(devs)) % len(release_cycle)]
            devs[dev] = introduced
            replaced = _sentence(rng)
            segments.append(
                DevBlock(
                    dev,
                    (PlainText(replaced),),
                    (PlainText(_fresh_sentence(rng, replaced)),),
                )
            )
            segments.append(PlainText(_sentence(rng)))
        registry_entries.update(devs)
        draft = _Draft(
            req_id=req_id,
            slot=proc_home[canonical],
            procedure=canonical,
            surface=canonical,
            versions=[(RELEASES[0], None, tuple(segments))],
            devs=devs,
        )
        add_draft(draft)
        for dev, introduced in devs.items():
            truth["dev_changes"][dev] = {
                "requirement": req_id,
                "release": str(introduced),
                "procedure": canonical,
            }
        for a, b in zip(RELEASES, RELEASES[1:]):
            causes = sorted(d for d, r in devs.items() if r == b)
            if causes:
                truth_changes[f"{a}->{b}"][req_id] = causes

    # --- requirements with one deployment span ---------------------------
    for _ in range(n_span):
        canonical = next_proc()
        dep = rng.choice(list(DeploymentType))
        span_sentence = _sentence(rng)
        segments = (
            PlainText(
                _mention_sentence(rng, canonical)
                + " "
                + " ".join(_filler_sentences(rng, 25))
            ),
            DeploymentSpan(dep, (PlainText(span_sentence),)),
            PlainText(_sentence(rng)),
        )
        draft = _Draft(
            req_id=next_id(),
            slot=proc_home[canonical],
            procedure=canonical,
            surface=canonical,
            versions=[(RELEASES[0], None, segments)],
            devs={},
            deployment=dep.value,
            span_sentence=span_sentence,
        )
        add_draft(draft)

    # --- requirements with an already-baselined second version -----------
    for _ in range(n_multi):
        canonical = next_proc()
        req_id = next_id()
        shared = _mention_sentence(rng, canonical)
        old_tail = _sentence(rng)
        new_tail = _sentence(rng) + " " + _sentence(rng)
        v1 = (RELEASES[0], RELEASES[0], (PlainText(shared + " " + old_tail),))
        v2 = (RELEASES[1], None, (PlainText(shared + " " + new_tail),))
        draft = _Draft(
            req_id=req_id,
            slot=proc_home[canonical],
            procedure=canonical,
            surface=canonical,
            versions=[v1, v2],
            devs={},
        )
        add_draft(draft)
        truth_changes[f"{RELEASES[0]}->{RELEASES[1]}"].setdefault(req_id, [])

    # --- injected: over-length requirements ------------------------------
    for _ in range(overlength):
        canonical = next_proc()
        req_id = next_id()
        sentences = plain_body(canonical, 330)
        draft = _Draft(
            req_id=req_id,
            slot=proc_home[canonical],
            procedure=canonical,
            surface=canonical,
            versions=[(RELEASES[0], None, (PlainText(" ".join(sentences)),))],
            devs={},
            overlength=True,
        )
        add_draft(draft)
        truth["overlength"].append(req_id)

    # --- injected: non-canonical alias usages -----------------------------
    for i in range(alias_usages):
        canonical, aliases = PROCEDURES[i % len(normal_procs)]
        alias = aliases[i % len(aliases)]
        req_id = next_id()
        sentences = plain_body(alias, 45)
        draft = _Draft(
            req_id=req_id,
            slot=proc_home[canonical],
            procedure=canonical,
            surface=alias,
            versions=[(RELEASES[0], None, (PlainText(" ".join(sentences)),))],
            devs={},
        )
        add_draft(draft)
        truth["alias_usages"].append(
            {"requirement": req_id, "surface": alias, "canonical": canonical}
        )

    # --- injected: dispersed procedures -----------------------------------
    for i in range(dispersed_procs):
        canonical = dispersed_pool[i]
        ids = []
        for slot in _DISPERSED_SLOTS[i]:
            req_id = next_id()
            sentences = plain_body(canonical, 35)
            draft = _Draft(
                req_id=req_id,
                slot=slot,
                procedure=canonical,
                surface=canonical,
                versions=[(RELEASES[0], None, (PlainText(" ".join(sentences)),))],
                devs={},
            )
            add_draft(draft)
            ids.append(req_id)
        truth["dispersed"][canonical] = ids

    # --- injected: near-duplicate copies ----------------------------------
    sources = plain_drafts[:dup_pairs]
    for source in sources:
        assert source.sentences is not None
        copy_sentences = list(source.sentences)
        # Swap exactly one filler word; texts of >=50 tokens keep the
        # 5-shingle Jaccard at or above 0.8.
        target = rng.randrange(1, len(copy_sentences))
        words = copy_sentences[target].split()
        swappable = [
            i
            for i, w in enumerate(words)
            if w.rstrip(".").islower() and w.rstrip(".") in _FILLER_NOUNS + _FILLER_VERBS + _FILLER_MODS
        ]
        pick = swappable[rng.randrange(len(swappable))]
        old = words[pick]
        replacement = rng.choice([w for w in _FILLER_NOUNS if w != old.rstrip(".")])
        words[pick] = replacement + ("." if old.endswith(".") else "")
        copy_sentences[target] = " ".join(words)

        copy_text = " ".join(copy_sentences)
        source_text = " ".join(source.sentences)
        sim = jaccard(
            shingle_set(normalize(tokenize(source_text)), 5),
            shingle_set(normalize(tokenize(copy_text)), 5),
        )
        assert sim >= 0.8, f"constructed duplicate below 0.8 Jaccard: {sim}"

        req_id = next_id()
        draft = _Draft(
            req_id=req_id,
            slot=source.slot,
            procedure=source.procedure,
            surface=source.procedure,
            versions=[(RELEASES[0], None, (PlainText(copy_text),))],
            devs={},
        )
        add_draft(draft)
        truth["duplicates"].append([source.req_id, req_id])

    # --- assemble documents ------------------------------------------------
    registry = DevelopmentRegistry(entries=registry_entries)
    slot_reqs: dict[int, list[Requirement]] = {i: [] for i in range(len(_SLOTS))}
    for draft in drafts:
        doc_name, path = _SLOTS[draft.slot]
        versions = tuple(
            RequirementVersion(first_release=f, last_release=l, content=c)
            for f, l, c in draft.versions
        )
        req = Requirement(id=draft.req_id, versions=versions, section_path=path)
        slot_reqs[draft.slot].append(req)
        truth["requirements"][draft.req_id] = {
            "document": doc_name,
            "section_path": list(path),
            "procedure": draft.procedure,
            "surface": draft.surface,
            "versions": [
                {"first": str(f), "last": None if l is None else str(l)}
                for f, l, _ in draft.versions
            ],
            "devs": sorted(draft.devs),
            "deployment": draft.deployment,
            "span_sentence": draft.span_sentence,
            "overlength": draft.overlength,
        }

    documents = []
    for doc_name in truth["documents"]:
        top: list[Section] = []
        top_map: dict[str, tuple[list[Requirement], list[Section]]] = {}
        for slot_index, (slot_doc, path) in enumerate(_SLOTS):
            if slot_doc != doc_name:
                continue
            reqs = slot_reqs[slot_index]
            if len(path) == 1:
                top_map.setdefault(path[0], ([], []))[0].extend(reqs)
            else:
                top_map.setdefault(path[0], ([], []))
                top_map[path[0]][1].append(
                    Section(title=path[1], requirements=tuple(reqs))
                )
        for title, (reqs, subs) in top_map.items():
            top.append(
                Section(title=title, requirements=tuple(reqs), subsections=tuple(subs))
            )
        documents.append(SpecDocument(name=doc_name, sections=tuple(top)))

    truth["changes"] = truth_changes
    sources_text = {f"{doc.name}.spec": serialize(doc) for doc in documents}
    return CorpusBundle(
        documents=documents,
        sources=sources_text,
        registry=registry,
        registry_text=dump_registry(registry),
        lexicon=lexicon,
        lexicon_text=dump_lexicon(lexicon),
        ground_truth=truth,
    )


def write_corpus(bundle: CorpusBundle, out_dir: Path) -> list[Path]:
    """Write corpus files, registry, lexicon and ground truth under `out_dir`."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for filename, text in sorted(bundle.sources.items()):
        path = out_dir / filename
        path.write_text(text, encoding="utf-8")
        written.append(path)
    registry_path = out_dir / "registry.txt"
    registry_path.write_text(bundle.registry_text, encoding="utf-8")
    written.append(registry_path)
    lexicon_path = out_dir / "lexicon.json"
    lexicon_path.write_text(bundle.lexicon_text, encoding="utf-8")
    written.append(lexicon_path)
    truth_path = out_dir / "ground_truth.json"
    truth_path.write_text(
        json.dumps(bundle.ground_truth, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    written.append(truth_path)
    return written
