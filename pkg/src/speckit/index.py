"""Queryable index over a resolved corpus.

Five query mappings are served: procedure behavior at a release, behavior
difference between two releases, changes caused by a development, the
requirements describing a procedure, and behavior per deployment type.
Procedures are lexicon canonical names; requirements mentioning no known
procedure are kept under the reserved "(unmapped)" key.  The index is
rebuilt from scratch on corpus change and persists to a single JSON file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .errors import UnknownDevelopmentError, UnknownReleaseError
from .lexicon import Lexicon, find_mentions, phrase_key
from .model import (
    DeploymentType,
    DevelopmentRegistry,
    ReleaseId,
    SpecDocument,
    release_universe,
)
from .resolver import BehaviorDiff, DiffKind, DiffSegment, diff_texts, resolve_details
from .tokenizer import tokenize

FORMAT_VERSION = 1
UNMAPPED = "(unmapped)"

Entry = tuple[str, str]  # (requirement id, resolved text)


@dataclass
class SpecIndex:
    release_universe: list[ReleaseId]
    registry: dict[str, ReleaseId]
    aliases: dict[str, str]  # space-joined alias match key -> canonical
    # requirement id -> release -> (text, reachable devs)
    req_release: dict[str, dict[str, tuple[str, frozenset[str]]]]
    # canonical -> release -> entries
    proc_release: dict[str, dict[str, list[Entry]]]
    # canonical -> development -> diffs
    proc_dev: dict[str, dict[str, list[BehaviorDiff]]]
    proc_req: dict[str, set[str]] = field(default_factory=dict)
    # canonical -> deployment -> release -> entries
    proc_dep: dict[str, dict[str, dict[str, list[Entry]]]] = field(default_factory=dict)

    def canonical_of(self, procedure: str) -> Optional[str]:
        if procedure == UNMAPPED:
            return UNMAPPED
        return self.aliases.get(" ".join(phrase_key(procedure)))

    def latest_release(self) -> ReleaseId:
        if not self.release_universe:
            raise UnknownReleaseError("(empty universe)")
        return self.release_universe[-1]

    def _require_release(self, r: ReleaseId) -> None:
        if r not in self.release_universe:
            raise UnknownReleaseError(str(r))


def build_index(
    docs: list[SpecDocument],
    registry: DevelopmentRegistry,
    lexicon: Lexicon,
) -> SpecIndex:
    """Materialize every requirement at every release and index by procedure."""
    universe = release_universe(docs, registry)
    aliases = {" ".join(key): canonical for key, canonical in lexicon.reverse.items()}

    index = SpecIndex(
        release_universe=universe,
        registry=dict(registry.entries),
        aliases=aliases,
        req_release={},
        proc_release={},
        proc_dev={},
        proc_req={},
        proc_dep={},
    )

    # canonical procedures per (requirement, release); reused for proc_dev
    procs_at: dict[tuple[str, str], set[str]] = {}

    for doc in docs:
        for req in doc.iter_requirements():
            for r in universe:
                details = resolve_details(req, r, None, registry)
                if details is None:
                    continue
                text, _contributing, seen = details
                r_key = str(r)
                index.req_release.setdefault(req.id, {})[r_key] = (text, seen)

                mentions = find_mentions(tokenize(text), lexicon)
                procs = {m.canonical for m in mentions} or {UNMAPPED}
                procs_at[(req.id, r_key)] = procs
                for proc in procs:
                    index.proc_release.setdefault(proc, {}).setdefault(
                        r_key, []
                    ).append((req.id, text))
                    index.proc_req.setdefault(proc, set()).add(req.id)

                for dep in DeploymentType:
                    dep_details = resolve_details(req, r, dep, registry)
                    assert dep_details is not None
                    dep_text = dep_details[0]
                    for proc in procs:
                        index.proc_dep.setdefault(proc, {}).setdefault(
                            dep.value, {}
                        ).setdefault(r_key, []).append((req.id, dep_text))

    for a, b in zip(universe, universe[1:]):
        a_key, b_key = str(a), str(b)
        for req_id, by_release in index.req_release.items():
            text_a, devs_a = by_release.get(a_key, (None, frozenset()))
            text_b, devs_b = by_release.get(b_key, (None, frozenset()))
            if text_a is None and text_b is None:
                continue
            diff = diff_texts(
                req_id, a, b, text_a, text_b, set(devs_a), set(devs_b), index.registry
            )
            if not diff.has_changes:
                continue
            procs = procs_at.get((req_id, a_key), set()) | procs_at.get(
                (req_id, b_key), set()
            )
            for dev in sorted(diff.causes):
                for proc in sorted(procs):
                    index.proc_dev.setdefault(proc, {}).setdefault(dev, []).append(diff)

    return index


# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------


def query_behavior(
    index: SpecIndex, procedure: str, r: ReleaseId
) -> list[Entry]:
    """Resolved texts describing `procedure` at release `r`."""
    index._require_release(r)
    canonical = index.canonical_of(procedure)
    if canonical is None:
        return []
    return list(index.proc_release.get(canonical, {}).get(str(r), []))


def query_release_diff(
    index: SpecIndex, procedure: str, a: ReleaseId, b: ReleaseId
) -> list[BehaviorDiff]:
    """Behavior diffs between releases `a` and `b`, all-unchanged ones omitted."""
    index._require_release(a)
    index._require_release(b)
    canonical = index.canonical_of(procedure)
    if canonical is None:
        return []
    by_release = index.proc_release.get(canonical, {})
    ids = sorted(
        {req_id for req_id, _ in by_release.get(str(a), [])}
        | {req_id for req_id, _ in by_release.get(str(b), [])}
    )
    diffs = []
    for req_id in ids:
        records = index.req_release.get(req_id, {})
        text_a, devs_a = records.get(str(a), (None, frozenset()))
        text_b, devs_b = records.get(str(b), (None, frozenset()))
        diff = diff_texts(
            req_id, a, b, text_a, text_b, set(devs_a), set(devs_b), index.registry
        )
        if diff.has_changes:
            diffs.append(diff)
    return diffs


def query_dev_changes(
    index: SpecIndex, procedure: str, dev: str
) -> list[BehaviorDiff]:
    """Diffs of `procedure` requirements caused by development `dev`."""
    if dev not in index.registry:
        raise UnknownDevelopmentError(dev)
    canonical = index.canonical_of(procedure)
    if canonical is None:
        return []
    return list(index.proc_dev.get(canonical, {}).get(dev, []))


def query_requirements(index: SpecIndex, procedure: str) -> set[str]:
    """Ids of every requirement related to `procedure`."""
    canonical = index.canonical_of(procedure)
    if canonical is None:
        return set()
    return set(index.proc_req.get(canonical, set()))


def query_deployment(
    index: SpecIndex,
    procedure: str,
    dep: DeploymentType,
    r: Optional[ReleaseId] = None,
) -> list[Entry]:
    """Resolved texts for one deployment type, at `r` or the latest release."""
    release = r if r is not None else index.latest_release()
    index._require_release(release)
    canonical = index.canonical_of(procedure)
    if canonical is None:
        return []
    return list(
        index.proc_dep.get(canonical, {}).get(dep.value, {}).get(str(release), [])
    )


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def _diff_to_dict(diff: BehaviorDiff) -> dict:
    return {
        "id": diff.id,
        "release_a": str(diff.release_a),
        "release_b": str(diff.release_b),
        "segments": [[s.kind.value, s.text] for s in diff.segments],
        "causes": sorted(diff.causes),
    }


def _diff_from_dict(data: dict) -> BehaviorDiff:
    return BehaviorDiff(
        id=data["id"],
        release_a=ReleaseId.parse(data["release_a"]),
        release_b=ReleaseId.parse(data["release_b"]),
        segments=tuple(
            DiffSegment(DiffKind(kind), text) for kind, text in data["segments"]
        ),
        causes=frozenset(data["causes"]),
    )


def index_to_json(index: SpecIndex) -> str:
    data = {
        "format_version": FORMAT_VERSION,
        "release_universe": [str(r) for r in index.release_universe],
        "registry": {dev: str(r) for dev, r in sorted(index.registry.items())},
        "aliases": dict(sorted(index.aliases.items())),
        "req_release": {
            req_id: {
                r: {"text": text, "devs": sorted(devs)}
                for r, (text, devs) in sorted(by_release.items())
            }
            for req_id, by_release in sorted(index.req_release.items())
        },
        "proc_release": {
            proc: {r: entries for r, entries in sorted(by_release.items())}
            for proc, by_release in sorted(index.proc_release.items())
        },
        "proc_dev": {
            proc: {
                dev: [_diff_to_dict(d) for d in diffs]
                for dev, diffs in sorted(by_dev.items())
            }
            for proc, by_dev in sorted(index.proc_dev.items())
        },
        "proc_req": {
            proc: sorted(ids) for proc, ids in sorted(index.proc_req.items())
        },
        "proc_dep": {
            proc: {
                dep: {r: entries for r, entries in sorted(by_release.items())}
                for dep, by_release in sorted(by_dep.items())
            }
            for proc, by_dep in sorted(index.proc_dep.items())
        },
    }
    return json.dumps(data, sort_keys=True, indent=None, separators=(",", ":")) + "\n"


def index_from_json(source: str) -> SpecIndex:
    data = json.loads(source)
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported index format version: {version!r}")
    return SpecIndex(
        release_universe=[ReleaseId.parse(r) for r in data["release_universe"]],
        registry={dev: ReleaseId.parse(r) for dev, r in data["registry"].items()},
        aliases=dict(data["aliases"]),
        req_release={
            req_id: {
                r: (record["text"], frozenset(record["devs"]))
                for r, record in by_release.items()
            }
            for req_id, by_release in data["req_release"].items()
        },
        proc_release={
            proc: {
                r: [(req_id, text) for req_id, text in entries]
                for r, entries in by_release.items()
            }
            for proc, by_release in data["proc_release"].items()
        },
        proc_dev={
            proc: {
                dev: [_diff_from_dict(d) for d in diffs]
                for dev, diffs in by_dev.items()
            }
            for proc, by_dev in data["proc_dev"].items()
        },
        proc_req={proc: set(ids) for proc, ids in data["proc_req"].items()},
        proc_dep={
            proc: {
                dep: {
                    r: [(req_id, text) for req_id, text in entries]
                    for r, entries in by_release.items()
                }
                for dep, by_release in by_dep.items()
            }
            for proc, by_dep in data["proc_dep"].items()
        },
    )
