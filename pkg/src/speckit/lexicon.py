"""Internal procedure dictionary: alias phrases mapped to canonical names.

Procedure names appear under many surface forms ("A2 measurement", "A2
measurement for Handover", ...).  The lexicon resolves every known surface
form to one canonical name.  Matching is token-based: Word tokens compare
case-insensitively, everything technical (identifiers, ids, punctuation)
compares verbatim, so an alias never matches inside a parameter name.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ConflictingAliasError
from .tokenizer import Token, TokenKind, tokenize

AliasKey = tuple[str, ...]


def match_key(token: Token) -> str:
    return token.text.lower() if token.kind is TokenKind.WORD else token.text


def phrase_key(text: str) -> AliasKey:
    return tuple(match_key(t) for t in tokenize(text))


@dataclass(frozen=True)
class Mention:
    """One alias occurrence: canonical name, surface form, token span [start, end)."""

    canonical: str
    surface: str
    token_span: tuple[int, int]


@dataclass(frozen=True)
class Lexicon:
    entries: dict[str, tuple[str, ...]]  # canonical -> alias phrases
    reverse: dict[AliasKey, str]  # alias match key -> canonical
    max_alias_tokens: int

    def canonical_of(self, phrase: str) -> str | None:
        """Resolve a free-form phrase (canonical or alias) to its canonical name."""
        return self.reverse.get(phrase_key(phrase))

    def __len__(self) -> int:
        return len(self.entries)


def build_lexicon(entries: dict[str, list[str]]) -> Lexicon:
    reverse: dict[AliasKey, str] = {}
    stored: dict[str, tuple[str, ...]] = {}
    longest = 0
    for canonical, aliases in entries.items():
        # The canonical name is always one of its own aliases.
        phrases = [canonical] + [a for a in aliases if a != canonical]
        stored[canonical] = tuple(phrases)
        for phrase in phrases:
            key = phrase_key(phrase)
            if not key:
                raise ConflictingAliasError(phrase, canonical, "(empty alias)")
            existing = reverse.get(key)
            if existing is not None and existing != canonical:
                raise ConflictingAliasError(phrase, existing, canonical)
            reverse[key] = canonical
            longest = max(longest, len(key))
    return Lexicon(entries=stored, reverse=reverse, max_alias_tokens=longest)


def load_lexicon(source: str) -> Lexicon:
    """Load a lexicon file: a JSON object {canonical: [alias, ...]}."""
    if not source.strip():
        return build_lexicon({})
    data = json.loads(source)
    if not isinstance(data, dict):
        raise ValueError("lexicon file must contain a JSON object")
    entries: dict[str, list[str]] = {}
    for canonical, aliases in data.items():
        if not isinstance(aliases, list) or not all(
            isinstance(a, str) for a in aliases
        ):
            raise ValueError(f"aliases of {canonical!r} must be a list of strings")
        entries[canonical] = aliases
    return build_lexicon(entries)


def dump_lexicon(lexicon: Lexicon) -> str:
    data = {canonical: list(phrases[1:]) for canonical, phrases in lexicon.entries.items()}
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def find_mentions(tokens: list[Token], lexicon: Lexicon) -> list[Mention]:
    """Leftmost-longest alias matching over a token stream."""
    mentions: list[Mention] = []
    n = len(tokens)
    if not lexicon.reverse:
        return mentions
    keys = [match_key(t) for t in tokens]
    i = 0
    while i < n:
        hit = None
        limit = min(lexicon.max_alias_tokens, n - i)
        for length in range(limit, 0, -1):
            canonical = lexicon.reverse.get(tuple(keys[i : i + length]))
            if canonical is not None:
                hit = (canonical, length)
                break
        if hit is None:
            i += 1
            continue
        canonical, length = hit
        surface = " ".join(t.text for t in tokens[i : i + length])
        mentions.append(Mention(canonical=canonical, surface=surface, token_span=(i, i + length)))
        i += length
    return mentions
