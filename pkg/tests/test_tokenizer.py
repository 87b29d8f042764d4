import random
from collections import Counter

from speckit.tokenizer import Token, TokenKind, load_stop_words, normalize, tokenize


def kinds(text: str) -> list[tuple[str, TokenKind]]:
    return [(t.text, t.kind) for t in tokenize(text)]


class TestClassification:
    def test_camel_case_identifier_is_one_token(self):
        assert kinds("activateMeasurementSA") == [
            ("activateMeasurementSA", TokenKind.IDENTIFIER)
        ]

    def test_empty_input(self):
        assert tokenize("") == []

    def test_tag_is_one_token(self):
        assert kinds("[Before CB00XXXX]") == [("[Before CB00XXXX]", TokenKind.TAG)]

    def test_development_id(self):
        assert kinds("CB00XXXX") == [("CB00XXXX", TokenKind.DEVELOPMENT_ID)]

    def test_release_id(self):
        assert kinds("01R1") == [("01R1", TokenKind.RELEASE_ID)]

    def test_requirement_id(self):
        assert kinds("REQ_0042") == [("REQ_0042", TokenKind.REQUIREMENT_ID)]

    def test_number_and_decimal(self):
        assert kinds("42") == [("42", TokenKind.NUMBER)]
        assert kinds("3.5") == [("3.5", TokenKind.NUMBER)]

    def test_words_and_punct(self):
        assert kinds("The timer expires.") == [
            ("The", TokenKind.WORD),
            ("timer", TokenKind.WORD),
            ("expires", TokenKind.WORD),
            (".", TokenKind.PUNCT),
        ]

    def test_letter_digit_mix_is_identifier(self):
        assert kinds("A2") == [("A2", TokenKind.IDENTIFIER)]

    def test_underscore_mix_is_identifier(self):
        assert kinds("max_count") == [("max_count", TokenKind.IDENTIFIER)]

    def test_all_tag_forms(self):
        for tag in (
            "[Before CB000001]",
            "[CB000001]",
            "[End CB000001]",
            "[SA]",
            "[NSA]",
            "[End SA]",
            "[End NSA]",
        ):
            assert kinds(tag) == [(tag, TokenKind.TAG)]

    def test_non_canonical_tag_is_not_a_tag(self):
        toks = tokenize("[before CB00XXXX]")
        assert all(t.kind is not TokenKind.TAG for t in toks)

    def test_tag_with_extra_spaces_is_not_a_tag(self):
        toks = tokenize("[ SA ]")
        assert all(t.kind is not TokenKind.TAG for t in toks)


class TestProperties:
    def _fuzz_text(self, rng: random.Random, n_chars: int) -> str:
        alphabet = (
            "abcdefghij ABCDE 0123456789 _.,;[]() CB00XXAAZZ 01R2 "
            "activateMeasurementSA requirement shall timer\n\t"
        )
        return "".join(rng.choice(alphabet) for _ in range(n_chars))

    def test_determinism(self):
        rng = random.Random(3)
        text = self._fuzz_text(rng, 2000)
        assert tokenize(text) == tokenize(text)

    def test_digit_multiset_preserved_on_fuzz(self):
        rng = random.Random(11)
        text = self._fuzz_text(rng, 10_000)
        in_digits = Counter(c for c in text if c.isdigit())
        out_digits = Counter(c for t in tokenize(text) for c in t.text if c.isdigit())
        assert in_digits == out_digits

    def test_no_character_lost(self):
        rng = random.Random(13)
        text = self._fuzz_text(rng, 3000)
        joined = "".join(t.text for t in tokenize(text))
        assert joined == "".join(text.split())

    def test_space_join_reproduces_normalized_input(self):
        # for inputs whose punctuation already stands alone
        text = "The  activateMeasurementSA parameter [SA] shall apply . See 01R2"
        assert " ".join(t.text for t in tokenize(text)) == " ".join(text.split())

    def test_concatenation_stability(self):
        rng = random.Random(17)
        for _ in range(50):
            a = self._fuzz_text(rng, 80).strip() or "x"
            b = self._fuzz_text(rng, 80).strip() or "y"
            assert tokenize(a + " " + b) == tokenize(a) + tokenize(b)


class TestNormalize:
    def test_words_lowercased_identifiers_kept(self):
        tokens = [
            Token("The", TokenKind.WORD),
            Token("activateMeasurement", TokenKind.IDENTIFIER),
        ]
        assert normalize(tokens) == [
            Token("the", TokenKind.WORD),
            Token("activateMeasurement", TokenKind.IDENTIFIER),
        ]

    def test_empty(self):
        assert normalize([]) == []

    def test_tags_survive_verbatim(self):
        tokens = [Token("[SA]", TokenKind.TAG)]
        assert normalize(tokens) == tokens

    def test_punct_dropped(self):
        tokens = tokenize("a, b.")
        assert all(t.kind is not TokenKind.PUNCT for t in normalize(tokens))

    def test_technical_kinds_verbatim(self):
        tokens = tokenize("REQ_0001 CB00XXXX 01R2 42")
        assert normalize(tokens) == tokens

    def test_stop_words_drop_words_only(self):
        stop = load_stop_words("the\nShall\n\n")
        tokens = tokenize("The timer shall CB00XXXX")
        kept = [t.text for t in normalize(tokens, stop)]
        assert kept == ["timer", "CB00XXXX"]
