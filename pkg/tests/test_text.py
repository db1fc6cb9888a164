import random

from bionerkit.crf.text import (
    DEFAULT_TAGGER,
    RulePosTagger,
    Token,
    pos_tag,
    sentence_tokens,
    split_sentences,
    tokenize,
)

from conftest import random_text


class TestTokenize:
    def test_empty(self):
        assert tokenize("") == []

    def test_slice_invariant(self):
        rng = random.Random(211)
        for _ in range(200):
            text = random_text(rng, rng.randint(0, 12))
            for t in tokenize(text):
                assert text[t.start_idx : t.end_idx] == t.text

    def test_hyphen_compounds_stay_whole(self):
        texts = {t.text for t in tokenize("IL-6 and TNF-α in low-carb diets.")}
        assert {"IL-6", "TNF-α", "low-carb"} <= texts

    def test_punctuation_is_separate(self):
        toks = [t.text for t in tokenize("Mice (n=4), fed.")]
        assert toks == ["Mice", "(", "n", "=", "4", ")", ",", "fed", "."]

    def test_underscore_splits(self):
        # underscores are not word characters here; label-ish strings
        # ("dietary_supplement") must not tokenize as one word
        toks = [t.text for t in tokenize("a_b")]
        assert toks == ["a", "_", "b"]

    def test_offset_parameter_shifts(self):
        toks = tokenize("IL-6 rose", offset=100)
        assert [(t.start_idx, t.end_idx) for t in toks] == [(100, 104), (105, 109)]

    def test_unicode_tokens(self):
        toks = [t.text for t in tokenize("β-glucan 改善 🦠 counts")]
        assert toks == ["β-glucan", "改善", "🦠", "counts"]


class TestSplitSentences:
    def test_basic_split(self):
        text = "Gut flora shifts. We studied mice."
        spans = split_sentences(text)
        assert [text[s:e] for s, e in spans] == ["Gut flora shifts. ", "We studied mice."]

    def test_spans_cover_text(self):
        rng = random.Random(223)
        for _ in range(100):
            parts = [random_text(rng, rng.randint(1, 6)).capitalize() + "." for _ in range(rng.randint(1, 4))]
            text = " ".join(parts)
            spans = split_sentences(text)
            assert spans[0][0] == 0 and spans[-1][1] == len(text)
            for (_, e1), (s2, _) in zip(spans, spans[1:]):
                assert e1 == s2

    def test_no_split_without_uppercase_follow(self):
        text = "IL-6 rose to 4.5 pg per ml."
        assert split_sentences(text) == [(0, len(text))]

    def test_no_split_without_whitespace(self):
        # abstracts glued straight onto titles stay one sentence
        text = "Title.Abstract starts."
        assert split_sentences(text) == [(0, len(text))]

    def test_exclamation_and_question(self):
        text = "Does it help?! Yes. Mostly."
        spans = split_sentences(text)
        assert [text[s:e] for s, e in spans] == ["Does it help?! ", "Yes. ", "Mostly."]

    def test_empty(self):
        assert split_sentences("") == []


class TestPosTagger:
    def test_closed_class(self):
        tagger = RulePosTagger()
        assert tagger.tag_word("the") == "DT"
        assert tagger.tag_word("The") == "DT"
        assert tagger.tag_word("of") == "IN"
        assert tagger.tag_word("and") == "CC"

    def test_suffix_rules(self):
        tagger = RulePosTagger()
        assert tagger.tag_word("quickly") == "RB"
        assert tagger.tag_word("feeding") == "VBG"
        assert tagger.tag_word("improved") == "VBD"
        assert tagger.tag_word("digestion") == "NN"

    def test_digits_and_punctuation(self):
        tagger = RulePosTagger()
        assert tagger.tag_word("42") == "CD"
        assert tagger.tag_word("4.5") == "CD"
        assert tagger.tag_word(",") == ","
        assert tagger.tag_word("(") == "("

    def test_plural_and_proper(self):
        tagger = RulePosTagger()
        assert tagger.tag_word("patients") == "NNS"
        assert tagger.tag_word("Akkermansia") == "NNP"
        assert tagger.tag_word("DDF") == "NNP"
        assert tagger.tag_word("analysis") == "NN"  # -is is not a plural

    def test_deterministic(self):
        rng = random.Random(227)
        tagger = RulePosTagger()
        words = [random_text(rng, 1) for _ in range(100)]
        assert [tagger.tag_word(w) for w in words] == [tagger.tag_word(w) for w in words]

    def test_pretagged_tokens_pass_through(self):
        toks = [Token("xyzzy", 0, 5, pos="VB")]
        assert pos_tag(toks, DEFAULT_TAGGER)[0].pos == "VB"

    def test_pos_tag_fills_missing(self):
        toks = tokenize("the gut")
        tagged = pos_tag(toks, DEFAULT_TAGGER)
        assert [t.pos for t in tagged] == ["DT", "NN"]


class TestSentenceTokens:
    def test_sentences_come_back_tagged(self):
        out = sentence_tokens("Gut flora shifts. We studied mice.", DEFAULT_TAGGER)
        assert len(out) == 2
        assert all(t.pos for sent in out for t in sent)
        assert [t.text for t in out[0]] == ["Gut", "flora", "shifts", "."]

    def test_offsets_are_document_level(self):
        text = "Gut flora shifts. We studied mice."
        out = sentence_tokens(text, DEFAULT_TAGGER)
        for sent in out:
            for t in sent:
                assert text[t.start_idx : t.end_idx] == t.text

    def test_empty_text(self):
        assert sentence_tokens("", DEFAULT_TAGGER) == []
