from bionerkit.crf.features import sentence_features, token_features
from bionerkit.crf.text import DEFAULT_TAGGER, pos_tag, tokenize


def tagged(text):
    return pos_tag(tokenize(text), DEFAULT_TAGGER)


class TestTokenFeatures:
    def test_core_template(self):
        toks = tagged("The IL-6 rose")
        feats = token_features(toks, 1)
        assert "w.lower=il-6" in feats
        assert "w[-2:]=-6" in feats
        assert "w[-3:]=L-6" in feats
        assert "w.istitle=False" in feats
        assert "w.isdigit=False" in feats
        assert f"pos={toks[1].pos}" in feats
        assert f"pos[:2]={toks[1].pos[:2]}" in feats

    def test_isupper_requires_all_alpha(self):
        # "IL-6" contains a hyphen and a digit; it must not count as
        # uppercase even though str.isupper() says True.
        feats = token_features(tagged("IL-6"), 0)
        assert "w.isupper=False" in feats
        feats = token_features(tagged("DDF"), 0)
        assert "w.isupper=True" in feats

    def test_bos_and_eos(self):
        toks = tagged("mice")
        feats = token_features(toks, 0)
        assert "BOS" in feats and "EOS" in feats

    def test_neighbor_features(self):
        toks = tagged("The gut improved")
        feats = token_features(toks, 1)
        assert "BOS" not in feats and "EOS" not in feats
        assert "-1:w.lower=the" in feats
        assert "+1:w.lower=improved" in feats
        assert "-1:pos=DT" in feats
        assert "+1:pos[:2]=VB" in feats

    def test_neighbor_flags(self):
        toks = tagged("DDF The gut")
        feats = token_features(toks, 1)
        assert "-1:w.isupper=True" in feats
        assert "+1:w.istitle=False" in feats

    def test_short_words(self):
        feats = token_features(tagged("a"), 0)
        assert "w[-2:]=a" in feats
        assert "w[-3:]=a" in feats

    def test_deterministic_order(self):
        toks = tagged("The gut improved")
        assert token_features(toks, 1) == token_features(toks, 1)


class TestSentenceFeatures:
    def test_one_list_per_token(self):
        toks = tagged("Gut flora shifts.")
        out = sentence_features(toks)
        assert len(out) == len(toks)
        assert out[0] == token_features(toks, 0)

    def test_empty_sentence(self):
        assert sentence_features([]) == []
