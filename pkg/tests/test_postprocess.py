import random

import pytest

from bionerkit import (
    AnnotatedDocument,
    CoordinateSpace,
    Document,
    EntityLabel,
    EntityMention,
    Location,
    combine_text,
    validate_document,
)
from bionerkit.io import CorpusFile, Provenance
from bionerkit.postprocess import (
    Lexicon,
    LexiconSet,
    MergeConfig,
    PipelineConfigError,
    ProvenanceError,
    ReplayError,
    RulePipeline,
    TraceEntry,
    default_lexicon_set,
    is_trivial,
    lexicon_correct,
    merge_adjacent_mentions,
    parse_trace,
    replay_trace,
    run_pipeline,
    strip_scores,
    write_trace,
)

from conftest import as_combined, random_pipeline_corpus

CHEM = EntityLabel.CHEMICAL
GENE = EntityLabel.GENE
BACT = EntityLabel.BACTERIA
SUPP = EntityLabel.DIETARY_SUPPLEMENT
FOOD = EntityLabel.FOOD
DRUG = EntityLabel.DRUG


def scored(start, end, text, label, location=Location.TITLE, score=0.5):
    return EntityMention(start, end, text, label, location, score)


def one_doc_corpus(title, abstract, mentions, provenance=Provenance.PREDICTION):
    doc = AnnotatedDocument(Document("d1", title, abstract), mentions, CoordinateSpace.PER_FIELD)
    return CorpusFile({"d1": doc}, provenance, CoordinateSpace.PER_FIELD, " ")


class TestTrivialRemoval:
    @pytest.mark.parametrize(
        "text,label,expected",
        [
            ("bacteria", BACT, True),
            ("Bacteria", BACT, True),
            ("Dietary Supplement", SUPP, True),
            ("dietary_supplement", SUPP, True),
            ("gut bacteria", BACT, False),
            ("bacteria", GENE, False),
            ("DDF", EntityLabel.DDF, True),
            ("ddf", EntityLabel.DDF, True),
        ],
    )
    def test_is_trivial(self, text, label, expected):
        m = EntityMention(0, len(text), text, label, Location.TITLE)
        assert is_trivial(m) is expected


class TestLexicons:
    def test_default_routing(self):
        lexicons = default_lexicon_set()
        cases = [
            ("IL-6", CHEM, GENE),
            ("TNF-α", CHEM, GENE),
            ("DJ-1", GENE, CHEM),
            ("NNSs", SUPP, FOOD),
            ("NS9", FOOD, SUPP),
            ("NS9", DRUG, SUPP),
        ]
        for text, source, target in cases:
            m = EntityMention(0, len(text), text, source, Location.TITLE)
            assert lexicons.correct(m).label is target, text

    def test_match_is_whole_span_and_case_folded(self):
        lexicons = default_lexicon_set()
        assert lexicons.correct(EntityMention(0, 4, "il-6", CHEM, Location.TITLE)).label is GENE
        # substring hits must not fire
        untouched = EntityMention(0, 9, "IL-6 rose", CHEM, Location.TITLE)
        assert lexicons.correct(untouched) == untouched

    def test_source_label_gates_correction(self):
        lexicons = default_lexicon_set()
        # "IL-6" is in the gene list, but only chemical-labeled spans are routed
        for label in (FOOD, GENE):
            m = EntityMention(0, 4, "IL-6", label, Location.TITLE)
            assert lexicons.correct(m) == m

    def test_no_match_identity(self):
        lexicons = default_lexicon_set()
        m = EntityMention(0, 7, "aspirin", CHEM, Location.TITLE)
        assert lexicons.correct(m) == m

    def test_target_in_sources_rejected(self):
        with pytest.raises(PipelineConfigError, match="target"):
            Lexicon("x", frozenset({"il-6"}), GENE, frozenset({GENE}))

    def test_terms_must_be_lowercase(self):
        with pytest.raises(PipelineConfigError, match="bad term"):
            Lexicon("x", frozenset({"IL-6"}), GENE, frozenset({CHEM}))

    def test_ambiguous_routing_rejected(self):
        a = Lexicon("a", frozenset({"zzz"}), GENE, frozenset({CHEM}))
        b = Lexicon("b", frozenset({"zzz"}), FOOD, frozenset({CHEM}))
        with pytest.raises(ValueError, match="zzz"):
            LexiconSet((a, b))

    def test_label_name_term_warns(self, caplog):
        lex = Lexicon("x", frozenset({"bacteria"}), GENE, frozenset({CHEM}))
        with caplog.at_level("WARNING", logger="bionerkit.postprocess"):
            LexiconSet((lex,))
        assert any("bacteria" in r.message for r in caplog.records)

    def test_lexicon_correct_traced_and_score_preserving(self):
        corpus = one_doc_corpus("IL-6 and more.", "", [scored(0, 4, "IL-6", CHEM)])
        result = run_pipeline(corpus, RulePipeline(rules=("lexicon_correct",)))
        (m,) = result.corpus.documents["d1"].mentions
        assert m.label is GENE
        assert m.score == 0.5  # scores survive correction; stripping is its own rule
        (entry,) = result.trace
        assert entry.action == "relabel"
        assert (entry.before_label, entry.after_label) == ("chemical", "gene")

    def test_per_mention_helper(self):
        m = scored(0, 4, "IL-6", CHEM)
        assert lexicon_correct(m, default_lexicon_set()).label is GENE


class TestStripScores:
    def test_mixed_scores_all_removed(self):
        doc = AnnotatedDocument(
            Document("d1", "IL-6 and DJ-1.", ""),
            [scored(0, 4, "IL-6", GENE), EntityMention(9, 13, "DJ-1", CHEM, Location.TITLE)],
            CoordinateSpace.PER_FIELD,
        )
        out = strip_scores(doc)
        assert all(m.score is None for m in out.mentions)
        assert [m.text_span for m in out.mentions] == ["IL-6", "DJ-1"]

    def test_unscored_document_unchanged(self):
        doc = AnnotatedDocument(
            Document("d1", "IL-6.", ""),
            [EntityMention(0, 4, "IL-6", GENE, Location.TITLE)],
            CoordinateSpace.PER_FIELD,
        )
        assert strip_scores(doc) == doc


class TestMergeAdjacent:
    def combined_doc(self, title, abstract, spans):
        doc = Document("d1", title, abstract)
        combined, _, _ = combine_text(doc, " ")
        mentions = [
            scored(s, e, combined[s:e], label, Location.TITLE if s < len(title) else Location.ABSTRACT)
            for (s, e, label) in spans
        ]
        _, title_len, joiner_len = combine_text(doc, " ")
        annotated = AnnotatedDocument(doc, mentions, CoordinateSpace.COMBINED)
        return annotated, combined

    def test_space_gap_merges(self):
        doc, combined = self.combined_doc(
            "dopamine transporter levels.", "", [(0, 8, CHEM), (9, 20, CHEM)]
        )
        out, entries = merge_adjacent_mentions(doc, MergeConfig(), " ")
        assert len(out.mentions) == 1
        m = out.mentions[0]
        assert (m.start_idx, m.end_idx) == (0, 20)
        assert m.text_span == combined[0:20] == "dopamine transporter"
        assert m.score is None  # merged spans have no single source score
        assert len(entries) == 1 and entries[0].action == "merge"

    def test_hyphen_gap_merges(self):
        doc, combined = self.combined_doc("low-carb diet.", "", [(0, 3, FOOD), (4, 8, FOOD)])
        out, _ = merge_adjacent_mentions(doc, MergeConfig(), " ")
        assert [m.text_span for m in out.mentions] == ["low-carb"]

    def test_connector_token_merges(self):
        doc, combined = self.combined_doc(
            "diet of patients today.", "", [(0, 4, FOOD), (8, 16, FOOD)]
        )
        out, _ = merge_adjacent_mentions(doc, MergeConfig(), " ")
        assert [m.text_span for m in out.mentions] == ["diet of patients"]

    def test_different_labels_do_not_merge(self):
        doc, _ = self.combined_doc(
            "dopamine transporter levels.", "", [(0, 8, CHEM), (9, 20, GENE)]
        )
        out, entries = merge_adjacent_mentions(doc, MergeConfig(), " ")
        assert len(out.mentions) == 2 and not entries

    def test_verb_gap_does_not_merge(self):
        doc, _ = self.combined_doc(
            "bacteria raise cytokines.", "", [(0, 8, BACT), (15, 24, BACT)]
        )
        out, entries = merge_adjacent_mentions(doc, MergeConfig(), " ")
        assert len(out.mentions) == 2 and not entries

    def test_two_word_gap_does_not_merge(self):
        doc, _ = self.combined_doc(
            "diet of the patients.", "", [(0, 4, FOOD), (12, 20, FOOD)]
        )
        out, _ = merge_adjacent_mentions(doc, MergeConfig(), " ")
        assert len(out.mentions) == 2

    def test_chain_merges_to_fixpoint(self):
        doc, combined = self.combined_doc(
            "gut and liver and brain axis.", "", [(0, 3, EntityLabel.ANATOMICAL_LOCATION), (8, 13, EntityLabel.ANATOMICAL_LOCATION), (18, 23, EntityLabel.ANATOMICAL_LOCATION)]
        )
        out, entries = merge_adjacent_mentions(doc, MergeConfig(), " ")
        assert [m.text_span for m in out.mentions] == ["gut and liver and brain"]
        assert len(entries) == 2  # two pairwise merges

    def test_title_abstract_boundary_never_merges(self):
        # "diet" at the end of the title, "pasta" at the start of the
        # abstract: adjacent in combined text but not localizable.
        doc, combined = self.combined_doc("We study diet.", "Pasta was eaten.", [])
        title_end = combined.index("diet")
        mentions = [
            scored(title_end, title_end + 5, combined[title_end : title_end + 5], FOOD, Location.TITLE),
            scored(15, 20, combined[15:20], FOOD, Location.ABSTRACT),
        ]
        assert combined[15:20] == "Pasta"
        doc = AnnotatedDocument(doc.document, mentions, CoordinateSpace.COMBINED)
        out, entries = merge_adjacent_mentions(doc, MergeConfig(), " ")
        assert len(out.mentions) == 2 and not entries

    def test_custom_connector_set(self):
        doc, _ = self.combined_doc(
            "diet of patients today.", "", [(0, 4, FOOD), (8, 16, FOOD)]
        )
        config = MergeConfig(connector_pos=("CC",))  # drop IN from the set
        out, _ = merge_adjacent_mentions(doc, config, " ")
        assert len(out.mentions) == 2


class TestRunPipeline:
    def test_paper_rule_walkthrough(self):
        corpus = one_doc_corpus(
            "Gut bacteria and IL-6.",
            "",
            [scored(4, 12, "bacteria", BACT), scored(17, 21, "IL-6", CHEM)],
        )
        result = run_pipeline(corpus, RulePipeline.default())
        mentions = result.corpus.documents["d1"].mentions
        assert [(m.text_span, m.label) for m in mentions] == [("IL-6", GENE)]
        assert [e.action for e in result.trace] == ["drop", "relabel"]

    def test_gold_corpus_refused(self):
        corpus = one_doc_corpus("IL-6.", "", [], provenance=Provenance.GOLD)
        with pytest.raises(ProvenanceError):
            run_pipeline(corpus, RulePipeline.default())

    def test_empty_pipeline_is_identity(self):
        rng = random.Random(151)
        corpus = random_pipeline_corpus(rng)
        pipeline = RulePipeline(rules=())
        result = run_pipeline(corpus, pipeline)
        assert result.corpus == corpus
        assert result.trace == ()

    def test_output_is_per_field_scoreless_and_valid(self):
        rng = random.Random(157)
        for _ in range(20):
            corpus = random_pipeline_corpus(rng)
            result = run_pipeline(corpus, RulePipeline.default())
            out = result.corpus
            assert out.coordinate_space is CoordinateSpace.PER_FIELD
            for doc in out.documents.values():
                assert validate_document(doc, out.joiner) == []
                assert all(m.score is None for m in doc.mentions)

    def test_idempotence(self):
        rng = random.Random(163)
        for enable_merge in (False, True):
            pipeline = RulePipeline.default(enable_merge=enable_merge)
            for _ in range(30):
                corpus = random_pipeline_corpus(rng)
                once = run_pipeline(corpus, pipeline)
                twice = run_pipeline(once.corpus, pipeline)
                assert twice.corpus == once.corpus
                assert twice.trace == ()

    def test_count_monotonicity_and_label_closure(self):
        rng = random.Random(167)
        for _ in range(30):
            corpus = random_pipeline_corpus(rng)
            result = run_pipeline(corpus, RulePipeline.default(enable_merge=True))
            assert result.corpus.mention_count() <= corpus.mention_count()
            for doc in result.corpus.documents.values():
                for m in doc.mentions:
                    assert isinstance(m.label, EntityLabel)

    def test_lexicon_correct_preserves_counts(self):
        rng = random.Random(173)
        pipeline = RulePipeline(rules=("lexicon_correct",))
        for _ in range(20):
            corpus = random_pipeline_corpus(rng)
            result = run_pipeline(corpus, pipeline)
            assert result.corpus.mention_count() == corpus.mention_count()

    def test_span_conservation_without_merge(self):
        # Surviving mentions keep their offsets and text verbatim.
        rng = random.Random(179)
        for _ in range(20):
            corpus = random_pipeline_corpus(rng)
            result = run_pipeline(corpus, RulePipeline.default())
            for doc_id, out_doc in result.corpus.documents.items():
                before = {
                    (m.location, m.start_idx, m.end_idx, m.text_span)
                    for m in corpus.documents[doc_id].mentions
                }
                for m in out_doc.mentions:
                    assert (m.location, m.start_idx, m.end_idx, m.text_span) in before

    def test_accepts_combined_input(self):
        rng = random.Random(181)
        corpus = random_pipeline_corpus(rng)
        per_field = run_pipeline(corpus, RulePipeline.default())
        combined = run_pipeline(as_combined(corpus), RulePipeline.default())
        assert per_field.corpus == combined.corpus

    def test_joiner_disagreement_rejected(self):
        rng = random.Random(191)
        corpus = random_pipeline_corpus(rng)  # joiner " "
        pipeline = RulePipeline(joiner="||")
        with pytest.raises(PipelineConfigError, match="joiner"):
            run_pipeline(corpus, pipeline)


class TestTraceReplay:
    def test_replay_reproduces_output(self):
        rng = random.Random(193)
        for enable_merge in (False, True):
            pipeline = RulePipeline.default(enable_merge=enable_merge)
            for _ in range(30):
                corpus = random_pipeline_corpus(rng)
                result = run_pipeline(corpus, pipeline)
                replayed = replay_trace(corpus, result.trace, pipeline)
                assert replayed == result.corpus

    def test_trace_round_trips_through_jsonl(self):
        rng = random.Random(197)
        corpus = random_pipeline_corpus(rng)
        pipeline = RulePipeline.default(enable_merge=True)
        result = run_pipeline(corpus, pipeline)
        again = parse_trace(write_trace(result.trace))
        assert again == result.trace
        assert replay_trace(corpus, again, pipeline) == result.corpus

    def test_unchanged_corpus_has_empty_trace(self):
        corpus = one_doc_corpus(
            "Aspirin study.", "", [EntityMention(0, 7, "Aspirin", DRUG, Location.TITLE)]
        )
        result = run_pipeline(corpus, RulePipeline.default())
        assert result.trace == ()

    def test_replay_rejects_stale_trace(self):
        corpus = one_doc_corpus("Aspirin study.", "", [])
        entry = TraceEntry(
            doc_id="d1",
            rule="remove_trivial",
            action="drop",
            tag="t",
            start_idx=0,
            end_idx=7,
            text_span="Aspirin",
            before_label="drug",
        )
        with pytest.raises(ReplayError):
            replay_trace(corpus, (entry,), RulePipeline.default())


class TestPipelineConfig:
    def test_unknown_rule_rejected(self):
        with pytest.raises(PipelineConfigError, match="nonsense"):
            RulePipeline.from_config({"rules": ["nonsense"]}, base_dir=".")

    def test_default_matches_explicit_config(self):
        assert RulePipeline.from_config({}, base_dir=".") == RulePipeline.default()
        with_merge = RulePipeline.from_config({}, base_dir=".", enable_merge=True)
        assert "merge_adjacent" in with_merge.rules

    def test_custom_lexicon_file(self, tmp_path):
        path = tmp_path / "mygenes.txt"
        path.write_text("weirdgene\n", encoding="utf-8")
        config = {
            "rules": ["lexicon_correct"],
            "lexicons": [
                {
                    "path": "mygenes.txt",
                    "target_label": "gene",
                    "source_labels": ["chemical"],
                }
            ],
        }
        pipeline = RulePipeline.from_config(config, base_dir=tmp_path)
        corpus = one_doc_corpus("weirdgene found.", "", [scored(0, 9, "weirdgene", CHEM)])
        result = run_pipeline(corpus, pipeline)
        assert result.corpus.documents["d1"].mentions[0].label is GENE

    def test_missing_lexicon_path_is_config_error(self):
        config = {
            "rules": ["lexicon_correct"],
            "lexicons": [
                {"path": "no/such/file.txt", "target_label": "gene", "source_labels": ["chemical"]}
            ],
        }
        with pytest.raises(PipelineConfigError, match="file.txt"):
            RulePipeline.from_config(config, base_dir=".")

    def test_merge_config_from_dict(self):
        config = {"merge": {"connector_pos": ["CC"]}}
        pipeline = RulePipeline.from_config(config, base_dir=".", enable_merge=True)
        assert pipeline.merge.connector_pos == ("CC",)
