import numpy as np
import pytest

from semboost.textembed import (
    EMBED_DIM,
    MAX_WORDS,
    PrecomputedTextEmbedder,
    ToyTextEmbedder,
    get_embedder,
    null_condition,
    tokenize,
)


@pytest.fixture(scope="module")
def embedder():
    return ToyTextEmbedder()


def test_embedding_is_deterministic(embedder):
    a = embedder.embed("a person walks")
    b = embedder.embed("a person walks")
    assert np.array_equal(a.sentence, b.sentence)
    assert np.array_equal(a.words, b.words)
    assert np.array_equal(a.mask, b.mask)
    # and across independently constructed embedders
    c = ToyTextEmbedder().embed("a person walks")
    assert np.array_equal(a.sentence, c.sentence)


def test_padding_contract(embedder):
    cond = embedder.embed("one two three four five")
    assert cond.mask.sum() == 5
    assert np.all(cond.words[5:] == 0.0)
    assert cond.words.shape == (MAX_WORDS, EMBED_DIM)
    assert not cond.is_null


def test_single_token_sentence_equals_word_vector(embedder):
    cond = embedder.embed("walks")
    np.testing.assert_allclose(cond.sentence, cond.words[0], atol=1e-12)


def test_different_captions_differ(embedder):
    a = embedder.embed("a person walks east")
    b = embedder.embed("a person walks west")
    cos = float(a.sentence @ b.sentence)
    assert cos < 1.0 - 1e-6


def test_truncation_to_75_tokens(embedder):
    text = " ".join(f"w{i}" for i in range(120))
    cond = embedder.embed(text)
    assert cond.mask.sum() == MAX_WORDS - 2


def test_empty_text_rejected(embedder):
    with pytest.raises(ValueError):
        embedder.embed("")
    with pytest.raises(ValueError):
        embedder.embed("   ")
    with pytest.raises(ValueError):
        embedder.embed("!!!")


def test_tokenizer_binds_hyphens():
    assert tokenize("The head points up-left!") == ["the", "head", "points", "up-left"]


def test_null_condition():
    null = null_condition()
    assert null.is_null
    assert not null.mask.any()
    assert np.all(null.sentence == 0.0)
    assert np.all(null.words == 0.0)


def test_sentence_is_unit_norm(embedder):
    cond = embedder.embed("a person walks and waves")
    assert abs(np.linalg.norm(cond.sentence) - 1.0) < 1e-12


def test_precomputed_roundtrip(tmp_path, embedder):
    cond = embedder.embed("a person walks east")
    pre = PrecomputedTextEmbedder(tmp_path)
    pre.save_id("item0", cond)
    back = pre.embed_id("item0")
    np.testing.assert_allclose(back.sentence, cond.sentence, atol=1e-6)
    np.testing.assert_allclose(back.words, cond.words, atol=1e-6)
    assert np.array_equal(back.mask, cond.mask)


def test_embedder_registry(tmp_path):
    assert isinstance(get_embedder("toy"), ToyTextEmbedder)
    assert isinstance(get_embedder("precomputed", tmp_path), PrecomputedTextEmbedder)
    with pytest.raises(ValueError):
        get_embedder("clip")
    with pytest.raises(ValueError):
        get_embedder("precomputed")
