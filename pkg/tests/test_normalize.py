import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from csrnet.errors import ConfigError, InvalidInput
from csrnet.normalize import (NormalizationConfig, build_merge_map, is_mergeable, load_wordlist,
                              normalize_corpus, relative_edit_distance, strip_digits)

from test_kernels import edit_oracle

WORDS = ["sostenibilità", "ambiente", "energia", "formazione", "responsabilità", "innovazione",
         "sustainability", "community", "diversity", "welfare"]
CFG = NormalizationConfig(wordlists=frozenset(WORDS))


def typo_corpus(seed: int, size: int = 1000) -> list[str]:
    rnd = random.Random(seed)
    letters = "abcdefghilmnoprstuvzàè"
    out = []
    for _ in range(size):
        roll = rnd.random()
        if roll < 0.1:
            out.append(str(rnd.randint(0, 99999)))
            continue
        if roll < 0.3:
            out.append("".join(rnd.choice(letters) for _ in range(rnd.randint(2, 8))))
            continue
        w = list(rnd.choice(WORDS))
        for _ in range(rnd.choice([0, 0, 1, 1, 2])):
            pos = rnd.randrange(len(w))
            op = rnd.choice("sdi")
            if op == "s":
                w[pos] = rnd.choice(letters)
            elif op == "d" and len(w) > 3:
                del w[pos]
            else:
                w.insert(pos, rnd.choice(letters))
        if rnd.random() < 0.2:
            w.append(str(rnd.randint(2015, 2021)))
        out.append("".join(w))
    return out


def test_known_merge():
    assert relative_edit_distance("sostenibilita", "sostenibilità") == pytest.approx(1 / 13)
    assert is_mergeable("sostenibilita", "sostenibilità", CFG)
    mm = build_merge_map({"sostenibilità": 10, "sostenibilita": 3, "sostenibilità2020": 2}, CFG)
    assert mm("sostenibilita") == "sostenibilità" and mm("sostenibilità2020") == "sostenibilità"
    assert mm.distances["sostenibilita"] == pytest.approx(0.0769, abs=5e-5)


def test_digit_stripping():
    assert strip_digits("pasqua2020") == "pasqua"
    assert is_mergeable("pasqua2020", "pasqua2021")
    assert not is_mergeable("pasqua2020", "pasqua2021", NormalizationConfig(enable_digit_strip=False))
    with pytest.raises(InvalidInput):
        strip_digits("")


def test_non_words_are_not_compared():
    assert not is_mergeable("ibm", "ibn", CFG)
    assert is_mergeable("energia", "energie", CFG)


def test_threshold_is_strict():
    cfg = NormalizationConfig(relative_threshold=0.2, wordlists=frozenset(["abcde"]))
    assert relative_edit_distance("abcde", "abcdx") == 0.2
    assert not is_mergeable("abcde", "abcdx", cfg)
    with pytest.raises(ConfigError):
        NormalizationConfig(relative_threshold=1.5)


def test_representative_is_most_frequent_then_smallest():
    cfg = NormalizationConfig(wordlists=frozenset(["formazione", "formazioni"]))
    mm = build_merge_map({"formazione": 2, "formazioni": 2, "formazion": 5}, cfg)
    assert set(mm.canonical.values()) == {"formazion"}
    mm = build_merge_map({"formazione": 2, "formazioni": 2}, cfg)
    assert set(mm.canonical.values()) == {"formazione"}


def test_transitive_closure():
    cfg = NormalizationConfig(wordlists=frozenset(["abcdefghij", "abcdefghzz"]))
    # each neighbour pair differs by one edit (0.1); the ends differ by two (0.2)
    mm = build_merge_map(["abcdefghij", "abcdefghiz", "abcdefghzz"], cfg)
    assert len(set(mm.canonical.values())) == 1


@pytest.mark.parametrize("seed", range(3))
def test_idempotent_on_typo_corpora(seed):
    corpus = typo_corpus(seed)
    once = normalize_corpus(corpus, CFG)
    assert normalize_corpus(once, CFG) == once
    mm = build_merge_map(corpus, CFG)
    assert all(mm(mm(h)) == mm(h) for h in corpus)


@pytest.mark.parametrize("seed", range(3))
def test_digits_never_merge_with_letters(seed):
    corpus = typo_corpus(seed) + ["2020", "covid19", "19"]
    mm = build_merge_map(corpus, CFG)
    for raw, can in mm.canonical.items():
        if raw.isdigit() or can.isdigit():
            assert raw == can


@given(st.lists(st.sampled_from(WORDS + ["energie", "ambient", "welfar", "xyz", "ab1"]), min_size=1))
def test_merges_respect_the_rule(tags):
    mm = build_merge_map(tags, CFG)
    for raw, can, d in mm.merges():
        a, b = strip_digits(raw), strip_digits(can)
        assert d == pytest.approx(edit_oracle(a, b) / max(len(a), len(b)))
    for rep, members in mm.clusters.items():
        assert all(mm(m) == rep for m in members)


def test_wordlist_loading(tmp_path):
    p = tmp_path / "w.txt"
    p.write_text("# comment\nEnergia\n\nclima\n", encoding="utf-8")
    assert load_wordlist(p) == {"energia", "clima"}
