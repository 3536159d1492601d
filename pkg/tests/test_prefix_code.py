import math
import random

import pytest

from sparsecover.prefix_code import (
    PrefixCode,
    build_code,
    code_length_bound,
    first_disagreement,
    padded_word,
)

from oracles import naive_first_disagreement


def is_prefix_free(words):
    ws = list(words.values())
    for i, a in enumerate(ws):
        for j, b in enumerate(ws):
            if i != j and len(a) <= len(b) and b[: len(a)] == a:
                return False
    return True


def test_uniform_four_elements_get_length_two():
    code = build_code({"a": 1, "b": 1, "c": 1, "d": 1})
    assert all(len(w) == 2 for w in code.words.values())
    assert code_length_bound(4, 1) == 4  # bound is slack here


def test_weighted_example_heavy_element_short_word():
    code = build_code({0: 8, 1: 4, 2: 2, 3: 1, 4: 1})
    # mu(X)/mu(0) = 2, so the bound allows 2 symbols
    assert len(code.words[0]) <= 2


def test_single_element_empty_word():
    code = build_code({"only": 5.0})
    assert code.words["only"] == ()


def test_alphabet_is_plus_minus_one():
    code = build_code({i: i + 1 for i in range(7)})
    for w in code.words.values():
        assert all(s in (1, -1) for s in w)


@pytest.mark.parametrize("seed", range(30))
def test_random_codes_prefix_free_and_within_bound(seed):
    rng = random.Random(seed)
    k = rng.randrange(2, 65)
    weights = {i: rng.choice([rng.randrange(1, 100), rng.uniform(0.01, 50.0)]) for i in range(k)}
    code = build_code(weights)
    assert is_prefix_free(code.words)
    total = sum(weights.values())
    for x, w in weights.items():
        assert len(code.words[x]) <= code_length_bound(total, w)


def test_deterministic_across_runs():
    weights = {i: (i % 5) + 1 for i in range(20)}
    assert build_code(weights).words == build_code(weights).words


def test_first_disagreement_documented_example():
    code = PrefixCode(words={"x": (1, 1), "y": (1, -1)}, mu={"x": 1, "y": 1})
    assert first_disagreement(code, "x", "y") == (2, 1, -1)


@pytest.mark.parametrize("seed", range(10))
def test_first_disagreement_matches_naive_scan(seed):
    rng = random.Random(seed)
    weights = {i: rng.randrange(1, 20) for i in range(rng.randrange(2, 30))}
    code = build_code(weights)
    keys = list(weights)
    for _ in range(20):
        x, y = rng.sample(keys, 2)
        expected = naive_first_disagreement(code.words[x], code.words[y])
        assert expected is not None  # prefix-free distinct words must split
        assert first_disagreement(code, x, y) == expected


def test_padded_word_pads_with_plus_one():
    code = build_code({"a": 3, "b": 1, "c": 1})
    w = code.words["a"]
    padded = padded_word(code, "a", len(w) + 3)
    assert padded[: len(w)] == w
    assert padded[len(w):] == (1, 1, 1)
    with pytest.raises(ValueError):
        padded_word(code, "a", len(w) - 1)


def test_code_length_bound_exact_powers():
    assert code_length_bound(8, 1) == 6
    assert code_length_bound(8, 2) == 4
    assert code_length_bound(8, 8) == 0
    assert code_length_bound(9, 1) == 8  # just past a power of two


def test_rejects_bad_weights():
    with pytest.raises(ValueError):
        build_code({})
    with pytest.raises(ValueError):
        build_code({"a": 0})
