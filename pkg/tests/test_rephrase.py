import pytest
from hypothesis import given, strategies as st

from synloc.rephrase import (
    RephraseRecord,
    answers_equal,
    build_prompt,
    extract_answer,
    load_default_exemplars,
    load_prompt_template,
)

INC = "Counting on from 7, Ben reached 12. How many steps did he take?"
MATCH = "Ben starts at 7 and counts to 12. How many steps does he take?"


def test_build_prompt_zero_shot():
    prompt = build_prompt(INC, MATCH, [])
    assert INC in prompt
    assert MATCH in prompt
    assert "Example" not in prompt
    assert "Rewritten problem:" in prompt
    assert prompt.index(MATCH) < prompt.index(INC)


def test_build_prompt_k2_keeps_exemplar_order():
    exemplars = [("before one", "after one"), ("before two", "after two")]
    prompt = build_prompt(INC, MATCH, exemplars)
    assert "Example 1:" in prompt and "Example 2:" in prompt
    assert prompt.index("before one") < prompt.index("before two")
    assert prompt.index("Example 2:") < prompt.index(MATCH)


def test_build_prompt_deterministic():
    exemplars = load_default_exemplars()
    assert build_prompt(INC, MATCH, exemplars) == build_prompt(INC, MATCH, exemplars)


def test_build_prompt_length_grows_with_k():
    exemplars = load_default_exemplars()
    lengths = [len(build_prompt(INC, MATCH, exemplars[:k])) for k in range(4)]
    assert lengths == sorted(lengths)
    assert lengths[0] < lengths[3]


def test_build_prompt_rejects_empty_inputs():
    with pytest.raises(ValueError):
        build_prompt("", MATCH)
    with pytest.raises(ValueError):
        build_prompt(INC, "")


def test_template_asset_is_versioned():
    template = load_prompt_template()
    for placeholder in ("<<EXEMPLARS>>", "<<TARGET>>", "<<SOURCE>>"):
        assert placeholder in template
    assert len(load_default_exemplars()) == 3


def test_extract_answer_marker():
    assert extract_answer("so the answer is #### 42") == 42
    assert extract_answer("#### 1,319 end") == 1319
    assert extract_answer("#### -7.5") == -7.5


def test_extract_answer_last_marker_wins():
    assert extract_answer("#### 10 no wait #### 12") == 12


def test_extract_answer_marker_beats_later_numerals():
    assert extract_answer("#### 42 with 99 trailing mentions") == 42


def test_extract_answer_last_numeral_fallback():
    assert extract_answer("She pays 3 dollars then 4.50 total") == 4.50
    assert extract_answer("first 10 then 20 then 30") == 30
    assert extract_answer("about 1,234 items") == 1234


def test_extract_answer_absent():
    assert extract_answer("no numbers here") is None
    assert extract_answer("") is None


@given(st.text(max_size=300))
def test_extract_answer_total(text):
    result = extract_answer(text)
    assert result is None or isinstance(result, float)


def test_answers_equal_integers_exact():
    assert answers_equal(42, 42)
    assert answers_equal(42.0, 42)
    assert not answers_equal(42, 43)
    assert not answers_equal(10**9, 10**9 + 1)


def test_answers_equal_relative_tolerance():
    assert answers_equal(0.33333, 1 / 3)
    assert not answers_equal(0.3, 1 / 3)
    assert answers_equal(10000.5, 10001.0)  # 0.5 <= 1e-4 * 10001


def test_rephrase_record_requires_text():
    with pytest.raises(ValueError):
        RephraseRecord("a", "b", "prompt", "")
    RephraseRecord("a", "b", "prompt", "ok")
