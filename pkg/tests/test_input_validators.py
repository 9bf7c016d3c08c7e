import pytest
from pathlib import Path
from app.distributivity import Construction
from app.exceptions import ParseError, ValidationError
from app.input_validators import InputValidator
from app.omega import UPWord
from app.trace_config import TraceConfig
from tests.conftest import CORPUS_DIR, corpus_path

# Configuration pointing at the bundled corpus
config = TraceConfig(base_dir=CORPUS_DIR.parent, list_cap=3, seed=11)

# Test cases for InputValidator.validate_natural

def test_validate_natural_integer():
    assert InputValidator.validate_natural(4, "depth") == 4

def test_validate_natural_trimmed_string():
    assert InputValidator.validate_natural("  7  ", "depth") == 7

def test_validate_natural_zero():
    assert InputValidator.validate_natural(0, "depth") == 0

def test_validate_natural_default():
    assert InputValidator.validate_natural(None, "depth", 5) == 5

def test_validate_natural_required():
    with pytest.raises(ValidationError, match="--depth is required"):
        InputValidator.validate_natural(None, "depth")

def test_validate_natural_negative():
    with pytest.raises(ValidationError, match="--depth must be non-negative, got -1"):
        InputValidator.validate_natural(-1, "depth")

@pytest.mark.parametrize("value", ["abc", "1.5", True, 2.5, [1]])
def test_validate_natural_invalid(value):
    with pytest.raises(ValidationError, match="Invalid --depth"):
        InputValidator.validate_natural(value, "depth")

# Test cases for configuration defaults

def test_validate_list_cap_uses_config():
    assert InputValidator.validate_list_cap(None, config) == 3
    assert InputValidator.validate_list_cap("1", config) == 1

def test_validate_list_cap_error_names_flag():
    with pytest.raises(ValidationError, match="--list-cap"):
        InputValidator.validate_list_cap(-2, config)

def test_validate_seed_uses_config():
    assert InputValidator.validate_seed(None, config) == 11

def test_validate_depth():
    assert InputValidator.validate_depth(None, 3) == 3

# Test cases for InputValidator.validate_format

@pytest.mark.parametrize("value, expected", [(None, "plain"), ("JSON", "json"), (" plain ", "plain")])
def test_validate_format(value, expected):
    assert InputValidator.validate_format(value) == expected

def test_validate_format_unknown():
    with pytest.raises(ValidationError, match="Unknown output format: xml"):
        InputValidator.validate_format("xml")

# Test cases for InputValidator.validate_system_path

def test_validate_system_path_existing_file():
    path = corpus_path("classic")
    assert InputValidator.validate_system_path(str(path), config) == path

def test_validate_system_path_corpus_name():
    assert InputValidator.validate_system_path("running-nd", config) == config.corpus_file("running-nd")

def test_validate_system_path_missing():
    with pytest.raises(ValidationError, match="System file not found: nowhere.sys"):
        InputValidator.validate_system_path("nowhere.sys", config)

def test_validate_system_path_required():
    with pytest.raises(ValidationError, match="required"):
        InputValidator.validate_system_path(None, config)

# Test cases for InputValidator.validate_law

def test_validate_law_default(running_nd):
    assert InputValidator.validate_law(None, running_nd) is None

def test_validate_law_canonical(running_prob):
    law = InputValidator.validate_law("canonical", running_prob)
    assert law.construction is Construction.CANONICAL
    assert law.functor == running_prob.functor

def test_validate_law_rel_lifting(peano):
    assert InputValidator.validate_law("Rel-Lifting", peano).construction is Construction.REL_LIFTING

def test_validate_law_rel_lifting_needs_powerset(lift_trio):
    with pytest.raises(ValidationError, match="needs a powerset system"):
        InputValidator.validate_law("rel-lifting", lift_trio)

def test_validate_law_unknown(running_nd):
    with pytest.raises(ValidationError, match="Unknown law: greedy"):
        InputValidator.validate_law("greedy", running_nd)

# Test cases for InputValidator.validate_word

def test_validate_word():
    assert InputValidator.validate_word("a.b") == ("a", "b")
    assert InputValidator.validate_word("a.(b)^w") == UPWord(("a",), ("b",))

def test_validate_word_required():
    with pytest.raises(ValidationError, match="--word is required"):
        InputValidator.validate_word(None)

def test_validate_word_malformed():
    with pytest.raises(ParseError):
        InputValidator.validate_word("a.(b")

def test_corpus_dir_matches_fixture_paths():
    assert config.corpus_dir == Path(CORPUS_DIR).resolve()
