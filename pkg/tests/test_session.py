import pandas as pd
import pytest
from pathlib import Path
from tempfile import TemporaryDirectory
from unittest.mock import Mock, patch
from app.command_result import CommandResult
from app.commands import CommandFactory
from app.exceptions import OperationError
from app.session import HISTORY_COLUMNS, TraceSession, render_arguments
from app.trace_config import TraceConfig
from tests.conftest import corpus_path


def trace_flags(**overrides):
    flags = {'system': str(corpus_path("running-nd")), 'state': ['x'], 'depth': 3}
    flags.update(overrides)
    return flags

# Test cases for render_arguments

def test_render_arguments():
    flags = {'depth': 3, 'exact': False, 'state': ['x', 'y'], 'law': None, 'testing': True}
    assert render_arguments(flags) == "depth=3 state=x,y testing"

def test_render_arguments_empty():
    assert render_arguments({}) == ""

# Test cases for session setup

def test_session_initialization(session):
    assert session.history == []
    assert session.observers == []
    assert session.config.log_dir.exists()

def test_session_writes_log_file(session):
    session.run("trace", trace_flags())
    assert session.config.log_file.exists()

# Test cases for running subcommands

def test_run_trace(session):
    result = session.run("trace", trace_flags())
    assert result.succeeded
    assert result.lines == ["x: {a, a.b}"]
    assert result.payload['traces'] == {'x': ['a', 'a.b']}

def test_run_records_arguments(session):
    result = session.run("trace", trace_flags())
    assert result.arguments == f"depth=3 state=x system={corpus_path('running-nd')}"

def test_run_unknown_state_is_usage_error(session):
    result = session.run("trace", trace_flags(state=['q']))
    assert result.status == 2
    assert result.error == "Unknown state: q"
    assert result.lines == []

def test_run_unknown_subcommand(session):
    result = session.run("frobnicate", {})
    assert result.status == 2
    assert result.error == "Unknown subcommand: frobnicate"

def test_run_unreadable_system(session):
    result = session.run("bisim", {'system': "no-such-system"})
    assert result.status == 2
    assert "System file not found" in result.error

def test_run_unsupported_system(session):
    result = session.run("tests", {'system': str(corpus_path("running-prob"))})
    assert result.status == 2
    assert "powerset" in result.error

def test_run_unexpected_failure(session):
    with patch.object(CommandFactory, 'create_command', side_effect=RuntimeError("boom")):
        with pytest.raises(OperationError, match="Command failed: boom"):
            session.run("trace", trace_flags())

# Test cases for observers

def test_observers_are_notified(session):
    observer = Mock()
    session.add_observer(observer)
    result = session.run("trace", trace_flags())
    observer.update.assert_called_once_with(result)

# Test cases for history management

def test_history_is_bounded():
    with TemporaryDirectory() as temp_dir:
        session = TraceSession(TraceConfig(base_dir=Path(temp_dir), max_history_size=2))
        for depth in range(3):
            session.run("trace", trace_flags(depth=depth))
        assert len(session.history) == 2
        assert session.history[0].arguments.startswith("depth=1")

def test_show_history(session):
    session.run("trace", trace_flags())
    assert session.show_history() == [f"trace depth=3 state=x system={corpus_path('running-nd')} -> status 0"]

def test_history_dataframe(session):
    session.run("trace", trace_flags())
    df = session.get_history_dataframe()
    assert list(df.columns) == HISTORY_COLUMNS
    assert df.loc[0, 'output'] == "x: {a, a.b}"

def test_save_and_load_history(session):
    session.run("trace", trace_flags())
    session.run("trace", trace_flags(state=['q']))
    session.save_history()

    reloaded = TraceSession(session.config)
    assert len(reloaded.history) == 2
    assert reloaded.history[0].lines == ["x: {a, a.b}"]
    assert reloaded.history[1].error == "Unknown state: q"
    assert reloaded.history[1].status == 2

def test_load_empty_history(session):
    session.save_history()
    session.load_history()
    assert session.history == []

def test_load_history_missing_columns(session):
    session.config.history_dir.mkdir(parents=True, exist_ok=True)
    pd.DataFrame({'foo': [1]}).to_csv(session.config.history_file, index=False)
    with pytest.raises(OperationError, match="missing required columns"):
        session.load_history()

@patch('logging.warning')
def test_corrupt_history_does_not_stop_session(logging_warning_mock, config):
    config.history_dir.mkdir(parents=True, exist_ok=True)
    pd.DataFrame({'foo': [1]}).to_csv(config.history_file, index=False)
    session = TraceSession(config)
    assert session.history == []
    logging_warning_mock.assert_called_once()

def test_save_history_failure(session):
    with patch('app.session.pd.DataFrame.to_csv', side_effect=OSError("disk full")):
        with pytest.raises(OperationError, match="Failed to save history"):
            session.save_history()

def test_clear_history(session):
    assert session.clear_history() is False
    session.run("trace", trace_flags())
    assert session.clear_history() is True
    assert session.history == []

def test_history_results_are_command_results(session):
    session.run("bisim", {'system': str(corpus_path("classic"))})
    assert isinstance(session.history[0], CommandResult)
    assert session.history[0].lines[0] == "{x}"

# Test cases for the history subcommand

def test_history_subcommand_lists_results(session):
    session.run("trace", trace_flags())
    result = session.run("history")
    assert result.succeeded
    assert result.lines == [f"trace depth=3 state=x system={corpus_path('running-nd')} -> status 0"]
    assert result.payload['results'][0]['subcommand'] == "trace"

def test_history_subcommand_on_empty_history(session):
    assert session.run("history").lines == ["History is empty"]

def test_history_subcommand_exports_csv(session, tmp_path):
    session.run("trace", trace_flags())
    target = tmp_path / "history.csv"
    session.run("history", {'csv': str(target)})
    df = pd.read_csv(target, dtype=str, keep_default_na=False)
    assert list(df.columns) == HISTORY_COLUMNS
    assert df.loc[0, 'output'] == "x: {a, a.b}"

def test_history_subcommand_clears_saved_history(session):
    session.run("trace", trace_flags())
    session.run("trace", trace_flags(depth=2))
    result = session.run("history", {'clear': True})
    assert result.lines == ["Cleared 2 results"]
    assert [r.subcommand for r in session.history] == ["history"]
    assert TraceSession(session.config).history == []

def test_history_subcommand_clear_when_empty(session):
    assert session.run("history", {'clear': True}).lines == ["History already empty"]

def test_history_subcommand_needs_session(config):
    with pytest.raises(OperationError, match="needs a session"):
        CommandFactory.create_command("history").execute({}, config)
