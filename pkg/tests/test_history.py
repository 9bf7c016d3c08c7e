import pytest
from unittest.mock import Mock, patch
from app.command_result import CommandResult
from app.history import LoggingObserver, AutoSaveObserver
from app.session import TraceSession
from app.trace_config import TraceConfig

# Sample results for the observers
result_ok = CommandResult("trace", lines=["x: {a}"], arguments="depth=2 system=running-nd")
result_rejected = CommandResult("trace", status=2, error="Unknown state: q", arguments="state=q")

# Test cases for LoggingObserver

@patch('logging.info')
def test_logging_observer_logs_result(logging_info_mock):
    observer = LoggingObserver()
    observer.update(result_ok)
    logging_info_mock.assert_called_once_with(
        "Command executed: trace depth=2 system=running-nd -> status 0"
    )

@patch('logging.warning')
def test_logging_observer_warns_on_error(logging_warning_mock):
    observer = LoggingObserver()
    observer.update(result_rejected)
    logging_warning_mock.assert_called_once_with("Command trace reported: Unknown state: q")

def test_logging_observer_no_result():
    observer = LoggingObserver()
    with pytest.raises(AttributeError):
        observer.update(None)

# Test cases for AutoSaveObserver

def test_autosave_observer_triggers_save():
    session_mock = Mock(spec=TraceSession)
    session_mock.config = Mock(spec=TraceConfig)
    session_mock.config.auto_save = True
    observer = AutoSaveObserver(session_mock)

    observer.update(result_ok)
    session_mock.save_history.assert_called_once()

def test_autosave_observer_respects_disabled_setting():
    session_mock = Mock(spec=TraceSession)
    session_mock.config = Mock(spec=TraceConfig)
    session_mock.config.auto_save = False
    observer = AutoSaveObserver(session_mock)

    observer.update(result_ok)
    session_mock.save_history.assert_not_called()

@patch('logging.info')
def test_autosave_observer_logs_autosave(logging_info_mock):
    session_mock = Mock(spec=TraceSession)
    session_mock.config = Mock(spec=TraceConfig)
    session_mock.config.auto_save = True
    observer = AutoSaveObserver(session_mock)

    observer.update(result_ok)
    logging_info_mock.assert_called_once_with("History auto-saved")

def test_autosave_observer_invalid_session():
    invalid_session = Mock()
    del invalid_session.config
    del invalid_session.save_history
    with pytest.raises(TypeError):
        AutoSaveObserver(invalid_session)

def test_autosave_observer_no_result():
    session_mock = Mock(spec=TraceSession)
    session_mock.config = Mock(spec=TraceConfig)
    observer = AutoSaveObserver(session_mock)
    with pytest.raises(AttributeError):
        observer.update(None)
