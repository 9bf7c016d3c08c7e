from pathlib import Path
from tempfile import TemporaryDirectory

import pandas as pd

from app.reports import CheckEntry, CheckReport

# Test cases for CheckEntry

def test_entry_counts_cases_and_failures():
    entry = CheckEntry("suite")
    assert entry.record(True)
    assert not entry.record(False, "first")
    entry.record(False, "second")
    assert entry.cases == 3
    assert entry.failures == 2
    assert entry.counterexample == "first"

def test_entry_renders_lazy_detail_only_on_failure():
    calls = []

    def detail():
        calls.append(1)
        return "boom"

    entry = CheckEntry("suite")
    entry.record(True, detail)
    assert calls == []
    entry.record(False, detail)
    assert entry.counterexample == "boom"

def test_entry_rendering():
    entry = CheckEntry("square", cases=4)
    assert entry.render() == "PASS square (4 cases)"
    entry.record(False, "x: differs")
    assert entry.render() == "FAIL square (5 cases, 1 failures)\n  counterexample: x: differs"

# Test cases for CheckReport

def test_report_passes_when_empty():
    assert CheckReport("nothing").passed

def test_report_extend_prefixes_titles():
    inner = CheckReport("inner")
    inner.entry("a").record(False, "bad")
    outer = CheckReport("outer").extend(inner)
    assert outer.entries[0].suite == "inner: a"
    assert outer.failures == 1
    assert not outer.passed

def test_report_to_dict():
    report = CheckReport("r")
    report.entry("a").record(True)
    data = report.to_dict()
    assert data['passed'] is True
    assert data['entries'][0] == {
        'suite': 'a', 'cases': 1, 'failures': 0, 'passed': True, 'counterexample': ''
    }

def test_report_save_csv():
    report = CheckReport("r")
    report.entry("a").record(True)
    report.entry("b").record(False, "why")
    with TemporaryDirectory() as temp_dir:
        path = report.save_csv(Path(temp_dir) / "nested" / "report.csv")
        df = pd.read_csv(path, keep_default_na=False)
    assert list(df['suite']) == ['a', 'b']
    assert list(df['failures']) == [0, 1]
    assert df.loc[1, 'counterexample'] == 'why'

def test_report_str_is_render():
    report = CheckReport("r")
    report.entry("a").record(True)
    assert str(report) == "PASS a (1 cases)"
