import pytest

TINY = """\
synth.length = 700
model.lookback = 3
model.conv_filters = 6
model.lstm_units = 5
model.dense_hidden = 4
train.max_epochs = 4
train.patience = 2
experiment.steps = 1,3,48
"""


@pytest.fixture
def tiny_config(tmp_path):
    p = tmp_path / "tiny.cfg"
    p.write_text(TINY)
    return str(p)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
