import os

import numpy as np

ACCEPTANCE = []


def record(criterion, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE.append(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)


def pytest_configure(config):
    os.environ.setdefault("OMP_NUM_THREADS", "1")
    np.set_printoptions(precision=6)
