import os
from collections import defaultdict

import numpy as np
import pytest

from _util import blob_rows, write_csv

BANKNOTE_ENV = "QSVM_BANKNOTE_CSV"


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def synthetic_banknote(tmp_path):
    """Synthetic 4-feature stand-in with the real set's class tallies (762 / 610).

    Not the banknote data; it only exercises the banknote code paths.
    """
    X, y = blob_rows(np.random.default_rng(5), 762, 610)
    return write_csv(tmp_path / "synthetic_banknote.csv", X, y,
                     header=("variance", "skewness", "kurtosis", "entropy", "class"))


@pytest.fixture
def banknote_path():
    path = os.environ.get(BANKNOTE_ENV)
    if not path or not os.path.exists(path):
        pytest.skip(f"banknote dataset unavailable (set ${BANKNOTE_ENV} to the published CSV)")
    return path


# acceptance summary: one line per criterion ------------------------------------------

_RESULTS = defaultdict(list)
_TITLES = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        n = mark.kwargs["criterion"]
        _TITLES.setdefault(n, mark.kwargs.get("title", ""))
        part = mark.kwargs.get("part", "")
        callspec = getattr(item, "callspec", None)
        if callspec is not None:
            part = f"{part}/{callspec.id}" if part else callspec.id
        if rep.skipped:
            reason = rep.longrepr[2] if isinstance(rep.longrepr, tuple) else str(rep.longrepr)
            _RESULTS[n].append((part, "SKIP", reason.removeprefix("Skipped: ")))
        else:
            _RESULTS[n].append((part, "PASS" if rep.passed else "FAIL", ""))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_RESULTS):
        parts = _RESULTS[n]
        states = {s for _, s, _ in parts}
        if "FAIL" in states:
            status = "FAIL"
        elif states == {"PASS"}:
            status = "PASS"
        elif "PASS" in states:
            status = "PARTIAL"
        else:
            status = "NOT RUN"
        detail = "; ".join(f"{p or 'all'}: {s}" + (f" ({r})" if r else "") for p, s, r in parts)
        tr.write_line(f"criterion {n:>2} {status:<8} {_TITLES[n]} [{detail}]")
