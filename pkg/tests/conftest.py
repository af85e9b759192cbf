from __future__ import annotations

from functools import lru_cache

import pytest

from splitlm.charts import build_chart, make_spec


@lru_cache(maxsize=None)
def _chart(p, n, s, chart, case):
    return build_chart(make_spec(p, n, s, chart, case))


@pytest.fixture(scope="session")
def chart():
    """chart(n, s, which, case=1, p=3) -> cached ChartIdeal."""
    def get(n, s, which, case=1, p=3):
        return _chart(p, n, s, which, case)
    return get


_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def criterion():
    """criterion(k, title, ok, detail) records one sub-check of acceptance criterion k."""
    def record(k, title, ok, detail=""):
        entry = _ACCEPTANCE.setdefault(k, {"title": title, "ok": True, "details": []})
        entry["ok"] = entry["ok"] and bool(ok)
        if detail:
            entry["details"].append(("" if ok else "FAILED ") + detail)
        print(f"criterion {k} {'PASS' if ok else 'FAIL'}: {title} {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        e = _ACCEPTANCE[k]
        failed = [d for d in e["details"] if d.startswith("FAILED")]
        extra = f" ({'; '.join(failed)})" if failed else f" ({len(e['details'])} checks)"
        terminalreporter.write_line(f"criterion {k:2d} {'PASS' if e['ok'] else 'FAIL'}: {e['title']}{extra}")
