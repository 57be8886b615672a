"""Unit tests for the SQLite report cache."""
import json

import pytest

from src.cache import ReportCache, report_key


def test_report_key_is_canonical():
    """Keys depend on every part of the invocation."""
    a = report_key("x1*x2 - x2*x1", 2, "gf:3", 1000, 0)
    assert a == report_key("x1*x2 - x2*x1", 2, "gf:3", 1000, 0)
    assert a != report_key("x1*x2 - x2*x1", 2, "gf:3", 1000, 1)
    assert a != report_key("x1*x2 - x2*x1", 2, "gf:3", 1000, 0, check="span")
    assert a != report_key("x1*x2 - x2*x1", 2, "gf:3", 1000, 0, dump_image=True)
    assert json.loads(a) == ["image", "x1*x2 - x2*x1", 2, "gf:3", 1000, 0, False]


@pytest.mark.asyncio
async def test_save_and_load(tmp_path):
    """A stored report comes back unchanged."""
    # Setup
    cache = ReportCache(str(tmp_path / "reports.db"), verbose=True)
    await cache.init()
    key = report_key("x1*x2", 2, "gf:2", 10, 0)

    # Execute
    await cache.save_report(key, {"image_size": 8, "mode": "exhaustive"})
    loaded = await cache.load_report(key)

    # Verify
    assert loaded == {"image_size": 8, "mode": "exhaustive"}


@pytest.mark.asyncio
async def test_miss_returns_none(tmp_path):
    cache = ReportCache(str(tmp_path / "reports.db"))
    await cache.init()
    assert await cache.load_report("absent") is None


@pytest.mark.asyncio
async def test_replace_and_load_all(tmp_path):
    """Saving twice under one key keeps only the latest report."""
    cache = ReportCache(str(tmp_path / "reports.db"))
    await cache.init()
    await cache.save_report("a", {"v": 1})
    await cache.save_report("a", {"v": 2})
    await cache.save_report("b", {"v": 3})
    assert await cache.load_all() == {"a": {"v": 2}, "b": {"v": 3}}


@pytest.mark.asyncio
async def test_unserializable_report(tmp_path):
    cache = ReportCache(str(tmp_path / "reports.db"))
    await cache.init()
    with pytest.raises(ValueError, match="JSON-serialize"):
        await cache.save_report("bad", {"v": object()})
