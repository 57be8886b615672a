"""SQLite helper to persist explorer reports keyed by their invocation."""
import json
import logging
from typing import Optional

import aiosqlite

cache_logger = logging.getLogger("polyimage.cache")


def report_key(
    poly_text: str,
    n: int,
    ring_flag: str,
    budget: int,
    seed: int,
    check: str = "image",
    dump_image: bool = False,
) -> str:
    """Canonical invocation key; poly_text should already be rendered canonically."""
    return json.dumps([check, poly_text, n, ring_flag, budget, seed, dump_image], separators=(",", ":"))


class ReportCache:
    def __init__(self, path, *, verbose=False):
        self.path = path
        self.verbose = verbose

    async def init(self):
        async with aiosqlite.connect(self.path) as db:
            await db.execute(
                "CREATE TABLE IF NOT EXISTS reports (key TEXT PRIMARY KEY, report TEXT)"
            )
            await db.commit()

    async def save_report(self, key: str, report: dict):
        """
        Store a JSON-ready report dict under `key`, replacing any previous one.
        """
        try:
            body = json.dumps(report)
        except (TypeError, ValueError) as exc:
            cache_logger.error("json.dumps failed for key=%r: %r", key, exc)
            raise ValueError(f"Failed to JSON-serialize report for {key}: {exc!r}") from exc

        if self.verbose:
            preview = body if len(body) <= 300 else body[:300] + "…"
            cache_logger.debug("save_report: key=%s, preview=%s", key, preview)

        async with aiosqlite.connect(self.path) as db:
            await db.execute("REPLACE INTO reports(key, report) VALUES(?, ?)", (key, body))
            await db.commit()

    async def load_report(self, key: str) -> Optional[dict]:
        async with aiosqlite.connect(self.path) as db:
            async with db.execute("SELECT report FROM reports WHERE key = ?", (key,)) as cursor:
                row = await cursor.fetchone()
        if row is None:
            cache_logger.debug("cache miss: %s", key)
            return None
        cache_logger.debug("cache hit: %s", key)
        return json.loads(row[0])

    async def load_all(self):
        async with aiosqlite.connect(self.path) as db:
            async with db.execute("SELECT key, report FROM reports") as cursor:
                rows = await cursor.fetchall()
                return {row[0]: json.loads(row[1]) for row in rows}
