"""Prometheus metrics + HTTP server."""
import logging
from threading import Thread

from prometheus_client import Counter, Histogram, start_http_server

EXPLORE_LATENCY = Histogram(
    "explore_latency_seconds",
    "Wall-clock seconds spent computing one image report",
    buckets=(0.01, 0.05, 0.1, 0.5, 1, 5, 30, 120, 600),
)
TUPLES_EVALUATED = Counter("tuples_evaluated_total", "Input tuples evaluated by the explorer")
CERTIFICATES_EMITTED = Counter(
    "certificates_emitted_total", "Verified witness certificates", ["provenance"]
)
FALLBACK_SEARCHES = Counter("fallback_searches_total", "Exhaustive witness fallback searches started")


def start_metrics_server(port: int = 8000):
    logging.getLogger("polyimage.metrics").info("starting Prometheus HTTP server on :%d", port)
    Thread(target=start_http_server, args=(port,), daemon=True).start()
