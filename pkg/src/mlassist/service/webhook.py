"""Webhook notifications (the update channel: no email/SMS credentials).

Delivery is fire-and-forget from the caller's perspective: a failed POST is
retried up to three attempts with exponential backoff, then logged and
dropped.  Nothing here ever raises into the AI loop.
"""

from __future__ import annotations

import json
import logging
import queue
import threading

import httpx

logger = logging.getLogger(__name__)

ATTEMPTS = 3


class WebhookNotifier:
    """mode="thread" queues events to a background sender; mode="sync"
    delivers inline (tests, CLI one-shots)."""

    def __init__(self, endpoint: str | None, mode: str = "thread",
                 backoff: float = 0.25, timeout: float = 5.0):
        self.endpoint = endpoint
        self.backoff = backoff
        self.timeout = timeout
        self.mode = mode
        self.delivered = 0
        self.failed = 0
        self._queue: queue.Queue | None = None
        self._thread = None
        if endpoint and mode == "thread":
            self._queue = queue.Queue()
            self._thread = threading.Thread(target=self._drain, name="webhook",
                                            daemon=True)
            self._thread.start()

    def send(self, event: dict) -> None:
        """Never raises; no endpoint configured means success as a no-op."""
        if not self.endpoint:
            return
        if self._queue is not None:
            self._queue.put(event)
        else:
            self.deliver(event)

    def deliver(self, event: dict) -> bool:
        """Up to three attempts with exponential backoff; returns success."""
        if not self.endpoint:
            return True
        body = json.dumps(event).encode("utf-8")
        wait = self.backoff
        for attempt in range(1, ATTEMPTS + 1):
            try:
                response = httpx.post(self.endpoint, content=body,
                                      headers={"content-type": "application/json"},
                                      timeout=self.timeout)
                if response.status_code < 400:
                    self.delivered += 1
                    return True
                logger.warning("webhook attempt %d: HTTP %d from %s",
                               attempt, response.status_code, self.endpoint)
            except Exception as exc:
                logger.warning("webhook attempt %d failed: %s", attempt, exc)
            if attempt < ATTEMPTS:
                threading.Event().wait(wait)
                wait *= 2
        self.failed += 1
        logger.error("webhook delivery gave up after %d attempts: %s",
                     ATTEMPTS, event.get("kind"))
        return False

    def _drain(self) -> None:
        while True:
            event = self._queue.get()
            if event is None:
                return
            self.deliver(event)

    def flush(self, timeout: float = 10.0) -> None:
        if self._queue is not None:
            deadline = threading.Event()
            waited = 0.0
            while not self._queue.empty() and waited < timeout:
                deadline.wait(0.02)
                waited += 0.02

    def close(self) -> None:
        if self._queue is not None:
            self._queue.put(None)
