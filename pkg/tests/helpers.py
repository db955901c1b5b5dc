"""Test-only builders shared by store/controller/service tests."""

from __future__ import annotations

import json
import socket
import threading
import time
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np

from mlassist.datasets.registry import ingest_dataset
from mlassist.ml.evaluate import EvaluationResult
from mlassist.ml.metrics import Metrics, RocCurve


class FakeClock:
    def __init__(self, start: float = 1_000_000.0):
        self.t = float(start)

    def __call__(self) -> float:
        return self.t

    def advance(self, dt: float) -> None:
        self.t += float(dt)


def csv_blob(header, rows, delimiter=","):
    lines = [delimiter.join(header)]
    lines += [delimiter.join(str(c) for c in row) for row in rows]
    return ("\n".join(lines) + "\n").encode("utf-8")


def small_classification_csv(seed=0, n=40, name_salt=""):
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n):
        shift = 2.5 if i % 2 else 0.0
        rows.append([f"{rng.normal(shift, 1):.6f}", f"{rng.normal(-shift, 1):.6f}",
                     name_salt + str(i % 2)])
    return csv_blob(["f1", "f2", "label"], rows)


def seed_dataset(store, *, name="demo", tags=("demo",), seed=0, n=40):
    record, _ = ingest_dataset(store, small_classification_csv(seed=seed, n=n),
                               name, "label", "classification", tags=tags)
    return record


def free_port() -> int:
    s = socket.socket()
    s.bind(("127.0.0.1", 0))
    port = s.getsockname()[1]
    s.close()
    return port


class LiveServer:
    """Real uvicorn server in a thread, for CLI / remote-worker round trips."""

    def __init__(self, app):
        import uvicorn
        self.port = free_port()
        self.url = f"http://127.0.0.1:{self.port}"
        config = uvicorn.Config(app, host="127.0.0.1", port=self.port, log_level="error")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    def __enter__(self):
        self.thread.start()
        deadline = time.time() + 10
        while not self.server.started:
            if time.time() > deadline:
                raise RuntimeError("server did not start")
            time.sleep(0.01)
        return self

    def __exit__(self, *exc):
        self.server.should_exit = True
        self.thread.join(timeout=10)


class WebhookReceiver:
    """Local HTTP endpoint capturing webhook POST bodies."""

    def __init__(self):
        self.events: list[dict] = []
        receiver = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("content-length", 0))
                receiver.events.append(json.loads(self.rfile.read(length)))
                self.send_response(200)
                self.end_headers()

            def log_message(self, *args):
                pass

        self.httpd = HTTPServer(("127.0.0.1", 0), Handler)
        self.url = f"http://127.0.0.1:{self.httpd.server_port}"
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.httpd.shutdown()
        self.httpd.server_close()
        self.thread.join(timeout=5)

    def wait_for(self, predicate, timeout: float = 10.0) -> bool:
        deadline = time.time() + timeout
        while time.time() < deadline:
            if predicate(list(self.events)):
                return True
            time.sleep(0.02)
        return False


def fake_result(task="classification", seed=0, folds=2, **metric_values):
    defaults = ({"accuracy": 0.9, "balanced_accuracy": 0.9, "f1_macro": 0.9, "auc": 0.95}
                if task == "classification" else {"r2": 0.8, "mse": 1.0})
    defaults.update(metric_values)
    metrics = Metrics.from_dict(task, defaults)
    roc = RocCurve(points=[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)], auc=defaults.get("auc", 1.0)) \
        if task == "classification" else None
    return EvaluationResult(metrics=metrics, per_fold=[metrics, metrics], roc=roc,
                            seed=seed, cv_folds=folds, wall_time=0.01)
