"""Service configuration: key=value file with environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path

_ENV_KEYS = {
    "LISTEN_ADDR": "listen_addr",
    "DATA_DIR": "data_dir",
    "KB_PATH": "kb_path",
    "RULES_PATH": "rules_path",
    "WEBHOOK_URL": "webhook_url",
    "API_TOKEN": "api_token",
    "LEASE_TTL_SECS": "lease_ttl_secs",
    "MAX_ATTEMPTS": "max_attempts",
    "WORKERS": "workers",
}


@dataclass(frozen=True)
class Config:
    listen_addr: str = "127.0.0.1:8425"
    data_dir: str = "./mlassist-data"
    kb_path: str | None = None      # None: packaged bootstrap fixture
    rules_path: str | None = None   # None: packaged default rules
    webhook_url: str | None = None
    api_token: str | None = None
    lease_ttl_secs: float = 300.0
    max_attempts: int = 3
    workers: int = 2                # in-process worker threads under `serve`

    @property
    def host(self) -> str:
        return self.listen_addr.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.listen_addr.rsplit(":", 1)[1])


def _coerce(name: str, raw: str):
    if name == "lease_ttl_secs":
        return float(raw)
    if name in ("max_attempts", "workers"):
        return int(raw)
    return raw or None


def load_config(path: str | os.PathLike | None = None, env=None) -> Config:
    """File values first, then environment overrides."""
    env = os.environ if env is None else env
    values: dict = {}
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        for line_no, line in enumerate(text.split("\n"), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected key=value, got {line!r}")
            key, raw = line.split("=", 1)
            key = key.strip().upper()
            if key in _ENV_KEYS:
                values[_ENV_KEYS[key]] = _coerce(_ENV_KEYS[key], raw.strip())
    for env_key, field in _ENV_KEYS.items():
        if env_key in env:
            values[field] = _coerce(field, env[env_key])
    return replace(Config(), **values)
