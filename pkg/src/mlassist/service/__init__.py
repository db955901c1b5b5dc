"""REST service binding the registry, engine, store, controller, and AI."""

from mlassist.service.app import AppState, create_app
from mlassist.service.config import Config, load_config
from mlassist.service.webhook import WebhookNotifier

__all__ = ["AppState", "Config", "WebhookNotifier", "create_app", "load_config"]
