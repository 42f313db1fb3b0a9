"""HTTP surface for the dashboard: read-only views over a loaded bundle."""

from .app import API_SCHEMA_VERSION, create_app, serve_api

__all__ = ["API_SCHEMA_VERSION", "create_app", "serve_api"]
