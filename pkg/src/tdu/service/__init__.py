"""FastAPI service exposing the platform."""

from .app import ServeError, build, check_port, create_app, serve

__all__ = ["ServeError", "build", "check_port", "create_app", "serve"]
