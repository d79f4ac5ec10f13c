"""FastAPI service wrapping the bound-computation engine."""

from .app import create_app

__all__ = ["create_app"]
