"""FastAPI service layer: pydantic schemas and the application object."""

from .app import app

__all__ = ["app"]
