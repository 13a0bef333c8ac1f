"""Configuration and settings."""

from .settings import settings

__all__ = ["settings"]
