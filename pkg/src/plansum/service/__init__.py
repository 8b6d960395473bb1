"""HTTP service wrapping the core package."""

from plansum.service.app import AppConfig, create_app

__all__ = ["AppConfig", "create_app"]
