"""Chain complexes over orbit categories of finite groups."""

__version__ = "0.1.0"
