"""Exact-arithmetic engine for abelian TQFTs at a root of unity."""

__version__ = "0.1.0"
