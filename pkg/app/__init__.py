"""magnon-filter — YIG magnetostatic-surface-wave cavity filter design toolkit."""

__version__ = "0.1.0"
