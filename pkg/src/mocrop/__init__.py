"""mocrop: motion-vector driven clip-level adaptive cropping."""

__version__ = "0.1.0"
