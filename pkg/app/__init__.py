"""Ankle Walker - hybrid simulator of an ankle-augmented forced-oscillation walking model."""

__version__ = "0.1.0"

try:
    from importlib.metadata import version, PackageNotFoundError
    try:
        __version__ = version("ankle-walker")
    except PackageNotFoundError:
        pass
except ImportError:
    pass
