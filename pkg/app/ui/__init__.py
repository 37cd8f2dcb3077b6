"""Terminal UI components."""

from .console import WalkerConsole
from .display import WalkerDisplay

__all__ = ["WalkerConsole", "WalkerDisplay"]
