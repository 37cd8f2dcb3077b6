"""Rich console wrapper with the simulator's theme."""

from pathlib import Path
from typing import Optional

from rich.console import Console
from rich.theme import Theme


def create_walker_theme() -> Theme:
    """Styles for gait status, strides and run output."""
    return Theme(
        {
            "walking": "bold green",
            "fell": "bold red",
            "transient": "dim yellow",
            "subheader": "bold blue",
            "warning": "bold yellow",
            "muted": "dim white",
        }
    )


class WalkerConsole:
    """Themed console; with ``record=True`` the output doubles as the run's text report."""

    def __init__(self, record: bool = False, console: Optional[Console] = None):
        self.console = console or Console(theme=create_walker_theme(), record=record)

    def print(self, *args, **kwargs):
        self.console.print(*args, **kwargs)

    def print_subheader(self, text: str):
        self.console.print(f"\n[subheader]{text}[/subheader]")

    def print_warning(self, text: str):
        self.console.print(f"[warning]Warning: {text}[/warning]")

    def print_muted(self, text: str):
        self.console.print(f"[muted]{text}[/muted]")

    def rule(self, title: str = ""):
        self.console.rule(title)

    def save_report(self, path: Path) -> Path:
        """Write everything printed so far as plain text."""
        path.parent.mkdir(parents=True, exist_ok=True)
        self.console.save_text(str(path), clear=False, styles=False)
        return path
