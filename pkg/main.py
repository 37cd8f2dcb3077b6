#!/usr/bin/env python3
"""Ankle Walker - Entry point."""

from app.cli import main

if __name__ == "__main__":
    main()
