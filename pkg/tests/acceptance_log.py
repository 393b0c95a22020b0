"""Shared store for the per-criterion summary lines."""

ACCEPTANCE_LINES: list = []
