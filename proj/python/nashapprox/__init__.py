"""Polyhedral approximation of Nash equilibrium sets of convex polynomial games."""

from ._core import (
    Error,
    Game,
    GameFile,
    Region,
    Report,
    fixture,
    fixture_names,
    is_epsilon_ne,
    load_game,
    ne_gaps,
    parse_game,
    region_from_json,
    region_to_json,
    solve,
)

__all__ = [
    "Error",
    "Game",
    "GameFile",
    "Region",
    "Report",
    "fixture",
    "fixture_names",
    "is_epsilon_ne",
    "load_game",
    "ne_gaps",
    "parse_game",
    "region_from_json",
    "region_to_json",
    "solve",
]
