"""Configuration settings for data handling."""

from pathlib import Path

# Bundled fixtures
FIXTURE_DIR = Path(__file__).resolve().parent / "fixtures"
FIXTURE_NAMES = ("EX31", "EX32", "EX61", "EX62")

GAME_SUFFIX = ".json"
DIRECTION_SUFFIX = "_direction.json"

# Machine-readable output
JSON_INDENT = 2
