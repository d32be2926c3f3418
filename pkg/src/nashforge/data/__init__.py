"""Game files, bundled fixtures and report documents."""

from .loader import (
    game_to_dict,
    is_fixture,
    load_direction,
    load_fixture,
    load_fixture_direction,
    load_game,
    load_game_source,
    parse_game,
)
from .serialization import (
    dumps,
    report_from_dict,
    report_to_dict,
    sweep_from_dict,
    sweep_to_dict,
    to_jsonable,
)

__all__ = [
    'game_to_dict',
    'is_fixture',
    'load_direction',
    'load_fixture',
    'load_fixture_direction',
    'load_game',
    'load_game_source',
    'parse_game',
    'dumps',
    'report_from_dict',
    'report_to_dict',
    'sweep_from_dict',
    'sweep_to_dict',
    'to_jsonable',
]
