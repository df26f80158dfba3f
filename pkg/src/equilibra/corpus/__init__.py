"""Bundled corpus: the worked figures used throughout the test suite."""

import importlib.resources as resources

from ..games import parse_game, parse_memory

GAMES = ["chaos", "ex_extreme1", "ex_extreme2", "ex_extreme3",
         "fig_first_example", "fig_ne_spe", "inf_spe", "lottery",
         "not_stationary", "sans_spe"]
MACHINES = ["machine_1player", "machine_multiplayer"]


def corpus_list():
    """Names of all bundled corpus files (games and machines)."""
    return GAMES + MACHINES


def read_text(name):
    return (resources.files(__package__) / f"{name}.json").read_text()


def load_game(name):
    return parse_game(read_text(name))


def load_memory(name, arena):
    return parse_memory(read_text(name), arena)
