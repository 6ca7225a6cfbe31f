"""Access to the scenario files shipped with the package."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path

from .model import Scenario
from .scenario_io import parse_scenario_text


def bundled_names() -> list[str]:
    root = files(__package__) / "scenarios"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".scn"))


def bundled_text(name: str) -> str:
    if not name.endswith(".scn"):
        name += ".scn"
    return (files(__package__) / "scenarios" / name).read_text(encoding="utf-8")


def bundled_path(name: str) -> Path:
    if not name.endswith(".scn"):
        name += ".scn"
    return Path(str(files(__package__) / "scenarios" / name))


def load_bundled(name: str) -> Scenario:
    return parse_scenario_text(bundled_text(name), name=name)
