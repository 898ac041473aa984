"""Bundled example models: the three-character matchmaking puzzle and the
sketch-regenerated single-character model."""

from __future__ import annotations

from importlib import resources

from ..io_formats import load_model
from ..model import NarrativeSystem

__all__ = ["fixture_text", "load_fixture", "MATCHMAKING", "GENERATED_FANNY"]

MATCHMAKING = "subject_and_subjectivity"
GENERATED_FANNY = "generated_fanny"


def fixture_text(name: str) -> str:
    return (resources.files(__package__) / f"{name}.json").read_text(encoding="utf-8")


def load_fixture(name: str) -> NarrativeSystem:
    return load_model(fixture_text(name))
