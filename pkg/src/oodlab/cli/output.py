"""Run summaries printed to stdout."""

from pathlib import Path
from typing import Iterable, Mapping

import pandas as pd

RULE_WIDTH = 80


def banner(title: str) -> None:
    print(f"\n{'=' * RULE_WIDTH}")
    print(f"🔬 oodlab - {title}")
    print(f"{'=' * RULE_WIDTH}\n")


def ok(message: str) -> None:
    print(f"✅ {message}")


def fail(message: str) -> None:
    print(f"❌ {message}")


def detail(message: str) -> None:
    print(f"   {message}")


def wrote(paths: Iterable[Path]) -> None:
    for path in paths:
        ok(f"Wrote {path}")


def table(frame: pd.DataFrame, float_format: str = "{:.4f}") -> None:
    """Print a small DataFrame indented under the last message."""
    text = frame.to_string(float_format=float_format.format)
    for line in text.splitlines():
        detail(line)


def summary(values: Mapping[str, object]) -> None:
    width = max((len(key) for key in values), default=0)
    for key, value in values.items():
        detail(f"{key:<{width}} : {value}")


def footer() -> None:
    print(f"{'=' * RULE_WIDTH}\n")
