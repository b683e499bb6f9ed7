"""
Artifact writers for laboratory runs: run.json, report.txt and text
summaries next to the CSV tables.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

logger = logging.getLogger(__name__)

RUN_FILE = "run.json"
REPORT_FILE = "report.txt"


def write_json(path: Path, data: dict[str, Any]) -> Path:
    """Write data as indented JSON (keys in insertion order)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
        f.write("\n")
    return path


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text if text.endswith("\n") else text + "\n")
    return path


class RunReport:
    """
    Collects the artifacts and key findings of one command.

    The report lists every file written and a block of `key: value` lines,
    and is saved as report.txt in the output directory together with a
    run.json echo of the resolved configuration.
    """

    def __init__(self, command: str, output_dir: Path, config: dict[str, Any]):
        self.command = command
        self.output_dir = Path(output_dir)
        self.config = config
        self.files: list[str] = []
        self.findings: list[tuple[str, Any]] = []

    def path(self, name: str) -> Path:
        return self.output_dir / name

    def add_file(self, path: Path) -> Path:
        self.files.append(Path(path).name)
        logger.info(f"Wrote {path}")
        return path

    def add(self, key: str, value: Any):
        self.findings.append((key, value))

    def render(self) -> str:
        lines = [f"command: {self.command}", f"system: {self.config.get('system')}", ""]
        lines.append("results:")
        for key, value in self.findings:
            if isinstance(value, float):
                value = f"{value:.10g}"
            lines.append(f"  {key}: {value}")
        lines.append("")
        lines.append("files:")
        lines.extend(f"  {name}" for name in self.files)
        return "\n".join(lines) + "\n"

    def save(self) -> Path:
        write_json(self.path(RUN_FILE), {"command": self.command, "config": self.config})
        return write_text(self.path(REPORT_FILE), self.render())
