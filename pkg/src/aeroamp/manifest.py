"""Run manifest written next to every command's outputs."""

import json
from dataclasses import dataclass, field
from pathlib import Path

from aeroamp import __version__


@dataclass
class RunManifest:
    """What a command read, which seeds it used and what it wrote.

    Carries no timestamps, so reruns with the same inputs produce identical files.
    """

    command: str
    parameters: dict = field(default_factory=dict)
    inputs: dict[str, str] = field(default_factory=dict)
    seeds: dict[str, int] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    version: str = __version__

    def add_output(self, path: str | Path) -> None:
        name = Path(path).name
        if name not in self.outputs:
            self.outputs.append(name)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "version": self.version,
            "parameters": self.parameters,
            "inputs": self.inputs,
            "seeds": self.seeds,
            "outputs": sorted(self.outputs),
            "notes": self.notes,
        }

    def write(self, out_dir: str | Path) -> Path:
        path = Path(out_dir) / "manifest.json"
        self.add_output(path)
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")
        return path
