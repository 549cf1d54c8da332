"""
Run reports: one YAML document per command with a stable schema.

The verdict body is serialized canonically and hashed; the digest names
any figure files.  Timing is kept out of the body and only included on
request, so that identical inputs give byte-identical reports.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from . import __version__

SCHEMA = "qsplit-report/1"


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunReport:
    command: List[str]
    inputs: Dict[str, str] = field(default_factory=dict)
    body: Dict[str, Any] = field(default_factory=dict)
    verdicts: Dict[str, str] = field(default_factory=dict)
    figures: List[str] = field(default_factory=list)
    timing: Optional[float] = None

    def add_input(self, path):
        self.inputs[str(path)] = file_digest(path)

    def verdict(self, name: str, ok: bool, detail: str = "") -> bool:
        self.verdicts[name] = "pass" if ok else ("fail" + (f" ({detail})" if detail else ""))
        return ok

    @property
    def passed(self) -> bool:
        return all(v == "pass" or v.startswith("skipped") for v in self.verdicts.values())

    def _core(self) -> Dict[str, Any]:
        return {
            "schema": SCHEMA,
            "tool": f"qsplit {__version__}",
            "command": list(self.command),
            "inputs": dict(sorted(self.inputs.items())),
            **self.body,
            "verdicts": dict(self.verdicts),
        }

    def digest(self) -> str:
        text = yaml.safe_dump(self._core(), sort_keys=True, default_flow_style=None)
        return hashlib.sha256(text.encode()).hexdigest()

    def render(self) -> str:
        doc = self._core()
        doc["digest"] = self.digest()
        if self.figures:
            doc["figures"] = list(self.figures)
        if self.timing is not None:
            doc["timing_seconds"] = round(self.timing, 3)
        return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None, width=100)
