"""Machine-readable command reports.

The payload holds only deterministic data; wall-clock timings live in their
own section so reports can be compared against golden files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

TOOL = "dgformal"


@dataclass
class Report:
    command: dict
    payload: dict
    timings: dict = field(default_factory=dict)
    version: str = ""
    tool: str = TOOL
    summary: str = field(default="", compare=False)   # human-readable text, not serialized

    def to_json(self) -> dict:
        return {"tool": self.tool, "version": self.version, "command": self.command,
                "payload": self.payload, "timings": self.timings}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> "Report":
        return cls(data["command"], data["payload"], data.get("timings", {}), data.get("version", ""),
                   data.get("tool", TOOL))

    @classmethod
    def loads(cls, text: str) -> "Report":
        return cls.from_json(json.loads(text))

    def payload_text(self) -> str:
        return json.dumps(self.payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
