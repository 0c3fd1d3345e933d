"""Analysis report container and its JSON form."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

SCHEMA_VERSION = 1
TOP_LEVEL_KEYS = ("schema_version", "meta", "regression", "bootstrap", "scores", "comparison")


@dataclass
class AnalysisReport:
    meta: dict = field(default_factory=dict)
    regression: dict | None = None
    bootstrap: dict | None = None
    scores: dict | None = None
    comparison: dict | None = None
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {k: asdict(self)[k] for k in TOP_LEVEL_KEYS}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False, allow_nan=True)

    @classmethod
    def from_dict(cls, data: dict) -> "AnalysisReport":
        missing = [k for k in TOP_LEVEL_KEYS if k not in data]
        if missing:
            raise ValueError(f"report is missing keys: {', '.join(missing)}")
        if data["schema_version"] != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema_version {data['schema_version']!r}")
        return cls(**{k: data[k] for k in TOP_LEVEL_KEYS})

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "AnalysisReport":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())
