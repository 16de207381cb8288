"""Check records shared by the verification routines and the command line."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field


@dataclass
class CheckRecord:
    name: str
    residual: float
    threshold: float
    location: str = ""
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.threshold)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = self.passed
        if not d["detail"]:
            del d["detail"]
        if not d["location"]:
            del d["location"]
        return d


@dataclass
class Report:
    command: str
    records: list = field(default_factory=list)
    artifacts: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def add(self, name: str, residual: float, threshold: float, location: str = "", **detail) -> CheckRecord:
        rec = CheckRecord(name, float(residual), float(threshold), location, detail)
        self.records.append(rec)
        return rec

    def extend(self, other: "Report"):
        self.records.extend(other.records)
        self.artifacts.extend(other.artifacts)
        self.extra.update(other.extra)

    def failures(self) -> list:
        return [r for r in self.records if not r.passed]

    def to_dict(self) -> dict:
        out = {
            "command": self.command,
            "pass": self.passed,
            "records": [r.to_dict() for r in self.records],
        }
        if self.artifacts:
            out["artifacts"] = list(self.artifacts)
        if self.extra:
            out["results"] = self.extra
        return out
