"""The classification report and its JSON serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

from . import __version__
from .errors import ContradictoryVerdicts
from .verdicts import Conclusion, Verdict, _plain, strongest

REPORT_FORMAT = 1


@dataclass(frozen=True)
class ClassificationReport:
    spec_name: str
    spec_echo: dict
    profile_summary: dict
    verdicts: tuple[Verdict, ...]
    conclusion: Conclusion
    notes: tuple[str, ...] = ()
    simulation: dict | None = None
    timings: dict | None = None
    version: str = __version__

    @classmethod
    def build(cls, spec, profile, verdicts, conclusion, timings=None) -> "ClassificationReport":
        return cls(
            spec.name,
            _plain(spec.source),
            _plain(profile.summary()),
            tuple(verdicts),
            conclusion,
            tuple(spec.notes),
            None,
            None if timings is None else {k: round(v, 6) for k, v in timings.items()},
        )

    @property
    def certified(self) -> bool:
        return self.conclusion.certified

    def with_simulation(self, stats: Mapping) -> "ClassificationReport":
        return ClassificationReport(
            self.spec_name, self.spec_echo, self.profile_summary, self.verdicts, self.conclusion,
            self.notes, _plain(dict(stats)), self.timings, self.version,
        )

    def verdict(self, criterion: str) -> Verdict:
        for v in self.verdicts:
            if v.criterion == criterion:
                return v
        raise KeyError(criterion)

    def check_consistency(self) -> None:
        """The stored conclusion must be the one the verdicts imply."""
        derived = strongest(self.verdicts)
        if derived != self.conclusion:
            raise ContradictoryVerdicts(
                f"stored conclusion {self.conclusion} differs from derived {derived}", self.verdicts
            )

    def to_dict(self) -> dict:
        out = {
            "format": REPORT_FORMAT,
            "version": self.version,
            "spec": {"name": self.spec_name, "echo": self.spec_echo, "notes": list(self.notes)},
            "profile": self.profile_summary,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "conclusion": self.conclusion.to_dict(),
        }
        if self.simulation is not None:
            out["simulation"] = self.simulation
        if self.timings is not None:
            out["timings"] = self.timings
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False, allow_nan=True) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping) -> "ClassificationReport":
        return cls(
            data["spec"]["name"],
            data["spec"]["echo"],
            data["profile"],
            tuple(Verdict.from_dict(v) for v in data["verdicts"]),
            Conclusion.from_dict(data["conclusion"]),
            tuple(data["spec"].get("notes", ())),
            data.get("simulation"),
            data.get("timings"),
            data["version"],
        )

    @classmethod
    def from_json(cls, text: str) -> "ClassificationReport":
        return cls.from_dict(json.loads(text))
