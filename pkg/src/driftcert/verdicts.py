"""Verdicts, their caveats and how several of them combine."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from .errors import ContradictoryVerdicts


class VerdictClass(str, Enum):
    POSITIVE_RECURRENT = "PositiveRecurrent"
    NULL_RECURRENT = "NullRecurrent"
    RECURRENT = "Recurrent"
    TRANSIENT = "Transient"
    NON_ERGODIC = "NonErgodic"
    INCONCLUSIVE = "Inconclusive"


class Caveat(str, Enum):
    HORIZON = "HorizonCertified"
    ANALYTIC = "AnalyticTail"


PR, NR, T = "PR", "NR", "T"

# the set of true classifications each verdict leaves possible
ATOMS: dict[VerdictClass, frozenset] = {
    VerdictClass.POSITIVE_RECURRENT: frozenset({PR}),
    VerdictClass.NULL_RECURRENT: frozenset({NR}),
    VerdictClass.TRANSIENT: frozenset({T}),
    VerdictClass.RECURRENT: frozenset({PR, NR}),
    VerdictClass.NON_ERGODIC: frozenset({NR, T}),
    VerdictClass.INCONCLUSIVE: frozenset({PR, NR, T}),
}
_FROM_ATOMS = {v: k for k, v in ATOMS.items()}


def _plain(value):
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    return value


@dataclass(frozen=True)
class Verdict:
    cls: VerdictClass
    criterion: str
    witnesses: dict = field(default_factory=dict)
    caveat: Caveat | None = None
    reason: str = ""
    applicable: bool = True

    def __post_init__(self):
        object.__setattr__(self, "cls", VerdictClass(self.cls))
        if self.caveat is not None:
            object.__setattr__(self, "caveat", Caveat(self.caveat))
        object.__setattr__(self, "witnesses", _plain(dict(self.witnesses)))
        if self.certified:
            if not self.criterion or not self.witnesses:
                raise ValueError("a certified verdict needs a criterion and witnesses")
            if self.caveat is None:
                raise ValueError("a certified verdict needs a caveat")

    @property
    def certified(self) -> bool:
        return self.cls is not VerdictClass.INCONCLUSIVE

    @property
    def not_applicable(self) -> bool:
        return not self.applicable

    @classmethod
    def inconclusive(cls, criterion, reason, applicable=True, **witnesses) -> "Verdict":
        return cls(VerdictClass.INCONCLUSIVE, criterion, witnesses, None, reason, applicable)

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "class": self.cls.value,
            "caveat": None if self.caveat is None else self.caveat.value,
            "applicable": self.applicable,
            "reason": self.reason,
            "witnesses": self.witnesses,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Verdict":
        return cls(
            VerdictClass(data["class"]),
            data["criterion"],
            dict(data.get("witnesses") or {}),
            None if data.get("caveat") is None else Caveat(data["caveat"]),
            data.get("reason", ""),
            data.get("applicable", True),
        )


@dataclass(frozen=True)
class Conclusion:
    cls: VerdictClass
    criterion: str
    caveat: Caveat | None
    supporting: tuple[str, ...] = ()

    @property
    def certified(self) -> bool:
        return self.cls is not VerdictClass.INCONCLUSIVE

    def to_dict(self) -> dict:
        return {
            "class": self.cls.value,
            "criterion": self.criterion,
            "caveat": None if self.caveat is None else self.caveat.value,
            "supporting": list(self.supporting),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Conclusion":
        return cls(
            VerdictClass(data["class"]),
            data["criterion"],
            None if data.get("caveat") is None else Caveat(data["caveat"]),
            tuple(data.get("supporting", ())),
        )


def compatible(a: VerdictClass, b: VerdictClass) -> bool:
    return bool(ATOMS[VerdictClass(a)] & ATOMS[VerdictClass(b)])


def strongest(verdicts: Iterable[Verdict]) -> Conclusion:
    """Most specific class consistent with every certified verdict.

    Verdicts are taken in the given (checker) order, AnalyticTail ones
    first; a class implied only by several verdicts together (Recurrent
    and NonErgodic give NullRecurrent) is reported as derived.
    """
    verdicts = list(verdicts)
    certified = [v for v in verdicts if v.certified]
    atoms = frozenset({PR, NR, T})
    for v in certified:
        atoms = atoms & ATOMS[v.cls]
    if not atoms:
        raise ContradictoryVerdicts(
            "certified verdicts contradict each other: "
            + ", ".join(f"{v.criterion}={v.cls.value}" for v in certified),
            certified,
        )
    if atoms == ATOMS[VerdictClass.INCONCLUSIVE]:
        return Conclusion(VerdictClass.INCONCLUSIVE, "none", None, ())
    target = _FROM_ATOMS[atoms]
    ranked = sorted(
        enumerate(certified), key=lambda kv: (kv[1].caveat is not Caveat.ANALYTIC, kv[0])
    )
    for _, v in ranked:
        if ATOMS[v.cls] == atoms:
            return Conclusion(target, v.criterion, v.caveat, (v.criterion,))
    used, acc = [], frozenset({PR, NR, T})
    for _, v in ranked:
        nxt = acc & ATOMS[v.cls]
        if nxt != acc:
            used.append(v)
            acc = nxt
        if acc == atoms:
            break
    caveat = Caveat.ANALYTIC if all(v.caveat is Caveat.ANALYTIC for v in used) else Caveat.HORIZON
    names = tuple(v.criterion for v in used)
    return Conclusion(target, "derived:" + "+".join(names), caveat, names)
