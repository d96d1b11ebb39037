"""Replayable mutation records and chains."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .catalog import KINDS


class NotApplicable(Exception):
    """No site of the required shape; the caller should pick another kind."""

    def __init__(self, kind: str, reason: str):
        self.kind = kind
        self.reason = reason
        super().__init__(f"{kind}: {reason}")


@dataclass(frozen=True)
class MutationRecord:
    kind: str
    rng_seed: int
    choices: dict = field(default_factory=dict, compare=True, hash=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown mutation kind {self.kind!r}")

    @property
    def identifier(self) -> str:
        param = self.choices.get("param")
        return f"{self.kind}:{param}" if param and self.kind in ("REWRITE", "PARAM_TOGGLE") else self.kind

    def to_json(self) -> dict:
        return {"kind": self.kind, "rng_seed": self.rng_seed, "choices": self.choices}

    @classmethod
    def from_json(cls, data: dict) -> "MutationRecord":
        return cls(data["kind"], int(data["rng_seed"]), dict(data.get("choices") or {}))


@dataclass(frozen=True)
class MutationChain:
    seed_id: str
    records: tuple[MutationRecord, ...] = ()

    def __len__(self) -> int:
        return len(self.records)

    def append(self, rec: MutationRecord) -> "MutationChain":
        return MutationChain(self.seed_id, self.records + (rec,))

    def subsequence(self, indices) -> "MutationChain":
        return MutationChain(self.seed_id, tuple(self.records[i] for i in indices))

    def dumps(self) -> str:
        return json.dumps({"seed_id": self.seed_id,
                           "records": [r.to_json() for r in self.records]}, indent=1)

    @classmethod
    def loads(cls, text: str) -> "MutationChain":
        data = json.loads(text)
        return cls(data["seed_id"], tuple(MutationRecord.from_json(r) for r in data["records"]))
