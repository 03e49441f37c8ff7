"""JSON file formats for states and record files.

Complex numbers are ``[re, im]`` pairs and matrices are row-major lists of
such pairs. Output is deterministic: the same objects always serialise to the
same bytes, and a file that is read and rewritten is byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..errors import InsufficientDataError, InvalidInputError
from ..qstate import STATE_FORMAT, BellOutcome, DensityMatrix, InputState, standard_inputs
from ..teleportsim import TildeRecord, all_arrangements

RECORDS_FORMAT = "teletomo-records/1"
FORMAT_VERSION = "1"


def complex_pairs(m) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(m).reshape(-1)]


def matrix_from_pairs(pairs, d: int) -> np.ndarray:
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.shape != (d * d, 2):
        raise InvalidInputError(f"expected {d * d} [re, im] pairs, got shape {arr.shape}")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(d, d)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=1, allow_nan=False) + "\n"


def write_json(path, obj: Any) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: not valid JSON ({exc})") from None


def write_state(path, rho: DensityMatrix, extra: dict | None = None) -> None:
    obj = rho.to_json_dict()
    if extra:
        obj.update(extra)
    write_json(path, obj)


def read_state(path) -> DensityMatrix:
    obj = read_json(path)
    if not isinstance(obj, dict):
        raise InvalidInputError(f"{path}: state file must hold a JSON object")
    return DensityMatrix.from_json_dict(obj)


def input_to_json(s: InputState) -> dict:
    return {"label": s.label, "alpha": [s.alpha.real, s.alpha.imag], "beta": [s.beta.real, s.beta.imag]}


def input_from_json(obj: dict) -> InputState:
    try:
        return InputState(complex(*obj["alpha"]), complex(*obj["beta"]), obj.get("label"))
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed input state {obj!r}: {exc}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    qubits: int
    mode: str = "exact"
    shots_per_probe: int | None = None
    seed: int = 0
    designated_outcomes: tuple[BellOutcome, ...] | None = None
    input_set: tuple[InputState, ...] = field(default_factory=lambda: tuple(standard_inputs()))
    all_outcomes: bool = False
    source: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not 2 <= self.qubits <= 5:
            raise InvalidInputError(f"experiments support 2..5 qubits, got {self.qubits}")
        if self.mode not in ("exact", "sampled"):
            raise InvalidInputError(f"mode must be 'exact' or 'sampled', got {self.mode!r}")
        if self.mode == "sampled":
            if self.shots_per_probe is None or self.shots_per_probe < 1:
                raise InvalidInputError("sampled mode needs shots_per_probe >= 1")
            if self.all_outcomes:
                raise InvalidInputError("--all-outcomes is only available in exact mode")
        elif self.shots_per_probe is not None:
            raise InvalidInputError("shots_per_probe only applies to sampled mode")
        if self.designated_outcomes is None:
            object.__setattr__(self, "designated_outcomes", (BellOutcome.PSI_MINUS,) * (self.qubits - 1))
        if len(self.designated_outcomes) != self.qubits - 1:
            raise InvalidInputError(f"{self.qubits} qubits need {self.qubits - 1} designated outcomes")
        inputs = tuple(self.input_set)
        if len(inputs) != 4:
            raise InvalidInputError(f"the input set must hold 4 states, got {len(inputs)}")
        for i, a in enumerate(inputs):
            if a.label is None:
                raise InvalidInputError("every input state needs a label")
            for b in inputs[i + 1 :]:
                if a.same_ray(b) or a.label == b.label:
                    raise InvalidInputError(f"input states {a.label} and {b.label} are not distinct")
        object.__setattr__(self, "input_set", inputs)

    @property
    def labels(self) -> dict[str, InputState]:
        return {s.label: s for s in self.input_set}

    def to_json(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "qubits": self.qubits,
            "mode": self.mode,
            "shots_per_probe": self.shots_per_probe,
            "seed": self.seed,
            "designated_outcomes": [o.value for o in self.designated_outcomes],
            "input_set": [input_to_json(s) for s in self.input_set],
            "all_outcomes": self.all_outcomes,
            "source": self.source,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        if str(obj.get("version", FORMAT_VERSION)) != FORMAT_VERSION:
            raise InvalidInputError(f"unsupported record version {obj.get('version')!r}")
        try:
            return cls(
                qubits=int(obj["qubits"]),
                mode=obj["mode"],
                shots_per_probe=obj.get("shots_per_probe"),
                seed=int(obj.get("seed", 0)),
                designated_outcomes=tuple(BellOutcome.from_label(x) for x in obj["designated_outcomes"]),
                input_set=tuple(input_from_json(x) for x in obj["input_set"]),
                all_outcomes=bool(obj.get("all_outcomes", False)),
                source=dict(obj.get("source", {})),
            )
        except KeyError as exc:
            raise InvalidInputError(f"record config lacks field {exc}") from None


@dataclass(frozen=True, eq=False)
class RecordFile:
    config: ExperimentConfig
    records: tuple[TildeRecord, ...]

    def to_json(self) -> dict:
        body = []
        for r in self.records:
            entry = {
                "arrangement": [s.label for s in r.arrangement],
                "outcome": [o.value for o in r.outcome],
                "q": float(r.q),
                "tilde": complex_pairs(r.tilde),
            }
            if r.shots is not None:
                entry["shots"] = int(r.shots)
            body.append(entry)
        return {"format": RECORDS_FORMAT, "config": self.config.to_json(), "records": body}

    @classmethod
    def from_json(cls, obj: dict) -> "RecordFile":
        if not isinstance(obj, dict) or obj.get("format") != RECORDS_FORMAT:
            raise InvalidInputError(f"not a {RECORDS_FORMAT} file")
        config = ExperimentConfig.from_json(obj.get("config", {}))
        labels = config.labels
        records = []
        for entry in obj.get("records", []):
            try:
                arr = tuple(labels[x] for x in entry["arrangement"])
                out = tuple(BellOutcome.from_label(x) for x in entry["outcome"])
                records.append(TildeRecord(arr, out, float(entry["q"]), matrix_from_pairs(entry["tilde"], 2), entry.get("shots")))
            except KeyError as exc:
                raise InvalidInputError(f"record refers to unknown label or lacks field {exc}") from None
        return cls(config, tuple(records))

    def data_for(self, outcomes) -> dict:
        """Records for one outcome tuple, keyed by arrangement; checks coverage."""
        outcomes = tuple(outcomes)
        data = {r.arrangement: r.tilde for r in self.records if r.outcome == outcomes}
        missing = [a for a in all_arrangements(self.config.qubits, self.config.input_set) if a not in data]
        if missing:
            names = ",".join(s.label for s in missing[0])
            raise InsufficientDataError(
                f"{len(missing)} arrangement(s) lack records for outcome {[o.value for o in outcomes]}, e.g. ({names})"
            )
        return data


def write_records(path, rf: RecordFile) -> None:
    write_json(path, rf.to_json())


def read_records(path) -> RecordFile:
    return RecordFile.from_json(read_json(path))


def merge_records(files: list[RecordFile]) -> RecordFile:
    """Combine partial record files produced by different parties."""
    base = files[0]
    seen = {}
    for rf in files:
        if rf.config != base.config:
            raise InvalidInputError("record files come from different experiment configurations")
        for r in rf.records:
            seen.setdefault((r.arrangement, r.outcome), r)
    return RecordFile(base.config, tuple(seen.values()))
