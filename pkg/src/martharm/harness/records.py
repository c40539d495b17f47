"""Verification records and corpus configuration."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

DEFAULT_TOLERANCE = 1e-9


@dataclass
class VerificationRecord:
    """One inequality check: lhs vs rhs with an optional claimed constant.

    When ``claimed`` is set the record passes iff lhs/rhs <= claimed +
    tolerance; otherwise it passes iff the ratio is finite.  ``ms`` is a
    wall-clock annotation carried only by the CSV report (the JSON report is
    byte-deterministic, see reporting).
    """

    suite: str
    anchor: str
    lhs: float
    rhs: float
    ratio: float
    claimed: float | None
    passed: bool
    seed: int
    ms: float = 0.0

    @classmethod
    def check(
        cls,
        suite: str,
        anchor: str,
        lhs: float,
        rhs: float,
        *,
        claimed: float | None = None,
        seed: int = 0,
        tolerance: float = DEFAULT_TOLERANCE,
    ) -> "VerificationRecord":
        ratio = lhs / rhs if rhs != 0 else (0.0 if lhs == 0 else math.inf)
        if claimed is None:
            passed = math.isfinite(ratio)
        else:
            passed = ratio <= claimed + tolerance
        return cls(suite, anchor, float(lhs), float(rhs), float(ratio), claimed, bool(passed), seed)


def sort_records(records: list[VerificationRecord]) -> list[VerificationRecord]:
    return sorted(records, key=lambda r: (r.suite, r.seed, r.anchor, r.lhs, r.rhs))


def record_to_json(r: VerificationRecord) -> dict:
    doc = asdict(r)
    doc.pop("ms")  # keep the JSON report byte-identical across reruns
    return doc


def record_from_json(doc: dict) -> VerificationRecord:
    return VerificationRecord(
        suite=doc["suite"],
        anchor=doc["anchor"],
        lhs=float(doc["lhs"]),
        rhs=float(doc["rhs"]),
        ratio=float(doc["ratio"]),
        claimed=None if doc.get("claimed") is None else float(doc["claimed"]),
        passed=bool(doc["passed"]),
        seed=int(doc["seed"]),
    )


@dataclass
class CorpusConfig:
    """Sampling plan shared by the suites.

    ``samples`` feeds the plain statistical suites, ``op_samples`` the
    operator-norm style sweeps; individual suites divide these across the
    listed depths.  All randomness is derived from ``seed``.
    """

    depths: tuple[int, ...] = (6, 8, 10, 12)
    samples: int = 1000
    op_samples: int = 200
    seed: int = 1234
    bmo_profiles: tuple[str, ...] = ("haar-mix", "log-spike", "bounded-random")
    atom_kinds: tuple[str, ...] = ("simple-s-inf", "simple-inf")
    operators: tuple[str, ...] = ("M", "S", "Teps", "MTeps", "HD", "sigma", "Ialpha")
    alpha: float = 0.5
    pk_shapes: tuple[tuple[int, ...], ...] = ((2, 3), (2, 3, 4), (3, 2, 2, 2))
    tolerance: float = DEFAULT_TOLERANCE
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.samples < 1 or self.op_samples < 1:
            raise ValueError("sample counts must be >= 1")
        if not self.depths or any(d < 1 for d in self.depths):
            raise ValueError("depths must be positive")
        floor = 1e-13
        if self.tolerance < floor or any(t < floor for t in self.tolerances.values()):
            raise ValueError(f"tolerances must stay above {floor}")

    def tol(self, key: str) -> float:
        return float(self.tolerances.get(key, self.tolerance))

    def scaled(self, **overrides) -> "CorpusConfig":
        return replace(self, **overrides)

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["depths"] = list(self.depths)
        doc["bmo_profiles"] = list(self.bmo_profiles)
        doc["atom_kinds"] = list(self.atom_kinds)
        doc["operators"] = list(self.operators)
        doc["pk_shapes"] = [list(s) for s in self.pk_shapes]
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "CorpusConfig":
        kwargs = dict(doc)
        for key in ("depths", "bmo_profiles", "atom_kinds", "operators"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        if "pk_shapes" in kwargs:
            kwargs["pk_shapes"] = tuple(tuple(s) for s in kwargs["pk_shapes"])
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | Path) -> "CorpusConfig":
        return cls.from_json(json.loads(Path(path).read_text()))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))
