"""Verification campaigns over a range of d, with checkpoint/resume."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from . import engines as eng
from .engines import CrtMode, Engine
from .errors import CheckpointCorruption, EngineDisagreement, StructuralMismatch
from .matrix import build_m

log = logging.getLogger(__name__)

CAMPAIGN_ENGINES = (Engine.BAREISS, Engine.MODULAR_CRT, Engine.STRUCTURAL)
DEFAULT_ENGINES = (Engine.BAREISS, Engine.MODULAR_CRT, Engine.STRUCTURAL)
RECORD_KEYS = ("d", "value", "expected", "passed", "engines", "skipped", "certified", "prime_trace")


def conjectured_value(d: int) -> int:
    """(-1)^d."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return -1 if d % 2 else 1


def parse_engines(names: Iterable[str | Engine]) -> tuple[Engine, ...]:
    """Validate and canonically order an engine selection."""
    chosen = {Engine(n) for n in names}
    return tuple(e for e in Engine if e in chosen)


@dataclass(frozen=True)
class CampaignConfig:
    d_min: int = 1
    d_max: int = 200
    engines: tuple[Engine, ...] = DEFAULT_ENGINES
    mode: CrtMode = field(default_factory=CrtMode.certified)
    parallelism: int = 1
    checkpoint_path: str | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "engines", parse_engines(self.engines))
        if self.d_min < 1 or self.d_max < self.d_min:
            raise ValueError(f"need 1 <= d_min <= d_max, got [{self.d_min}, {self.d_max}]")
        if not self.engines:
            raise ValueError("at least one engine is required")
        if any(e not in CAMPAIGN_ENGINES for e in self.engines):
            raise ValueError(f"campaign engines must be among {[e.value for e in CAMPAIGN_ENGINES]}")
        if self.mode.is_certified and not {Engine.BAREISS, Engine.MODULAR_CRT} & set(self.engines):
            raise ValueError("certified mode requires the bareiss or modular_crt engine")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def echo(self) -> dict:
        """Config as recorded in reports; execution-only knobs are left out
        so that reports do not depend on worker count or checkpoint location."""
        return {
            "d_min": self.d_min,
            "d_max": self.d_max,
            "engines": [e.value for e in self.engines],
            "mode": "certified" if self.mode.is_certified else "probabilistic",
            "k": self.mode.k,
            "seed": self.seed,
        }


@dataclass
class Record:
    d: int
    value: int
    expected: int
    passed: bool
    engines: list[str]
    skipped: list[str]
    certified: bool
    prime_trace: list[list[int]] | None
    seconds: float = 0.0

    def to_dict(self, timings: bool = False) -> dict:
        out = {k: getattr(self, k) for k in RECORD_KEYS}
        if timings:
            out["seconds"] = self.seconds
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "Record":
        missing = [k for k in RECORD_KEYS if k not in obj]
        if missing:
            raise KeyError(f"missing keys {missing}")
        rec = cls(**{k: obj[k] for k in RECORD_KEYS}, seconds=float(obj.get("seconds", 0.0)))
        if not isinstance(rec.d, int) or not isinstance(rec.value, int):
            raise TypeError("d and value must be integers")
        if rec.passed != (rec.value == conjectured_value(rec.d)) or rec.expected != conjectured_value(rec.d):
            raise ValueError(f"inconsistent pass flag at d={rec.d}")
        return rec


@dataclass
class CampaignReport:
    config: CampaignConfig
    records: list[Record]
    total_seconds: float = 0.0

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> list[Record]:
        return [r for r in self.records if not r.passed]

    def to_dict(self, timings: bool = False) -> dict:
        out = {
            "config": self.config.echo(),
            "records": [r.to_dict(timings) for r in self.records],
            "all_pass": self.all_pass,
        }
        if timings:
            out["total_seconds"] = self.total_seconds
        return out

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), sort_keys=True, separators=(",", ":")) + "\n"

    def write(self, path, timings: bool = False) -> None:
        Path(path).write_bytes(self.to_json(timings).encode("ascii"))


def _mode_for(mode: CrtMode, seed: int, d: int) -> CrtMode:
    if mode.is_certified:
        return mode
    # per-d seed, independent of scheduling order
    return CrtMode.probabilistic(mode.k, hash_seed(seed, d))


def hash_seed(seed: int, d: int) -> int:
    digest = hashlib.sha256(f"{seed}:{d}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def verify_one(d: int, engines: Iterable[Engine] = DEFAULT_ENGINES, mode: CrtMode | None = None,
               seed: int = 0) -> Record:
    """Build M(d), run every requested engine, demand agreement."""
    mode = mode or CrtMode.certified()
    engines = parse_engines(engines)
    t0 = time.perf_counter()
    m = build_m(d)
    results = []
    skipped = []
    trace = None
    for e in engines:
        if e is Engine.BAREISS:
            results.append(eng.det_bareiss(m))
        elif e is Engine.MODULAR_CRT:
            r = eng.det_crt(m, _mode_for(mode, seed, d))
            trace = [list(pr) for pr in r.prime_trace]
            results.append(r)
        elif e is Engine.STRUCTURAL:
            try:
                results.append(eng.det_structural(m))
            except StructuralMismatch:
                log.warning("structural engine not applicable at d=%d", d)
                skipped.append(e.value)
        else:
            raise ValueError(f"engine {e.value} is not a campaign engine")
    if not results:
        raise StructuralMismatch(f"no engine produced a value at d={d}")
    if len({r.value for r in results}) > 1:
        raise EngineDisagreement(d, results)
    value = results[0].value
    expected = conjectured_value(d)
    certified = any(
        r.engine is Engine.BAREISS
        or (r.engine is Engine.MODULAR_CRT and r.certification is eng.Certification.CERTIFIED)
        for r in results
    )
    return Record(
        d=d,
        value=value,
        expected=expected,
        passed=value == expected,
        engines=[r.engine.value for r in results],
        skipped=skipped,
        certified=certified,
        prime_trace=trace,
        seconds=time.perf_counter() - t0,
    )


def _verify_task(args) -> Record:
    d, engines, mode, seed = args
    return verify_one(d, engines, mode, seed)


def _structural_records(d_min: int, d_max: int) -> Iterator[Record]:
    t0 = time.perf_counter()
    values = eng.structural_sweep(d_max)
    per_d = (time.perf_counter() - t0) / d_max
    for d in range(d_min, d_max + 1):
        v = values[d - 1]
        expected = -1 if d % 2 else 1
        yield Record(d, v, expected, v == expected, [Engine.STRUCTURAL.value], [], False, None, per_d)


def read_checkpoint(path, cfg: CampaignConfig) -> dict[int, Record]:
    done: dict[int, Record] = {}
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.endswith("\n"):
                raise CheckpointCorruption(f"{path}:{lineno}: truncated line")
            try:
                rec = Record.from_dict(json.loads(line))
            except (ValueError, KeyError, TypeError) as exc:
                raise CheckpointCorruption(f"{path}:{lineno}: {exc}") from exc
            if not cfg.d_min <= rec.d <= cfg.d_max:
                raise CheckpointCorruption(f"{path}:{lineno}: d={rec.d} outside campaign range")
            if rec.d in done:
                raise CheckpointCorruption(f"{path}:{lineno}: duplicate record for d={rec.d}")
            done[rec.d] = rec
    return done


def run_campaign(cfg: CampaignConfig, on_record=None) -> CampaignReport:
    """Verify every d in [d_min, d_max].

    Results are aggregated in d order, so the report does not depend on
    ``parallelism``. With a checkpoint, already-recorded d are read back
    verbatim and only the rest are computed; each new record is appended
    and flushed as soon as it (and every smaller d) is done.
    """
    t0 = time.perf_counter()
    done: dict[int, Record] = {}
    ckpt = None
    if cfg.checkpoint_path:
        if os.path.exists(cfg.checkpoint_path):
            done = read_checkpoint(cfg.checkpoint_path, cfg)
            log.info("resuming: %d records from %s", len(done), cfg.checkpoint_path)
        ckpt = open(cfg.checkpoint_path, "a", encoding="ascii")
    todo = [d for d in range(cfg.d_min, cfg.d_max + 1) if d not in done]

    def fresh() -> Iterator[Record]:
        if not todo:
            return
        if cfg.engines == (Engine.STRUCTURAL,):
            wanted = set(todo)
            yield from (r for r in _structural_records(todo[0], todo[-1]) if r.d in wanted)
        elif cfg.parallelism == 1:
            for d in todo:
                yield verify_one(d, cfg.engines, cfg.mode, cfg.seed)
        else:
            tasks = [(d, cfg.engines, cfg.mode, cfg.seed) for d in todo]
            with ProcessPoolExecutor(max_workers=cfg.parallelism) as pool:
                # map yields in submission order, i.e. by d
                yield from pool.map(_verify_task, tasks, chunksize=max(1, len(tasks) // (8 * cfg.parallelism)))

    records: list[Record] = []
    new = fresh()
    try:
        for d in range(cfg.d_min, cfg.d_max + 1):
            if d in done:
                rec = done[d]
            else:
                rec = next(new)
                assert rec.d == d
                if ckpt:
                    ckpt.write(json.dumps(rec.to_dict(), sort_keys=True, separators=(",", ":")) + "\n")
                    ckpt.flush()
            records.append(rec)
            if on_record:
                on_record(rec)
    finally:
        new.close()
        if ckpt:
            ckpt.close()
    return CampaignReport(cfg, records, time.perf_counter() - t0)


def export_bfile(report: CampaignReport | Iterable[tuple[int, int]], path) -> None:
    """Write ``d a(d)`` lines; the index range must be contiguous and nonempty."""
    pairs = [(r.d, r.value) for r in report.records] if isinstance(report, CampaignReport) else list(report)
    write_bfile(pairs, path)


def write_bfile(pairs: list[tuple[int, int]], path, header: str | None = None) -> None:
    if not pairs:
        raise ValueError("cannot export an empty sequence")
    for (i, _), (j, _) in zip(pairs, pairs[1:]):
        if j != i + 1:
            raise ValueError(f"non-contiguous indices: {i} then {j}")
    lines = [] if header is None else [header]
    lines.extend(f"{i} {v}" for i, v in pairs)
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("ascii"))


def read_bfile(path) -> list[tuple[int, int]]:
    """Parse a b-file; ``#`` lines are comments."""
    out = []
    for line in Path(path).read_bytes().decode("ascii").split("\n"):
        if not line or line.startswith("#"):
            continue
        i, v = line.split(" ")
        out.append((int(i), int(v)))
    return out
