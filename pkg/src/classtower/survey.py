"""Batch scans of radicands, minimal-radicand tables, export and the verification box."""

from __future__ import annotations

import hashlib
import io
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, TextIO

from .arith import RadicandProfile, Rejection, profile_from_factors, profile_radicand, smallest_prime_factors, factorize_spf
from .artin import artin_pattern
from .pcgroup import SizeGuardError, size_guard
from .towers import TowerParams, group_G, params_from_radicand, pattern_diffs, predicted_pattern2, tree_position

log = logging.getLogger(__name__)

__all__ = [
    "SurveyRecord",
    "MinimalRadicandTable",
    "SurveySummary",
    "CellResult",
    "VerifyReport",
    "classify_radicand",
    "survey",
    "export",
    "read_csv",
    "verify",
]

FIELDS = ("d", "p1", "p2", "q", "m", "n", "legendre_p2_q", "position")
CHUNK = 100_000


@dataclass(frozen=True)
class SurveyRecord:
    d: int
    p1: int
    p2: int
    q: int
    m: int
    n: int
    legendre_p2_q: int
    position: str

    def csv_line(self) -> str:
        # position is last and may hold commas; it is written verbatim
        return ",".join(str(getattr(self, f)) for f in FIELDS)

    @classmethod
    def from_csv_line(cls, line: str) -> SurveyRecord:
        parts = line.rstrip("\r\n").split(",", len(FIELDS) - 1)
        if len(parts) != len(FIELDS):
            raise ValueError(f"malformed record line: {line!r}")
        return cls(*(int(x) for x in parts[:-1]), parts[-1])


def _record(profile: RadicandProfile) -> SurveyRecord:
    params = params_from_radicand(profile)
    return SurveyRecord(profile.d, profile.p1, profile.p2, profile.q, params.m, params.n,
                        profile.legendre_p2_q, tree_position(params).label)


def classify_radicand(d: int) -> SurveyRecord:
    """Full record for one radicand; raises RadicandRejected if d is not admissible."""
    return _record(profile_radicand(d))


class MinimalRadicandTable:
    """(m, n) -> smallest accepted radicand with those parameters."""

    def __init__(self, entries: dict[tuple[int, int], int] | None = None):
        self.entries: dict[tuple[int, int], int] = dict(entries or {})

    def add(self, rec: SurveyRecord) -> None:
        key = (rec.m, rec.n)
        if key not in self.entries or rec.d < self.entries[key]:
            self.entries[key] = rec.d

    def __getitem__(self, key: tuple[int, int]) -> int:
        return self.entries[key]

    def get(self, key: tuple[int, int], default=None):
        return self.entries.get(key, default)

    def __contains__(self, key) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, MinimalRadicandTable) and self.entries == other.entries

    def render(self) -> str:
        """Grid with rows m and columns n, '-' where no radicand was found."""
        if not self.entries:
            return "(empty)\n"
        mmax = max(m for m, _ in self.entries)
        nmax = max(n for _, n in self.entries)
        cells = {k: str(v) for k, v in self.entries.items()}
        width = max(len(s) for s in cells.values())
        out = ["m\\n " + " ".join(f"{n:>{width}}" for n in range(1, nmax + 1))]
        for m in range(1, mmax + 1):
            row = " ".join(f"{cells.get((m, n), '-'):>{width}}" for n in range(1, nmax + 1))
            out.append(f"{m:>3} " + row)
        return "\n".join(out) + "\n"


@dataclass
class SurveySummary:
    lo: int
    hi: int
    records: list[SurveyRecord]
    failures: list[tuple[int, str]] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def count(self) -> int:
        return len(self.records)

    @property
    def table(self) -> MinimalRadicandTable:
        table = MinimalRadicandTable()
        for rec in self.records:
            table.add(rec)
        return table


def _scan_chunk(args: tuple[int, int, int]) -> tuple[list[SurveyRecord], list[tuple[int, str]]]:
    """Accepted records for start <= d < stop, using a smallest-prime-factor table up to limit."""
    start, stop, limit = args
    spf = smallest_prime_factors(limit)
    records, failures = [], []
    # every admissible d = p1*p2*q is 1*5*3 or 1*5*7 (mod 8), hence 3 (mod 4)
    for d in range(start + (3 - start) % 4, stop, 4):
        profile = profile_from_factors(d, factorize_spf(d, spf))
        if isinstance(profile, Rejection):
            continue
        try:
            records.append(_record(profile))
        except Exception as exc:  # reported to the caller, never dropped
            failures.append((d, f"{type(exc).__name__}: {exc}"))
    return records, failures


def _code_hash() -> str:
    here = Path(__file__).parent
    h = hashlib.sha256()
    for name in ("arith.py", "quadclass.py", "towers.py", "survey.py"):
        h.update((here / name).read_bytes())
    return h.hexdigest()[:16]


def _cache_file(cache_dir: str | os.PathLike, lo: int, hi: int) -> Path:
    return Path(cache_dir) / f"survey_{lo}_{hi}_{_code_hash()}.csv"


def survey(
    lo: int,
    hi: int,
    emit: Callable[[SurveyRecord], None] | None = None,
    workers: int = 1,
    cache_dir: str | os.PathLike | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> SurveySummary:
    """Scan every d with lo < d < hi, streaming accepted records in ascending order.

    The range is cut into chunks that are scanned independently (in a process
    pool when workers > 1) and merged by chunk order, so the output does not
    depend on the worker count. Radicands whose classification raises are
    logged and listed in ``failures``.
    """
    if not (isinstance(lo, int) and isinstance(hi, int)) or lo < 0 or hi <= lo:
        raise ValueError(f"survey range must satisfy 0 <= lo < hi, got ({lo}, {hi})")
    t0 = time.perf_counter()
    cached = _cache_file(cache_dir, lo, hi) if cache_dir is not None else None
    if cached is not None and cached.exists():
        records = read_csv(cached)
        for rec in records:
            if emit:
                emit(rec)
        log.info("survey (%d, %d): %d records from cache %s", lo, hi, len(records), cached)
        return SurveySummary(lo, hi, records, [], time.perf_counter() - t0)

    bounds = list(range(lo + 1, hi, CHUNK)) + [hi]
    tasks = [(a, b, hi) for a, b in zip(bounds, bounds[1:])]
    records: list[SurveyRecord] = []
    failures: list[tuple[int, str]] = []

    def consume(i: int, result) -> None:
        recs, fails = result
        for rec in recs:
            records.append(rec)
            if emit:
                emit(rec)
        for d, msg in fails:
            log.error("d = %d: %s", d, msg)
            failures.append((d, msg))
        if progress:
            progress(i + 1, len(tasks))

    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, result in enumerate(pool.map(_scan_chunk, tasks)):
                consume(i, result)
    else:
        for i, task in enumerate(tasks):
            consume(i, _scan_chunk(task))

    summary = SurveySummary(lo, hi, records, failures, time.perf_counter() - t0)
    if cached is not None and not failures:
        cached.parent.mkdir(parents=True, exist_ok=True)
        export(records, cached, "csv")
    return summary


def export(records: Iterable[SurveyRecord], target: str | os.PathLike | TextIO, fmt: str = "csv") -> None:
    """Write records as CSV (header plus one line each) or as a JSON array."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown export format {fmt!r}")
    buf = io.StringIO()
    if fmt == "csv":
        buf.write(",".join(FIELDS) + "\n")
        for rec in records:
            buf.write(rec.csv_line() + "\n")
    else:
        json.dump([asdict(r) for r in records], buf, indent=1)
        buf.write("\n")
    if hasattr(target, "write"):
        target.write(buf.getvalue())
    else:
        Path(target).write_text(buf.getvalue(), encoding="utf-8")


def read_csv(source: str | os.PathLike) -> list[SurveyRecord]:
    lines = Path(source).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != ",".join(FIELDS):
        raise ValueError(f"{source}: missing or wrong header")
    return [SurveyRecord.from_csv_line(ln) for ln in lines[1:] if ln]


@dataclass
class CellResult:
    m: int
    n: int
    diffs: list[str]
    ordered_match: bool  # computed pattern equals the prediction position by position
    seconds: float

    @property
    def passed(self) -> bool:
        return not self.diffs


@dataclass
class VerifyReport:
    cells: list[CellResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cells)

    def render(self) -> str:
        lines = []
        for c in self.cells:
            status = "pass" if c.passed else "FAIL"
            note = "" if c.passed else "  " + "; ".join(c.diffs)
            order = "ordered" if c.ordered_match else "unordered"
            lines.append(f"G({c.m},{c.n}): {status} ({order}, {c.seconds:.2f}s){note}")
        ok = sum(c.passed for c in self.cells)
        lines.append(f"{ok}/{len(self.cells)} cells pass")
        return "\n".join(lines) + "\n"


def verify(m_max: int, n_max: int, on_cell: Callable[[CellResult], None] | None = None) -> VerifyReport:
    """Compute and compare the Artin pattern of G(m,n) for 1 <= m <= m_max, 1 <= n <= n_max."""
    if m_max < 1 or n_max < 1:
        raise ValueError("verification box must be non-empty")
    if 2 ** (m_max + n_max + 3) > size_guard():
        raise SizeGuardError(f"|G({m_max},{n_max})| = 2^{m_max + n_max + 3} exceeds the size guard {size_guard()}")
    cells = []
    for m in range(1, m_max + 1):
        for n in range(1, n_max + 1):
            t = time.perf_counter()
            params = TowerParams(m, n)
            computed = artin_pattern(group_G(m, n))
            cell = CellResult(m, n, pattern_diffs(computed, params),
                              computed == predicted_pattern2(params), time.perf_counter() - t)
            cells.append(cell)
            if on_cell:
                on_cell(cell)
    return VerifyReport(cells)
