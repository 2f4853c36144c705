"""CSV/JSON file formats: recordings, segments, feature tables, culling
configs, evaluation reports, survey responses, and run manifests.

All floats are written with Python's shortest round-trip representation and
all writes go through a temp-file rename, so identical runs produce
byte-identical files.
"""
from __future__ import annotations

import csv
import hashlib
import io as _stdio
import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .blink_detect import PeakCandidate, PeakSegment
from .cull_search import CullConfig, EvalReport, FeatureRow, FeatureTable
from .eda_features import EDA_FEATURE_NAMES
from .eog_features import EOG_FEATURE_NAMES
from .errors import DataFormatError
from .signal_core import Channel, Recording
from .surveys import SurveyResponse, PANAS_ITEMS, STAI_ROSTERS

#: maximum tolerated deviation of time stamps from a uniform grid, seconds
TIME_JITTER_S = 1e-6

KNOWN_FEATURE_NAMES = set(EOG_FEATURE_NAMES) | set(EDA_FEATURE_NAMES)

LABEL_POSITIVE = "blink"
LABEL_NEGATIVE = "artifact"


def _atomic_write_text(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x: float) -> str:
    return repr(float(x))


def write_recording(path: str, rec: Recording):
    buf = _stdio.StringIO()
    buf.write(f"# sample_rate_hz={_fmt(rec.sample_rate_hz)}\n")
    buf.write(f"# channel={rec.channel.value}\n")
    buf.write("t_s,value\n")
    fs = rec.sample_rate_hz
    for i, v in enumerate(rec.samples):
        buf.write(f"{_fmt(i / fs)},{_fmt(v)}\n")
    _atomic_write_text(path, buf.getvalue())


def read_recording(path: str) -> Recording:
    meta: dict[str, str] = {}
    rows: list[tuple[int, list[str]]] = []
    header: list[str] | None = None
    with open(path, newline="") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    meta[key.strip()] = value.strip()
                continue
            cells = next(csv.reader([line]))
            if header is None:
                header = [c.strip() for c in cells]
                continue
            rows.append((lineno, cells))
    if header is None or not rows:
        raise DataFormatError(f"{path}: no data rows")
    try:
        t_col = header.index("t_s")
    except ValueError:
        t_col = None
    try:
        v_col = header.index("value")
    except ValueError:
        raise DataFormatError(f"{path}: missing 'value' column") from None

    values = np.empty(len(rows))
    times = np.empty(len(rows)) if t_col is not None else None
    for i, (lineno, cells) in enumerate(rows):
        try:
            values[i] = float(cells[v_col])
            if times is not None:
                times[i] = float(cells[t_col])
        except (ValueError, IndexError):
            raise DataFormatError(
                f"{path}: line {lineno}: malformed row {cells!r}"
            ) from None
    if not np.all(np.isfinite(values)):
        raise DataFormatError(f"{path}: non-finite sample values")

    if "sample_rate_hz" in meta:
        fs = float(meta["sample_rate_hz"])
    elif times is not None:
        steps = np.diff(times)
        if steps.size == 0 or np.any(steps <= 0):
            raise DataFormatError(f"{path}: t_s must be strictly increasing")
        fs = 1.0 / float(np.median(steps))
    else:
        raise DataFormatError(
            f"{path}: need a t_s column or a '# sample_rate_hz=' line"
        )
    if times is not None:
        expected = times[0] + np.arange(len(rows)) / fs
        dev = np.abs(times - expected)
        if np.any(dev > TIME_JITTER_S):
            bad = int(np.argmax(dev > TIME_JITTER_S))
            raise DataFormatError(
                f"{path}: line {rows[bad][0]}: non-uniform sampling "
                f"(deviation {dev[bad]:.3g}s exceeds {TIME_JITTER_S}s)"
            )
    channel = Channel(meta.get("channel", "EOG"))
    return Recording(fs, values, channel)


SEGMENT_COLUMNS = (
    "id", "center_index", "center_time_s", "height", "prominence", "width_s",
    "left_base_index", "right_base_index", "edge_truncated",
)


def write_segments(path: str, segments: list[PeakSegment], sample_rate_hz: float):
    buf = _stdio.StringIO()
    buf.write(f"# sample_rate_hz={_fmt(sample_rate_hz)}\n")
    buf.write(",".join(SEGMENT_COLUMNS) + "\n")
    for i, seg in enumerate(segments):
        c = seg.candidate
        buf.write(",".join([
            str(i),
            str(c.center_index),
            _fmt(c.center_index / sample_rate_hz),
            _fmt(c.height),
            _fmt(c.prominence),
            _fmt(c.width_s),
            str(seg.left_base_index),
            str(seg.right_base_index),
            "1" if seg.edge_truncated else "0",
        ]) + "\n")
    _atomic_write_text(path, buf.getvalue())


def read_segments(path: str, rec: Recording) -> list[PeakSegment]:
    segments = []
    with open(path, newline="") as handle:
        header = None
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            cells = next(csv.reader([line]))
            if header is None:
                header = cells
                if tuple(header) != SEGMENT_COLUMNS:
                    raise DataFormatError(
                        f"{path}: unexpected segment columns {header!r}"
                    )
                continue
            try:
                row = dict(zip(header, cells))
                cand = PeakCandidate(
                    center_index=int(row["center_index"]),
                    height=float(row["height"]),
                    prominence=float(row["prominence"]),
                    width_s=float(row["width_s"]),
                )
                left = int(row["left_base_index"])
                right = int(row["right_base_index"])
                segments.append(PeakSegment(
                    candidate=cand,
                    left_base_index=left,
                    right_base_index=right,
                    slice=rec.samples[left:right + 1],
                    sample_rate_hz=rec.sample_rate_hz,
                    edge_truncated=row["edge_truncated"] == "1",
                ))
            except (KeyError, ValueError) as exc:
                raise DataFormatError(
                    f"{path}: line {lineno}: {exc}"
                ) from None
    return segments


def write_feature_table(path: str, table: FeatureTable):
    has_labels = table.has_labels()
    buf = _stdio.StringIO()
    header = ["id", *table.feature_names]
    if has_labels:
        header.append("label")
    buf.write(",".join(header) + "\n")
    for row in table.rows:
        cells = [row.id] + [_fmt(row.values[f]) for f in table.feature_names]
        if has_labels:
            cells.append(LABEL_POSITIVE if row.label else LABEL_NEGATIVE)
        buf.write(",".join(cells) + "\n")
    _atomic_write_text(path, buf.getvalue())


def read_feature_table(path: str, require_known_names: bool = True) -> FeatureTable:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        if not header or header[0] != "id":
            raise DataFormatError(f"{path}: first column must be 'id'")
        has_label = header[-1] == "label"
        names = header[1:-1] if has_label else header[1:]
        if not names:
            raise DataFormatError(f"{path}: no feature columns")
        if require_known_names:
            unknown = [n for n in names if n not in KNOWN_FEATURE_NAMES]
            if unknown:
                raise DataFormatError(
                    f"{path}: unknown feature columns {unknown!r}"
                )
        rows = []
        for lineno, cells in enumerate(reader, start=2):
            if not cells:
                continue
            expected = 1 + len(names) + (1 if has_label else 0)
            if len(cells) != expected:
                raise DataFormatError(
                    f"{path}: line {lineno}: expected {expected} cells, "
                    f"got {len(cells)}"
                )
            try:
                values = {n: float(c) for n, c in zip(names, cells[1:])}
            except ValueError:
                raise DataFormatError(
                    f"{path}: line {lineno}: non-numeric feature cell"
                ) from None
            if not all(np.isfinite(v) for v in values.values()):
                raise DataFormatError(
                    f"{path}: line {lineno}: non-finite feature value"
                )
            label = None
            if has_label:
                text = cells[-1].strip()
                if text not in (LABEL_POSITIVE, LABEL_NEGATIVE):
                    raise DataFormatError(
                        f"{path}: line {lineno}: label must be "
                        f"'{LABEL_POSITIVE}' or '{LABEL_NEGATIVE}', got {text!r}"
                    )
                label = text == LABEL_POSITIVE
            rows.append(FeatureRow(cells[0], values, label))
    return FeatureTable(names, rows)


def write_cull_config(path: str, cfg: CullConfig):
    _atomic_write_text(path, json.dumps(cfg.to_jsonable(), indent=2,
                                        sort_keys=True) + "\n")


def read_cull_config(path: str) -> CullConfig:
    with open(path) as handle:
        try:
            obj = json.load(handle)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise DataFormatError(f"{path}: expected a JSON object")
    return CullConfig.from_jsonable(obj)


def write_eval_report(path: str, report: EvalReport):
    _atomic_write_text(path, json.dumps(report.to_jsonable(), indent=2,
                                        sort_keys=True) + "\n")


def read_survey_responses(path: str) -> dict[tuple[str, str], SurveyResponse]:
    """Load a long-format response file: participant_id,stage,item,value."""
    stai_names = {name for roster in STAI_ROSTERS.values() for name, _ in roster}
    panas: dict[tuple[str, str], dict[str, int]] = {}
    stai: dict[tuple[str, str], dict[str, int]] = {}
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        if [h.strip() for h in header] != ["participant_id", "stage", "item", "value"]:
            raise DataFormatError(
                f"{path}: header must be participant_id,stage,item,value"
            )
        for lineno, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != 4:
                raise DataFormatError(f"{path}: line {lineno}: expected 4 cells")
            pid, stage, item, value = (c.strip() for c in cells)
            if stage not in ("Baseline", "CPT", "Recovery"):
                raise DataFormatError(
                    f"{path}: line {lineno}: stage must be Baseline, CPT, "
                    f"or Recovery, got {stage!r}"
                )
            try:
                ivalue = int(value)
            except ValueError:
                raise DataFormatError(
                    f"{path}: line {lineno}: value must be an integer"
                ) from None
            key = (pid, stage)
            if item in PANAS_ITEMS:
                panas.setdefault(key, {})[item] = ivalue
            elif item in stai_names:
                stai.setdefault(key, {})[item] = ivalue
            else:
                raise DataFormatError(
                    f"{path}: line {lineno}: unknown survey item {item!r}"
                )
    out = {}
    for key in sorted(set(panas) | set(stai)):
        out[key] = SurveyResponse(
            panas_items=panas.get(key, {}),
            stai_items=stai.get(key, {}),
        )
    return out


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(primary_output: str, command: str, parameters: dict,
                   inputs: list[str], outputs: list[str],
                   seed: int | None, version: str):
    manifest = {
        "command": command,
        "parameters": parameters,
        "inputs": {os.path.basename(p): sha256_file(p) for p in inputs},
        "outputs": [os.path.basename(p) for p in outputs],
        "seed": seed,
        "version": version,
    }
    path = primary_output + ".manifest.json"
    _atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
