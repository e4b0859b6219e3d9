"""JSON and CSV formats for contexts, transition matrices, and fit targets."""

import csv
import io
import json
from pathlib import Path

import numpy as np

from .contexts import Context, TransitionMatrix
from .exceptions import DimensionMismatch, InvalidTarget, ModalQMError
from .linalg import matrix_from_json, matrix_to_json


def fmt(x):
    """15 significant digits, the fixed precision of every text output."""
    return f"{float(x) + 0.0:.15g}"


def round15(obj):
    """Recursively round floats in a JSON-able object to 15 significant digits."""
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: round15(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round15(v) for v in obj]
    return obj


def dumps(obj):
    return json.dumps(round15(obj), indent=2) + "\n"


def context_to_json(ctx):
    return {
        "id": ctx.id,
        "dim": ctx.dim,
        "basis": matrix_to_json(ctx.basis),
        "labels": list(ctx.labels),
    }


def context_from_json(obj):
    try:
        ctx = Context(obj["id"], matrix_from_json(obj["basis"]), obj.get("labels"))
    except (KeyError, TypeError) as exc:
        raise DimensionMismatch(f"malformed context JSON: {exc}") from exc
    if "dim" in obj and int(obj["dim"]) != ctx.dim:
        raise DimensionMismatch(f"declared dim {obj['dim']} but basis is {ctx.dim}x{ctx.dim}")
    return ctx


def save_context(ctx, path):
    Path(path).write_text(json.dumps(context_to_json(ctx), indent=2) + "\n")


def load_context(path):
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModalQMError(f"{path}: invalid JSON ({exc})") from exc
    return context_from_json(obj)


def transition_to_csv(tm):
    lines = [f"# source={tm.source_context} target={tm.target_context}"]
    lines += [",".join(fmt(x) for x in row) for row in tm.probs]
    return "\n".join(lines) + "\n"


def transition_from_csv(text):
    lines = text.strip().splitlines()
    header = lines[0]
    if not header.startswith("#"):
        raise DimensionMismatch("missing '# source=... target=...' header")
    fields = dict(part.split("=", 1) for part in header[1:].split() if "=" in part)
    probs = read_matrix_csv("\n".join(lines[1:]))
    return TransitionMatrix(fields.get("source", ""), fields.get("target", ""), probs)


def read_matrix_csv(text):
    """Parse N comma-separated rows of N numbers; ``#`` lines are skipped."""
    rows = []
    for rec in csv.reader(io.StringIO(text)):
        if not rec or rec[0].lstrip().startswith("#"):
            continue
        try:
            rows.append([float(x) for x in rec])
        except ValueError as exc:
            raise InvalidTarget(f"non-numeric entry: {exc}") from exc
    if not rows or any(len(r) != len(rows) for r in rows):
        raise InvalidTarget("target must have N rows of N entries")
    return np.array(rows)


def write_matrix_csv(M):
    return "\n".join(",".join(fmt(x) for x in row) for row in np.asarray(M)) + "\n"


def histogram_csv(result):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["outcome_tuple", "count", "frequency"])
    for key, count, freq in result.histogram_rows():
        writer.writerow([key, count, fmt(freq)])
    return buf.getvalue()


def rows_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()
