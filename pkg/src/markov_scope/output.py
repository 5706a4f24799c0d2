"""CSV and JSON writers for :class:`~markov_scope.experiments.ResultTable`.

Floats are written with 17 significant digits so every value round-trips.
"""
import io
import json
import math


def fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (list, tuple)):
        return "[" + ";".join(fmt(v) for v in value) + "]"
    if hasattr(value, "item"):  # numpy scalar
        return fmt(value.item())
    return str(value)


def _plain(value):
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def to_csv(table):
    buf = io.StringIO()
    buf.write(f"# markov-scope experiment={table.experiment} seed={table.seed}\n")
    summary = " ".join(f"{k}={fmt(v)}" for k, v in table.summary.items())
    buf.write(f"# summary {summary}\n")
    buf.write(",".join(table.columns) + "\n")
    for row in table.rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def to_json(table):
    doc = {
        "experiment": table.experiment,
        "seed": table.seed,
        "summary": {k: _plain(v) for k, v in table.summary.items()},
        "columns": list(table.columns),
        "rows": [[_plain(v) for v in row] for row in table.rows],
    }
    return json.dumps(doc) + "\n"


def render(table, output_format):
    return to_json(table) if output_format == "json" else to_csv(table)


def write(table, output_format, path=None, stream=None):
    text = render(table, output_format)
    if path is None:
        stream.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text
