"""Text edge lists and CSV outputs."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyGraphError, InvalidArgument, ParseError
from .graph import Graph, largest_component

NODE_DIRECTIVE = "node:"


@dataclass(frozen=True)
class EdgeListFormat:
    """How an edge list is laid out.

    ``delimiter`` is ``"whitespace"`` or ``"comma"``. When ``weighted`` is
    true every line must carry a third token with a positive weight; when it
    is false a third token is ignored. ``header`` skips the first data line
    (e.g. the ``id_1,id_2`` header of the musae CSV files).
    """

    delimiter: str = "whitespace"
    weighted: bool = False
    comment_prefix: str = "#"
    header: bool = False

    def __post_init__(self):
        if self.delimiter not in ("whitespace", "comma"):
            raise InvalidArgument(f"unknown delimiter {self.delimiter!r}")
        if len(self.comment_prefix) != 1:
            raise InvalidArgument("comment_prefix must be a single character")

    def split(self, line: str) -> list[str]:
        if self.delimiter == "comma":
            return [t.strip() for t in line.split(",")]
        return line.split()

    @property
    def sep(self) -> str:
        return "," if self.delimiter == "comma" else " "


def load_edge_list(stream, fmt: EdgeListFormat = EdgeListFormat(), keep_largest_component=False) -> Graph:
    """Parse an edge list into a :class:`Graph` with densified ids.

    Ids follow the order in which labels first appear. Comment lines of the
    form ``# node: <label>`` declare isolated nodes (written by
    :func:`write_edge_list`); other comments are ignored.
    """
    index: dict[str, int] = {}
    labels: list[str] = []

    def node(label):
        i = index.get(label)
        if i is None:
            i = index[label] = len(labels)
            labels.append(label)
        return i

    us, vs, ws = [], [], []
    header_pending = fmt.header
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(fmt.comment_prefix):
            body = line[1:].strip()
            if body.startswith(NODE_DIRECTIVE):
                token = body[len(NODE_DIRECTIVE):].strip()
                if not token:
                    raise ParseError("empty node directive", lineno)
                node(token)
            continue
        if header_pending:
            header_pending = False
            continue
        tokens = fmt.split(line)
        if len(tokens) not in (2, 3) or (fmt.weighted and len(tokens) != 3) or not all(tokens):
            raise ParseError(f"expected 'u v{' w' if fmt.weighted else ''}', got {line!r}", lineno)
        w = 1.0
        if fmt.weighted:
            try:
                w = float(tokens[2])
            except ValueError:
                raise ParseError(f"bad weight {tokens[2]!r}", lineno) from None
            if not (math.isfinite(w) and w > 0):
                raise ParseError(f"weight must be finite and positive, got {tokens[2]!r}", lineno)
        us.append(node(tokens[0]))
        vs.append(node(tokens[1]))
        ws.append(w)
    if not labels:
        raise EmptyGraphError("edge list contains no nodes")
    g = Graph._from_arrays(len(labels), np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64),
                           np.array(ws, dtype=np.float64), labels=labels)
    return largest_component(g) if keep_largest_component else g


def read_edge_list(path, fmt: EdgeListFormat = EdgeListFormat(), keep_largest_component=False) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh, fmt, keep_largest_component)


def write_edge_list(g: Graph, stream, fmt: EdgeListFormat = EdgeListFormat()) -> None:
    """Write each undirected edge once, lower id first, in sorted order.

    A ``# nodes: N edges: M`` header comment comes first, followed by one
    ``# node: <label>`` line per isolated node so that a round trip keeps them.
    """
    sep = fmt.sep
    c = fmt.comment_prefix
    stream.write(f"{c} nodes: {g.node_count} edges: {g.edge_count}\n")
    deg = g.degrees()
    for v in np.flatnonzero(deg == 0).tolist():
        stream.write(f"{c} {NODE_DIRECTIVE} {g.label(v)}\n")
    for e in g.edges():
        if fmt.weighted:
            stream.write(f"{g.label(e.source)}{sep}{g.label(e.target)}{sep}{e.weight!r}\n")
        else:
            stream.write(f"{g.label(e.source)}{sep}{g.label(e.target)}\n")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(stream, header, rows) -> None:
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(v) for v in row) + "\n")


def write_metrics_csv(report, stream) -> None:
    """One ``metric,value`` row per metric, in the report's canonical order."""
    write_csv(stream, ["metric", "value"], report.rows())


def write_histogram_csv(hist: dict, stream) -> None:
    write_csv(stream, ["degree", "count"], sorted(hist.items()))


def write_partition_csv(g: Graph, partition, stream) -> None:
    write_csv(stream, ["node", "community"],
              ((g.label(v), int(c)) for v, c in enumerate(partition.assignment)))
