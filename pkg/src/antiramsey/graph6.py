"""graph6 and adjacency-list text I/O."""

from __future__ import annotations

from pathlib import Path

from .graphs import Graph

HEADER = ">>graph6<<"


def _encode_n(n: int) -> bytes:
    if n < 0:
        raise ValueError("negative vertex count")
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return bytes([126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)])
    if n <= 68719476735:
        return bytes([126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)])
    raise ValueError("graph too large for graph6")


def _decode_n(data: bytes) -> tuple[int, int]:
    if data[0] != 126:
        return data[0] - 63, 1
    if len(data) > 1 and data[1] == 126:
        n = 0
        for b in data[2:8]:
            n = (n << 6) | (b - 63)
        return n, 8
    n = 0
    for b in data[1:4]:
        n = (n << 6) | (b - 63)
    return n, 4


def to_graph6_bytes(g: Graph, header: bool = False) -> bytes:
    """graph6 encoding (no trailing newline)."""
    n = g.n
    bits = bytearray()
    for j in range(1, n):
        nb = g.nbrs[j]
        for i in range(j):
            bits.append(1 if i in nb else 0)
    while len(bits) % 6:
        bits.append(0)
    body = bytes(
        63 + (bits[k] << 5 | bits[k + 1] << 4 | bits[k + 2] << 3 | bits[k + 3] << 2 | bits[k + 4] << 1 | bits[k + 5])
        for k in range(0, len(bits), 6)
    )
    out = _encode_n(n) + body
    return (HEADER.encode() + out) if header else out


def to_graph6(g: Graph) -> str:
    return to_graph6_bytes(g).decode("ascii")


def from_graph6(text: str | bytes) -> Graph:
    data = text.encode("ascii") if isinstance(text, str) else bytes(text)
    data = data.strip()
    if data.startswith(HEADER.encode()):
        data = data[len(HEADER):]
    if not data:
        raise ValueError("empty graph6 string")
    if any(b < 63 or b > 126 for b in data):
        raise ValueError("invalid graph6 character")
    n, off = _decode_n(data)
    body = data[off:]
    need = (n * (n - 1) // 2 + 5) // 6
    if len(body) != need:
        raise ValueError(f"graph6 body has {len(body)} bytes, expected {need}")
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            byte = body[k // 6] - 63
            if (byte >> (5 - k % 6)) & 1:
                edges.append((i, j))
            k += 1
    return Graph(n, edges)


def read_graph6_file(path: str | Path) -> list[Graph]:
    out = []
    for line in Path(path).read_bytes().splitlines():
        line = line.strip()
        if line:
            out.append(from_graph6(line))
    return out


def write_graph6_file(path: str | Path, graphs: list[Graph]) -> None:
    Path(path).write_bytes(b"".join(to_graph6_bytes(g) + b"\n" for g in graphs))


def to_adjacency_text(g: Graph) -> str:
    """One line per vertex: ``v: n1 n2 ...`` (fallback format)."""
    return "".join(f"{x}: {' '.join(map(str, g.adj[x]))}\n" for x in range(g.n))


def from_adjacency_text(text: str) -> Graph:
    rows = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    edges = []
    n = 0
    for ln in rows:
        head, _, rest = ln.partition(":")
        u = int(head)
        n = max(n, u + 1)
        for tok in rest.split():
            w = int(tok)
            n = max(n, w + 1)
            edges.append((u, w))
    return Graph(n, edges)
