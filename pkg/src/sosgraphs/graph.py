"""Gamma graphs: edges join vertex pairs whose difference is again a vertex.

Edge generation relies on an affine int64 encoding of doubled-coordinate
vectors: key(u) - key(v) + offset equals key(u - v) whenever coordinates
stay in range, so a block of pairwise difference tests is one subtraction
plus a binary search against the sorted vertex keys. Blocks of index
ranges are streamed, optionally through a disk spill file with an i-block
checkpoint, then assembled into CSR with sorted neighbor lists.
"""

from __future__ import annotations

import json
import os
import tempfile
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sosgraphs.roots import RootSystem, encode_rows, key_offset, orbit_closure
from sosgraphs.sos import VertexSet, vertex_set

MAGIC = b"SOSG"
FORMAT_VERSION = 1

DEFAULT_BLOCK_SIZE = 4096
# Above this many vertex pairs, edge chunks go through a disk spill file.
DEFAULT_SPILL_PAIRS = 1_000_000_000


class GraphFileError(IOError):
    """Bad magic, version mismatch, or checksum failure."""


class GammaBuildError(RuntimeError):
    """Resource exhaustion during edge generation; checkpoint is kept.

    The checkpoint directory can be passed back via spill_dir to resume
    from the last completed i-block.
    """

    def __init__(self, message: str, checkpoint: str | None):
        super().__init__(message)
        self.checkpoint = checkpoint


class _OrbitMixin:
    @property
    def n(self) -> int:
        return len(self.vertices)

    def orbit_sizes(self) -> list[int]:
        return np.bincount(self.orbit_label).tolist()

    def orbit_representatives(self) -> list[int]:
        """Lowest vertex index within each orbit label."""
        reps = {}
        for v, lab in enumerate(self.orbit_label.tolist()):
            if lab not in reps:
                reps[lab] = v
        return [reps[lab] for lab in sorted(reps)]


@dataclass
class SOSGraph(_OrbitMixin):
    """Vertices, CSR adjacency and Weyl orbit labels of one gamma graph."""

    label: str
    k: int
    vertices: VertexSet
    indptr: np.ndarray  # (n+1,) int64
    indices: np.ndarray  # (2m,) int32, sorted within each row
    orbit_label: np.ndarray  # (n,) int32

    @property
    def edge_count(self) -> int:
        return self.indices.size // 2

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]


@dataclass
class MembershipGraph(_OrbitMixin):
    """Adjacency-free view: neighborhoods computed from vertex keys on demand.

    Supports the clique and sunflower censuses without the quadratic edge
    build; stats and serialization require a full SOSGraph.
    """

    label: str
    k: int
    vertices: VertexSet
    orbit_label: np.ndarray

    def neighbors(self, v: int) -> np.ndarray:
        keys = self.vertices.keys()
        off = key_offset(self.vertices.dim)
        diff = keys[v] - keys + off
        pos = np.searchsorted(keys, diff)
        np.minimum(pos, keys.size - 1, out=pos)
        hit = keys[pos] == diff
        hit[v] = False
        return np.flatnonzero(hit).astype(np.int32)


@dataclass(frozen=True)
class GraphStats:
    n: int
    m: int
    min_degree: int
    max_degree: int
    is_regular: bool
    component_count: int
    component_sizes: tuple[int, ...]
    isolated_vertex_count: int


def _blocks(n: int, size: int):
    for start in range(0, n, size):
        yield start, min(start + size, n)


def _block_edges(keys: np.ndarray, off: int, i0: int, i1: int, block_size: int):
    """All edges (u, v) with u in [i0, i1), v > u, as one (u, v) chunk pair."""
    n = keys.size
    us: list[np.ndarray] = []
    vs: list[np.ndarray] = []
    ki = keys[i0:i1]
    for j0, j1 in _blocks(n, block_size):
        if j1 <= i0:
            continue
        kj = keys[j0:j1]
        diff = ki[:, None] - kj[None, :] + off
        flat = diff.ravel()
        pos = np.searchsorted(keys, flat)
        np.minimum(pos, n - 1, out=pos)
        hit = keys[pos] == flat
        hit = hit.reshape(diff.shape)
        r, c = np.nonzero(hit)
        u = r.astype(np.int64) + i0
        v = c.astype(np.int64) + j0
        keep = v > u
        us.append(u[keep].astype(np.int32))
        vs.append(v[keep].astype(np.int32))
    if not us:
        return np.empty(0, dtype=np.int32), np.empty(0, dtype=np.int32)
    u = np.concatenate(us)
    v = np.concatenate(vs)
    # j-blocks restart u; re-sort so chunks are u-ascending with v ascending per u
    order = np.argsort(u, kind="stable")
    return u[order], v[order]


class _SpillWriter:
    """Chunked (u, v) int32 edge stream on disk plus an i-block checkpoint."""

    def __init__(self, directory: str, meta: dict):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.spill_path = self.dir / "edges.spill"
        self.state_path = self.dir / "state.json"
        self.meta = meta

    def load_state(self) -> tuple[int, int]:
        """Return (completed i-blocks, edge count) from a matching checkpoint."""
        if self.state_path.exists():
            state = json.loads(self.state_path.read_text())
            if state.get("meta") == self.meta:
                return state["completed_blocks"], state["m"]
        if self.spill_path.exists():
            self.spill_path.unlink()
        return 0, 0

    def append(self, u: np.ndarray, v: np.ndarray, completed_blocks: int, m: int):
        with open(self.spill_path, "ab") as fh:
            fh.write(np.int64(u.size).tobytes())
            fh.write(u.astype("<i4").tobytes())
            fh.write(v.astype("<i4").tobytes())
        self.state_path.write_text(
            json.dumps({"meta": self.meta, "completed_blocks": completed_blocks, "m": m})
        )

    def read_chunks(self):
        with open(self.spill_path, "rb") as fh:
            while True:
                head = fh.read(8)
                if not head:
                    return
                count = int(np.frombuffer(head, dtype=np.int64)[0])
                u = np.frombuffer(fh.read(4 * count), dtype="<i4")
                v = np.frombuffer(fh.read(4 * count), dtype="<i4")
                yield u, v

    def cleanup(self):
        for path in (self.spill_path, self.state_path):
            if path.exists():
                path.unlink()
        try:
            self.dir.rmdir()
        except OSError:
            pass


def _fill_rows(indices: np.ndarray, cursor: np.ndarray, src: np.ndarray, dst: np.ndarray):
    """Scatter dst into CSR rows; src must be sorted (dst sorted within src)."""
    if src.size == 0:
        return
    uniq, starts, counts = np.unique(src, return_index=True, return_counts=True)
    ranks = np.arange(src.size, dtype=np.int64) - np.repeat(starts, counts)
    indices[cursor[src] + ranks] = dst
    cursor[uniq] += counts


def _assemble_csr(n: int, chunks) -> tuple[np.ndarray, np.ndarray]:
    """Two passes over (u, v) chunks; emits sorted neighbor lists.

    Relies on the block generation order: within each chunk u is ascending
    with v ascending per u, reversed edges land in already-sorted order
    when applied before forward ones.
    """
    deg = np.zeros(n, dtype=np.int64)
    for u, v in chunks():
        deg += np.bincount(u, minlength=n)
        deg += np.bincount(v, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    indices = np.empty(int(indptr[-1]), dtype=np.int32)
    cursor = indptr[:-1].copy()
    for u, v in chunks():
        order = np.argsort(v, kind="stable")
        _fill_rows(indices, cursor, v[order], u[order])
        _fill_rows(indices, cursor, u, v)
    if not np.array_equal(cursor, indptr[1:]):
        raise AssertionError("CSR fill incomplete; edge chunks out of order")
    return indptr, indices


def weyl_orbit_labels(rs: RootSystem, vertices: VertexSet) -> np.ndarray:
    """Per-vertex orbit ids under the simple-reflection closure.

    Orbits are numbered by their lex-least vertex; reflections must map
    the vertex set onto itself (they do, since SOS map to SOS).
    """
    n = len(vertices)
    labels = np.full(n, -1, dtype=np.int32)
    if n == 0:
        return labels
    keys = vertices.keys()
    orbits = orbit_closure(rs, vertices.vectors)
    for idx, orbit in enumerate(orbits):
        orb_keys = encode_rows(np.asarray(orbit, dtype=np.int64))
        pos = np.searchsorted(keys, orb_keys)
        if (pos >= n).any() or (keys[np.minimum(pos, n - 1)] != orb_keys).any():
            raise GammaBuildError(
                "reflection image escapes the vertex set; vertex set is not Weyl-closed",
                None,
            )
        labels[pos] = idx
    return labels


def membership_graph(rs: RootSystem, k: int) -> MembershipGraph:
    """Vertex set plus orbit labels, skipping the pairwise edge build."""
    vs = vertex_set(rs, k)
    return MembershipGraph(
        label=rs.label, k=k, vertices=vs, orbit_label=weyl_orbit_labels(rs, vs)
    )


def build_gamma(
    rs: RootSystem,
    k: int,
    *,
    block_size: int = DEFAULT_BLOCK_SIZE,
    spill_pairs: int = DEFAULT_SPILL_PAIRS,
    spill_dir: str | None = None,
    threads: int = 1,
) -> SOSGraph:
    """Build the gamma graph for rs at level k.

    Edges are generated in (i-block, j-block) batches; beyond spill_pairs
    vertex pairs the chunks stream through a disk spill file with a
    resumable checkpoint. The result is independent of block size.
    """
    vs = vertex_set(rs, k)
    n = len(vs)
    keys = vs.keys()
    off = key_offset(rs.ambient_dim)
    if n:
        neg_keys = np.sort(encode_rows(-vs.vectors.astype(np.int64)))
        if not np.array_equal(neg_keys, keys):
            raise GammaBuildError("vertex set not closed under negation", None)

    pairs = n * (n - 1) // 2
    use_spill = pairs > spill_pairs
    writer = None
    ram_chunks: list[tuple[np.ndarray, np.ndarray]] = []
    i_blocks = list(_blocks(n, block_size))
    start_block = 0
    m = 0
    if use_spill:
        directory = spill_dir or tempfile.mkdtemp(prefix=f"gamma-{rs.label}-{k}-")
        writer = _SpillWriter(
            directory, {"label": rs.label, "k": k, "n": n, "block_size": block_size}
        )
        start_block, m = writer.load_state()

    def run_block(bounds):
        return _block_edges(keys, off, bounds[0], bounds[1], block_size)

    try:
        todo = i_blocks[start_block:]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = pool.map(run_block, todo)
                for done, (u, v) in enumerate(results, start=start_block + 1):
                    m += u.size
                    if writer:
                        writer.append(u, v, done, m)
                    else:
                        ram_chunks.append((u, v))
        else:
            for done, bounds in enumerate(todo, start=start_block + 1):
                u, v = run_block(bounds)
                m += u.size
                if writer:
                    writer.append(u, v, done, m)
                else:
                    ram_chunks.append((u, v))
    except (MemoryError, OSError) as exc:
        raise GammaBuildError(
            f"edge generation failed ({exc!r}); partial progress checkpointed",
            str(writer.dir) if writer else None,
        ) from exc

    chunk_source = writer.read_chunks if writer else lambda: iter(ram_chunks)
    indptr, indices = _assemble_csr(n, chunk_source)
    if writer:
        writer.cleanup()
    orbit = weyl_orbit_labels(rs, vs)
    return SOSGraph(
        label=rs.label, k=k, vertices=vs, indptr=indptr, indices=indices, orbit_label=orbit
    )


def _component_labels(n: int, indptr: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Min-label propagation with pointer jumping; exact components."""
    labels = np.arange(n, dtype=np.int64)
    if indices.size == 0:
        return labels
    deg = np.diff(indptr)
    nonempty = deg > 0
    offsets = indptr[:-1][nonempty]
    while True:
        row_min = np.minimum.reduceat(labels[indices], offsets)
        updated = labels.copy()
        updated[nonempty] = np.minimum(labels[nonempty], row_min)
        while True:
            jumped = updated[updated]
            if np.array_equal(jumped, updated):
                break
            updated = jumped
        if np.array_equal(updated, labels):
            return labels
        labels = updated


def stats(g: SOSGraph) -> GraphStats:
    n = g.n
    if n == 0:
        return GraphStats(0, 0, 0, 0, True, 0, (), 0)
    deg = g.degrees()
    labels = _component_labels(n, g.indptr, g.indices)
    sizes = np.bincount(labels, minlength=0)
    sizes = tuple(sorted((int(s) for s in sizes[sizes > 0]), reverse=True))
    return GraphStats(
        n=n,
        m=g.edge_count,
        min_degree=int(deg.min()),
        max_degree=int(deg.max()),
        is_regular=bool(deg.min() == deg.max()),
        component_count=len(sizes),
        component_sizes=sizes,
        isolated_vertex_count=int((deg == 0).sum()),
    )


def edge_keys_membership(g: SOSGraph, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Vectorized edge test for index arrays u, v (difference membership)."""
    keys = g.vertices.keys()
    off = key_offset(g.vertices.dim)
    diff = keys[u] - keys[v] + off
    pos = np.searchsorted(keys, diff)
    np.minimum(pos, keys.size - 1, out=pos)
    return keys[pos] == diff


class _ChecksumWriter:
    def __init__(self, fh):
        self.fh = fh
        self.crc = 0

    def write(self, data: bytes):
        self.fh.write(data)
        self.crc = zlib.crc32(data, self.crc)


def serialize(g: SOSGraph, path) -> None:
    """Write the graph file: magic, version, header, blocks, CRC32 trailer."""
    label = g.label.encode("utf-8")
    with open(path, "wb") as fh:
        out = _ChecksumWriter(fh)
        out.write(MAGIC)
        out.write(FORMAT_VERSION.to_bytes(4, "little"))
        out.write(len(label).to_bytes(1, "little"))
        out.write(label)
        out.write(g.k.to_bytes(4, "little"))
        out.write(g.n.to_bytes(8, "little"))
        out.write(g.edge_count.to_bytes(8, "little"))
        out.write(g.vertices.dim.to_bytes(4, "little"))
        out.write(g.vertices.vectors.astype("<i4").tobytes())
        out.write(g.vertices.multiplicity.astype("<i8").tobytes())
        out.write(g.orbit_label.astype("<i4").tobytes())
        out.write(g.indptr.astype("<i8").tobytes())
        out.write(g.indices.astype("<i4").tobytes())
        fh.write(out.crc.to_bytes(4, "little"))


def _read_exact(fh, count: int) -> bytes:
    data = fh.read(count)
    if len(data) != count:
        raise GraphFileError("truncated graph file (checksum cannot match)")
    return data


def deserialize(path) -> SOSGraph:
    with open(path, "rb") as fh:
        crc = 0

        def take(count: int) -> bytes:
            nonlocal crc
            data = _read_exact(fh, count)
            crc = zlib.crc32(data, crc)
            return data

        if take(4) != MAGIC:
            raise GraphFileError("not a graph file (bad magic)")
        version = int.from_bytes(take(4), "little")
        if version != FORMAT_VERSION:
            raise GraphFileError(f"unsupported graph file version {version}")
        label_len = int.from_bytes(take(1), "little")
        label = take(label_len).decode("utf-8")
        k = int.from_bytes(take(4), "little")
        n = int.from_bytes(take(8), "little")
        m = int.from_bytes(take(8), "little")
        dim = int.from_bytes(take(4), "little")
        vectors = np.frombuffer(take(n * dim * 4), dtype="<i4").reshape(n, dim)
        multiplicity = np.frombuffer(take(n * 8), dtype="<i8")
        orbit = np.frombuffer(take(n * 4), dtype="<i4")
        indptr = np.frombuffer(take((n + 1) * 8), dtype="<i8")
        indices = np.frombuffer(take(2 * m * 4), dtype="<i4")
        stored = int.from_bytes(_read_exact(fh, 4), "little")
        if stored != crc:
            raise GraphFileError("graph file checksum mismatch")
        if fh.read(1):
            raise GraphFileError("trailing bytes after checksum")
    vs = VertexSet(
        label=label,
        k=k,
        vectors=vectors.astype(np.int32),
        multiplicity=multiplicity.astype(np.int64),
    )
    return SOSGraph(
        label=label,
        k=k,
        vertices=vs,
        indptr=indptr.astype(np.int64),
        indices=indices.astype(np.int32),
        orbit_label=orbit.astype(np.int32),
    )


def file_checksum(path) -> str:
    """Payload CRC32 (the stored trailer value); identifies file content.

    The CRC of a payload plus its own little-endian CRC is the constant
    residue 0x2144df1c, so the whole-file CRC would not discriminate.
    """
    size = os.path.getsize(path)
    if size < 4:
        raise GraphFileError("file too short to carry a checksum")
    crc = 0
    remaining = size - 4
    with open(path, "rb") as fh:
        while remaining:
            chunk = fh.read(min(1 << 20, remaining))
            if not chunk:
                raise GraphFileError("short read while checksumming")
            crc = zlib.crc32(chunk, crc)
            remaining -= len(chunk)
        trailer = int.from_bytes(fh.read(4), "little")
    if trailer != crc:
        raise GraphFileError("graph file checksum mismatch")
    return f"{crc:08x}"


def to_dot(g: SOSGraph) -> str:
    """DOT export for external drawing; vertex names list signed supports."""
    def name(row) -> str:
        parts = []
        for i, val in enumerate(row, start=1):
            if val:
                parts.append(f"{'+' if val > 0 else '-'}{i}")
        return "".join(parts) or "0"

    lines = [f'graph "{g.label}_k{g.k}" {{']
    for v in range(g.n):
        lines.append(f'  v{v} [label="{name(g.vertices.vectors[v])}"];')
    for v in range(g.n):
        for w in g.neighbors(v):
            if w > v:
                lines.append(f"  v{v} -- v{int(w)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
