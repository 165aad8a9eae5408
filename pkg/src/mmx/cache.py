"""Content-addressed Groebner-basis cache: in-memory LRU plus optional on-disk store.

On disk every basis lives in ``<cache_dir>/<hash>.gb`` written via atomic
write-rename, so concurrent processes never observe partial files.
"""
from __future__ import annotations

import logging
import os
import tempfile
import threading
from collections import OrderedDict
from pathlib import Path
from typing import List, Optional

log = logging.getLogger(__name__)

FORMAT_HEADER = "mmx-gb 1"


def _encode(amb, basis) -> str:
    from .groebner import canonical_text

    lines = [FORMAT_HEADER, f"ambient {amb.p} {amb.nvars} {amb.rank}", f"size {len(basis)}"]
    lines.extend(canonical_text(v) for v in basis)
    return "\n".join(lines) + "\n"


def _decode(text: str, amb):
    from .groebner import parse_vector_text

    lines = text.splitlines()
    if not lines or lines[0] != FORMAT_HEADER:
        raise ValueError("unknown cache format")
    p, nvars, rank = (int(x) for x in lines[1].split()[1:])
    if (p, nvars, rank) != (amb.p, amb.nvars, amb.rank):
        raise ValueError("cache entry for a different ambient")
    n = int(lines[2].split()[1])
    body = lines[3:3 + n]
    if len(body) != n:
        raise ValueError("truncated cache entry")
    return [parse_vector_text(line) for line in body]


class GbCache:
    def __init__(self, directory: Optional[os.PathLike] = None, max_entries: int = 20000):
        self._lock = threading.Lock()
        self._mem: "OrderedDict[str, list]" = OrderedDict()
        self.max_entries = max_entries
        self.directory: Optional[Path] = Path(directory) if directory else None
        self.touched: set = set()
        self.hits = 0
        self.misses = 0

    def configure(self, directory: Optional[os.PathLike]) -> None:
        self.directory = Path(directory) if directory else None
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)

    def clear_memory(self) -> None:
        with self._lock:
            self._mem.clear()

    def path_for(self, key: str) -> Path:
        assert self.directory is not None
        return self.directory / f"{key}.gb"

    def get(self, key: str, amb) -> Optional[List[dict]]:
        with self._lock:
            if key in self._mem:
                self._mem.move_to_end(key)
                self.hits += 1
                return self._mem[key]
        if self.directory is not None:
            path = self.path_for(key)
            try:
                basis = _decode(path.read_text(), amb)
            except FileNotFoundError:
                basis = None
            except (ValueError, IndexError) as exc:
                log.warning("ignoring unreadable cache entry %s: %s", path, exc)
                basis = None
            if basis is not None:
                self.touched.add(path.resolve())
                os.utime(path)
                self._remember(key, basis)
                self.hits += 1
                return basis
        self.misses += 1
        return None

    def put(self, key: str, amb, basis: List[dict]) -> None:
        self._remember(key, basis)
        if self.directory is not None:
            path = self.path_for(key)
            atomic_write(path, _encode(amb, basis))
            self.touched.add(path.resolve())

    def _remember(self, key, basis):
        with self._lock:
            self._mem[key] = basis
            self._mem.move_to_end(key)
            while len(self._mem) > self.max_entries:
                self._mem.popitem(last=False)


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def cache_gc(directory: os.PathLike, max_bytes: int, protected=None) -> int:
    """Evict least-recently-used ``*.gb`` files until the directory fits ``max_bytes``.

    Entries read or written by this process (or listed in ``protected``) are kept.
    Returns the number of evicted files.
    """
    directory = Path(directory)
    if not directory.exists():
        return 0
    keep = set(GB_CACHE.touched) | {Path(p).resolve() for p in (protected or ())}
    entries = []
    for path in directory.glob("*.gb"):
        try:
            st = path.stat()
        except FileNotFoundError:
            continue
        entries.append((st.st_mtime, st.st_size, path))
    total = sum(size for _, size, _ in entries)
    evicted = 0
    for _, size, path in sorted(entries, key=lambda e: (e[0], e[2].name)):
        if total <= max_bytes:
            break
        if path.resolve() in keep:
            continue
        try:
            path.unlink()
        except FileNotFoundError:
            pass
        total -= size
        evicted += 1
    return evicted


GB_CACHE = GbCache()
