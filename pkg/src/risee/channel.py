"""Rician channel generation with a counter-based, splittable random stream.

Entries of both hops are independent complex Gaussians with a deterministic
line-of-sight mean and a scattered part of the given variance,
    entry = mean + sqrt(variance / 2) * (z1 + 1j * z2),   z ~ N(0, 1).
Every draw is keyed by an explicit 64-bit seed through the Philox generator,
so a (seed, dims) pair pins the channel bit for bit on any platform.  Helper
seeds for trial grids come from SeedSequence over (master, *indices).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .model import ChannelPair, DimensionError

_MAGIC = b"RISCHN01"
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class ChannelModel:
    """Distribution parameters plus dimensions (n_ris, n_tx, n_rx)."""

    rician_mean_h: complex = 2.0 + 0.0j
    rician_mean_g: complex = 2.0 + 0.0j
    scatter_variance: float = 1.0
    dims: Tuple[int, int, int] = (100, 4, 4)

    def __post_init__(self):
        if len(self.dims) != 3 or any(int(d) < 1 for d in self.dims):
            raise DimensionError("dims must be three positive integers (n_ris, n_tx, n_rx)")
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not (np.isfinite(self.scatter_variance) and self.scatter_variance >= 0):
            raise ValueError("scatter_variance must be non-negative")
        for name in ("rician_mean_h", "rician_mean_g"):
            m = complex(getattr(self, name))
            if not (np.isfinite(m.real) and np.isfinite(m.imag)):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, m)


def sample(model: ChannelModel, seed: int) -> ChannelPair:
    """Draw one channel pair from an explicit 64-bit seed.

    Stream order is fixed: real then imaginary part of h, then real and
    imaginary part of g, so identical seeds give identical matrices even when
    the scatter variance is zero (the normals are still consumed).
    """
    seed = int(seed)
    if not (0 <= seed <= _SEED_MASK):
        raise ValueError("seed must fit in 64 bits")
    n_ris, n_tx, n_rx = model.dims
    rng = np.random.Generator(np.random.Philox(key=seed))
    scale = np.sqrt(model.scatter_variance / 2.0)
    h = model.rician_mean_h + scale * (
        rng.standard_normal((n_ris, n_tx)) + 1j * rng.standard_normal((n_ris, n_tx))
    )
    g = model.rician_mean_g + scale * (
        rng.standard_normal((n_rx, n_ris)) + 1j * rng.standard_normal((n_rx, n_ris))
    )
    return ChannelPair(h=h, g=g)


def derive_seed(master_seed: int, *indices: int) -> int:
    """64-bit child seed for a grid cell, stable across runs and platforms.

    Uses SeedSequence over the tuple (master_seed, *indices); distinct index
    tuples give statistically independent streams.
    """
    entropy = (int(master_seed) & _SEED_MASK,) + tuple(int(i) for i in indices)
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def dump_channel(path, pair: ChannelPair, seed: int = 0) -> None:
    """Write a channel pair to a small self-describing binary file.

    Layout: 8-byte magic, little-endian u32 n_ris, u32 n_tx, u32 n_rx,
    u64 seed, then the h matrix and the g matrix row-major as interleaved
    (re, im) IEEE-754 doubles.
    """
    header = _MAGIC + struct.pack(
        "<IIIQ", pair.n_ris, pair.n_tx, pair.n_rx, int(seed) & _SEED_MASK
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(pair.h, dtype="<c16").tobytes())
        fh.write(np.ascontiguousarray(pair.g, dtype="<c16").tobytes())


def load_channel(path) -> Tuple[ChannelPair, int]:
    """Read a channel file written by dump_channel; returns (pair, seed)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(_MAGIC) + 20 or blob[: len(_MAGIC)] != _MAGIC:
        raise ValueError(f"{path}: not a channel file (bad header)")
    n_ris, n_tx, n_rx, seed = struct.unpack_from("<IIIQ", blob, len(_MAGIC))
    offset = len(_MAGIC) + 20
    h_count = n_ris * n_tx
    g_count = n_rx * n_ris
    expected = offset + 16 * (h_count + g_count)
    if len(blob) != expected:
        raise ValueError(
            f"{path}: truncated or oversized payload ({len(blob)} bytes, expected {expected})"
        )
    h = np.frombuffer(blob, dtype="<c16", count=h_count, offset=offset).reshape(n_ris, n_tx)
    g = np.frombuffer(blob, dtype="<c16", count=g_count, offset=offset + 16 * h_count).reshape(
        n_rx, n_ris
    )
    return ChannelPair(h=h.astype(complex), g=g.astype(complex)), int(seed)


def channel_digest(pair: ChannelPair) -> str:
    """Short stable hex digest of the channel bytes, for pairing checks."""
    import hashlib

    md = hashlib.sha256()
    md.update(np.ascontiguousarray(pair.h, dtype="<c16").tobytes())
    md.update(np.ascontiguousarray(pair.g, dtype="<c16").tobytes())
    return md.hexdigest()[:16]
