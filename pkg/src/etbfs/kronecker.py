"""Counter-based Kronecker (R-MAT) edge generator.

Each edge draws its ``2 * scale`` uniforms from the splitmix64 sequence at
counter positions ``edge_index * 2 * scale + k``, so the output depends only on
the parameters, never on how the edge range is split across workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from etbfs.graph import RawEdgeList

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
# bytes per generated tuple: two int64 endpoints plus build_csr working space
_BYTES_PER_EDGE = 48


class ResourceError(MemoryError):
    pass


@dataclass(frozen=True)
class KroneckerParams:
    scale: int
    edgefactor: int = 16
    a: float = 0.57
    b: float = 0.19
    c: float = 0.19
    d: float = 0.05
    seed: int = 1
    #: relabel vertices with a seeded bijection, as the Graph500 generator does
    scramble: bool = True

    def __post_init__(self):
        if not 0 <= self.scale <= 48:
            raise ValueError(f"scale must be in [0, 48], got {self.scale}")
        if self.edgefactor < 1:
            raise ValueError(f"edgefactor must be >= 1, got {self.edgefactor}")
        probs = (self.a, self.b, self.c, self.d)
        if min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-12:
            raise ValueError(f"quadrant probabilities must be >= 0 and sum to 1, got {probs}")

    @property
    def vertex_count(self) -> int:
        return 1 << self.scale

    @property
    def edge_tuples(self) -> int:
        return self.edgefactor << self.scale


@numba.njit(inline="always")
def splitmix64(x):
    z = x
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@numba.njit(inline="always")
def counter_uniform(seed, counter):
    """The ``counter``-th splitmix64 output for state ``seed``, as a double in [0, 1)."""
    z = splitmix64(seed + (counter + np.uint64(1)) * GOLDEN)
    return np.float64(z >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@numba.njit(inline="always")
def _scramble(x, mask, shift, k1, k2, k3):
    # odd multiply, add and xor-shift-right are all bijections modulo 2^scale
    x = (x * k1) & mask
    x ^= x >> shift
    x = (x + k2) & mask
    x = (x * k3) & mask
    x ^= x >> shift
    return x


@numba.njit(parallel=True, cache=True)
def _generate(scale, m, seed, ab, c_norm, a_norm, scramble, keys, src, dst):
    mask = (np.uint64(1) << np.uint64(scale)) - np.uint64(1)
    shift = np.uint64(max(1, (scale + 1) // 2))
    per_edge = np.uint64(2 * scale)
    for e in numba.prange(m):
        base = np.uint64(e) * per_edge
        u = np.uint64(0)
        v = np.uint64(0)
        for lvl in range(scale):
            r1 = counter_uniform(seed, base + np.uint64(2 * lvl))
            r2 = counter_uniform(seed, base + np.uint64(2 * lvl + 1))
            ii = r1 > ab
            jj = r2 > (c_norm if ii else a_norm)
            if ii:
                u |= np.uint64(1) << np.uint64(lvl)
            if jj:
                v |= np.uint64(1) << np.uint64(lvl)
        if scramble:
            u = _scramble(u, mask, shift, keys[0], keys[1], keys[2])
            v = _scramble(v, mask, shift, keys[0], keys[1], keys[2])
        src[e] = np.int64(u)
        dst[e] = np.int64(v)


def _scramble_keys(seed: int) -> np.ndarray:
    out = []
    state = (seed ^ 0x5DEECE66D) & 0xFFFFFFFFFFFFFFFF
    for _ in range(3):
        state = (state + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        out.append(z ^ (z >> 31))
    out[0] |= 1
    out[2] |= 1
    return np.array(out, dtype=np.uint64)


def generate_kronecker(params: KroneckerParams, *, memory_limit: int | None = None) -> RawEdgeList:
    """Generate ``edgefactor * 2^scale`` edge tuples over ``2^scale`` vertices.

    Raises ResourceError before allocating if the edge arrays would not fit in
    ``memory_limit`` bytes (default: available physical memory).
    """
    m = params.edge_tuples
    need = m * _BYTES_PER_EDGE
    if memory_limit is None:
        memory_limit = _available_memory()
    if need > memory_limit:
        raise ResourceError(
            f"scale {params.scale} x edgefactor {params.edgefactor} needs ~{need / 2**30:.1f} GiB, "
            f"{memory_limit / 2**30:.1f} GiB available"
        )
    src = np.empty(m, dtype=np.int64)
    dst = np.empty(m, dtype=np.int64)
    ab = params.a + params.b
    c_norm = params.c / (1.0 - ab) if ab < 1.0 else 0.0
    a_norm = params.a / ab if ab > 0.0 else 0.0
    seed = np.uint64(params.seed & 0xFFFFFFFFFFFFFFFF)
    _generate(params.scale, m, seed, ab, c_norm, a_norm, params.scramble,
              _scramble_keys(params.seed), src, dst)
    return RawEdgeList(src, dst, params.vertex_count)


def _available_memory() -> int:
    try:
        import psutil

        return int(psutil.virtual_memory().available)
    except ImportError:  # pragma: no cover
        return 1 << 62
