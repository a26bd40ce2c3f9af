import numpy as np

# lattice indices may be negative; shift them into the counter space
_INDEX_OFFSET = 1 << 62
_LANES = 4


def _key(seed: int, stream: int) -> np.ndarray:
    return np.random.SeedSequence([int(seed), int(stream)]).generate_state(2, dtype=np.uint64)


def counter_raw(seed: int, stream: int, start: int, count: int) -> np.ndarray:
    """
    64-bit Philox outputs for lattice indices start .. start + count - 1.

    Output n depends only on (seed, stream, n), so any slice of a stream
    can be regenerated without touching the rest.
    """
    if count <= 0:
        return np.empty(0, dtype=np.uint64)

    block, lane = divmod(int(start) + _INDEX_OFFSET, _LANES)
    counter = np.array([block, 0, 0, 0], dtype=np.uint64)
    bitgen = np.random.Philox(counter=counter, key=_key(seed, stream))
    return bitgen.random_raw(lane + int(count))[lane:]


def counter_uniforms(seed: int, stream: int, start: int, count: int) -> np.ndarray:
    """
    Uniforms in the open interval (0, 1), 53 bits each.
    """
    raw = counter_raw(seed, stream, start, count)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * (1.0 / (1 << 53))
