import hashlib
import json
import logging
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from django.conf import settings
from scipy.stats import qmc

from .reports import canonical_json

logger = logging.getLogger("verification")


def workers() -> int:
    return max(1, int(getattr(settings, "METALIFT_WORKERS", 1)))


def ordered_map(func, items):
    """map over a thread pool; results come back in item order whatever the worker count."""
    items = list(items)
    count = workers()
    if count == 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(func, items))


def max_defect(values) -> float:
    """Ordered max reduction; nan propagates as inf so it can never pass."""
    out = 0.0
    for value in values:
        value = float(value)
        if value != value:
            return float("inf")
        out = max(out, value)
    return out


def config_hash(config) -> str:
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()[:16]


def rng_for(seed: int, *labels) -> np.random.Generator:
    """A generator keyed by the seed and a check label, independent of run order."""
    words = [int(seed)] + [int.from_bytes(hashlib.sha256(str(l).encode()).digest()[:4], "little") for l in labels]
    return np.random.default_rng(words)


def sample_band_points(count: int, seed: int, n_bands: int):
    """
    `count` scrambled Sobol points in (0, 1] plus the midpoints of the first
    n_bands dyadic bands (2^-n, 2^-n+1].
    """
    sampler = qmc.Sobol(d=1, scramble=True, seed=seed)
    m = max(0, int(np.ceil(np.log2(max(count, 1)))))
    points = 1.0 - sampler.random_base2(m)[:count, 0]
    midpoints = 1.5 * 2.0 ** -np.arange(1, n_bands + 1)
    return np.concatenate([points, midpoints])


def parse_range(text: str):
    """'a..b' -> (a, b) inclusive integers."""
    try:
        lo, hi = (int(v) for v in str(text).split(".."))
    except ValueError:
        raise ValueError(f"expected a range like -2..2, got {text!r}")
    if lo > hi:
        raise ValueError(f"range start {lo} exceeds end {hi}")
    return lo, hi


def parse_floats(text: str):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"expected a comma list of numbers, got {text!r}")


def write_atomic(path, text: str) -> Path:
    """Write then rename, so readers never see a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info("wrote %s", path)
    return path


def load_json(path):
    with open(path, encoding="utf-8") as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as e:
            raise ValueError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}")


def parse_expansion(text: str):
    """'0,0' or '0,0:0.6;1,0:0.8' -> [{"key": [0, 0], "coef_re": 0.6}, ...]."""
    terms = []
    for part in str(text).split(";"):
        part = part.strip()
        if not part:
            continue
        key, _, coef = part.partition(":")
        try:
            terms.append({"key": [int(v) for v in key.split(",")], "coef_re": float(coef) if coef else 1.0})
        except ValueError:
            raise ValueError(f"expected terms like 0,0:0.6;1,0:0.8, got {text!r}")
    return terms
