"""Threshold culling: the bound classifier, its evaluator, and the two
bound-search algorithms (per-feature two-phase scan and exhaustive
breadth-first traversal over a discretized bound grid).

A row is predicted positive (blink) when every configured feature value
falls inside its inclusive [lower, upper] interval; failing any bound culls
the row (artifact). Grid bounds are always materialized as ``min + k*delta``
or ``max - k*delta`` so results are reproducible bit for bit.
"""
from __future__ import annotations

import itertools
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InvalidArgumentError, InvalidInputError

#: densest visited-set representation allowed before falling back to a hash set
_DENSE_VISITED_LIMIT = 1 << 27


@dataclass(frozen=True)
class FeatureRow:
    id: str
    values: dict[str, float]
    label: bool | None = None


class FeatureTable:
    """Rows of named feature values with optional binary labels."""

    def __init__(self, feature_names, rows):
        self.feature_names: tuple[str, ...] = tuple(feature_names)
        self.rows: list[FeatureRow] = list(rows)
        names = set(self.feature_names)
        for row in self.rows:
            if set(row.values) != names:
                raise InvalidInputError(
                    f"row {row.id!r} does not match the table's feature names"
                )

    def __len__(self) -> int:
        return len(self.rows)

    @classmethod
    def from_arrays(cls, feature_names, X, y=None, ids=None) -> "FeatureTable":
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != len(feature_names):
            raise InvalidInputError("X must be 2-D with one column per feature")
        names = list(feature_names)
        rows = []
        for i in range(X.shape[0]):
            label = None if y is None else bool(y[i])
            row_id = str(i) if ids is None else str(ids[i])
            rows.append(FeatureRow(row_id, dict(zip(names, X[i])), label))
        return cls(names, rows)

    def matrix(self, features=None) -> np.ndarray:
        feats = list(features) if features is not None else list(self.feature_names)
        unknown = [f for f in feats if f not in self.feature_names]
        if unknown:
            raise ConfigError(f"unknown features: {unknown}")
        return np.array([[row.values[f] for f in feats] for row in self.rows],
                        dtype=float)

    def labels(self) -> np.ndarray:
        if any(row.label is None for row in self.rows):
            raise InvalidInputError("table has unlabeled rows")
        return np.array([row.label for row in self.rows], dtype=bool)

    def has_labels(self) -> bool:
        return all(row.label is not None for row in self.rows)

    def subset(self, mask) -> "FeatureTable":
        mask = np.asarray(mask, dtype=bool)
        return FeatureTable(self.feature_names,
                            [r for r, keep in zip(self.rows, mask) if keep])


def concat_tables(tables) -> FeatureTable:
    tables = list(tables)
    if not tables:
        raise InvalidInputError("need at least one table")
    names = tables[0].feature_names
    for t in tables[1:]:
        if t.feature_names != names:
            raise InvalidInputError("tables have mismatched feature names")
    rows = [r for t in tables for r in t.rows]
    return FeatureTable(names, rows)


@dataclass(frozen=True)
class CullConfig:
    bounds: dict[str, tuple[float, float]]

    def __post_init__(self):
        for name, (lo, hi) in self.bounds.items():
            if not (lo <= hi):
                raise ConfigError(f"bound for {name!r} has lower > upper")

    def to_jsonable(self) -> dict:
        return {name: [lo, hi] for name, (lo, hi) in self.bounds.items()}

    @classmethod
    def from_jsonable(cls, obj: dict) -> "CullConfig":
        return cls({name: (float(v[0]), float(v[1])) for name, v in obj.items()})


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    tn: int
    fn: int
    accuracy: float = field(init=False)
    f1: float = field(init=False)

    def __post_init__(self):
        total = self.tp + self.fp + self.tn + self.fn
        if total <= 0:
            raise InvalidInputError("empty evaluation")
        object.__setattr__(self, "accuracy", (self.tp + self.tn) / total)
        denom = 2 * self.tp + self.fp + self.fn
        object.__setattr__(self, "f1", (2 * self.tp / denom) if denom else 0.0)

    def to_jsonable(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
                "accuracy": self.accuracy, "f1": self.f1}


def apply_bounds(table: FeatureTable, cfg: CullConfig) -> np.ndarray:
    """Predicted labels: True (blink) where all configured bounds hold."""
    for name in cfg.bounds:
        if name not in table.feature_names:
            raise ConfigError(f"config references unknown feature {name!r}")
    preds = np.ones(len(table), dtype=bool)
    if not cfg.bounds:
        return preds
    feats = list(cfg.bounds)
    mat = table.matrix(feats)
    for col, name in enumerate(feats):
        lo, hi = cfg.bounds[name]
        preds &= (mat[:, col] >= lo) & (mat[:, col] <= hi)
    return preds


def evaluate(predictions, labels) -> EvalReport:
    """Confusion counts with blink as the positive class."""
    pred = np.asarray(predictions, dtype=bool)
    lab = np.asarray(labels, dtype=bool)
    if pred.shape != lab.shape:
        raise InvalidInputError(
            f"length mismatch: {pred.shape} predictions vs {lab.shape} labels"
        )
    tp = int(np.count_nonzero(pred & lab))
    fp = int(np.count_nonzero(pred & ~lab))
    tn = int(np.count_nonzero(~pred & ~lab))
    fn = int(np.count_nonzero(~pred & lab))
    return EvalReport(tp=tp, fp=fp, tn=tn, fn=fn)


def _count_report(pred: np.ndarray, lab: np.ndarray) -> EvalReport:
    tp = int(np.count_nonzero(pred & lab))
    predicted_pos = int(np.count_nonzero(pred))
    pos = int(np.count_nonzero(lab))
    fp = predicted_pos - tp
    fn = pos - tp
    tn = lab.size - tp - fp - fn
    return EvalReport(tp=tp, fp=fp, tn=tn, fn=fn)


def individual_search(table: FeatureTable, feature: str,
                      bins: int = 50) -> tuple[float, float, EvalReport]:
    """Two-phase greedy bound scan for a single feature.

    The feature range is split into ``bins`` equal steps. Phase one sweeps
    the lower bound upward from the minimum and keeps the
    accuracy-maximizing value (earliest candidate wins ties); phase two then
    sweeps the upper bound downward from the maximum to that lower bound the
    same way. This is deliberately the sequential greedy, not a joint grid
    search.
    """
    if bins < 1:
        raise InvalidArgumentError("bins must be positive")
    if len(table) == 0:
        raise InvalidInputError("empty table")
    col = table.matrix([feature])[:, 0]
    lab = table.labels()
    fmin = float(col.min())
    fmax = float(col.max())
    if fmin == fmax:
        return fmin, fmax, _count_report(np.ones_like(lab), lab)
    delta = (fmax - fmin) / bins

    best_k = 0
    best_acc = -1.0
    for k in range(bins + 1):
        lower = fmin + k * delta
        acc = _count_report(col >= lower, lab).accuracy
        if acc > best_acc:
            best_acc, best_k = acc, k
    lower = fmin + best_k * delta

    best_j = 0
    best_acc = -1.0
    best_report = None
    for j in range(bins - best_k + 1):
        upper = fmax - j * delta
        report = _count_report((col >= lower) & (col <= upper), lab)
        if report.accuracy > best_acc:
            best_acc, best_j, best_report = report.accuracy, j, report
    upper = fmax - best_j * delta
    return lower, upper, best_report


def individual_search_all(table: FeatureTable, features=None,
                          bins: int = 50) -> tuple[CullConfig, EvalReport]:
    """Run the per-feature scan independently and compile every optimized
    bound pair into one culling configuration."""
    feats = list(features) if features is not None else list(table.feature_names)
    bounds = {}
    for f in feats:
        lo, hi, _ = individual_search(table, f, bins=bins)
        bounds[f] = (lo, hi)
    cfg = CullConfig(bounds)
    report = evaluate(apply_bounds(table, cfg), table.labels())
    return cfg, report


class _GridSpace:
    """Integer-coordinate view of the bound grid for one feature set."""

    def __init__(self, table: FeatureTable, features, bins: int):
        self.features = list(features)
        self.bins = bins
        mat = table.matrix(self.features)
        self.mins = mat.min(axis=0)
        self.maxs = mat.max(axis=0)
        self.deltas = (self.maxs - self.mins) / bins
        self.columns = [mat[:, i] for i in range(len(self.features))]
        self.labels = table.labels()
        self.pos = int(np.count_nonzero(self.labels))
        self.n = self.labels.size
        # triangular packing of (lo, hi) pairs with lo + hi <= bins
        self.pair_count = (bins + 1) * (bins + 2) // 2
        self.pair_id = {}
        self.pair_decode = []
        for lo in range(bins + 1):
            for hi in range(bins + 1 - lo):
                self.pair_id[(lo, hi)] = len(self.pair_decode)
                self.pair_decode.append((lo, hi))
        self._mask_cache = [dict() for _ in self.features]

    def state_count(self) -> int:
        return self.pair_count ** len(self.features)

    def encode(self, coords) -> int:
        sid = 0
        for pair in reversed(coords):
            sid = sid * self.pair_count + self.pair_id[pair]
        return sid

    def decode(self, sid: int) -> list[tuple[int, int]]:
        coords = []
        for _ in self.features:
            sid, rem = divmod(sid, self.pair_count)
            coords.append(self.pair_decode[rem])
        return coords

    def mask(self, f_idx: int, pair: tuple[int, int]) -> np.ndarray:
        cached = self._mask_cache[f_idx].get(pair)
        if cached is None:
            lo, hi = pair
            lower = self.mins[f_idx] + lo * self.deltas[f_idx]
            upper = self.maxs[f_idx] - hi * self.deltas[f_idx]
            col = self.columns[f_idx]
            cached = (col >= lower) & (col <= upper)
            self._mask_cache[f_idx][pair] = cached
        return cached

    def predictions(self, coords) -> np.ndarray:
        pred = self.mask(0, coords[0])
        for f_idx in range(1, len(coords)):
            pred = pred & self.mask(f_idx, coords[f_idx])
        return pred

    def counts(self, coords) -> tuple[int, int, int, int]:
        pred = self.predictions(coords)
        tp = int(np.count_nonzero(pred & self.labels))
        predicted_pos = int(np.count_nonzero(pred))
        fp = predicted_pos - tp
        fn = self.pos - tp
        tn = self.n - tp - fp - fn
        return tp, fp, tn, fn

    def config(self, coords) -> CullConfig:
        bounds = {}
        for f_idx, (lo, hi) in enumerate(coords):
            bounds[self.features[f_idx]] = (
                float(self.mins[f_idx] + lo * self.deltas[f_idx]),
                float(self.maxs[f_idx] - hi * self.deltas[f_idx]),
            )
        return CullConfig(bounds)


def _score_key(tp, fp, tn, fn, coords):
    total = tp + fp + tn + fn
    acc = (tp + tn) / total
    denom = 2 * tp + fp + fn
    f1 = (2 * tp / denom) if denom else 0.0
    steps = sum(lo + hi for lo, hi in coords)
    flat = tuple(v for pair in coords for v in pair)
    # higher accuracy, then higher F1, then fewer steps, then smaller coords
    return (acc, f1, -steps, tuple(-v for v in flat))


def bfs_search(table: FeatureTable, features, bins: int = 15
               ) -> tuple[CullConfig, EvalReport]:
    """Exhaustive breadth-first traversal over bound configurations.

    Starts from the full observed range of every feature (nothing culled)
    and repeatedly tightens exactly one bound of one feature by that
    feature's step; every unvisited neighbor is enqueued regardless of
    whether it improves, so the whole reachable grid is evaluated. Ties on
    accuracy prefer higher F1, then fewer tightening steps, then
    lexicographically smaller grid coordinates.

    The grid has ((bins+1)(bins+2)/2)^n_features states; cost is
    exponential in the feature count.
    """
    feats = sorted(features) if isinstance(features, (set, frozenset)) else list(features)
    if not feats:
        raise InvalidArgumentError("features must be non-empty")
    if bins < 2:
        raise InvalidArgumentError("bins must be at least 2")
    labels = table.labels()
    if not (labels.any() and (~labels).any()):
        raise InvalidInputError("bound search requires both classes present")

    space = _GridSpace(table, feats, bins)
    n_states = space.state_count()
    if n_states <= _DENSE_VISITED_LIMIT:
        visited = np.zeros(n_states, dtype=bool)

        def seen(sid):
            if visited[sid]:
                return True
            visited[sid] = True
            return False
    else:
        visited_set = set()

        def seen(sid):
            if sid in visited_set:
                return True
            visited_set.add(sid)
            return False

    root = [(0, 0)] * len(feats)
    queue = deque([space.encode(root)])
    seen(queue[0])
    best_key = None
    best_coords = None
    best_counts = None

    while queue:
        sid = queue.popleft()
        coords = space.decode(sid)
        tp, fp, tn, fn = space.counts(coords)
        key = _score_key(tp, fp, tn, fn, coords)
        if best_key is None or key > best_key:
            best_key, best_coords, best_counts = key, coords, (tp, fp, tn, fn)
        for f_idx, (lo, hi) in enumerate(coords):
            if lo + hi < bins:
                for pair in ((lo + 1, hi), (lo, hi + 1)):
                    neighbor = list(coords)
                    neighbor[f_idx] = pair
                    nid = space.encode(neighbor)
                    if not seen(nid):
                        queue.append(nid)

    tp, fp, tn, fn = best_counts
    return space.config(best_coords), EvalReport(tp=tp, fp=fp, tn=tn, fn=fn)


def combination_sweep(table: FeatureTable, k: int = 5, candidates=None,
                      bins: int = 15, max_workers: int = 1
                      ) -> list[tuple[tuple[str, ...], CullConfig, EvalReport]]:
    """Run :func:`bfs_search` on every k-subset of the candidate features.

    Results are sorted by (accuracy, F1) descending; remaining ties fall
    back to the subset's name tuple so the ranking is reproducible across
    runs and worker counts.
    """
    cands = list(candidates) if candidates is not None else list(table.feature_names)
    if len(cands) < k:
        raise InvalidArgumentError(
            f"need at least {k} candidate features, got {len(cands)}"
        )
    subsets = [tuple(c) for c in itertools.combinations(cands, k)]

    def run(subset):
        cfg, report = bfs_search(table, list(subset), bins=bins)
        return subset, cfg, report

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(run, subsets))
    else:
        results = [run(s) for s in subsets]
    results.sort(key=lambda r: (-r[2].accuracy, -r[2].f1, r[0]))
    return results
