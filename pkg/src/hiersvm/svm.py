"""Binary linear SVM trained by sequential pairwise dual updates.

The trainer is deliberately dependency-free and fully deterministic: the
working pair is always chosen by a fixed heuristic (largest error gap,
lowest index on ties), so retraining on identical inputs reproduces the
model bit for bit.  Models expose their support set explicitly so the
stored vectors can be rewritten later without retraining.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Dual variables closer to a bound than this fraction of C are snapped onto
# the bound, so non-support samples end up with an exact zero multiplier.
_SNAP = 1e-8
# Minimum dual change for a pairwise update to count as progress.
_STEP_EPS = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of the dual optimizer."""

    C: float = 1.0
    kkt_tolerance: float = 1e-3
    max_passes: int = 1000

    def validate(self):
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.kkt_tolerance <= 0:
            raise ValueError("kkt_tolerance must be positive")
        if self.max_passes < 1:
            raise ValueError("max_passes must be at least 1")


@dataclass(frozen=True, eq=False)
class SupportEntry:
    """One stored vector with its fused multiplier (dual coefficient times label)."""

    vector: np.ndarray
    coefficient: float
    source_id: int


@dataclass(eq=False)
class BinaryNodeModel:
    """Trained binary decision function f(x) = sum_i c_i <v_i, x> + bias.

    ``vectors`` holds the support vectors row-wise, ``coefficients`` the
    fused multipliers c_i.  ``source_ids`` identify where each row came
    from (training-sample index, or shared-pool index after rewriting).
    """

    vectors: np.ndarray
    coefficients: np.ndarray
    bias: float
    dimension: int
    source_ids: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=float)
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.vectors.ndim != 2 or self.vectors.shape[1] != self.dimension:
            raise ValueError("shape: support vectors do not match dimension")
        if len(self.coefficients) != len(self.vectors):
            raise ValueError("shape: one coefficient per vector required")
        if len(self.vectors) == 0:
            raise ValueError("trained model must store at least one vector")
        if not np.all(np.isfinite(self.vectors)) or not np.all(np.isfinite(self.coefficients)):
            raise ValueError("non-finite model parameters")
        if np.any(self.coefficients == 0.0):
            raise ValueError("zero-coefficient entries must be pruned")

    @property
    def entries(self) -> list[SupportEntry]:
        ids = self.source_ids if self.source_ids else tuple(range(len(self.vectors)))
        return [
            SupportEntry(vector=self.vectors[i], coefficient=float(self.coefficients[i]), source_id=ids[i])
            for i in range(len(self.vectors))
        ]


def _check_input(model: BinaryNodeModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.dimension,):
        raise ValueError("shape: input dimension %s, model expects %d" % (x.shape, model.dimension))
    return x


def decision_value(model: BinaryNodeModel, x) -> float:
    """Evaluate the linear decision function at x."""
    x = _check_input(model, x)
    return float(model.coefficients @ (model.vectors @ x) + model.bias)


def classify_binary(model: BinaryNodeModel, x) -> str:
    """Route x to 'left' (f >= 0) or 'right' (f < 0); ties go left."""
    return "left" if decision_value(model, x) >= 0.0 else "right"


def train_binary(samples, labels, cfg: TrainConfig | None = None) -> BinaryNodeModel:
    """Train a binary linear SVM on samples with labels in {+1, -1}.

    Sequential minimal optimization over the hinge-loss dual: repeatedly
    pick a sample violating its optimality condition and update it jointly
    with a deterministically chosen partner until no violation larger than
    the configured tolerance remains.  Raises if the labels contain a
    single class or the optimizer fails to converge within ``max_passes``.
    """
    cfg = cfg or TrainConfig()
    cfg.validate()

    X = np.asarray(samples, dtype=float) + 0.0
    y = np.asarray(labels, dtype=float)
    if X.ndim != 2 or len(X) == 0:
        raise ValueError("shape: samples must form a nonempty 2-d array")
    if y.shape != (len(X),):
        raise ValueError("shape: one label per sample required")
    if not np.all(np.isfinite(X)):
        raise ValueError("non-finite feature values")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be +1 or -1")
    if len(np.unique(y)) < 2:
        raise ValueError("degenerate labels: both classes required")

    n, dim = X.shape
    C = float(cfg.C)
    tol = float(cfg.kkt_tolerance)

    K = X @ X.T
    alpha = np.zeros(n)
    b = 0.0
    # f[k] = current decision value at sample k, maintained incrementally.
    f = np.zeros(n)

    def take_step(i: int, j: int) -> bool:
        nonlocal b
        if i == j:
            return False
        ai, aj = alpha[i], alpha[j]
        yi, yj = y[i], y[j]
        Ei = f[i] - yi
        Ej = f[j] - yj
        s = yi * yj
        if s > 0:
            L, H = max(0.0, ai + aj - C), min(C, ai + aj)
        else:
            L, H = max(0.0, aj - ai), min(C, C + aj - ai)
        if L >= H:
            return False
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if eta > 0.0:
            aj_new = aj + yj * (Ei - Ej) / eta
            aj_new = min(max(aj_new, L), H)
        else:
            # Degenerate curvature (duplicate points): evaluate the dual
            # objective at both ends of the feasible segment.
            fi = yi * Ei - ai * K[i, i] - s * aj * K[i, j]
            fj = yj * Ej - s * ai * K[i, j] - aj * K[j, j]
            Li = ai + s * (aj - L)
            Hi = ai + s * (aj - H)
            obj_L = Li * fi + L * fj + 0.5 * Li * Li * K[i, i] + 0.5 * L * L * K[j, j] + s * L * Li * K[i, j]
            obj_H = Hi * fi + H * fj + 0.5 * Hi * Hi * K[i, i] + 0.5 * H * H * K[j, j] + s * H * Hi * K[i, j]
            if obj_L < obj_H - _STEP_EPS:
                aj_new = L
            elif obj_L > obj_H + _STEP_EPS:
                aj_new = H
            else:
                return False
        if aj_new < _SNAP * C:
            aj_new = 0.0
        elif aj_new > (1.0 - _SNAP) * C:
            aj_new = C
        if abs(aj_new - aj) < _STEP_EPS * (aj + aj_new + _STEP_EPS):
            return False
        ai_new = ai + s * (aj - aj_new)
        if ai_new < _SNAP * C:
            ai_new = 0.0
        elif ai_new > (1.0 - _SNAP) * C:
            ai_new = C

        b1 = b - Ei - yi * (ai_new - ai) * K[i, i] - yj * (aj_new - aj) * K[i, j]
        b2 = b - Ej - yi * (ai_new - ai) * K[i, j] - yj * (aj_new - aj) * K[j, j]
        if 0.0 < ai_new < C:
            b_new = b1
        elif 0.0 < aj_new < C:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)

        f += (ai_new - ai) * yi * K[i] + (aj_new - aj) * yj * K[j] + (b_new - b)
        alpha[i], alpha[j] = ai_new, aj_new
        b = b_new
        return True

    def examine(i: int) -> bool:
        Ei = f[i] - y[i]
        r = Ei * y[i]
        if not ((r < -tol and alpha[i] < C) or (r > tol and alpha[i] > 0.0)):
            return False
        errors = f - y
        gaps = np.abs(Ei - errors)
        gaps[i] = -1.0
        j = int(np.argmax(gaps))
        if take_step(i, j):
            return True
        for k in range(n):
            if k != i and k != j and take_step(i, k):
                return True
        return False

    examine_all = True
    converged = False
    for _ in range(cfg.max_passes):
        if examine_all:
            idxs = range(n)
        else:
            idxs = np.nonzero((alpha > 0.0) & (alpha < C))[0]
        changed = 0
        for i in idxs:
            changed += examine(int(i))
        if examine_all:
            if changed == 0:
                converged = True
                break
            examine_all = False
        elif changed == 0:
            examine_all = True
            # Refresh the cache before the verifying full pass so the final
            # optimality check is not polluted by accumulated drift.
            f = K @ (alpha * y) + b
    if not converged:
        raise RuntimeError("dual optimizer did not converge within max_passes")

    keep = np.nonzero(alpha > 0.0)[0]
    if len(keep) == 0:
        raise RuntimeError("optimizer produced an empty support set")
    return BinaryNodeModel(
        vectors=X[keep].copy(),
        coefficients=alpha[keep] * y[keep],
        bias=float(b),
        dimension=dim,
        source_ids=tuple(int(k) for k in keep),
    )


def training_accuracy(model: BinaryNodeModel, samples, labels) -> float:
    """Fraction of samples whose sign under the model matches their label."""
    X = np.asarray(samples, dtype=float)
    y = np.asarray(labels, dtype=float)
    scores = X @ (model.coefficients @ model.vectors) + model.bias
    predicted = np.where(scores >= 0.0, 1.0, -1.0)
    return float(np.mean(predicted == y))
