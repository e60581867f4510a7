"""Feature standardization, one-vs-one polynomial SVM (SMO) and k-NN.

Binary machines use the decision function f(x) = sum_i coef_i K(sv_i, x) + b
with coef_i = alpha_i * y_i, and y = +1 for the lower class of the pair.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ContractError, ParameterError, StoreError

MODEL_FORMAT = "fuzzylbp-svm"
MODEL_VERSION = 1


# --------------------------------------------------------------------------
# standardization


@dataclass
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray  # population std; 0 marks a constant column

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.mean.shape[0]:
            raise ContractError(f"expected {self.mean.shape[0]} columns, got {X.shape[-1]}")
        live = self.scale > 0
        return np.where(live, (X - self.mean) / np.where(live, self.scale, 1.0), 0.0)

    def inverse_transform(self, Z) -> np.ndarray:
        Z = np.asarray(Z, dtype=np.float64)
        return Z * self.scale + self.mean


def standardize_fit(X) -> Standardizer:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise ContractError("cannot standardize an empty matrix")
    if X.shape[0] < 2:
        raise ContractError("standardization needs at least 2 rows")
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    constant = np.ptp(X, axis=0) == 0
    scale[constant] = 0.0
    mean[constant] = X[0, constant]
    return Standardizer(mean, scale)


# --------------------------------------------------------------------------
# kernel


def poly_kernel(x, y, degree: int = 1, gamma: float = 1.0, coef0: float = 1.0):
    """(gamma * <x, y> + coef0) ** degree for vectors, or a Gram block for 2-D inputs."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[-1] != y.shape[-1]:
        raise ContractError(f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")
    if x.ndim == 1 and y.ndim == 1:
        return float((gamma * np.dot(x, y) + coef0) ** degree)
    return (gamma * np.atleast_2d(x) @ np.atleast_2d(y).T + coef0) ** degree


# --------------------------------------------------------------------------
# SMO


@dataclass
class BinarySvm:
    pair: tuple  # (positive class, negative class)
    support_vectors: np.ndarray
    dual_coef: np.ndarray  # alpha * y for each support vector
    bias: float

    @property
    def alphas(self) -> np.ndarray:
        return np.abs(self.dual_coef)


@dataclass
class SvmModel:
    classes: np.ndarray
    machines: list
    degree: int
    gamma: float
    coef0: float
    C: float
    scaler: Optional[Standardizer] = None

    @property
    def n_features(self) -> int:
        return self.machines[0].support_vectors.shape[1]

    def kernel(self, A, B) -> np.ndarray:
        return poly_kernel(A, B, self.degree, self.gamma, self.coef0)

    def decision_function(self, X) -> np.ndarray:
        """(n_samples, n_machines) binary decision values."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if self.scaler is not None:
            X = self.scaler.transform(X)
        if X.shape[1] != self.n_features:
            raise ContractError(f"expected {self.n_features} features, got {X.shape[1]}")
        out = np.empty((X.shape[0], len(self.machines)))
        for m, machine in enumerate(self.machines):
            out[:, m] = self.kernel(X, machine.support_vectors) @ machine.dual_coef + machine.bias
        return out


def _smo(K, y, C, tol, max_passes, rng, eps=1e-12, max_sweeps=10000):
    """Solve the binary soft-margin dual on a precomputed Gram matrix.

    For each KKT violator i the partner j maximizing |E_i - E_j| is tried
    first, then one seeded random partner. After ``max_passes`` consecutive
    sweeps without an update, a verification sweep tries every partner in
    seeded random order; training ends only when that sweep is also quiet,
    so the returned multipliers satisfy the KKT conditions within ``tol``.
    """
    n = len(y)
    alpha = [0.0] * n
    b = 0.0
    err = -np.asarray(y, dtype=np.float64)  # f(x_i) - y_i with f == 0
    ys = [float(v) for v in y]
    Kl = K.tolist()  # scalar reads from lists are much cheaper than from arrays

    def take_step(i, j):
        nonlocal b
        if i == j:
            return False
        a1, a2 = alpha[i], alpha[j]
        y1, y2 = ys[i], ys[j]
        e1, e2 = float(err[i]), float(err[j])
        if y1 != y2:
            lo, hi = max(0.0, a2 - a1), min(C, C + a2 - a1)
        else:
            lo, hi = max(0.0, a1 + a2 - C), min(C, a1 + a2)
        if hi - lo < eps:
            return False
        kii, kjj, kij = Kl[i][i], Kl[j][j], Kl[i][j]
        eta = kii + kjj - 2.0 * kij
        if eta > eps:
            a2n = min(max(a2 + y2 * (e1 - e2) / eta, lo), hi)
        else:
            # gain of the dual objective along the constraint line
            def gain(t):
                return y2 * (e1 - e2) * t - 0.5 * eta * t * t

            g_lo, g_hi = gain(lo - a2), gain(hi - a2)
            if g_lo > g_hi + eps:
                a2n = lo
            elif g_hi > g_lo + eps:
                a2n = hi
            else:
                return False
        if abs(a2n - a2) < eps * (a2n + a2 + eps):
            return False
        a1n = a1 + y1 * y2 * (a2 - a2n)
        if a1n < eps:
            a1n = 0.0
        elif a1n > C - eps:
            a1n = C
        d1, d2 = y1 * (a1n - a1), y2 * (a2n - a2)
        b1 = b - e1 - d1 * kii - d2 * kij
        b2 = b - e2 - d1 * kij - d2 * kjj
        if 0.0 < a1n < C:
            bn = b1
        elif 0.0 < a2n < C:
            bn = b2
        else:
            bn = 0.5 * (b1 + b2)
        err[:] += d1 * K[i] + d2 * K[j] + (bn - b)
        alpha[i], alpha[j] = a1n, a2n
        b = bn
        return True

    quiet = 0
    sweeps = 0
    while sweeps < max_sweeps:
        verify = quiet >= max_passes
        changed = 0
        for i in range(n):
            r = float(err[i]) * ys[i]
            if (r < -tol and alpha[i] < C) or (r > tol and alpha[i] > 0):
                if take_step(i, int(np.argmax(np.abs(err - err[i])))):
                    changed += 1
                    continue
                partners = rng.permutation(n) if verify else rng.integers(0, n, size=1)
                for j in partners:
                    if take_step(i, int(j)):
                        changed += 1
                        break
        sweeps += 1
        if changed:
            quiet = 0
        elif verify:
            break
        else:
            quiet += 1
    return np.array(alpha), b


def svm_train(
    X,
    labels,
    degree: int = 1,
    gamma: Optional[float] = None,
    coef0: float = 1.0,
    C: float = 1.0,
    tol: float = 1e-3,
    max_passes: int = 10,
    seed: int = 0,
) -> SvmModel:
    """Train one binary SMO machine per class pair.

    ``X`` should already be standardized. ``gamma`` defaults to
    1 / n_features. Each machine draws its random partner order from its own
    generator keyed on (seed, pair), so the result does not depend on the
    order machines are trained in.
    """
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels)
    if X.ndim != 2 or X.shape[0] != labels.shape[0]:
        raise ContractError("X must be (n_samples, n_features) with one label per row")
    if not np.all(np.isfinite(X)):
        raise ContractError("training features contain non-finite values")
    if C <= 0 or tol <= 0 or max_passes < 1 or degree < 1:
        raise ParameterError(f"invalid SVM parameters C={C} tol={tol} max_passes={max_passes} degree={degree}")
    classes = np.unique(labels)
    if classes.size < 2:
        raise ContractError("SVM training needs at least two classes")
    if gamma is None:
        gamma = 1.0 / X.shape[1]

    K_full = poly_kernel(X, X, degree, gamma, coef0)
    machines = []
    for ia, ib in combinations(range(classes.size), 2):
        ca, cb = classes[ia], classes[ib]
        idx = np.flatnonzero((labels == ca) | (labels == cb))
        y = np.where(labels[idx] == ca, 1.0, -1.0)
        K = K_full[np.ix_(idx, idx)]
        rng = np.random.default_rng([seed, ia, ib])
        alpha, b = _smo(K, y, C, tol, max_passes, rng)
        sv = alpha > 0
        machines.append(BinarySvm((ca.item(), cb.item()), X[idx[sv]], alpha[sv] * y[sv], float(b)))
    return SvmModel(classes, machines, degree, float(gamma), float(coef0), float(C))


def svm_predict_batch(model: SvmModel, X) -> np.ndarray:
    dec = model.decision_function(X)
    index = {c.item(): k for k, c in enumerate(model.classes)}
    votes = np.zeros((dec.shape[0], model.classes.size), dtype=np.int64)
    for m, machine in enumerate(model.machines):
        pos, neg = index[machine.pair[0]], index[machine.pair[1]]
        wins = dec[:, m] > 0
        votes[wins, pos] += 1
        votes[~wins, neg] += 1
    # argmax takes the first maximum: vote ties go to the lowest class
    return model.classes[np.argmax(votes, axis=1)]


def svm_predict(model: SvmModel, x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ContractError("svm_predict takes one vector; use svm_predict_batch for matrices")
    return svm_predict_batch(model, x[None, :])[0].item()


def save_model(model: SvmModel, path) -> None:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "kernel": {"type": "poly", "degree": model.degree, "gamma": model.gamma, "coef0": model.coef0},
        "C": model.C,
        "classes": model.classes.tolist(),
        "machines": [
            {
                "pair": list(m.pair),
                "bias": m.bias,
                "dual_coef": m.dual_coef.tolist(),
                "support_vectors": m.support_vectors.tolist(),
            }
            for m in model.machines
        ],
        "scaler": None
        if model.scaler is None
        else {"mean": model.scaler.mean.tolist(), "scale": model.scaler.scale.tolist()},
    }
    # json writes floats with repr, which round-trips float64 exactly
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def load_model(path) -> SvmModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise StoreError(f"{path}: cannot read model: {exc}") from exc
    if doc.get("format") != MODEL_FORMAT:
        raise StoreError(f"{path}: not a {MODEL_FORMAT} file")
    if doc.get("version") != MODEL_VERSION:
        raise StoreError(f"{path}: unsupported model version {doc.get('version')}")
    machines = [
        BinarySvm(
            tuple(m["pair"]),
            np.asarray(m["support_vectors"], dtype=np.float64).reshape(len(m["dual_coef"]), -1),
            np.asarray(m["dual_coef"], dtype=np.float64),
            float(m["bias"]),
        )
        for m in doc["machines"]
    ]
    scaler = doc.get("scaler")
    if scaler is not None:
        scaler = Standardizer(np.asarray(scaler["mean"]), np.asarray(scaler["scale"]))
    k = doc["kernel"]
    return SvmModel(
        np.asarray(doc["classes"]), machines, k["degree"], k["gamma"], k["coef0"], doc["C"], scaler
    )


# --------------------------------------------------------------------------
# k-NN


@dataclass
class KnnModel:
    exemplars: np.ndarray
    labels: np.ndarray
    k: int = 1
    classes: np.ndarray = field(init=False)

    def __post_init__(self):
        self.exemplars = np.asarray(self.exemplars, dtype=np.float64)
        self.labels = np.asarray(self.labels)
        if self.exemplars.ndim != 2 or self.exemplars.shape[0] != self.labels.shape[0]:
            raise ContractError("exemplars must be (n, d) with one label per row")
        if not 1 <= self.k <= self.exemplars.shape[0]:
            raise ParameterError(f"k={self.k} must be between 1 and {self.exemplars.shape[0]}")
        self.classes = np.unique(self.labels)

    def distances(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.exemplars.shape[1],):
            raise ContractError(f"expected a {self.exemplars.shape[1]}-vector, got shape {x.shape}")
        return np.sqrt(((self.exemplars - x) ** 2).sum(axis=1))

    def class_distances(self, x) -> np.ndarray:
        """Distance from x to the nearest exemplar of each class, in ``classes`` order."""
        d = self.distances(x)
        return np.array([d[self.labels == c].min() for c in self.classes])


def knn_classify(model: KnnModel, x):
    """Majority label among the k nearest exemplars and its nearest distance.

    Equal distances keep exemplar order; vote ties go to the lowest class.
    """
    d = model.distances(x)
    nearest = np.argsort(d, kind="stable")[: model.k]
    votes = np.array([(model.labels[nearest] == c).sum() for c in model.classes])
    label = model.classes[int(np.argmax(votes))]
    score = float(d[model.labels == label].min())
    return label.item(), score


def knn_classify_batch(model: KnnModel, X):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    results = [knn_classify(model, x) for x in X]
    return np.array([r[0] for r in results]), np.array([r[1] for r in results])
