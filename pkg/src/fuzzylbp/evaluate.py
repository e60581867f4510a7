"""Evaluation protocols: 50/50 split, stratified k-fold and k-NN ROC.

ROC scoring is verification style. Each probe is compared with every
gallery class through its nearest gallery sample. The distance to its own
class is a genuine score and the distances to the other classes are
impostor scores. A comparison is accepted when its distance is at or below
the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .classify import (
    KnnModel,
    knn_classify_batch,
    standardize_fit,
    svm_predict_batch,
    svm_train,
)
from .errors import ContractError

TARGET_FAR = 0.1


@dataclass(frozen=True)
class SplitPlan:
    train: np.ndarray
    test: np.ndarray
    scheme: str


@dataclass(frozen=True)
class RocCurve:
    thresholds: np.ndarray
    far: np.ndarray
    recognition_rate: np.ndarray

    def rate_at(self, target_far: float = TARGET_FAR) -> float:
        """Recognition rate at a FAR, linear between the bracketing points.

        Points sharing a FAR collapse onto their highest recognition rate,
        which is the last one reached along the sweep.
        """
        far, idx = np.unique(self.far[::-1], return_index=True)
        rr = self.recognition_rate[::-1][idx]
        return float(np.interp(target_far, far, rr))


@dataclass(frozen=True)
class KfoldReport:
    rates: np.ndarray

    @property
    def min(self) -> float:
        return float(self.rates.min())

    @property
    def max(self) -> float:
        return float(self.rates.max())

    @property
    def avg(self) -> float:
        return float(self.rates.mean())


def recognition_rate(predictions, truth) -> float:
    predictions = np.asarray(predictions)
    truth = np.asarray(truth)
    if predictions.shape != truth.shape:
        raise ContractError("predictions and truth differ in length")
    if truth.size == 0:
        raise ContractError("recognition rate of an empty test set")
    return 100.0 * float(np.count_nonzero(predictions == truth)) / truth.size


def _class_members(labels):
    labels = np.asarray(labels)
    return [(c, np.flatnonzero(labels == c)) for c in np.unique(labels)]


def first_half_split(labels) -> SplitPlan:
    """Per class, the first ceil(n/2) samples in dataset order train, the rest test."""
    train, test = [], []
    for c, members in _class_members(labels):
        if members.size < 2:
            raise ContractError(f"class {c} has {members.size} sample(s); the split needs at least 2")
        cut = -(-members.size // 2)
        train.append(members[:cut])
        test.append(members[cut:])
    return SplitPlan(np.sort(np.concatenate(train)), np.sort(np.concatenate(test)), "first-half")


def kfold_split(labels, k: int = 10, seed: int = 0) -> list:
    """Stratified folds: each class is shuffled, then dealt round-robin.

    The starting fold rotates from class to class so that overall fold sizes
    also stay within one of each other.
    """
    labels = np.asarray(labels)
    if k < 2:
        raise ContractError(f"k-fold needs k >= 2, got {k}")
    if labels.size < k:
        raise ContractError(f"k={k} exceeds the {labels.size} available samples")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(labels.size, dtype=np.intp)
    offset = 0
    for _, members in _class_members(labels):
        members = rng.permutation(members)
        fold_of[members] = (offset + np.arange(members.size)) % k
        offset = (offset + members.size) % k
    everything = np.arange(labels.size)
    return [
        SplitPlan(everything[fold_of != f], everything[fold_of == f], f"k-fold({k})")
        for f in range(k)
    ]


def roc_from_knn(genuine, scores) -> RocCurve:
    """Sweep the acceptance threshold over the sorted unique scores.

    The curve starts at (0, 0) with threshold -inf, before anything is accepted.
    """
    genuine = np.asarray(genuine, dtype=bool)
    scores = np.asarray(scores, dtype=np.float64)
    if genuine.shape != scores.shape:
        raise ContractError("genuine flags and scores differ in length")
    n_gen = int(genuine.sum())
    n_imp = genuine.size - n_gen
    if n_gen == 0 or n_imp == 0:
        raise ContractError("ROC needs both genuine and impostor scores")
    thresholds = np.unique(scores)
    gen_sorted = np.sort(scores[genuine])
    imp_sorted = np.sort(scores[~genuine])
    gen_acc = np.searchsorted(gen_sorted, thresholds, side="right")
    imp_acc = np.searchsorted(imp_sorted, thresholds, side="right")
    return RocCurve(
        np.concatenate([[-np.inf], thresholds]),
        np.concatenate([[0.0], imp_acc / n_imp]),
        np.concatenate([[0.0], gen_acc / n_gen]),
    )


def verification_scores(gallery: KnnModel, probes, probe_labels):
    """Genuine flags and distances for every (probe, gallery class) comparison."""
    flags, scores = [], []
    for x, label in zip(np.atleast_2d(probes), probe_labels):
        d = gallery.class_distances(x)
        flags.append(gallery.classes == label)
        scores.append(d)
    return np.concatenate(flags), np.concatenate(scores)


# --------------------------------------------------------------------------
# full protocol


@dataclass
class ClassifierConfig:
    degrees: Sequence[int] = (1, 2)
    C: float = 1.0
    gamma: Optional[float] = None
    coef0: float = 1.0
    tol: float = 1e-3
    max_passes: int = 10
    knn_k: int = 1
    kfold: int = 10
    seed: int = 0


@dataclass
class DescriptorReport:
    descriptor: str
    split_rates: dict  # classifier name -> percent
    kfold: Optional[KfoldReport]
    roc: RocCurve
    models: dict = field(default_factory=dict)  # classifier name -> SvmModel

    @property
    def rate_at_far(self) -> float:
        return self.roc.rate_at(TARGET_FAR)


def svm_name(degree: int) -> str:
    return f"SVM Poly{degree}"


def _fit_svm(X, y, degree, cfg: ClassifierConfig):
    scaler = standardize_fit(X)
    model = svm_train(
        scaler.transform(X),
        y,
        degree=degree,
        gamma=cfg.gamma,
        coef0=cfg.coef0,
        C=cfg.C,
        tol=cfg.tol,
        max_passes=cfg.max_passes,
        seed=cfg.seed,
    )
    model.scaler = scaler
    return model


def run_protocol(descriptor: str, X, labels, cfg: ClassifierConfig) -> DescriptorReport:
    """Split rates for each SVM degree and k-NN, k-fold with the first degree, k-NN ROC.

    k-NN works on raw features, because distance ranking does not need the
    conditioning the SVM does.
    """
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels)
    if X.ndim != 2 or X.shape[0] != labels.size or X.shape[0] == 0:
        raise ContractError(f"{descriptor}: feature matrix and labels do not line up")

    split = first_half_split(labels)
    Xtr, ytr, Xte, yte = X[split.train], labels[split.train], X[split.test], labels[split.test]
    rates, models = {}, {}
    for degree in cfg.degrees:
        model = _fit_svm(Xtr, ytr, degree, cfg)
        models[svm_name(degree)] = model
        rates[svm_name(degree)] = recognition_rate(svm_predict_batch(model, Xte), yte)
    knn = KnnModel(Xtr, ytr, cfg.knn_k)
    rates["k-NN"] = recognition_rate(knn_classify_batch(knn, Xte)[0], yte)
    roc = roc_from_knn(*verification_scores(knn, Xte, yte))

    kfold = None
    if cfg.kfold:
        fold_rates = []
        for plan in kfold_split(labels, cfg.kfold, cfg.seed):
            model = _fit_svm(X[plan.train], labels[plan.train], cfg.degrees[0], cfg)
            pred = svm_predict_batch(model, X[plan.test])
            fold_rates.append(recognition_rate(pred, labels[plan.test]))
        kfold = KfoldReport(np.array(fold_rates))
    return DescriptorReport(descriptor, rates, kfold, roc, models)
