"""Scikit-learn style classifier wrapper around the numpy MLP.

``MlpClassifier`` follows the estimator protocol (``fit`` / ``predict`` /
``predict_proba`` / ``get_params`` / ``set_params``) without depending on
scikit-learn itself, so it drops into pipelines and grid searches that only
rely on the protocol.
"""

from __future__ import annotations

import inspect

import numpy as np

from . import mlp
from .synth import derive_seed, philox_rng
from .validation import check_feature_matrix, check_is_fitted

_STREAM_SHUFFLE = 0x5F


class ParamsMixin:
    """get_params / set_params over the constructor signature, sklearn-style."""

    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        return [name for name in sig.parameters if name != "self"]

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(
                    f"invalid parameter {name!r} for {type(self).__name__}; "
                    f"valid parameters are {sorted(valid)}"
                )
            setattr(self, name, value)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


class MlpClassifier(ParamsMixin):
    """MLP classifier trained with minibatch cross-entropy.

    Parameters
    ----------
    hidden:
        Hidden layer widths; an empty tuple gives multinomial logistic
        regression.
    optimizer:
        ``"sgd"`` (with momentum) or ``"adam"``.
    weight_decay:
        Decoupled weight decay applied before each update.
    seed:
        Controls weight initialization and batch shuffling; identical
        (data, params, seed) triples fit to identical parameters.
    """

    def __init__(self, hidden=(64,), epochs=20, batch_size=64, optimizer="adam",
                 learning_rate=1e-3, momentum=0.9, weight_decay=0.0, seed=0):
        self.hidden = hidden
        self.epochs = epochs
        self.batch_size = batch_size
        self.optimizer = optimizer
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.weight_decay = weight_decay
        self.seed = seed

    def fit(self, X, y):
        X = check_feature_matrix(X, "X")
        y = np.asarray(y)
        if y.ndim != 1 or len(y) != len(X):
            raise ValueError("y must be 1-D with one label per row of X")
        if len(X) == 0:
            raise ValueError("cannot fit on an empty dataset")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be positive")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")

        self.classes_, y_idx = np.unique(y, return_inverse=True)
        if len(self.classes_) < 2:
            raise ValueError("need at least 2 classes in y")
        self.n_features_in_ = X.shape[1]

        sizes = (self.n_features_in_, *tuple(int(h) for h in self.hidden), len(self.classes_))
        model = mlp.init_mlp(sizes, seed=derive_seed(self.seed, "init"))
        state = mlp.init_state(model)
        shuffle_rng = philox_rng(derive_seed(self.seed, "shuffle"), _STREAM_SHUFFLE)

        n = len(X)
        for _ in range(self.epochs):
            order = shuffle_rng.permutation(n)
            for start in range(0, n, self.batch_size):
                sel = order[start:start + self.batch_size]
                _, grads = mlp.loss_and_grad(model, X[sel], y_idx[sel])
                model, state = mlp.step(
                    model, grads, state,
                    optimizer=self.optimizer,
                    learning_rate=self.learning_rate,
                    momentum=self.momentum,
                    weight_decay=self.weight_decay,
                )
        self.model_ = model
        return self

    def __sklearn_tags__(self):
        # Called only by scikit-learn itself, so importing it lazily keeps
        # sklearn an optional integration rather than a dependency.
        from sklearn.utils import ClassifierTags, Tags, TargetTags

        return Tags(
            estimator_type="classifier",
            target_tags=TargetTags(required=True),
            classifier_tags=ClassifierTags(),
        )

    def predict_proba(self, X) -> np.ndarray:
        check_is_fitted(self, "model_")
        X = check_feature_matrix(X, "X", expected_dim=self.n_features_in_)
        return mlp.forward(self.model_, X)

    def predict(self, X) -> np.ndarray:
        probs = self.predict_proba(X)
        return self.classes_[np.argmax(probs, axis=1)]

    def score(self, X, y) -> float:
        y = np.asarray(y)
        return float(np.mean(self.predict(X) == y))
