from abc import ABCMeta


class BaseSVC(metaclass=ABCMeta):
    """ABC for LibSVM-based classifiers."""

    def decision_function(self, X):
        """Evaluate the decision function for the samples in X."""
        return X

    def _validate_targets(self, y):
        return y
