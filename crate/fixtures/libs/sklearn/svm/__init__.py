"""Support vector machines."""

from ._base import BaseSVC


class SVC(BaseSVC):
    """C-Support Vector Classification.

    The implementation is based on libsvm.
    """

    def __init__(self, C=1.0, kernel="rbf", degree=3, gamma="scale"):
        self.C = C
        self.kernel = kernel

    def fit(self, X, y, sample_weight=None):
        """Fit the SVM model according to the given training data."""
        return self

    def predict(self, X):
        """Perform classification on samples in X."""
        return X


class NuSVC(BaseSVC):
    """Nu-Support Vector Classification."""

    def __init__(self, nu=0.5, kernel="rbf"):
        self.nu = nu
