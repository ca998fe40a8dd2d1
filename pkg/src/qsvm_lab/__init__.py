"""Dense state-vector simulation of two-sample quantum classifiers.

Submodules: :mod:`statevector` (simulator), :mod:`encoding` (amplitude
encoders), :mod:`qsvm` (HHL-based LS-SVM classifier), :mod:`innerprod`
(overlap classifier), :mod:`preprocess` (datasets, split, k-means) and
:mod:`cli` (experiment runner).
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    DataError,
    NumericalError,
    QsvmLabError,
)

__all__ = ["__version__", "QsvmLabError", "ConfigError", "DataError", "NumericalError"]
