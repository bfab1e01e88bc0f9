from .data import CoefVector, Dataset
from .likelihood import design_matrix, fit_mle, neg_log_likelihood

__all__ = [
    "CoefVector",
    "Dataset",
    "design_matrix",
    "fit_mle",
    "neg_log_likelihood",
]
