import numpy as np

from src.algebra.finite_field import FieldSpec
from src.algebra.matrix import MatrixFq, plaintext_inverse, random_matrix
from src.utils.errors import SingularMatrixError


def invertible_matrix(field: FieldSpec, size: int, rng: np.random.Generator) -> MatrixFq:
    while True:
        m = random_matrix(field, size, size, rng)
        try:
            plaintext_inverse(m)
        except SingularMatrixError:
            continue
        return m
