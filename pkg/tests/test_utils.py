import numpy as np
import pytest

from canreal import utils
from canreal.exceptions import OperationCancelledError


def test_rank_threshold():
    assert utils.rank_threshold(np.array([2.0, 1.0]), 1e-3) == pytest.approx(2e-3)
    assert utils.rank_threshold(np.array([1e-20]), 1e-9) == utils.ABSOLUTE_RANK_FLOOR
    assert utils.rank_threshold(np.array([]), 1e-9) == utils.ABSOLUTE_RANK_FLOOR
    with pytest.raises(ValueError):
        utils.rank_threshold(np.array([1.0]), 0.0)


def test_numerical_rank():
    assert utils.numerical_rank(np.array([1.0, 1e-6, 1e-12]), 1e-9) == 2
    assert utils.matrix_rank(np.outer([1.0, 2.0], [3.0, 4.0])) == 1
    assert utils.matrix_rank(np.zeros((3, 3))) == 0
    assert utils.matrix_rank(np.eye(4)) == 4


def test_svd_of_empty_matrix():
    left, singular_values, right_t = utils.svd(np.zeros((3, 0)))
    assert left.shape[0] == 3
    assert len(singular_values) == 0
    assert right_t.shape[1] == 0


def test_normalize_signs():
    basis = np.array([[0.0, -1.0], [-1.0, 0.0]])
    normalized = utils.normalize_signs(basis)
    assert np.array_equal(normalized, [[0.0, 1.0], [1.0, 0.0]])
    assert basis[1, 0] == -1.0, "Input should not be modified"


def test_frozen_array():
    array = utils.frozen_array([1, 2, 3])
    assert array.dtype == float
    assert not array.flags.writeable
    with pytest.raises(ValueError):
        utils.frozen_array([1, 2], ndim=2)


def test_cancellation_token():
    token = utils.CancellationToken()
    assert not token.cancelled
    utils.check_cancelled(token)
    utils.check_cancelled(None)
    token.cancel()
    assert token.cancelled
    with pytest.raises(OperationCancelledError):
        utils.check_cancelled(token)
