import numpy as np
import pytest
from pydantic import ValidationError

from acekit.core.models import Dataset


def test_dataset_accepts_integer_float_and_bool_treatment():
    x = [[0.0], [1.0], [2.0]]
    y = [0.0, 1.0, 2.0]
    for t in ([0, 1, 0], [0.0, 1.0, 0.0], [False, True, False]):
        data = Dataset(x=x, t=t, y=y)
        assert data.t.dtype == np.int64
        np.testing.assert_array_equal(data.t, [0, 1, 0])


@pytest.mark.parametrize("t", [[0.7, 1.0, 0.2], [0, 1, 2], [0.0, 1.0, np.nan], ["0", "1", "0"]])
def test_dataset_rejects_non_binary_treatment(t):
    with pytest.raises(ValidationError, match="binary"):
        Dataset(x=[[0.0], [1.0], [2.0]], t=t, y=[0.0, 1.0, 2.0])


def test_dataset_rejects_inconsistent_shapes():
    with pytest.raises(ValidationError, match="inconsistent shapes"):
        Dataset(x=[[0.0], [1.0]], t=[0, 1, 0], y=[0.0, 1.0, 2.0])
