import logging
from pathlib import Path

import numpy as np
import pytest

from confignet import kernels
from confignet.dataset import SplitSpec, fit_minmax, gen_multi_output, gen_scalar_function, minmax_normalize, split

DATA_DIR = Path(__file__).parent / "data"

logging.getLogger("confignet").setLevel(logging.ERROR)


def normalized_split(ds, n_train, n_test, seed):
    tr, te = split(ds, SplitSpec(n_train, n_test, seed))
    meta = fit_minmax(tr)
    return minmax_normalize(tr, meta), minmax_normalize(te, meta)


@pytest.fixture
def eq26_small():
    return normalized_split(gen_scalar_function(300, 3), 240, 60, 3)


@pytest.fixture
def eq27_small():
    return normalized_split(gen_multi_output(300, 5), 200, 100, 5)


@pytest.fixture
def iris_path():
    return DATA_DIR / "iris.csv"


BACKENDS = ["python"] + (["cython"] if kernels.compiled_score_candidates is not None else [])


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run the test once per available scoring backend."""
    fn = kernels.python_score_candidates if request.param == "python" else kernels.compiled_score_candidates
    monkeypatch.setattr(kernels, "score_candidates", fn)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
