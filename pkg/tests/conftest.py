import os
import tempfile

# loggers attach their file handler at import time
os.environ.setdefault("BELLSPLIT_LOG_DIR", os.path.join(tempfile.gettempdir(), "bellsplit-test-logs"))
os.environ.setdefault("BELLSPLIT_LOG_LEVEL", "WARNING")

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from structs.statistics import Statistics  # noqa: E402
from util.config import DEFAULT  # noqa: E402
from util.scattering import balanced_pc, gammas, haar_scattering, hybrid, preset  # noqa: E402

HAAR_SEEDS = list(range(12))

# ======================================
# 🔁 Fixtures
# ======================================


@pytest.fixture(autouse=True)
def default_tolerance_profile(monkeypatch):
    monkeypatch.delenv("BELLSPLIT_TOLERANCE_PROFILE", raising=False)
    yield


@pytest.fixture
def tolerances():
    return DEFAULT


@pytest.fixture
def pc_splitter():
    return balanced_pc()


@pytest.fixture
def parallel_splitter():
    # right input rotated onto the left polarization: full Hong-Ou-Mandel dip
    return preset(f"balanced_mixing({np.pi / 2!r})")


@pytest.fixture(params=HAAR_SEEDS)
def haar_splitter(request):
    return haar_scattering(request.param)


@pytest.fixture
def haar_instance(haar_splitter):
    return haar_splitter, hybrid(haar_splitter), gammas(haar_splitter, Statistics.BOSONIC)
