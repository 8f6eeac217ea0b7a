import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), ".."))

from bm_distance.certify import EXTREMAL_3D_MATRIX
from bm_distance.codec import encode_matrix


def fuzz_trials(default: int = 2000) -> int:
    """Random-trial count for the oracle suites; BM_FUZZ_TRIALS=10000 for full acceptance runs."""
    return int(os.getenv("BM_FUZZ_TRIALS", default))


SLOW = os.getenv("BM_SLOW") == "1"
slow = pytest.mark.skipif(not SLOW, reason="acceptance-scale run; set BM_SLOW=1")


def acceptance(fast: int, full: int) -> int:
    """`full` under BM_SLOW=1, `fast` otherwise."""
    return full if SLOW else fast


@pytest.fixture
def nice_json(tmp_path):
    import json
    path = tmp_path / "nice.json"
    path.write_text(json.dumps(encode_matrix(EXTREMAL_3D_MATRIX)))
    return path
