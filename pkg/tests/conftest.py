from __future__ import annotations

import pytest

from qpsi.core.mpnum import EvalContext
from qpsi.core.qpoch import QBase


@pytest.fixture
def ctx() -> EvalContext:
    return EvalContext(precision_digits=50)


@pytest.fixture
def base() -> QBase:
    return QBase(0.3)


@pytest.fixture(autouse=True)
def _no_repo_config(monkeypatch, tmp_path):
    # tests must not pick up configs/verify.yaml or a precision override from the shell
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("QPSI_PRECISION", raising=False)
