import numpy as np
import pytest

from ctbduel import kernels


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=["compiled", "python"])
def backend(request, monkeypatch):
    """Run a test once per kernel backend (compiled skipped if not built)."""
    from ctbduel import _kernels_py

    if request.param == "compiled":
        impl = kernels.compiled()
        if impl is None:
            pytest.skip("compiled kernels not built")
    else:
        impl = _kernels_py
    for name in ("ctb_select", "ctb_update", "ip_values", "occupation_counts"):
        monkeypatch.setattr(kernels, name, getattr(impl, name))
    return request.param
