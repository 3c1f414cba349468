"""Cross-checks between the compiled kernel and the pure-numpy twin."""

import numpy as np
import pytest

from incompatlab import backend
from incompatlab.feasibility import linear_ansatz, membership_masks
from incompatlab.observables import pauli, unsharp_povm
from conftest import random_hermitian

try:
    backend.get_kernel("native")
    HAVE_NATIVE = True
except RuntimeError:
    HAVE_NATIVE = False

needs_native = pytest.mark.skipif(not HAVE_NATIVE, reason="compiled kernel not built")


@needs_native
class TestKernelAgreement:
    def test_eigh_matches(self, rng):
        nat = backend.get_kernel("native")
        pure = backend.get_kernel("numpy")
        for _ in range(50):
            d = int(rng.integers(2, 9))
            h = random_hermitian(rng, d)
            wn, vn = nat.eigh_desc(h, 1e-13, 100)
            wp, _ = pure.eigh_desc(h, 1e-13, 100)
            assert np.abs(wn - wp).max() <= 1e-10 * max(1, np.linalg.norm(h))
            assert np.linalg.norm((vn * wn) @ vn.conj().T - h) <= 1e-10 * max(
                1, np.linalg.norm(h))

    @pytest.mark.parametrize("eta,axes", [(0.5, "xz"), (0.8, "xz"), (0.5, "xyz"),
                                          (0.65, "xyz")])
    def test_dykstra_verdicts_match(self, eta, axes):
        povms = [unsharp_povm(pauli(a), eta) for a in axes]
        n = len(povms)
        memb = membership_masks(n)
        minv = np.linalg.inv((memb @ memb.T).astype(float))
        targets = np.stack([np.eye(2, dtype=complex)] + [p.plus for p in povms])
        init = linear_ansatz([p.plus for p in povms], np.eye(2, dtype=complex))
        results = {}
        for name in ("native", "numpy"):
            kern = backend.get_kernel(name)
            results[name] = kern.dykstra_masked(
                init, memb, minv, targets, 1e-7, 200_000, 500, 1e-12, 1e-13, 100)
        s_nat, r_nat, _, g_nat = results["native"]
        s_pure, r_pure, _, g_pure = results["numpy"]
        assert s_nat == s_pure
        assert r_nat == pytest.approx(r_pure, abs=1e-6)
        if s_nat == 0:
            assert np.abs(np.asarray(g_nat) - np.asarray(g_pure)).max() <= 1e-5


def test_active_backend_is_known():
    assert backend.active_backend() in ("native", "numpy")


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        backend.get_kernel("fortran")
