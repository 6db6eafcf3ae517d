import math

import numpy as np
import pytest

import kgfock


def test_lattice_and_lambda_quant():
    lat = kgfock.lattice(8, 32.0)
    assert len(lat) == 513
    assert kgfock.lattice("3/2", 2.0).v == "3/2"
    r = kgfock.lambda_quant(kgfock.gaussian_potential(1.0, 1.0), lat)
    assert r["lambda_quant"] == pytest.approx(0.8746842498936717, rel=1e-10)
    assert math.isinf(kgfock.lambda_quant(kgfock.zero_potential(), lat)["lambda_quant"])
    with pytest.raises(kgfock.ParameterError):
        kgfock.lattice(1, 0.5)


def test_pair_kernel_bound_holds():
    lat = kgfock.lattice(2, 4.0)
    for pot in (kgfock.gaussian_potential(), kgfock.lorentzian_potential()):
        r = kgfock.pair_kernel(pot, lat)
        assert np.allclose(r, -r.T)
        assert np.all(np.abs(r) <= kgfock.pair_kernel_bound(pot, lat))


def test_weyl_and_quantize():
    w = kgfock.weyl_quantize(lambda x, k: complex(math.exp(-0.5 * (x * x + k * k))))
    assert abs(np.linalg.norm(w) ** 2 - 0.5) < 5e-3
    q = kgfock.quantize(32, 16.0, 1.0, kgfock.gaussian_potential(0.2, 1.0))
    assert q["j_square_residual"] < 1e-9
    with pytest.raises(kgfock.UnstableConfigurationError):
        kgfock.quantize(32, 16.0, 1.0, kgfock.gaussian_potential(3.0, 1.0))


def test_bundle_spectrum_and_probe():
    basis = kgfock.enumerate_basis(kgfock.lattice(1, 1.0), 3)
    assert basis.dimension == 84
    assert basis.index_of(basis.occupation(17)) == 17
    spec = kgfock.interaction_spec([(4, 0, 0.05), (0, 4, 0.05), (2, 0, 0.1), (0, 2, 0.1)], kgfock.gaussian_potential())
    pot = kgfock.gaussian_potential()
    bundle = kgfock.assemble(spec, pot, 0.3, basis)
    h = bundle.H.toarray()
    assert np.allclose(h, h.conj().T)
    e0, psi = kgfock.ground_state(bundle)
    assert e0 == pytest.approx(np.linalg.eigvalsh(h)[0], abs=1e-10)
    report = kgfock.hvz_gap_probe(bundle)
    assert report["onset_level"] >= 1
    f = np.ones(basis.slots, dtype=complex) / math.sqrt(basis.slots)
    probe = kgfock.heisenberg_probe(bundle, f, [0.0, 1.0, 2.0], psi)
    assert len(probe["values"]) == 3
    with pytest.raises(kgfock.StabilityError):
        kgfock.assemble(spec, pot, 10.0, basis)
