import numpy as np
import pytest

from stressbasis.fields import SymTensorField2, constant_tensor_field
from stressbasis.materials import (Material, MaterialError, compliance_apply,
                                   discontinuous_modulus, energy_inner,
                                   ramp_modulus, strain_energy)


def test_isotropic_plane_strain_uniaxial(rect_mesh):
    Y, nu = 2.0, 0.3
    mat = Material.isotropic(Y, nu)
    sig = constant_tensor_field(rect_mesh, 1.0, 0.0, 0.0)
    eps = compliance_apply(mat, sig)
    exx, eyy, exy = (eps.components[k][0] for k in range(3))
    assert exx == pytest.approx((1 - nu**2) / Y, rel=1e-12)
    assert eyy == pytest.approx(-nu * (1 + nu) / Y, rel=1e-12)
    assert exy == 0.0


def test_isotropic_shear(rect_mesh):
    Y, nu = 2.0, 0.3
    mat = Material.isotropic(Y, nu)
    sig = constant_tensor_field(rect_mesh, 0.0, 0.0, 1.0)
    eps = compliance_apply(mat, sig)
    assert eps.components[2][0] == pytest.approx((1 + nu) / Y, rel=1e-12)


def test_orthotropic_reduces_to_isotropic(rect_mesh, rng):
    Y, nu = 1.7, 0.25
    iso = Material.isotropic(Y, nu)
    ortho = Material.orthotropic(Y, Y, nu, Y / (2 * (1 + nu)))
    sig = SymTensorField2(rect_mesh, rng.normal(size=(3, rect_mesh.n_nodes)))
    assert strain_energy(iso, sig) == pytest.approx(strain_energy(ortho, sig),
                                                    rel=1e-12)


def test_energy_inner_is_symmetric(rect_mesh, rng):
    # the compliance form must be symmetric for every supported law
    mats = [Material.isotropic(1.0, 0.33),
            Material.orthotropic(1.0, 2.0, 0.33, 1.0),
            Material.isotropic(discontinuous_modulus(1.0, 3.0), 0.33)]
    A = SymTensorField2(rect_mesh, rng.normal(size=(3, rect_mesh.n_nodes)))
    B = SymTensorField2(rect_mesh, rng.normal(size=(3, rect_mesh.n_nodes)))
    for mat in mats:
        assert energy_inner(mat, A, B) == pytest.approx(
            energy_inner(mat, B, A), rel=1e-10)


def test_strain_energy_positive(rect_mesh, rng):
    mat = Material.orthotropic(1.0, 2.0, 0.33, 1.0)
    for _ in range(5):
        sig = SymTensorField2(rect_mesh,
                              rng.normal(size=(3, rect_mesh.n_nodes)))
        assert strain_energy(mat, sig) > 0


def test_modulus_profiles():
    Yd = discontinuous_modulus(1.0, 3.0, 0.5)
    assert Yd(0.2, 0.9) == 1.0
    assert Yd(0.2, 0.1) == 3.0
    Yr = ramp_modulus(1.0, 3.0, zeta=0.05, y_interface=0.5)
    assert Yr(0.0, 0.9) == pytest.approx(1.0)
    assert Yr(0.0, 0.1) == pytest.approx(3.0)
    assert Yr(0.0, 0.5) == pytest.approx(2.0)  # midpoint of the linear ramp
    # monotone within the ramp
    ys = np.linspace(0.45, 0.55, 21)
    vals = np.asarray(Yr(np.zeros_like(ys), ys), dtype=float)
    assert np.all(np.diff(vals) <= 1e-12)


def test_material_validation():
    with pytest.raises(MaterialError):
        Material.isotropic(-1.0, 0.3)
    with pytest.raises(MaterialError):
        Material.isotropic(1.0, 0.6)  # nu must stay below 1/2
    with pytest.raises(MaterialError):
        Material.orthotropic(1.0, 2.0, 0.33, -1.0)
