import numpy as np
import pytest

import nodalheat as nh
from nodalheat.errors import InvalidParameterError


def five_point_residual(model, n):
    """max |Lap_h u + lambda u| over interior cells of the model frame."""
    grid = nh.grid_for_model(model, n)
    f = nh.sample_field(model, grid)
    v = f.values
    h = grid.h
    lap = (v[1:-1, 2:] + v[1:-1, :-2] + v[2:, 1:-1] + v[:-2, 1:-1]
           - 4 * v[1:-1, 1:-1]) / h ** 2
    res = np.abs(lap + model.eigenvalue * v[1:-1, 1:-1])
    return float(res.max()), float(np.abs(v).max())


class TestConstructors:
    def test_torus_eigenvalue(self):
        m = nh.make_torus_eigenfunction(1, 1)
        assert m.eigenvalue == pytest.approx(8 * np.pi ** 2, rel=1e-14)
        m = nh.make_torus_eigenfunction(2, 3)
        assert m.eigenvalue == pytest.approx(52 * np.pi ** 2, rel=1e-14)

    def test_torus_peak_value(self):
        m = nh.make_torus_eigenfunction(1, 1)
        assert float(m.evaluate(0.25, 0.25)) == pytest.approx(1.0, abs=1e-15)

    def test_torus_periodicity(self):
        m = nh.make_torus_eigenfunction(2, 3)
        x = np.linspace(0, 1, 7)
        assert np.allclose(m.evaluate(x, 0.3), m.evaluate(x + 1, 0.3), atol=1e-12)
        assert np.allclose(m.evaluate(0.2, x), m.evaluate(0.2, x + 1), atol=1e-12)

    def test_rectangle(self):
        m = nh.make_rectangle_eigenfunction(1, 1, 1.0, 1.0)
        assert m.eigenvalue == pytest.approx(2 * np.pi ** 2, rel=1e-14)
        assert float(m.evaluate(0.5, 0.5)) == pytest.approx(1.0)
        m = nh.make_rectangle_eigenfunction(2, 1, 1.0, 1.0)
        assert float(m.evaluate(0.5, 0.7)) == pytest.approx(0.0, abs=1e-12)

    def test_disk_eigenvalue(self):
        from scipy.special import jn_zeros
        m = nh.make_disk_eigenfunction(0, 1, 1.0)
        assert m.eigenvalue == pytest.approx(jn_zeros(0, 1)[0] ** 2, rel=1e-13)
        m2 = nh.make_disk_eigenfunction(1, 2, 2.0)
        assert m2.eigenvalue == pytest.approx((jn_zeros(1, 2)[1] / 2) ** 2, rel=1e-13)

    def test_cone_models(self):
        c1 = nh.make_cone_model(1)
        assert float(c1.evaluate(0.3, 0.9)) == pytest.approx(0.3)
        c2 = nh.make_cone_model(2)
        assert float(c2.evaluate(0.4, 0.1)) == pytest.approx(0.4 ** 2 - 0.1 ** 2)
        c8 = nh.make_cone_model(8)
        r = 0.83
        assert float(c8.evaluate(r, 0.0)) == pytest.approx(r ** 8, rel=1e-12)
        assert c8.vanishing_order == 8
        assert c8.eigenvalue == 0.0

    @pytest.mark.parametrize("bad", [0, -1, 2.5])
    def test_invalid_modes(self, bad):
        with pytest.raises(InvalidParameterError):
            nh.make_torus_eigenfunction(bad, 1)
        with pytest.raises(InvalidParameterError):
            nh.make_cone_model(bad)

    def test_invalid_rectangle_sides(self):
        with pytest.raises(InvalidParameterError):
            nh.make_rectangle_eigenfunction(1, 1, 0.0, 1.0)
        with pytest.raises(InvalidParameterError):
            nh.make_rectangle_eigenfunction(1, 1, 1.0, -2.0)


class TestEigenEquation:
    @pytest.mark.parametrize("model", [
        nh.make_torus_eigenfunction(1, 1),
        nh.make_torus_eigenfunction(2, 3),
        nh.make_rectangle_eigenfunction(2, 1, 1.0, 1.0),
        nh.make_disk_eigenfunction(1, 1, 1.0),
    ], ids=["torus11", "torus23", "rect21", "disk11"])
    def test_residual_and_order(self, model):
        res_n, sup = five_point_residual(model, 128)
        lam = model.eigenvalue
        h = nh.grid_for_model(model, 128).h
        assert res_n <= 0.5 * h ** 2 * lam ** 2 * sup
        res_2n, _ = five_point_residual(model, 256)
        assert 3.0 <= res_n / res_2n <= 5.0     # second-order stencil

    @pytest.mark.parametrize("model", [
        nh.make_torus_eigenfunction(2, 3),
        nh.make_rectangle_eigenfunction(1, 2, 1.5, 1.0),
        nh.make_disk_eigenfunction(2, 1, 1.0),
        nh.make_cone_model(3),
    ], ids=["torus", "rect", "disk", "cone"])
    def test_gradient_matches_central_difference(self, model):
        grid = nh.grid_for_model(model, 256)
        h = grid.h
        xs, ys = grid.cell_center_mesh()
        # keep two cells away from the frame edge
        sl = (slice(2, -2), slice(2, -2))
        x, y = xs[sl], ys[sl]
        gx, gy = model.gradient(x, y)
        fdx = (model.evaluate(x + h, y) - model.evaluate(x - h, y)) / (2 * h)
        fdy = (model.evaluate(x, y + h) - model.evaluate(x, y - h)) / (2 * h)
        scale = np.abs(gx).max() + np.abs(gy).max()
        assert np.abs(gx - fdx).max() / scale < 5e-3
        assert np.abs(gy - fdy).max() / scale < 5e-3
        # second-order: quartering h cuts the error by ~16
        grid4 = nh.grid_for_model(model, 1024)
        h4 = grid4.h
        x4, y4 = (a[sl] for a in grid4.cell_center_mesh())
        gx4, _ = model.gradient(x4, y4)
        fdx4 = (model.evaluate(x4 + h4, y4) - model.evaluate(x4 - h4, y4)) / (2 * h4)
        assert np.abs(gx4 - fdx4).max() <= np.abs(gx - fdx).max() / 8


class TestNorms:
    def test_quarter_domain_norms(self):
        m = nh.make_torus_eigenfunction(1, 1)
        grid = nh.grid_for_model(m, 256)
        field = nh.sample_field(m, grid)
        mask = nh.label_nodal_domains(field)
        norms = nh.compute_norms(m, mask, grid, label=1)
        assert norms.l1 == pytest.approx(1 / np.pi ** 2, rel=2e-4)
        assert norms.linf == pytest.approx(1.0, rel=2e-3)
        assert norms.grad_linf == pytest.approx(2 * np.pi, rel=2e-3)

    def test_rectangle_full_domain(self):
        m = nh.make_rectangle_eigenfunction(1, 1, 1.0, 1.0)
        grid = nh.grid_for_model(m, 256)
        field = nh.sample_field(m, grid)
        mask = nh.label_nodal_domains(field)
        norms = nh.compute_norms(m, mask, grid)
        assert norms.l1 == pytest.approx(4 / np.pi ** 2, rel=2e-4)
        assert norms.grad_linf == pytest.approx(np.pi, rel=2e-3)

    def test_single_zero_cell(self):
        # cone u = x sampled on an odd grid puts a cell center exactly on x = 0
        cone = nh.make_cone_model(1)
        grid = nh.GridSpec(nx=33, ny=33, x0=-1.0, y0=-1.0, extent_x=2.0, extent_y=2.0)
        xs, _ = grid.cell_center_mesh()
        assert np.any(xs == 0.0)
        pick = np.zeros((33, 33), dtype=bool)
        pick[16, 16] = True
        assert xs[16, 16] == 0.0
        mask = nh.label_nodal_domains(nh.indicator_field(grid, pick))
        lab = nh.nodal.principal_label(mask, 1)
        norms = nh.compute_norms(cone, mask, grid, label=lab)
        assert norms.l1 == 0.0

    def test_l1_bounded_by_linf_area(self):
        m = nh.make_torus_eigenfunction(2, 3)
        grid = nh.grid_for_model(m, 128)
        field = nh.sample_field(m, grid)
        mask = nh.label_nodal_domains(field)
        for lab in range(1, mask.n_labels + 1):
            norms = nh.compute_norms(m, mask, grid, label=lab)
            assert norms.l1 <= norms.linf * mask.area(lab) * (1 + 1e-12)

    def test_mode_swap_symmetry(self):
        a = nh.make_torus_eigenfunction(2, 3)
        b = nh.make_torus_eigenfunction(3, 2)
        grid = nh.grid_for_model(a, 128)
        mask_a = nh.label_nodal_domains(nh.sample_field(a, grid))
        mask_b = nh.label_nodal_domains(nh.sample_field(b, grid))
        na = nh.compute_norms(a, mask_a, grid)
        nb = nh.compute_norms(b, mask_b, grid)
        assert na.l1 == pytest.approx(nb.l1, rel=1e-12)
        assert na.linf == pytest.approx(nb.linf, rel=1e-12)
        assert na.grad_linf == pytest.approx(nb.grad_linf, rel=1e-12)

    def test_empty_mask_errors(self):
        m = nh.make_torus_eigenfunction(1, 1)
        grid = nh.grid_for_model(m, 64)
        mask = nh.label_nodal_domains(nh.sample_field(m, grid))
        with pytest.raises(Exception):
            nh.compute_norms(m, mask, grid, label=99)
