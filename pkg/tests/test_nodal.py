import numpy as np
import pytest

import nodalheat as nh
from nodalheat.errors import InvalidParameterError, ResolutionWarning, UnknownLabelError
from conftest import ConstantModel


def linear_field(grid, a=1.0, b=0.0, c=-0.3):
    xs, ys = grid.cell_center_mesh()
    return nh.ScalarField(grid=grid, values=a * xs + b * ys + c)


class TestSampling:
    def test_torus_values(self, torus11):
        grid = nh.grid_for_model(torus11, 64)
        f = nh.sample_field(torus11, grid)
        assert f.values.min() >= -1.0 and f.values.max() <= 1.0
        assert f.values.max() >= 0.99

    def test_constant_zero_model(self):
        grid = nh.GridSpec(nx=16, ny=16)
        f = nh.sample_field(ConstantModel(0.0), grid)
        assert np.all(f.values == 0.0)
        ns = nh.extract_nodal_set(f)
        assert ns.total_length == 0.0 and ns.polylines == []

    def test_rectangle_grid_point_on_peak(self):
        m = nh.make_rectangle_eigenfunction(1, 1, 1.0, 1.0)
        grid = nh.GridSpec(nx=33, ny=33)
        f = nh.sample_field(m, grid)
        assert f.values.max() == pytest.approx(1.0, abs=1e-15)

    def test_under_resolved_warning(self):
        m = nh.make_torus_eigenfunction(8, 8)
        with pytest.warns(ResolutionWarning):
            nh.sample_field(m, nh.GridSpec(nx=32, ny=32, periodic_x=True,
                                           periodic_y=True))

    def test_grid_requires_square_cells(self):
        with pytest.raises(InvalidParameterError):
            nh.GridSpec(nx=10, ny=10, extent_x=1.0, extent_y=2.0)


class TestExtraction:
    def test_linear_field_exact(self):
        ns = nh.extract_nodal_set(linear_field(nh.GridSpec(nx=64, ny=64)))
        assert len(ns.polylines) == 1
        assert ns.total_length == pytest.approx(1.0, abs=1e-12)
        xs = ns.polylines[0][:, 0]
        assert np.allclose(xs, 0.3, atol=1e-12)
        ys = ns.polylines[0][:, 1]
        assert min(ys) == pytest.approx(0.0, abs=1e-12)
        assert max(ys) == pytest.approx(1.0, abs=1e-12)

    def test_torus_11_length(self, torus11):
        f = nh.sample_field(torus11, nh.grid_for_model(torus11, 256))
        ns = nh.extract_nodal_set(f)
        assert ns.total_length == pytest.approx(4.0, abs=0.01)

    def test_torus_23_length(self):
        m = nh.make_torus_eigenfunction(2, 3)
        f = nh.sample_field(m, nh.grid_for_model(m, 512))
        ns = nh.extract_nodal_set(f)
        assert ns.total_length == pytest.approx(10.0, abs=0.02)

    def test_interior_line_of_dirichlet_mode(self):
        m = nh.make_rectangle_eigenfunction(2, 1, 1.0, 1.0)
        f = nh.sample_field(m, nh.grid_for_model(m, 128))
        ns = nh.extract_nodal_set(f)
        assert ns.total_length == pytest.approx(1.0, abs=0.01)

    def test_negation_and_scaling_invariance(self, torus11):
        grid = nh.grid_for_model(torus11, 96)
        f = nh.sample_field(torus11, grid)
        base = nh.extract_nodal_set(f).total_length
        neg = nh.extract_nodal_set(nh.ScalarField(grid=grid, values=-f.values))
        scl = nh.extract_nodal_set(nh.ScalarField(grid=grid, values=7.3 * f.values))
        assert neg.total_length == pytest.approx(base, rel=1e-12)
        assert scl.total_length == pytest.approx(base, rel=1e-12)

    def test_refinement_convergence(self):
        m = nh.make_torus_eigenfunction(2, 3)
        exact = 10.0
        devs = []
        for n in (128, 256, 512):
            f = nh.sample_field(m, nh.grid_for_model(m, n))
            devs.append(abs(nh.extract_nodal_set(f).total_length - exact))
        assert abs(devs[2] - devs[1]) <= 2 * devs[1] + 1e-12
        assert devs[2] <= devs[0] + 1e-12

    def test_exact_zero_perturbation_recorded(self):
        cone = nh.make_cone_model(1)
        grid = nh.GridSpec(nx=33, ny=33, x0=-1.0, y0=-1.0, extent_x=2.0,
                           extent_y=2.0)
        f = nh.sample_field(cone, grid)
        assert np.any(f.values == 0.0)
        ns = nh.extract_nodal_set(f)
        assert ns.perturbed_zeros > 0
        assert ns.total_length == pytest.approx(2.0, abs=0.01)


class TestLabeling:
    def test_torus_11_four_quarters(self, torus11_mask_128):
        _, mask = torus11_mask_128
        assert mask.n_labels == 4
        h = mask.grid.h
        for lab in range(1, 5):
            assert mask.area(lab) == pytest.approx(0.25, abs=h)
        assert sorted(mask.signs[1:]) == [-1, -1, 1, 1]

    def test_rectangle_single_domain(self):
        m = nh.make_rectangle_eigenfunction(1, 1, 1.0, 1.0)
        mask = nh.label_nodal_domains(nh.sample_field(m, nh.grid_for_model(m, 64)))
        assert mask.n_labels == 1
        assert mask.sign(1) == 1

    def test_torus_23_domain_count(self):
        m = nh.make_torus_eigenfunction(2, 3)
        mask = nh.label_nodal_domains(nh.sample_field(m, nh.grid_for_model(m, 256)))
        assert mask.n_labels == 24

    def test_area_partition_exact(self, torus11_mask_128):
        _, mask = torus11_mask_128
        grid = mask.grid
        total = sum(mask.area(k) for k in range(1, mask.n_labels + 1))
        total += mask.zero_cells * grid.h ** 2
        assert total == pytest.approx(grid.extent_x * grid.extent_y, rel=1e-12)

    def test_periodic_wrap_merges(self):
        # one band of positive cells crossing the seam must be one domain
        grid = nh.GridSpec(nx=32, ny=32, periodic_x=True, periodic_y=True)
        f = nh.indicator_field(grid, lambda x, y: (x < 0.2) | (x > 0.8))
        mask = nh.label_nodal_domains(f)
        pos_labels = {int(l) for l in
                      mask.labels[f.values > 0]}
        assert len(pos_labels) == 1

    def test_unknown_label(self, torus11_mask_128):
        _, mask = torus11_mask_128
        with pytest.raises(UnknownLabelError):
            mask.area(9)


class TestGeometry:
    def test_torus_inradius(self, torus11_mask_128):
        _, mask = torus11_mask_128
        h = mask.grid.h
        assert nh.domain_inradius(mask, 1) == pytest.approx(0.25, abs=h)

    def test_single_cell_inradius(self):
        grid = nh.GridSpec(nx=16, ny=16)
        pick = np.zeros((16, 16), dtype=bool)
        pick[7, 8] = True
        mask = nh.label_nodal_domains(nh.indicator_field(grid, pick))
        lab = nh.nodal.principal_label(mask, 1)
        assert nh.domain_inradius(mask, lab) == pytest.approx(grid.h / 2, rel=1e-12)

    def test_rectangle_inradius(self):
        m = nh.make_rectangle_eigenfunction(1, 1, 1.0, 1.0)
        mask = nh.label_nodal_domains(nh.sample_field(m, nh.grid_for_model(m, 128)))
        assert nh.domain_inradius(mask, 1) == pytest.approx(0.5, abs=mask.grid.h)

    def test_boundary_lengths(self, torus11_mask_256):
        field, mask = torus11_mask_256
        assert nh.boundary_length(mask, 1, field) == pytest.approx(2.0, abs=0.02)

    def test_rectangle_boundary(self):
        m = nh.make_rectangle_eigenfunction(1, 1, 1.0, 1.0)
        f = nh.sample_field(m, nh.grid_for_model(m, 128))
        mask = nh.label_nodal_domains(f)
        assert nh.boundary_length(mask, 1, f) == pytest.approx(4.0, abs=0.02)

    def test_torus_23_cell_boundary(self):
        m = nh.make_torus_eigenfunction(2, 3)
        f = nh.sample_field(m, nh.grid_for_model(m, 256))
        mask = nh.label_nodal_domains(f)
        assert nh.boundary_length(mask, 1, f) == pytest.approx(5 / 6, abs=0.02)

    def test_boundary_sum_double_counts_nodal_set(self, torus11_mask_256):
        field, mask = torus11_mask_256
        total = sum(nh.boundary_length(mask, k, field)
                    for k in range(1, mask.n_labels + 1))
        z = nh.extract_nodal_set(field).total_length
        assert total == pytest.approx(2 * z, abs=8 * mask.grid.h)

    def test_label_helpers(self, torus11_mask_128):
        _, mask = torus11_mask_128
        lab = nh.nodal.label_at(mask, 0.25, 0.25)
        assert lab >= 1 and mask.sign(lab) == 1
        assert nh.nodal.label_at(mask, 0.75, 0.25) != lab
