import numpy as np
import pytest

from discflux import (Coefficient, Mesh, Parity, StaggeredState,
                      builtin_multiplicative, cell_average_coefficient,
                      cell_average_initial, extend_absorbing, initial_state)
from discflux.grid import state_csv_text


@pytest.fixture
def step_coeff():
    return Coefficient.piecewise_constant([0.0], [3.0, 1.0])


class TestMesh:
    def test_from_cells(self):
        mesh = Mesh.from_cells(-1.0, 1.0, 50)
        assert mesh.dx == pytest.approx(0.04)
        assert mesh.n_cells == 50

    def test_closure_validated(self):
        with pytest.raises(ValueError):
            Mesh(0.0, 1.0, 0.1, 5)

    def test_centers(self):
        mesh = Mesh.from_cells(0.0, 1.0, 4)
        assert mesh.centers(Parity.BASE) == pytest.approx([0.125, 0.375, 0.625, 0.875])
        assert mesh.centers(Parity.HALF) == pytest.approx([0.25, 0.5, 0.75])
        assert mesh.n_values(Parity.HALF) == 3


class TestCellAverageInitial:
    def test_constant_is_exact(self):
        mesh = Mesh.from_cells(-1.0, 1.0, 50)
        vals = cell_average_initial(mesh, lambda x: np.full_like(x, 0.15))
        assert np.all(vals == 0.15)

    def test_step_split_exactly(self):
        # cell [-0.08, 0.08) straddles the jump symmetrically
        mesh = Mesh.from_cells(-0.08, 0.08, 1)
        u0 = lambda x: np.where(x <= 0.0, 0.9, 0.2)
        vals = cell_average_initial(mesh, u0, jumps=(0.0,))
        assert vals[0] == pytest.approx(0.55, abs=1e-15)

    def test_linear_cell(self):
        mesh = Mesh.from_cells(0.0, 1.0, 1)
        vals = cell_average_initial(mesh, lambda x: x, quad_points=1)
        assert vals[0] == pytest.approx(0.5, abs=1e-15)

    def test_quad_points_validated(self):
        mesh = Mesh.from_cells(0.0, 1.0, 1)
        with pytest.raises(ValueError):
            cell_average_initial(mesh, lambda x: x, quad_points=0)


class TestCellAverageCoefficient:
    def test_base_parity_around_jump(self, step_coeff):
        mesh = Mesh.from_cells(-1.0, 1.0, 50)
        kb = cell_average_coefficient(mesh, step_coeff, Parity.BASE)
        assert kb[24] == 3.0  # cell [-0.04, 0)
        assert kb[25] == 1.0  # cell [0, 0.04)

    def test_half_parity_straddling_cell(self, step_coeff):
        mesh = Mesh.from_cells(-1.0, 1.0, 50)
        kh = cell_average_coefficient(mesh, step_coeff, Parity.HALF)
        assert kh[24] == pytest.approx(2.0, abs=1e-15)  # cell [-0.02, 0.02)

    def test_constant_coefficient_both_parities(self):
        coeff = Coefficient.piecewise_constant([], [2.5])
        mesh = Mesh.from_cells(0.0, 1.0, 8)
        for parity in Parity:
            assert np.all(cell_average_coefficient(mesh, coeff, parity) == 2.5)

    def test_half_is_neighbor_average_for_interface_jumps(self, step_coeff):
        # piecewise constant with jumps only at base interfaces
        mesh = Mesh.from_cells(-1.0, 1.0, 50)
        kb = cell_average_coefficient(mesh, step_coeff, Parity.BASE)
        kh = cell_average_coefficient(mesh, step_coeff, Parity.HALF)
        assert kh == pytest.approx(0.5 * (kb[:-1] + kb[1:]), abs=1e-15)

    def test_smooth_piece_quadrature(self):
        coeff = Coefficient(breaks=(), funcs=(np.sin,), const_values=(None,),
                            bv_norm=2.0, sup_norm=1.0)
        mesh = Mesh.from_cells(0.0, np.pi, 16)
        kb = cell_average_coefficient(mesh, coeff, Parity.BASE, quad_points=64)
        edges = mesh.cell_edges(Parity.BASE)
        exact = (np.cos(edges[:-1]) - np.cos(edges[1:])) / mesh.dx
        assert kb == pytest.approx(exact, abs=1e-6)


class TestExtendAbsorbing:
    def test_values_and_kbar_replicated(self):
        mesh = Mesh.from_cells(0.0, 3.0, 3)
        state = StaggeredState(mesh=mesh, values=np.array([1.0, 2.0, 3.0]),
                               kbar=np.array([3.0, 3.0, 1.0]),
                               parity=Parity.BASE, time=0.0, step_index=0)
        ev, ek = extend_absorbing(state, 2)
        assert ev.tolist() == [1.0, 1.0, 1.0, 2.0, 3.0, 3.0, 3.0]
        assert ek.tolist() == [3.0, 3.0, 3.0, 3.0, 1.0, 1.0, 1.0]

    def test_ghost_count_validated(self):
        mesh = Mesh.from_cells(0.0, 3.0, 3)
        state = StaggeredState(mesh=mesh, values=np.ones(3), kbar=np.ones(3),
                               parity=Parity.BASE, time=0.0, step_index=0)
        with pytest.raises(ValueError):
            extend_absorbing(state, 0)

    def test_empty_state_rejected(self):
        mesh = Mesh.from_cells(0.0, 1.0, 1)
        empty = StaggeredState(mesh=mesh, values=np.empty(0), kbar=np.empty(0),
                               parity=Parity.HALF, time=0.1, step_index=1)
        with pytest.raises(ValueError):
            extend_absorbing(empty, 2)


class TestStaggeredState:
    def test_length_must_match_parity(self):
        mesh = Mesh.from_cells(0.0, 1.0, 4)
        with pytest.raises(ValueError):
            StaggeredState(mesh=mesh, values=np.ones(4), kbar=np.ones(4),
                           parity=Parity.HALF, time=0.0, step_index=1)

    def test_parity_tracks_step_index(self):
        mesh = Mesh.from_cells(0.0, 1.0, 4)
        with pytest.raises(ValueError):
            StaggeredState(mesh=mesh, values=np.ones(4), kbar=np.ones(4),
                           parity=Parity.BASE, time=0.0, step_index=1)

    def test_initial_state(self):
        model, coeff = builtin_multiplicative(3.0, 1.0)
        mesh = Mesh.from_cells(-1.0, 1.0, 50)
        state = initial_state(mesh, coeff, lambda x: np.full_like(x, 0.15))
        assert state.parity is Parity.BASE
        assert state.time == 0.0
        assert np.all(state.values == 0.15)
        assert state.kbar[0] == 3.0 and state.kbar[-1] == 1.0


class TestCsvDump:
    def test_header_and_full_precision(self):
        mesh = Mesh.from_cells(0.0, 1.0, 2)
        state = StaggeredState(mesh=mesh, values=np.array([1 / 3, 2 / 3]),
                               kbar=np.ones(2), parity=Parity.BASE,
                               time=0.0, step_index=0)
        text = state_csv_text(state)
        lines = text.strip().split("\n")
        assert lines[0] == "x,u"
        assert len(lines) == 3
        x, u = lines[1].split(",")
        assert float(x) == 0.25
        assert float(u) == 1 / 3  # 17 significant digits round-trip exactly
