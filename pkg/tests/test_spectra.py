"""Sector operator assembly, eigenpairs, and kernel census checks."""

import math
import types
import warnings

import numpy as np
import pytest

from nucleon_nls.scalar_model import ScalarFns
from nucleon_nls import spectra as sp


@pytest.fixture(scope="module")
def opA1(gs413):
    return sp.assemble_sector_A(gs413, 1)


@pytest.fixture(scope="module")
def opA0(gs413):
    return sp.assemble_sector_A(gs413, 0)


@pytest.fixture(scope="module")
def opL1(gs413):
    return sp.assemble_L1_direct(gs413)


@pytest.fixture(scope="module")
def opL2(gs413):
    return sp.assemble_L2_direct(gs413)


def _free_op(d, N=4000, R=30.0, level=1.0):
    return sp._assemble_schrodinger(
        d, 0, N, R, potential=lambda r: np.full_like(r, level))


class TestFreeCase:
    def test_interval_neumann_dirichlet_gap(self):
        # d=1 with a flat potential floor: fundamental mode cos(pi r / 2R)
        rep = sp.lowest_eigenpairs(_free_op(1), 2)
        expect = 1.0 + (math.pi / 60.0) ** 2
        assert abs(rep.eigenvalues[0] - expect) < 1e-6

    def test_ball_dirichlet_gap(self):
        rep = sp.lowest_eigenpairs(_free_op(3), 2)
        expect = 1.0 + (math.pi / 30.0) ** 2
        assert abs(rep.eigenvalues[0] - expect) < 1e-6

    def test_gap_closes_as_domain_grows(self):
        lam = [sp.lowest_eigenpairs(_free_op(3, R=R), 1).eigenvalues[0]
               for R in (15.0, 30.0, 60.0)]
        gaps = [x - 1.0 for x in lam]
        assert gaps[0] > gaps[1] > gaps[2] > 0.0

    def test_eigenvector_orthogonality(self):
        op = _free_op(3, N=2000)
        rep = sp.lowest_eigenpairs(op, 5)
        w = rep.eigenvectors * op.sym_weight * math.sqrt(op.h)
        gram = w @ w.T
        off = gram - np.diag(np.diag(gram))
        assert np.max(np.abs(off)) < 1e-10
        assert np.max(np.abs(np.diag(gram) - 1.0)) < 1e-10


class TestSectorA:
    def test_kernel_candidate_at_ell_one(self, opA1):
        rep = sp.lowest_eigenpairs(opA1, 4)
        assert len(rep.kernel_candidates) == 1
        idx, lam = rep.kernel_candidates[0]
        assert idx == 0
        assert abs(lam) < 1e-6
        assert rep.correlations["dprofile"][0] > 0.999

    def test_kernel_eigenvalue_richardson(self, gs413):
        lams = []
        for N in (4000, 8000, 16000):
            op = sp.assemble_sector_A(gs413, 1, N=N)
            lams.append(abs(sp.lowest_eigenpairs(op, 1).eigenvalues[0]))
        assert lams[0] > lams[1] > lams[2]
        for coarse, fine in zip(lams, lams[1:]):
            assert 3.5 < coarse / fine < 4.5

    def test_ell_zero_single_negative_direction(self, gs413, opA0):
        rep = sp.lowest_eigenpairs(opA0, 3)
        assert not rep.kernel_candidates
        lam0 = rep.eigenvalues[0]
        assert lam0 < -1e-3
        assert abs(lam0 - (-0.267026)) < 5e-5
        assert rep.eigenvalues[1] > 0.1
        doubled = sp.assemble_sector_A(gs413, 0, N=8000)
        assert sp.sturm_count(doubled, 0.0) == 1

    def test_higher_sectors_positive_and_monotone(self, gs413, opA1):
        lam1 = sp.lowest_eigenpairs(opA1, 1).eigenvalues[0]
        lam2 = sp.lowest_eigenpairs(
            sp.assemble_sector_A(gs413, 2), 1).eigenvalues[0]
        lam3 = sp.lowest_eigenpairs(
            sp.assemble_sector_A(gs413, 3), 1).eigenvalues[0]
        assert lam2 > 0.0
        assert lam1 < lam2 < lam3

    def test_truncation_radius_insensitivity(self, gs413):
        # same grid step, larger box: kernel eigenvalue moves by far less
        # than the discretization error scale
        lam30 = sp.lowest_eigenpairs(
            sp.assemble_sector_A(gs413, 1, N=6000, R=30.0), 1).eigenvalues[0]
        lam40 = sp.lowest_eigenpairs(
            sp.assemble_sector_A(gs413, 1, N=8000, R=40.0), 1).eigenvalues[0]
        assert abs(lam30 - lam40) < 1e-8

    def test_kernel_eigenvector_sign_constant(self, opA1):
        rep = sp.lowest_eigenpairs(opA1, 1)
        v = rep.eigenvectors[0]
        live = np.abs(v) > 1e-8 * np.max(np.abs(v))
        signs = np.sign(v[live])
        assert np.all(signs == signs[0])

    def test_determinism(self, opA1):
        r1 = sp.lowest_eigenpairs(opA1, 3)
        r2 = sp.lowest_eigenpairs(opA1, 3)
        assert np.array_equal(r1.eigenvalues, r2.eigenvalues)
        assert np.array_equal(r1.eigenvectors, r2.eigenvectors)

    def test_report_sorted_and_normalized(self, opA0):
        rep = sp.lowest_eigenpairs(opA0, 4)
        assert np.all(np.diff(rep.eigenvalues) >= 0.0)
        w = rep.eigenvectors * opA0.sym_weight * math.sqrt(opA0.h)
        assert np.max(np.abs(np.sum(w * w, axis=1) - 1.0)) < 1e-10


class TestDirectOperators:
    def test_L1_kernel_candidate(self, opL1):
        rep = sp.lowest_eigenpairs(opL1, 3)
        assert len(rep.kernel_candidates) == 1
        assert abs(rep.kernel_candidates[0][1]) < 1e-6
        assert rep.correlations["dprofile_cos"][0] > 0.999

    def test_L2_kernel_candidate(self, opL2):
        rep = sp.lowest_eigenpairs(opL2, 3)
        assert len(rep.kernel_candidates) == 1
        assert abs(rep.kernel_candidates[0][1]) < 1e-6
        assert rep.correlations["profile_sine"][0] > 0.999

    def test_L2_kernel_magnitude_decreases(self, gs413):
        lams = []
        for N in (2000, 4000, 8000):
            op = sp.assemble_L2_direct(gs413, N=N)
            lams.append(abs(sp.lowest_eigenpairs(op, 1).eigenvalues[0]))
        assert lams[0] > lams[1] > lams[2]
        assert 2.5 < lams[0] / lams[1] < 5.5

    def test_L1_annihilates_derivative_direction(self, opL1):
        w = opL1.references["dprofile_cos"]
        res = np.linalg.norm(sp.apply_operator(opL1, w.copy()))
        assert res / np.linalg.norm(w) < 1e-4

    def test_L2_annihilates_profile_sine(self, opL2):
        w = opL2.references["profile_sine"]
        res = np.linalg.norm(sp.apply_operator(opL2, w.copy()))
        assert res / np.linalg.norm(w) < 1e-4

    def test_conjugation_identity_entrywise(self, gs413):
        opA = sp.assemble_sector_A(gs413, 1, N=4000)
        opL = sp.assemble_L1_direct(gs413, N=4000)
        main, off = sp.conjugated_form(opA, gs413)
        assert np.max(np.abs(main - opL.main_diag)) < 1e-8
        assert np.max(np.abs(off - opL.off_diag)) < 1e-8

    def test_closed_form_potential_route(self, gs413):
        p = gs413.params
        fns = ScalarFns(p)
        rel_prev = None
        pot_diffs = []
        for N in (8000, 16000):
            opm = sp.assemble_L1_direct(gs413, N=N)
            Q = gs413.profile(opm.grid)
            sec = 1.0 / np.cos(Q)
            mimetic = sec * sp._mirrored_second_difference(sec, opm.h) \
                - fns.Fprime(Q) * sec**2
            closed = sp.l1_closed_form_potential(gs413, opm.grid)
            pot_diffs.append(np.max(np.abs(mimetic - closed)))
            opc = sp.SectorOperator(
                ell=1, d=p.d, grid=opm.grid,
                main_diag=opm.main_diag - mimetic + closed,
                off_diag=opm.off_diag, boundary=opm.boundary,
                h=opm.h, sym_weight=opm.sym_weight)
            lm = sp.lowest_eigenpairs(opm, 4).eigenvalues
            lc = sp.lowest_eigenpairs(opc, 4).eigenvalues
            big = np.abs(lm) > 1e-3
            rel = np.max(np.abs(lm[big] - lc[big]) / np.abs(lm[big]))
            assert rel < 1e-6
        # both routes certify the kernel at the default grid
        assert abs(lm[0]) < 1e-6 and abs(lc[0]) < 1e-6
        assert 3.5 < pot_diffs[0] / pot_diffs[1] < 4.5

    def test_positivity_guard(self):
        fake = types.SimpleNamespace(
            profile=lambda r: np.full_like(r, np.pi / 2 - 1e-9),
            dprofile=lambda r: np.zeros_like(r),
        )
        with pytest.raises(ValueError, match="positivity"):
            sp._profile_secants(fake, np.linspace(0.1, 1.0, 5))


class TestCountsAndCensus:
    def test_sturm_matches_eigenvalue_counts(self, gs413):
        op = sp.assemble_sector_A(gs413, 0, N=500)
        rep = sp.lowest_eigenpairs(op, 10)
        for sigma in (0.0, 0.5, 1.05):
            assert sp.sturm_count(op, sigma) == int(
                np.sum(rep.eigenvalues < sigma))

    def test_morse_indices(self, opA0, opA1, opL1, opL2):
        assert sp.morse_index(opA0) == 1
        assert sp.morse_index(opA1) == 0
        assert sp.morse_index(opL1) == 0
        assert sp.morse_index(opL2) == 0

    def test_harmonic_dimension(self):
        assert [sp.harmonic_dimension(ell, 3) for ell in range(4)] \
            == [1, 3, 5, 7]
        assert [sp.harmonic_dimension(ell, 2) for ell in range(3)] \
            == [1, 2, 2]
        for d in (2, 3, 4):
            assert sp.harmonic_dimension(1, d) == d

    def test_census_kernel_structure(self, gs413):
        census = sp.kernel_census(gs413)
        assert census["kernel_dim_A"] == 3
        assert census["kernel_dim_L2"] == 1
        for ell, rep in census["A"].items():
            expected = 1 if ell == 1 else 0
            assert len(rep.kernel_candidates) == expected
        assert len(census["L2"][0].kernel_candidates) == 1


class TestValidation:
    def test_bad_ell(self, gs413):
        with pytest.raises(ValueError):
            sp.assemble_sector_A(gs413, -1)

    def test_bad_grid(self, gs413):
        with pytest.raises(ValueError):
            sp.assemble_sector_A(gs413, 0, N=2)
        with pytest.raises(ValueError):
            sp.assemble_sector_A(gs413, 0, R=-1.0)

    def test_bad_k(self, opA0):
        with pytest.raises(ValueError):
            sp.lowest_eigenpairs(opA0, 0)
        with pytest.raises(ValueError):
            sp.lowest_eigenpairs(opA0, opA0.size + 1)

    def test_resolution_warning(self, gs413):
        with pytest.warns(sp.ResolutionWarning):
            sp.assemble_sector_A(gs413, 0, N=100)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            sp.assemble_sector_A(gs413, 0, N=1000)
