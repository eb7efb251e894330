import itertools
import random

import pytest

from hamrank.compression import (
    Compressor,
    MatFamily,
    fit_compressor,
    vandermonde_compressor,
    verify_compressor,
)
from hamrank.errors import RetriesExhaustedError, SizeMismatchError
from hamrank.exact import Mat, rank_exact

from .conftest import random_mat


def support(z):
    return sum(1 for v in z if v != 0)


class TestMatFamily:
    def test_diagonal_differences_binary_count(self):
        for n in (2, 4, 6):
            fam = MatFamily.diagonal_differences(n, (0, 1))
            assert fam.size == 3**n

    def test_diagonal_differences_cover_all_pairs(self):
        fam = MatFamily.diagonal_differences(3, (0, 1))
        patterns = set(fam.diag_patterns)
        for x in itertools.product((0, 1), repeat=3):
            for y in itertools.product((0, 1), repeat=3):
                diff = tuple(a - b for a, b in zip(x, y))
                assert diff in patterns

    def test_multi_alphabet(self):
        fam = MatFamily.diagonal_differences_multi([(0, 1), (0, 1, 2)])
        assert fam.shape == (2, 2)
        assert fam.size == 3 * 5

    def test_explicit_dedupe(self, rng):
        m = random_mat(rng, 2, 2)
        fam = MatFamily.from_members([m, m, Mat.zeros(2, 2)])
        assert fam.size == 2

    def test_mixed_shapes_rejected(self):
        with pytest.raises(SizeMismatchError):
            MatFamily.from_members([Mat.zeros(2, 2), Mat.zeros(3, 3)])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            MatFamily.from_members([])


class TestFit:
    def test_sign_patterns_3cube_onto_2x2(self):
        # family {Diag(z) : z in {-1,0,1}^3}: compression must realize
        # min(#supp(z), 2) on all 27 members
        patterns = list(itertools.product((-1, 0, 1), repeat=3))
        fam = MatFamily.diagonal(patterns)
        comp = fit_compressor(fam, 2, 2, seed=101)
        assert comp.verified
        for z in patterns:
            assert rank_exact(comp.apply(Mat.diag(z))) == min(support(z), 2)

    def test_zero_family(self):
        fam = MatFamily.from_members([Mat.zeros(3, 3)])
        comp = fit_compressor(fam, 1, 1, seed=5)
        assert comp.verified
        assert rank_exact(comp.apply(Mat.zeros(3, 3))) == 0

    def test_identity_case(self, rng):
        mats = [random_mat(rng, 2, 3) for _ in range(4)]
        fam = MatFamily.from_members(mats)
        comp = fit_compressor(fam, 2, 3, seed=1)
        assert comp.method == "identity"
        for m in mats:
            assert comp.apply(m) == m

    def test_identity_embedding_pads(self, rng):
        mats = [random_mat(rng, 2, 2) for _ in range(3)]
        fam = MatFamily.from_members(mats)
        comp = fit_compressor(fam, 4, 3, seed=1)
        assert comp.method == "identity"
        for m in mats:
            out = comp.apply(m)
            assert out.shape == (4, 3)
            assert rank_exact(out) == rank_exact(m)

    def test_determinism(self):
        fam = MatFamily.diagonal_differences(4, (0, 1))
        a = fit_compressor(fam, 2, 2, seed=77)
        b = fit_compressor(fam, 2, 2, seed=77)
        assert a.left == b.left and a.right == b.right

    def test_retries_exhausted_carries_context(self):
        fam = MatFamily.diagonal_differences(3, (0, 1))
        # an entry range of zero draws the zero map, which cannot verify
        with pytest.raises(RetriesExhaustedError) as exc:
            fit_compressor(fam, 2, 2, seed=3, max_retries=2, entry_range=0)
        assert exc.value.member is not None
        assert exc.value.achieved != exc.value.required


class TestVerify:
    def test_fitted_compressor_clean(self):
        fam = MatFamily.diagonal_differences(5, (0, 1))
        comp = fit_compressor(fam, 2, 2, seed=9)
        report = verify_compressor(comp, fam)
        assert report.ok and report.checked == 3**5

    def test_zero_left_flags_every_nonzero_member(self):
        fam = MatFamily.diagonal_differences(3, (0, 1))
        comp = fit_compressor(fam, 2, 2, seed=9)
        broken = Compressor(
            left=Mat.zeros(2, 3),
            right=comp.right,
            source_shape=(3, 3),
            target_shape=(2, 2),
            seed=0,
            verified=False,
        )
        report = verify_compressor(broken, fam)
        nonzero_members = sum(1 for p in fam.diag_patterns if support(p) > 0)
        assert report.violation_count == nonzero_members

    def test_shape_mismatch_rejected(self):
        fam = MatFamily.diagonal_differences(3, (0, 1))
        comp = fit_compressor(MatFamily.diagonal_differences(4, (0, 1)), 2, 2, seed=1)
        with pytest.raises(SizeMismatchError):
            verify_compressor(comp, fam)

    def test_rank_never_increases_even_unverified(self, rng):
        # rank(L M R^T) <= min(rank M, a', b') holds for any linear map
        fam_mats = [random_mat(rng, 3, 3, bound=4) for _ in range(6)]
        left = random_mat(rng, 2, 3)
        right = random_mat(rng, 2, 3)
        comp = Compressor(
            left=left,
            right=right,
            source_shape=(3, 3),
            target_shape=(2, 2),
            seed=0,
            verified=False,
        )
        for m in fam_mats:
            assert rank_exact(comp.apply(m)) <= min(rank_exact(m), 2, 2)


class TestDiagonalFastPath:
    def test_apply_diag_matches_dense(self, rng):
        fam = MatFamily.diagonal_differences(4, (0, 1, 2))
        comp = fit_compressor(fam, 2, 2, seed=13)
        for z in list(fam.diag_patterns)[::7]:
            assert comp.apply_diag(z) == comp.apply(Mat.diag(z))

    def test_diagonal_apply_is_outer_product_sum(self):
        fam = MatFamily.diagonal_differences(3, (0, 1))
        comp = fit_compressor(fam, 2, 2, seed=3)
        z = (1, -1, 1)
        total = Mat.zeros(2, 2)
        for i, zi in enumerate(z):
            p = [comp.left.at(r, i) for r in range(2)]
            q = [comp.right.at(r, i) for r in range(2)]
            total = total + Mat.from_rows([[zi * a * b for b in q] for a in p])
        assert comp.apply_diag(z) == total


class TestVandermonde:
    def test_certified_on_binary_diagonal_differences(self):
        comp = vandermonde_compressor(4, 2)
        assert comp.verified and comp.method == "vandermonde"
        fam = MatFamily.diagonal_differences(4, (0, 1))
        report = verify_compressor(comp, fam)
        assert report.ok

    def test_square_case(self):
        comp = vandermonde_compressor(5, 2)
        fam = MatFamily.diagonal_differences(5, (0, 1))
        assert verify_compressor(comp, fam).ok


class TestSerialization:
    def test_round_trip(self):
        fam = MatFamily.diagonal_differences(4, (0, 1))
        comp = fit_compressor(fam, 2, 2, seed=19)
        back = Compressor.from_json(comp.to_json())
        assert back == comp
