from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from octak.abgroup import AbGroupDescriptor
from octak.errors import BudgetExceeded, NotIdempotent
from octak.residue import (P_PROJECTOR, FaceMap, FaceModule, SignMatrix, apply_map, barycentric_lift,
                           congruence_classes, enumerate_faces, format_face, free_module, idempotent_sign_matrices,
                           is_idempotent_projector, join, k0_f_infinity, k0_reduce, module_image,
                           module_isomorphism, negate, project, verify_ses)

SMALL_IDEMPOTENTS = [A for n in (1, 2, 3) for A in idempotent_sign_matrices(n)]


def block_sum(A: SignMatrix, B: SignMatrix) -> SignMatrix:
    n, m = A.nrows, B.nrows
    rows = [tuple(r) + (0,) * m for r in A.rows] + [(0,) * n + tuple(r) for r in B.rows]
    return SignMatrix(tuple(rows), n + m)


def signed_permute(A: SignMatrix, perm, signs) -> SignMatrix:
    """Conjugate A by the signed permutation e_k -> signs[k] e_perm[k]."""
    n = A.nrows
    rows = [[0] * n for _ in range(n)]
    for r in range(n):
        for c in range(n):
            rows[perm[r]][perm[c]] = signs[r] * A.rows[r][c] * signs[c]
    return SignMatrix(tuple(map(tuple, rows)), n)


@st.composite
def idempotents(draw, max_n=6):
    blocks = draw(st.lists(st.sampled_from(SMALL_IDEMPOTENTS), min_size=1, max_size=3))
    A = blocks[0]
    for B in blocks[1:]:
        if A.nrows + B.nrows <= max_n:
            A = block_sum(A, B)
    perm = draw(st.permutations(range(A.nrows)))
    signs = draw(st.lists(st.sampled_from((1, -1)), min_size=A.nrows, max_size=A.nrows))
    return signed_permute(A, perm, signs)


class TestFaces:
    @pytest.mark.parametrize("n, size", [(1, 3), (2, 9), (3, 27)])
    def test_counts(self, n, size):
        faces = enumerate_faces(n)
        assert len(faces) == size and faces == sorted(faces)

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            enumerate_faces(13)

    def test_project(self):
        h = Fraction(1, 2)
        assert project((h, h)) == (1, 1)
        assert project((0, 1)) == (0, 1)
        assert project((Fraction(-1, 3), 0, Fraction(1, 3))) == (-1, 0, 1)

    def test_lift(self):
        assert barycentric_lift((1, 1)) == (Fraction(1, 2), Fraction(1, 2))
        assert barycentric_lift((0, -1)) == (0, -1)
        assert barycentric_lift((0, 0)) == (0, 0)

    @pytest.mark.parametrize("n", range(7))
    def test_project_inverts_lift(self, n):
        for f in enumerate_faces(n):
            v = barycentric_lift(f)
            assert project(v) == f
            assert sum(abs(x) for x in v) == (1 if any(f) else 0)

    def test_operations(self):
        assert join((1, 0), (0, 1)) == (1, 1)
        assert join((1, 0), (-1, 1)) == (0, 0)
        assert join((1, 0), (0, 0)) == (0, 0)
        assert negate((1, 0, -1)) == (-1, 0, 1)
        assert format_face((1, 0, -1)) == "+0-"


class TestProjectors:
    def test_examples(self):
        I2 = SignMatrix.identity(2)
        assert all(apply_map(I2, f) == f for f in enumerate_faces(2))
        assert apply_map(P_PROJECTOR, (1, 0)) == (1, 1)
        assert apply_map(P_PROJECTOR, (0, 1)) == (0, 1)

    def test_idempotency_examples(self):
        assert is_idempotent_projector(SignMatrix.identity(3))
        assert is_idempotent_projector(P_PROJECTOR)
        assert not is_idempotent_projector(SignMatrix(((0, 1), (1, 0))))

    def test_module_images(self):
        assert len(module_image(SignMatrix.identity(2))) == 9
        assert len(module_image(SignMatrix.zero(2, 2))) == 1
        P = module_image(P_PROJECTOR)
        assert P.elements == {(0, 0), (0, 1), (0, -1), (1, 1), (-1, -1)}
        with pytest.raises(NotIdempotent):
            module_image(SignMatrix(((0, 1), (1, 0))))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_identity_image_is_everything(self, n):
        assert len(module_image(SignMatrix.identity(n))) == 3 ** n

    def test_small_idempotents_act_idempotently(self):
        assert len(SMALL_IDEMPOTENTS) == 268
        for A in SMALL_IDEMPOTENTS:
            M = module_image(A)
            assert all(apply_map(A, f) == f for f in M.elements)
            assert M.is_closed()

    @settings(max_examples=25)
    @given(idempotents())
    def test_idempotent_up_to_six(self, A):
        assert is_idempotent_projector(A)
        for f in enumerate_faces(A.nrows):
            g = apply_map(A, f)
            assert apply_map(A, g) == g

    @given(st.sampled_from(SMALL_IDEMPOTENTS), st.data())
    def test_sign_conjugation_preserves_the_module(self, A, data):
        p = data.draw(st.lists(st.sampled_from((1, -1)), min_size=A.nrows, max_size=A.nrows))
        B = A.conjugate_by_signs(p)
        assert is_idempotent_projector(B)
        M, N = module_image(A), module_image(B)
        assert len(M) == len(N)
        assert module_isomorphism(M, N, {x: tuple(s * q for s, q in zip(x, p)) for x in M.elements})


class TestSequences:
    F1 = free_module(1)
    F2 = free_module(2)
    P = module_image(P_PROJECTOR, "P")

    def test_first_sequence(self):
        mono = FaceMap.of(SignMatrix.from_columns([(1, 1)]), P_PROJECTOR)
        epi = FaceMap.of(SignMatrix(((0, 1),)))
        assert verify_ses(mono, epi, self.F1, self.P, self.F1)

    def test_second_sequence(self):
        mono = FaceMap.of(SignMatrix.identity(2))
        epi = FaceMap.of(SignMatrix(((1, 0),)))
        assert verify_ses(mono, epi, self.P, self.F2, self.F1)

    def test_zero_mono_is_not_injective(self):
        chk = verify_ses(FaceMap.of(SignMatrix.zero(2, 1)), FaceMap.of(SignMatrix(((0, 1),))), self.F1, self.P, self.F1)
        assert not chk and chk.failure == "mono not injective"

    def test_wrong_quotient_is_detected(self):
        # F_inf >-> F_inf(2) on e_1 has quotient F_inf via e_2, not via e_1
        mono = FaceMap.of(SignMatrix.from_columns([(1, 0)]))
        assert verify_ses(mono, FaceMap.of(SignMatrix(((0, 1),))), self.F1, self.F2, self.F1)
        chk = verify_ses(mono, FaceMap.of(SignMatrix(((1, 0),))), self.F1, self.F2, self.F1)
        assert not chk and chk.failure.startswith("fibers")

    def test_epi_must_be_onto(self):
        chk = verify_ses(FaceMap.of(SignMatrix.from_columns([(1, 0)])), FaceMap.of(SignMatrix.zero(1, 2)),
                         self.F1, self.F2, self.F1)
        assert not chk and chk.failure == "epi not surjective"

    def test_congruence_of_the_whole_module_is_one_class(self):
        assert len(congruence_classes(self.F2, self.F2.elements)) == 1
        assert len(congruence_classes(self.F2, [(0, 0)])) == 9


def reverify(trace):
    """Recheck every step of a reduction trace without trusting its recorded witnesses."""
    for step in trace.steps:
        A, B = step.before, step.after
        M = module_image(A)
        if step.kind == "peel":
            k = step.index
            assert B == A.delete(k)
            mono = FaceMap.of(SignMatrix.from_columns([A.column(k)]))
            keep = [r for r in range(A.nrows) if r != k]
            rho = SignMatrix(tuple(tuple(int(c == r) for c in range(A.nrows)) for r in keep), A.nrows)
            assert verify_ses(mono, FaceMap.of(rho), free_module(1), M, module_image(B))
        elif step.kind == "sign-conjugation":
            p = [1 if s == "+" else -1 for s in step.witness["signs"]]
            assert B == A.conjugate_by_signs(p)
            assert module_isomorphism(M, module_image(B), {x: tuple(s * q for s, q in zip(x, p)) for x in M.elements})
        else:
            k = step.index
            assert B == A.delete(k)
            N = module_image(B) if B.nrows else FaceModule(0, frozenset({()}))
            if step.witness.get("zero_module"):
                assert len(M) == 1 and len(N) == 1
            else:
                assert module_isomorphism(M, N, {x: x[:k] + x[k + 1:] for x in M.elements})
    assert trace.steps == () or trace.steps[-1].after.nrows == 0


class TestReduction:
    def test_examples(self):
        assert k0_reduce(SignMatrix.identity(1)).copies == 1
        t = k0_reduce(SignMatrix.identity(2))
        assert t.copies == 2 and [s.kind for s in t.steps] == ["peel", "peel"]
        t = k0_reduce(P_PROJECTOR)
        assert t.copies == 2
        first = t.steps[0]
        assert first.witness["mono"] == [["+", "+"]] and first.witness["epi"] == [["0+"]]

    def test_rejects_non_idempotent(self):
        with pytest.raises(NotIdempotent):
            k0_reduce(SignMatrix(((0, 1), (1, 0))))

    def test_all_small_idempotents_reduce(self):
        for A in SMALL_IDEMPOTENTS:
            t = k0_reduce(A)
            reverify(t)
            # a module with 3 elements per free summand: |M| >= 2 copies + 1
            assert len(module_image(A)) >= 2 * t.copies + 1

    @given(idempotents(max_n=5))
    def test_larger_idempotents_reduce(self, A):
        reverify(k0_reduce(A))


class TestK0:
    def test_group_is_trivial(self):
        G, ledger = k0_f_infinity()
        assert G == AbGroupDescriptor.trivial()
        assert ledger.all_verified()

    def test_ledger_contents(self):
        _, ledger = k0_f_infinity()
        rels = {(r.whole, r.sub, r.quotient) for r in ledger.relations}
        assert ("P", "F_inf", "F_inf") in rels
        assert ("F_inf(2)", "P", "F_inf") in rels
        assert ledger.reductions["F_inf(2)"].copies == 2
        assert sorted(len(M) for M in ledger.modules.values()) == [3, 5, 9]

    def test_without_the_reduction_the_group_is_free(self):
        # the two sequences alone only give [F_inf(2)] = 3[F_inf]
        _, ledger = k0_f_infinity()
        ledger.reductions.clear()
        assert ledger.quotient_group() == AbGroupDescriptor.free(1)
