import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

import kms_cayley as kc
from kms_cayley.errors import OracleUnavailableError, UsageError


class TestEndpoint:
    def test_heisenberg_commutator_is_central(self, heisenberg, matrix_endpoint):
        word = ("a", "b", "a_inv", "b_inv")
        assert kc.endpoint(heisenberg, word) == (0, 0, 1)
        assert matrix_endpoint(word) == (0, 0, 1)

    def test_dihedral_conjugation(self, dinf):
        assert kc.endpoint(dinf, ("b", "a", "b")) == (-1, 0)

    def test_empty_word_is_identity(self, heisenberg, dinf, z1):
        for spec in (heisenberg, dinf, z1):
            assert kc.endpoint(spec, ()) == spec.oracle.identity()

    @given(st.lists(st.sampled_from(
        ["a", "a_inv", "b", "b_inv", "c", "c_inv"]), max_size=8))
    def test_heisenberg_matches_matrix_oracle(self, word):
        spec = kc.builtin_spec("heisenberg")
        from conftest import heisenberg_matrix_endpoint
        assert kc.endpoint(spec, tuple(word)) == heisenberg_matrix_endpoint(word)

    def test_concatenation_homomorphism_exhaustive(self, heisenberg, dinf, z1):
        # endpoint(t u) = endpoint(t) endpoint(u), words up to length 3
        for spec in (heisenberg, dinf, z1):
            oracle = spec.oracle
            words = [t for L in range(4)
                     for t in itertools.product(spec.generators, repeat=L)]
            ends = {t: kc.endpoint(spec, t) for t in words}
            for t in words:
                for u in words:
                    assert ends.get(t + u, kc.endpoint(spec, t + u)) == \
                        oracle.multiply(ends[t], ends[u])

    def test_no_oracle_is_unsupported(self):
        spec = kc.GroupSpec("raw", ("p", "q"), {"p": 1.0, "q": 1.0},
                            {"p": (1.0,), "q": (-1.0,)}, rank=1, oracle=None)
        with pytest.raises(OracleUnavailableError):
            kc.endpoint(spec, ("p",))


class TestSameEndpoint:
    def test_heisenberg_ab_equals_bac(self, heisenberg):
        assert kc.same_endpoint(heisenberg, ("a", "b"), ("b", "a", "c"))

    def test_dihedral_involution(self, dinf):
        assert kc.same_endpoint(dinf, ("b", "b"), ())

    def test_z_plus_minus(self, z1):
        assert not kc.same_endpoint(z1, ("e1",), ("e1_inv",))


class TestBall:
    def test_z_interval(self, z1):
        window = kc.ball(z1, 2)
        assert sorted(g[0] for g in window.elements) == [-2, -1, 0, 1, 2]
        for g in window.elements:
            assert [h[0] for _, h in window.neighbors[g]] == [g[0] + 1, g[0] - 1]

    def test_dihedral_radius_one(self, dinf):
        window = kc.ball(dinf, 1)
        assert set(window.elements) == {(0, 0), (1, 0), (0, 1)}

    def test_heisenberg_radius_two_count(self, heisenberg, matrix_endpoint):
        # brute-force word enumeration is the counting oracle
        brute = {matrix_endpoint(w)
                 for L in range(3)
                 for w in itertools.product(heisenberg.generators, repeat=L)}
        window = kc.ball(heisenberg, 2)
        assert set(window.elements) == brute
        assert len(window) == 29

    def test_nested(self, heisenberg):
        smaller = set(kc.ball(heisenberg, 2).elements)
        larger = set(kc.ball(heisenberg, 3).elements)
        assert smaller <= larger

    def test_finite_table_saturates(self):
        spec = kc.builtin_spec("cyclic:5")
        assert len(kc.ball(spec, 10)) == 5

    def test_radius_cap(self, heisenberg):
        with pytest.raises(ValueError):
            kc.ball(heisenberg, 13)


class TestAbelianized:
    def test_heisenberg_element(self, heisenberg):
        np.testing.assert_allclose(
            kc.abelianized(heisenberg, (2, -1, 7)), [2.0, -1.0])

    def test_empty_word(self, heisenberg):
        np.testing.assert_array_equal(kc.abelianized(heisenberg, ()), [0.0, 0.0])

    def test_dihedral_rank_zero(self, dinf):
        assert kc.abelianized(dinf, ("a", "b")).shape == (0,)
        assert kc.abelianized(dinf, (3, 1)).shape == (0,)

    def test_constant_on_endpoint_classes(self, heisenberg):
        words = [t for L in range(4)
                 for t in itertools.product(heisenberg.generators, repeat=L)]
        classes = {}
        for t in words:
            classes.setdefault(kc.endpoint(heisenberg, t), []).append(
                kc.abelianized(heisenberg, t))
        for vecs in classes.values():
            for v in vecs[1:]:
                np.testing.assert_array_equal(v, vecs[0])


class TestValidate:
    def test_builtins_pass(self):
        for name in ("heisenberg", "dihedral_infinite", "zn:1", "zn:2", "cyclic:3"):
            report = kc.validate_spec(kc.builtin_spec(name))
            assert report.ok, report.errors

    def test_single_generator_fails(self):
        spec = kc.GroupSpec("z-one-gen", ("p",), {"p": 1.0}, {"p": (1.0,)},
                            rank=1, oracle=kc.groups.FreeAbelianOracle({"p": (1,)}))
        report = kc.validate_spec(spec)
        assert not report.ok
        assert any("two elements" in e for e in report.errors)

    def test_nonpositive_potential_fails(self):
        spec = kc.free_abelian_spec(1, {"e1": -1.0})
        report = kc.validate_spec(spec)
        assert not report.ok

    def test_quadrant_generators_fail_positive_spanning(self):
        # Z^2 with only e1, e2: v = (-1,-1) sees no positive generator
        oracle = kc.groups.FreeAbelianOracle({"p": (1, 0), "q": (0, 1)})
        spec = kc.GroupSpec("z2-quadrant", ("p", "q"), {"p": 1.0, "q": 1.0},
                            {"p": (1.0, 0.0), "q": (0.0, 1.0)}, rank=2,
                            oracle=oracle)
        report = kc.validate_spec(spec)
        assert not report.ok
        assert any("positive-spanning" in e for e in report.errors)

    def test_asymmetric_z_passes(self):
        # Y = {+1, -2} spans positively and generates Z as a semigroup
        oracle = kc.groups.FreeAbelianOracle({"p": (1,), "q": (-2,)})
        spec = kc.GroupSpec("z-asym", ("p", "q"), {"p": 1.0, "q": 1.0},
                            {"p": (1.0,), "q": (-2.0,)}, rank=1, oracle=oracle)
        report = kc.validate_spec(spec)
        assert report.ok, report.errors

    def test_rank_deficiency_fails(self):
        oracle = kc.groups.FreeAbelianOracle({"p": (1, 0), "q": (-1, 0)})
        spec = kc.GroupSpec("flat", ("p", "q"), {"p": 1.0, "q": 1.0},
                            {"p": (1.0, 0.0), "q": (-1.0, 0.0)}, rank=2,
                            oracle=oracle)
        report = kc.validate_spec(spec)
        assert any("rank deficient" in e for e in report.errors)

    def test_duplicate_direction_warns(self):
        spec = kc.GroupSpec(
            "dup", ("p", "p2", "q"), {"p": 1.0, "p2": 2.0, "q": 1.0},
            {"p": (1.0,), "p2": (2.0,), "q": (-1.0,)}, rank=1,
            oracle=kc.groups.FreeAbelianOracle({"p": (1,), "p2": (2,), "q": (-1,)}))
        report = kc.validate_spec(spec)
        assert report.ok
        assert report.warnings

    def test_inconsistent_cvectors_fail_homomorphism(self):
        # c(b) must vanish on the dihedral group; a nonzero value is caught
        spec = kc.GroupSpec("bad-dinf", ("a", "b"), {"a": 1.0, "b": 1.0},
                            {"a": (0.0,), "b": (1.0,)}, rank=1,
                            oracle=kc.groups.DihedralInfiniteOracle())
        report = kc.validate_spec(spec)
        assert not report.ok


class TestInterchange:
    def test_json_roundtrip(self, tmp_path, heisenberg):
        data = kc.spec_to_json(heisenberg)
        clone = kc.spec_from_json(data)
        assert clone.generators == heisenberg.generators
        assert clone.rank == heisenberg.rank
        assert kc.endpoint(clone, ("a", "b")) == kc.endpoint(heisenberg, ("a", "b"))

    def test_load_group_file(self, tmp_path):
        import json
        path = tmp_path / "asym.json"
        path.write_text(json.dumps({
            "name": "z-asym", "generators": ["p", "q"],
            "F": {"p": 1.0, "q": 1.0}, "rank": 1,
            "c": {"p": [1.0], "q": [-2.0]}, "oracle": "free_abelian"}))
        spec = kc.load_group(str(path))
        assert kc.endpoint(spec, ("p", "q")) == (-1,)
        assert kc.validate_spec(spec).ok

    def test_fractional_free_abelian_images_rejected(self, tmp_path):
        import json
        path = tmp_path / "frac.json"
        path.write_text(json.dumps({
            "name": "bad", "generators": ["p", "q"],
            "F": {"p": 1.0, "q": 1.0}, "rank": 1,
            "c": {"p": [0.5], "q": [-0.5]}, "oracle": "free_abelian"}))
        with pytest.raises(UsageError):
            kc.load_group(str(path))

    def test_unknown_builtin(self):
        with pytest.raises(UsageError):
            kc.builtin_spec("lamplighter")

    def test_parse_word(self, heisenberg):
        assert kc.parse_word(heisenberg, "a,b,a_inv") == ("a", "b", "a_inv")
        assert kc.parse_word(heisenberg, "") == ()
        with pytest.raises(UsageError):
            kc.parse_word(heisenberg, "a,zz")


class TestFiniteTable:
    def test_cyclic_inverse(self):
        spec = kc.builtin_spec("cyclic:5")
        assert kc.endpoint(spec, ("g", "g_inv")) == 0
        assert kc.endpoint(spec, ("g",) * 5) == 0

    def test_cyclic_two_shares_image(self):
        spec = kc.builtin_spec("cyclic:2")
        assert spec.oracle.image("g") == spec.oracle.image("g_inv") == 1
        assert kc.validate_spec(spec).ok
