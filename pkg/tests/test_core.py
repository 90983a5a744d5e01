import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from negood import EmbeddingMatrix, ScoreConfig, ScoreReport, load_emb1, validate, write_emb1
from negood.core import labels_sidecar, module_rng
from negood.errors import (
    ConfigError,
    EmptyMatrix,
    LabelCountMismatch,
    NonUnitRow,
)

from helpers import unit_matrix


class TestValidate:
    def test_orthonormal_rows_pass(self):
        m = EmbeddingMatrix(np.array([[1.0, 0.0], [0.0, 1.0]]))
        assert validate(m) is m

    def test_non_unit_row_reports_index_and_norm(self):
        m = EmbeddingMatrix(np.array([[2.0, 0.0]]))
        with pytest.raises(NonUnitRow) as exc:
            validate(m)
        assert exc.value.index == 0
        assert exc.value.norm == pytest.approx(2.0)

    def test_label_count_mismatch(self):
        m = EmbeddingMatrix(np.eye(2), labels=("only_one",))
        with pytest.raises(LabelCountMismatch):
            validate(m)

    def test_empty_matrix(self):
        with pytest.raises(EmptyMatrix):
            validate(EmbeddingMatrix(np.zeros((0, 4))))

    def test_one_dimensional_embeddings_rejected(self):
        with pytest.raises(EmptyMatrix):
            validate(EmbeddingMatrix(np.ones((3, 1))))

    def test_norm_tolerance_is_loose_enough_for_float32(self):
        rng = np.random.default_rng(11)
        validate(unit_matrix(rng, 50, 512))


class TestEmb1RoundTrip:
    @settings(max_examples=30, deadline=None)
    @given(
        rows=st.integers(1, 8),
        dim=st.integers(2, 17),
        seed=st.integers(0, 2**31),
        with_labels=st.booleans(),
    )
    def test_round_trip_bit_identical(self, rows, dim, seed, with_labels):
        rng = np.random.default_rng(seed)
        m = unit_matrix(rng, rows, dim, labels=with_labels)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "m.emb"
            write_emb1(m, path)
            back = load_emb1(path)
        assert back.data.tobytes() == m.data.tobytes()
        assert back.labels == m.labels

    def test_sidecar_path_replaces_extension(self):
        assert labels_sidecar("dir/selected.emb") == Path("dir/selected.labels")

    def test_bad_magic_rejected(self, tmp_path):
        p = tmp_path / "bad.emb"
        p.write_bytes(b"NOPE" + b"\x00" * 20)
        with pytest.raises(ValueError, match="magic"):
            load_emb1(p)

    def test_truncated_payload_rejected(self, tmp_path):
        rng = np.random.default_rng(0)
        p = write_emb1(unit_matrix(rng, 3, 4), tmp_path / "t.emb")
        p.write_bytes(p.read_bytes()[:-4])
        with pytest.raises(ValueError, match="bytes"):
            load_emb1(p)

    def test_sidecar_count_mismatch_caught_on_load(self, tmp_path):
        rng = np.random.default_rng(1)
        p = write_emb1(unit_matrix(rng, 3, 4), tmp_path / "m.emb")
        labels_sidecar(p).write_text("a\nb\n")
        with pytest.raises(LabelCountMismatch):
            load_emb1(p)

    def test_load_validates_rows(self, tmp_path):
        bad = EmbeddingMatrix(np.array([[0.5, 0.0]], dtype=np.float32))
        p = write_emb1(bad, tmp_path / "bad.emb")
        with pytest.raises(NonUnitRow):
            load_emb1(p)
        assert load_emb1(p, check=False).rows == 1


class TestScoreConfig:
    def test_defaults_match_reference_operating_point(self):
        c = ScoreConfig()
        assert (c.kappa, c.B, c.tau, c.sigma, c.L, c.alpha) == (0.01, 100, 0.5, 0.001, 12000, 100)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kappa": 0.0},
            {"kappa": -1.0},
            {"tau": 1.0},
            {"tau": -0.1},
            {"sigma": -0.5},
            {"B": 0},
            {"B": 7, "L": 6},
            {"alpha": 0},
            {"mass_floor": 0.0},
            {"lambda_mode": "whatever"},
            {"lambda_mode": "fixed", "lambda_fixed": 0.0},
        ],
    )
    def test_invariant_violations_raise(self, kwargs):
        with pytest.raises(ConfigError):
            ScoreConfig(**kwargs)

    def test_dict_round_trip(self):
        c = ScoreConfig(kappa=1.0, tau=0.25, L=50, B=5, alpha=3, seed=9)
        assert ScoreConfig.from_dict(c.to_dict()) == c

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError, match="unknown"):
            ScoreConfig.from_dict({"kappa": 1.0, "bogus": 2})


class TestScoreReport:
    def test_non_finite_scores_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            ScoreReport("mcm", np.array([0.5, np.inf]), 0, ScoreConfig())

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError, match="method"):
            ScoreReport("energy", np.array([0.5]), 0, ScoreConfig())


def test_module_rng_streams_are_independent():
    a = module_rng(7, 1).standard_normal(4)
    b = module_rng(7, 2).standard_normal(4)
    again = module_rng(7, 1).standard_normal(4)
    assert np.array_equal(a, again)
    assert not np.array_equal(a, b)
