import json

import numpy as np
import pytest

from agencykit.artifacts import (
    ArtifactRecord,
    audit,
    canonical_serialize,
    config_hash,
    make_artifact,
    to_jsonable,
    write_artifact,
)

# sha256 of "{}" and of '{"a":2,"b":1}', frozen from an independent tool
# (printf '%s' ... | sha256sum)
SHA_EMPTY_OBJECT = "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a"
SHA_SORTED_AB = "d3626ac30a87e6f7a6428233b3c68299976865fa5508e4267c5415c76af7a772"


def random_tree(rng, depth=3):
    if depth == 0 or rng.random() < 0.3:
        kind = rng.randint(0, 5)
        if kind == 0:
            return int(rng.randint(-1000, 1000))
        if kind == 1:
            return float(rng.standard_normal())
        if kind == 2:
            return bool(rng.random() < 0.5)
        if kind == 3:
            return None
        return "".join(chr(rng.randint(97, 123)) for _ in range(rng.randint(0, 6)))
    if rng.random() < 0.5:
        return [random_tree(rng, depth - 1) for _ in range(rng.randint(0, 4))]
    return {
        "".join(chr(rng.randint(97, 123)) for _ in range(rng.randint(1, 6))): random_tree(rng, depth - 1)
        for _ in range(rng.randint(0, 4))
    }


class TestCanonicalSerialize:
    def test_keys_sorted(self):
        assert canonical_serialize({"b": 1, "a": 2}) == b'{"a":2,"b":1}'

    def test_empty_object(self):
        assert canonical_serialize({}) == b"{}"

    def test_mixed_numbers_byte_exact(self):
        assert canonical_serialize({"x": [1, 2.5]}) == b'{"x":[1,2.5]}'

    def test_int_and_float_kinds_distinct(self):
        assert canonical_serialize({"v": 2}) == b'{"v":2}'
        assert canonical_serialize({"v": 2.0}) == b'{"v":2.0}'

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            canonical_serialize({"x": float("nan")})
        with pytest.raises(ValueError):
            canonical_serialize({"x": float("inf")})

    def test_unsupported_kind_rejected(self):
        with pytest.raises(ValueError):
            canonical_serialize({"x": {1, 2}})

    def test_non_string_key_rejected(self):
        with pytest.raises(ValueError):
            canonical_serialize({1: "x"})

    def test_round_trip_stable(self, rng):
        for _ in range(50):
            tree = random_tree(rng)
            payload = canonical_serialize(tree)
            parsed = json.loads(payload.decode("utf-8"))
            assert canonical_serialize(parsed) == payload


class TestConfigHash:
    def test_empty_object_hash_matches_external_tool(self):
        assert config_hash({}) == SHA_EMPTY_OBJECT

    def test_sorted_payload_hash_matches_external_tool(self):
        assert config_hash({"b": 1, "a": 2}) == SHA_SORTED_AB

    def test_key_order_irrelevant(self):
        assert config_hash({"a": 2, "b": 1}) == config_hash({"b": 1, "a": 2})

    def test_value_change_changes_hash(self):
        assert config_hash({"a": 2}) != config_hash({"a": 3})

    def test_shape(self):
        h = config_hash({"a": 1})
        assert len(h) == 64
        assert h == h.lower()


class TestToJsonable:
    def test_numpy_scalars_and_arrays(self):
        out = to_jsonable({"a": np.int64(3), "b": np.float64(0.5), "c": np.arange(3),
                           "d": np.bool_(True)})
        assert out == {"a": 3, "b": 0.5, "c": [0, 1, 2], "d": True}
        canonical_serialize(out)


class TestWriteArtifact:
    def test_write_and_round_trip(self, tmp_path):
        record = make_artifact("demo", {"n": 3}, {"value": 1.5})
        path = write_artifact(record, tmp_path)
        assert path.name == f"demo_{record.config_hash[:12]}.json"
        parsed = json.loads(path.read_text())
        assert parsed["config"] == {"n": 3}
        assert parsed["metrics"] == {"value": 1.5}

    def test_tampered_hash_refused(self, tmp_path):
        record = make_artifact("demo", {"n": 3}, {})
        bad = ArtifactRecord(
            artifact_type=record.artifact_type,
            config=record.config,
            config_hash="0" * 64,
            metrics=record.metrics,
            created_at_utc=record.created_at_utc,
            versions=record.versions,
        )
        with pytest.raises(ValueError):
            write_artifact(bad, tmp_path)

    def test_rewrite_idempotent_bytes(self, tmp_path):
        record = make_artifact("demo", {"n": 3}, {"value": [1, 2]})
        p1 = write_artifact(record, tmp_path)
        first = p1.read_bytes()
        p2 = write_artifact(record, tmp_path)
        assert p1 == p2
        assert p2.read_bytes() == first


class TestAudit:
    def _write(self, tmp_path, artifact_type="demo", config=None, metrics=None):
        record = make_artifact(artifact_type, config or {"n": 1}, metrics or {"v": 1})
        return write_artifact(record, tmp_path), record

    def test_fresh_directory_passes(self, tmp_path):
        self._write(tmp_path)
        report = audit(tmp_path, strict=True)
        assert report.passed
        assert report.files_checked == 1

    def test_tampered_config_fails_hash_check(self, tmp_path):
        path, _ = self._write(tmp_path)
        doc = json.loads(path.read_text())
        doc["config"]["n"] = 999
        path.write_text(json.dumps(doc))
        report = audit(tmp_path, strict=False)
        assert not report.passed
        assert any(rule == "config_hash_mismatch" for _, rule, _ in report.failures)

    def test_bad_distribution_fails_stochasticity(self, tmp_path):
        self._write(tmp_path, metrics={"out_distribution": [1.2, -0.2]})
        report = audit(tmp_path)
        assert any(rule == "stochasticity" for _, rule, _ in report.failures)

    def test_bad_row_sums_fail(self, tmp_path):
        self._write(tmp_path, metrics={"w_rows": [[0.5, 0.4], [0.5, 0.5]]})
        report = audit(tmp_path)
        assert any(rule == "stochasticity" for _, rule, _ in report.failures)

    def test_good_probability_objects_pass(self, tmp_path):
        self._write(tmp_path, metrics={"out_distribution": [0.25, 0.75],
                                       "w_rows": [[0.5, 0.5], [1.0, 0.0]]})
        assert audit(tmp_path).passed

    def test_missing_field_fails(self, tmp_path):
        path, _ = self._write(tmp_path)
        doc = json.loads(path.read_text())
        del doc["versions"]
        path.write_text(json.dumps(doc))
        report = audit(tmp_path)
        assert any(rule == "missing_fields" for _, rule, _ in report.failures)

    def test_unreadable_file_is_failure_entry(self, tmp_path):
        (tmp_path / "broken.json").write_text("{not json")
        report = audit(tmp_path)
        assert report.files_checked == 1
        assert any(rule == "unreadable" for _, rule, _ in report.failures)

    def test_filename_mismatch_strictness(self, tmp_path):
        path, _ = self._write(tmp_path)
        renamed = tmp_path / "demo_wrongname.json"
        path.rename(renamed)
        strict = audit(tmp_path, strict=True)
        loose = audit(tmp_path, strict=False)
        assert any(rule == "filename_hash_prefix" for _, rule, _ in strict.failures)
        assert loose.passed
        assert any(rule == "filename_hash_prefix" for _, rule, _ in loose.warnings)

    def test_missing_directory_raises(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            audit(tmp_path / "nope")
