import json

import numpy as np
import pytest

from bssp.errors import ContractViolation
from bssp.serialize import (RunManifest, dump_report, read_oracle_bundle,
                            write_oracle_bundle)
from bssp.unitary import oracle_unitary
from tests.helpers import random_bijective


def test_bundle_roundtrip(tmp_path):
    fb = random_bijective(2, 2, seed=12)
    path = tmp_path / "oracle.json"
    write_oracle_bundle(fb, seed=12, path=path)
    back = read_oracle_bundle(path)
    assert back.n == fb.n and back.d == fb.d and back.mode == fb.mode
    assert back.instance.period == fb.instance.period
    assert np.array_equal(back.final_prime, fb.final_prime)
    assert np.array_equal(back.zeta, fb.zeta)
    assert np.array_equal(back.eta, fb.eta)
    for a, b in zip(back.perms, fb.perms):
        assert np.array_equal(a.table, b.table)
    # the rebuilt unitary matches the original exactly
    assert np.array_equal(oracle_unitary(back).composite_table(),
                          oracle_unitary(fb).composite_table())


def test_bundle_version_check(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"format_version": 99}))
    with pytest.raises(ContractViolation):
        read_oracle_bundle(path)


def test_manifest_roundtrip(tmp_path):
    manifest = RunManifest(command="solve", params={"n": 2, "d": 1},
                           seed=7, outputs={"report": "report.json"})
    path = tmp_path / "manifest.json"
    manifest.write(path)
    back = RunManifest.read(path)
    assert back == manifest


def test_dump_report_handles_numpy_scalars(tmp_path):
    path = tmp_path / "report.json"
    dump_report({"a": np.float64(0.5), "b": np.int64(3),
                 "c": np.bool_(True), "d": np.arange(3)}, path)
    doc = json.loads(path.read_text())
    assert doc == {"a": 0.5, "b": 3, "c": True, "d": [0, 1, 2]}
