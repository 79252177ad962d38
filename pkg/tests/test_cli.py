import json
from unittest.mock import patch

import numpy as np
import pandas as pd
import pytest

from src.cli.main import EXIT_NON_GENERIC, EXIT_OK, EXIT_USAGE, build_parser, main, verify_report
from src.determinantal.detsys import instance_record, load_instance
from src.utils.errors import NonGenericInstanceError


def test_gen_writes_instance(tmp_path):
    out = tmp_path / "inst.json"
    assert main(["gen", "--n", "4", "--k", "4", "--r", "2", "--seed", "1", "--out", str(out)]) == EXIT_OK
    record = json.loads(out.read_text())
    assert np.asarray(record["coeffs"]).size == 64
    assert record["r"] == 2


def test_gen_is_reproducible(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    main(["gen", "--n", "3", "--seed", "5", "--out", str(first)])
    main(["gen", "--n", "3", "--seed", "5", "--out", str(second)])
    assert first.read_bytes() == second.read_bytes()


def test_gen_guard_failure_exits_2(capsys):
    with patch("src.cli.main.generate_generic_system", side_effect=NonGenericInstanceError("degenerate", seed=3)):
        assert main(["gen", "--n", "3", "--seed", "3"]) == EXIT_NON_GENERIC
    assert "another --seed" in capsys.readouterr().err


def test_usage_errors_exit_1(instance_file):
    assert main(["gen"]) == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["gb", "--algo", "f4"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args([])
    assert exc.value.code == EXIT_USAGE


def test_gb_det_corank_one(instance_file, tmp_path):
    out = tmp_path / "gb.json"
    assert main(["gb", "--instance", instance_file, "--format", "json", "--out", str(out)]) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["stats"]["reductions_to_zero"] == 0
    assert payload["basis"]["degree_bound"] == 3
    assert set(payload["stats"]["stages"]) == {"syz1", "syz2"}


def test_gb_standard_text_and_trace(instance_file, tmp_path):
    out, trace = tmp_path / "gb.txt", tmp_path / "trace.jsonl"
    assert main(["gb", "--instance", instance_file, "--algo", "std", "--out", str(out),
                 "--trace", str(trace)]) == EXIT_OK
    assert len(out.read_text().splitlines()) > 9
    records = pd.read_json(str(trace), lines=True)
    assert set(records["degree"]) == {2, 3}


def test_gb_degree_bound_below_generators(instance_file, tmp_path):
    out = tmp_path / "gb.csv"
    assert main(["gb", "--instance", instance_file, "--degree-bound", "1", "--format", "csv",
                 "--out", str(out)]) == EXIT_OK


def test_gb_corank_one_needs_r_equal_n_minus_2():
    assert main(["gb", "--n", "4", "--k", "9", "--r", "1", "--algo", "det-corank1"]) == EXIT_USAGE


def test_gb_strict_run_exits_2(instance_file):
    with patch("src.cli.main.det_f5_corank_one", side_effect=NonGenericInstanceError("zero row", seed=None)):
        assert main(["gb", "--instance", instance_file]) == EXIT_NON_GENERIC


def test_gb_affine(tmp_path):
    out = tmp_path / "gb.json"
    assert main(["gb", "--n", "3", "--k", "3", "--affine", "--format", "json", "--out", str(out)]) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["affine_basis"]
    assert all("x4" not in line for line in payload["affine_basis"])


def test_syz_exports_json(instance_file, tmp_path):
    out = tmp_path / "syz.json"
    assert main(["syz", "--instance", instance_file, "--out", str(out)]) == EXIT_OK
    payload = json.loads(out.read_text())
    assert len(payload["syzygies"]) == 16
    assert payload["ambient_rank"] == 9


def test_syz_second_as_csv(instance_file, tmp_path):
    out = tmp_path / "syz2.csv"
    assert main(["syz", "--instance", instance_file, "--second", "--format", "csv", "--out", str(out)]) == EXIT_OK
    frame = pd.read_csv(out)
    assert len(frame) == 9
    assert frame.shape[1] == 1 + 16 * 4


def test_verify_generic(corank_one_n3):
    report = verify_report(corank_one_n3)
    assert report["passed"].all()
    assert report.loc[report["check"] == "syzygy count", "measured"].item() == 16
    assert report.loc[report["check"] == "syzygies span the degree-1 kernel", "measured"].item() == 16


def test_verify_degenerate_instance(tmp_path, corank_one_n3):
    record = instance_record(corank_one_n3)
    coeffs = np.asarray(record["coeffs"])
    coeffs[:, 1, :] = coeffs[:, 0, :]
    record["coeffs"] = coeffs.tolist()
    path = tmp_path / "degenerate.json"
    path.write_text(json.dumps(record))
    report = verify_report(load_instance(str(path))).set_index("check")
    assert report.loc["syzygy count", "passed"]
    assert report.loc["syzygies annihilate", "passed"]
    assert not report.loc["rank degree 2", "passed"]
    assert main(["verify", "--instance", str(path)]) == EXIT_OK


def test_verify_needs_corank_one():
    assert main(["verify", "--n", "4", "--k", "9", "--r", "1"]) == EXIT_USAGE


def test_bench_row(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--grid", "4,2,4", "--seed", "1", "--out", str(out)]) == EXIT_OK
    df = pd.read_csv(out)
    assert df.loc[0, "D"] == 5
    assert df.loc[0, "red_std"] == 56
    assert df.loc[0, "red_det"] == 0


def test_bench_empty_grid():
    assert main(["bench", "--table", "higher", "--max-n", "3"]) == EXIT_USAGE
