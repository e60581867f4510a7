from dataclasses import replace

import numpy as np
import pytest

from fuzzylbp.cli import cmd_bench, cmd_extract, cmd_synth, main, store_path
from fuzzylbp.config import RunConfig
from fuzzylbp.dataset import load_features, scan
from fuzzylbp.errors import FuzzyLbpError, ParameterError


@pytest.fixture(scope="module")
def small_data(tmp_path_factory):
    root = tmp_path_factory.mktemp("data")
    cmd_synth(root, 4, 4, (21, 21), seed=1, log=lambda *_: None)
    return root


def quiet(*_):
    pass


def test_config_roundtrip():
    cfg = RunConfig(root="/data/orl", dims=(90, 90), descriptors=("new", "rms"), svm_gamma=0.125, svm_c=2.5, seed=7)
    assert RunConfig.from_text(cfg.to_text()) == cfg
    assert RunConfig.from_text(RunConfig().to_text()) == RunConfig()


def test_config_file_format():
    cfg = RunConfig.from_text("# comment\nsvm-degrees = 1,2,3\n\nlbp-weights = classic  # inline\nsvm-gamma = auto\n")
    assert cfg.svm_degrees == (1, 2, 3)
    assert cfg.lbp_weights == "classic"
    assert cfg.svm_gamma is None
    for bad in ("nonsense", "colour = red", "kfold = 1", "dims = 64x64", "descriptors = s,lbp"):
        with pytest.raises(ParameterError):
            RunConfig.from_text(bad)


def test_synth_layout_and_determinism(tmp_path):
    a = cmd_synth(tmp_path / "a", 10, 10, (63, 63), seed=3, log=quiet)
    b = cmd_synth(tmp_path / "b", 10, 10, (63, 63), seed=3, log=quiet)
    assert len(a) == 100
    m = scan(tmp_path / "a")
    assert len(m.class_names) == 10 and len(m) == 100
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()
    c = cmd_synth(tmp_path / "c", 1, 1, (63, 63), seed=4, log=quiet)
    assert c[0].read_bytes() != a[0].read_bytes()


def test_extract_writes_stores(tmp_path, small_data):
    cfg = RunConfig(root=str(small_data), dims=(21, 21), out=str(tmp_path))
    written = cmd_extract(cfg, log=quiet)
    assert len(written) == 5
    for name in cfg.descriptors:
        store = load_features(store_path(tmp_path, name), scan(small_data, (21, 21)).digest())
        assert store.values.shape == (16, 49)
    assert RunConfig.load(tmp_path / "config.txt") == cfg


def test_extract_skips_existing(tmp_path, small_data):
    cfg = RunConfig(root=str(small_data), dims=(21, 21), out=str(tmp_path), descriptors=("new",))
    cmd_extract(cfg, log=quiet)
    before = store_path(tmp_path, "new").stat().st_mtime_ns
    messages = []
    assert cmd_extract(cfg, log=messages.append) == []
    assert "exists" in messages[0]
    assert store_path(tmp_path, "new").stat().st_mtime_ns == before
    assert len(cmd_extract(cfg, force=True, log=quiet)) == 1


def test_extract_worker_count_does_not_change_output(tmp_path, small_data):
    one = RunConfig(root=str(small_data), dims=(21, 21), out=str(tmp_path / "one"))
    four = replace(one, out=str(tmp_path / "four"), workers=3)
    cmd_extract(one, log=quiet)
    cmd_extract(four, log=quiet)
    for name in one.descriptors:
        assert store_path(one.out, name).read_bytes() == store_path(four.out, name).read_bytes()


def test_bench_outputs(tmp_path, small_data):
    cfg = RunConfig(root=str(small_data), dims=(21, 21), out=str(tmp_path), kfold=4, svm_degrees=(1, 2))
    cmd_extract(cfg, log=quiet)
    lines = []
    cmd_bench(cfg, save_models=True, log=lines.append)
    report = tmp_path / "report"
    rates = (report / "rates.csv").read_text().splitlines()
    assert rates[0] == "descriptor,classifier,rate_percent"
    assert len(rates) == 1 + 5 * 3
    kfold = (report / "kfold.csv").read_text().splitlines()
    assert len(kfold) == 1 + 5 * 4
    for name in ("SMF", "ZMF", "GaussMF", "NewMF", "RMS"):
        roc = (report / f"roc_{name}.csv").read_text().splitlines()
        assert roc[0] == "threshold,far,recognition_rate"
        assert roc[1] == "-inf,0.000000,0.000000"
        assert (report / "models" / f"{name}_poly2.json").exists()
    svg = (report / "roc.svg").read_text()
    assert svg.startswith("<svg") and svg.count("<polyline") == 5
    assert any("SVM Poly1" in line and "MIN" in line for line in lines)


def test_bench_missing_stores(tmp_path):
    with pytest.raises(FuzzyLbpError, match="missing feature stores"):
        cmd_bench(RunConfig(out=str(tmp_path)), log=quiet)


def test_bench_rejects_other_dataset(tmp_path, small_data):
    cfg = RunConfig(root=str(small_data), dims=(21, 21), out=str(tmp_path), descriptors=("s",), kfold=0)
    cmd_extract(cfg, log=quiet)
    with pytest.raises(FuzzyLbpError, match="different dataset"):
        cmd_bench(replace(cfg, dims=(24, 24)), log=quiet)


def test_main_end_to_end(tmp_path, capsys):
    data, run = tmp_path / "data", tmp_path / "run"
    assert main(["synth", "--out", str(data), "--classes", "3", "--per-class", "4", "--dims", "30x30"]) == 0
    assert main(["extract", "--root", str(data), "--out", str(run), "--dims", "30x30", "--descriptors", "new,rms"]) == 0
    assert main(["bench", "--out", str(run), "--descriptors", "new,rms", "--kfold", "2", "--svm-degrees", "1"]) == 0
    out = capsys.readouterr().out
    assert "New MF" in out and "RR@FAR=0.1" in out
    assert (run / "report" / "rates.csv").exists()


def test_main_config_file(tmp_path, small_data):
    conf = tmp_path / "run.conf"
    conf.write_text(f"root = {small_data}\ndims = 21x21\ndescriptors = gauss\nout = {tmp_path / 'out'}\nkfold = 0\n")
    assert main(["extract", "--config", str(conf)]) == 0
    assert main(["bench", "--config", str(conf), "--svm-c", "2.0"]) == 0
    echoed = RunConfig.load(tmp_path / "out" / "report" / "config.txt")
    assert echoed.svm_c == 2.0 and echoed.descriptors == ("gauss",)


def test_main_failures(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["extract", "--root", str(tmp_path), "--descriptors", "s,hog"])
    assert info.value.code == 2
    assert "valid names: s,z,gauss,new,rms" in capsys.readouterr().err
    assert main(["extract", "--root", str(tmp_path / "nope"), "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("fuzzylbp: error:")
    assert main(["bench", "--out", str(tmp_path / "empty")]) == 1
