import json

import numpy as np
import pytest

from martharm.cli import main
from martharm.filtration import dyadic_lebesgue, save_tree
from martharm.harness.reporting import parse_json
from martharm.martingale import StepFunction, save_step_function


def test_verify_to_stdout(capsys):
    code = main(["verify", "lemma-3.5-scalar", "--seed", "7", "--format", "json"])
    out = capsys.readouterr().out
    records = parse_json(out)
    assert code == 0
    assert records and all(r.passed for r in records)


def test_verify_writes_report_and_figure(tmp_path, capsys):
    out = tmp_path / "report.csv"
    code = main(
        ["verify", "prop-3.1-const", "--depth", "4", "--format", "csv", "--out", str(out)]
    )
    assert code == 0
    assert out.exists()
    assert out.read_text().startswith("suite,anchor,")
    assert (tmp_path / "report.png").exists()


def test_verify_no_figure(tmp_path):
    out = tmp_path / "r.json"
    main(["verify", "lemma-3.5-scalar", "--out", str(out), "--no-figure"])
    assert out.exists()
    assert not (tmp_path / "r.png").exists()


def test_verify_unknown_suite():
    with pytest.raises(ValueError):
        main(["verify", "bogus-suite"])


def test_decompose_command(tmp_path, capsys):
    tree = dyadic_lebesgue(4)
    rng = np.random.default_rng(0)
    tree_path = tmp_path / "tree.json"
    f_path = tmp_path / "f.json"
    g_path = tmp_path / "g.json"
    save_tree(tree, tree_path)
    save_step_function(StepFunction(tree, rng.standard_normal(16)), f_path)
    save_step_function(StepFunction(tree, rng.standard_normal(16)), g_path)
    code = main(["decompose", "--tree", str(tree_path), "--f", str(f_path), "--g", str(g_path)])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["identity_max_rel_error"] <= 1e-10
    for key in ("pi1_h1", "pi2_Hlog", "l_variation"):
        assert out[key] >= 0


def test_certify_command(capsys):
    code = main(["certify", "--op", "M", "--depth", "5", "--samples", "15", "--seed", "2"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["op"] == "M"
    assert out["constants"]["atom-mult"] <= 2.0 + 1e-9
    assert main(["certify", "--op", "bogus"]) == 2


def test_kernel_command(tmp_path, capsys):
    out = tmp_path / "k.csv"
    code = main(["kernel", "--n", "5", "--depth", "5", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "index,dirichlet,fejer,dirichlet_hat,fejer_hat"
    assert len(lines) == 33
    assert (tmp_path / "k.png").exists()
    # stdout dump too
    code = main(["kernel", "--n", "2", "--depth", "3"])
    assert code == 0
    assert "index," in capsys.readouterr().out


def test_verify_with_config_file(tmp_path, capsys):
    from martharm.harness.records import CorpusConfig

    cfg = CorpusConfig(depths=(4,), samples=20, op_samples=8, seed=11)
    cfg_path = tmp_path / "cfg.json"
    cfg.save(cfg_path)
    code = main(["verify", "prop-3.1-const", "--config", str(cfg_path), "--format", "md"])
    out = capsys.readouterr().out
    assert code == 0
    assert "Verification summary" in out
