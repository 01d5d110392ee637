import io
from pathlib import Path

import pandas as pd
import pytest


def _csv(text: str) -> pd.DataFrame:
    return pd.read_csv(io.StringIO(text), keep_default_na=False)


def test_block_subspace_count_matches_enumeration(runner, ptlab):
    result = runner.invoke(ptlab, ["subspaces", "--model", "block", "--N", "10", "--k", "4", "--c", "2", "--enumerate"])
    assert result.exit_code == 0, result.output
    assert result.stdout.strip() == "formula=63 enumerated=63 match=true"


def test_single_cluster_count(runner, ptlab):
    result = runner.invoke(ptlab, ["subspaces", "--model", "block", "--n", "10", "--k", "4", "--c", "1"])
    assert result.exit_code == 0, result.output
    assert result.stdout.strip() == "formula=7"


def test_tree_bound_covers_enumeration(runner, ptlab):
    result = runner.invoke(ptlab, ["subspaces", "--model", "tree", "--depth", "4", "--k", "3", "--enumerate"])
    assert result.exit_code == 0, result.output
    assert result.stdout.strip() == "bound≈40.17 enumerated=5 within_bound=true"


def test_block_threshold_curves(runner, ptlab, tmp_path):
    svg = tmp_path / "curves.svg"
    result = runner.invoke(
        ptlab, ["threshold", "--model", "block", "--zeta", "0.25,0.5,0.75,1.0", "--svg", str(svg)],
    )
    assert result.exit_code == 0, result.output
    frame = _csv(result.stdout)
    assert list(frame.columns) == ["model", "param", "delta", "rho"]
    assert list(frame["param"].unique()) == ["zeta=0.25", "zeta=0.5", "zeta=0.75", "zeta=1"]

    by_delta = frame.pivot(index="delta", columns="param", values="rho").dropna()
    assert len(by_delta) > 100
    ordered = by_delta[["zeta=0.25", "zeta=0.5", "zeta=0.75", "zeta=1"]].to_numpy()
    assert (ordered[:, :-1] > ordered[:, 1:]).all()

    assert "ptlab threshold" in svg.read_text()


def test_threshold_two_points(runner, ptlab):
    result = runner.invoke(ptlab, ["threshold", "--model", "simple", "--delta", "0.01:0.2", "--points", "2"])
    assert result.exit_code == 0, result.output
    frame = _csv(result.stdout)
    assert len(frame) == 2
    assert frame["delta"].tolist() == pytest.approx([0.01, 0.2])


def test_tree_threshold_both_regimes(runner, ptlab):
    result = runner.invoke(ptlab, ["threshold", "--model", "tree", "--regime", "both", "--points", "50"])
    assert result.exit_code == 0, result.output
    frame = _csv(result.stdout)
    assert set(frame["param"]) == {"regime=small_k", "regime=large_k"}
    by_delta = frame.pivot(index="delta", columns="param", values="rho").dropna()
    assert (by_delta["regime=small_k"] < by_delta["regime=large_k"]).all()


def test_threshold_rejects_bad_range(runner, ptlab):
    result = runner.invoke(ptlab, ["threshold", "--delta", "0.5:0.1"])
    assert result.exit_code == 2


def test_threshold_output_is_byte_identical(runner, ptlab):
    outputs = []
    with runner.isolated_filesystem():
        for _ in range(2):
            result = runner.invoke(
                ptlab, ["threshold", "--model", "tree", "--points", "40", "--out", "curves.csv", "--svg", "curves.svg"],
            )
            assert result.exit_code == 0, result.output
            outputs.append((Path("curves.csv").read_bytes(), Path("curves.svg").read_bytes()))
    assert outputs[0] == outputs[1]


def test_square_census_loses_nothing(runner, ptlab):
    result = runner.invoke(ptlab, ["face-census", "--N", "9", "--n", "9", "--k", "1"])
    assert result.exit_code == 0, result.output
    assert "loss_fraction=0 " in result.stdout
    assert "exact=true" in result.stdout


def test_oversized_faces_are_all_lost(runner, ptlab, tmp_path):
    out = tmp_path / "census.csv"
    result = runner.invoke(ptlab, ["face-census", "--N", "9", "--n", "6", "--k", "8", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "loss_fraction=1 " in result.stdout
    frame = pd.read_csv(out)
    assert frame.loc[0, "faces"] == 512
    assert frame.loc[0, "survived"] == 0


def test_census_compare_block(runner, ptlab):
    result = runner.invoke(
        ptlab,
        ["face-census", "--N", "9", "--n", "6", "--k", "1", "--compare-block", "--c", "2",
         "--instances", "20", "--seed", "42"],
    )
    assert result.exit_code == 0, result.output
    assert result.stdout.strip().endswith("passed=true")
    assert result.stdout.startswith("fraction_all=")


def test_census_compare_needs_clusters(runner, ptlab):
    result = runner.invoke(ptlab, ["face-census", "--N", "9", "--n", "6", "--k", "1", "--compare-block"])
    assert result.exit_code == 2


@pytest.mark.slow
def test_census_compare_block_acceptance(runner, ptlab):
    result = runner.invoke(
        ptlab,
        ["face-census", "--N", "9", "--n", "6", "--k", "1", "--compare-block", "--c", "2",
         "--instances", "200", "--seed", "7"],
    )
    assert result.exit_code == 0, result.output
    assert "passed=true" in result.stdout


def _phase_diagram(runner, ptlab):
    result = runner.invoke(
        ptlab,
        ["phase-diagram", "--N", "16", "--grid", "3x3", "--trials", "2", "--out", "diagram.csv",
         "--svg", "diagram.svg"],
    )
    assert result.exit_code in (0, 1), result.output
    files = {name: Path(name).read_bytes() for name in ("diagram.csv", "diagram_curve.csv", "diagram_report.json")}
    return result, files


def test_small_phase_diagram_is_reproducible(runner, ptlab):
    with runner.isolated_filesystem():
        first, first_files = _phase_diagram(runner, ptlab)
        second, second_files = _phase_diagram(runner, ptlab)
        assert Path("diagram.svg").exists()
    assert first_files == second_files
    assert first.stdout == second.stdout
    assert "cells=9 columns=3" in first.stdout

    frame = pd.read_csv(io.BytesIO(first_files["diagram.csv"]), keep_default_na=False)
    assert list(frame.columns) == ["N", "model", "param", "delta", "rho", "n", "k", "trials", "successes", "mean_rel_err", "seed"]
    assert len(frame) == 9
    assert (frame.loc[frame["rho"] == 0.0, "successes"] == 2).all()
    assert b'"rounding"' in first_files["diagram_report.json"]


def test_block_phase_diagram_needs_zeta_or_clusters(runner, ptlab, tmp_path):
    result = runner.invoke(
        ptlab, ["phase-diagram", "--N", "16", "--grid", "2x2", "--model", "block", "--out", str(tmp_path / "d.csv")],
    )
    assert result.exit_code == 2


def test_phase_diagram_budget_needs_confirmation(runner, ptlab, tmp_path):
    out = tmp_path / "d.csv"
    result = runner.invoke(
        ptlab, ["phase-diagram", "--N", "64", "--grid", "12x12", "--trials", "1000", "--out", str(out)],
    )
    assert result.exit_code == 2
    assert "--yes" in result.output
    assert not out.exists()
