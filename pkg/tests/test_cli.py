import json

import pytest
from click.testing import CliRunner

from wealthca.cli import main
from wealthca.grid import parse
from wealthca.payoff import tps
from wealthca.templates import builtin_set, parse_templates


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, tmp_path, *args, seed=0, expect_exit=0):
    result = runner.invoke(
        main, ["--seed", str(seed), "--out-dir", str(tmp_path), *args])
    assert result.exit_code == expect_exit, result.output
    return result


def manifest(tmp_path):
    return json.loads((tmp_path / "manifest.json").read_text())


class TestGa:
    def test_small_search_writes_artifacts(self, runner, tmp_path):
        invoke(runner, tmp_path, "ga", "--n", "4", "--pop", "20",
               "--iters", "500", "--target", "172", "--top", "2")
        summary = json.loads((tmp_path / "ga_summary.json").read_text())
        assert summary["best_tps"] == 172.0
        best = parse((tmp_path / "ga_best_0.txt").read_text())
        assert tps(best) == 172.0
        assert (tmp_path / "ga_best_1.txt").exists()
        assert manifest(tmp_path)["subcommand"] == "ga"

    def test_reproducible_for_a_seed(self, runner, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        for out in (out_a, out_b):
            invoke(runner, out, "ga", "--n", "4", "--pop", "10",
                   "--iters", "50", seed=9)
        assert ((out_a / "ga_best_0.txt").read_text()
                == (out_b / "ga_best_0.txt").read_text())


class TestEvolve:
    def test_even_grid_run(self, runner, tmp_path):
        res = invoke(runner, tmp_path, "evolve", "--rule", "8", "--n", "6",
                     "--tlimit", "100")
        summary = json.loads(res.output)
        assert summary["stable"]
        final = parse((tmp_path / "evolve_final.txt").read_text())
        assert tps(final) == 387.0
        trace = (tmp_path / "evolve_trace.csv").read_text().splitlines()
        assert trace[0] == "t,tps,wealth,stable"
        assert trace[-1].endswith(",1")

    def test_start_pattern_and_dumps(self, runner, tmp_path):
        start = tmp_path / "start.txt"
        start.write_text("000000\n010000\n000000\n000000\n000010\n000000\n")
        invoke(runner, tmp_path, "evolve", "--rule", "8", "--init",
               str(start), "--tlimit", "30", "--dump-every", "5")
        assert (tmp_path / "evolve_t00005.txt").exists()

    def test_needs_size_or_start(self, runner, tmp_path):
        res = invoke(runner, tmp_path, "evolve", "--rule", "8", expect_exit=1)
        err = json.loads(res.stderr)
        assert err["error"]["stage"] == "evolve"

    def test_missing_start_file(self, runner, tmp_path):
        res = invoke(runner, tmp_path, "evolve", "--rule", "8", "--init",
                     str(tmp_path / "nope.txt"), expect_exit=1)
        assert "not found" in json.loads(res.stderr)["error"]["message"]


class TestExtractAnalyzeConstruct:
    def test_construct_then_extract_then_analyze(self, runner, tmp_path):
        pat = tmp_path / "p.txt"
        invoke(runner, tmp_path, "construct", "--n", "7", "--out", str(pat))
        invoke(runner, tmp_path, "extract", "--in", str(pat), "--out",
               str(tmp_path / "ts.txt"))
        ts = parse_templates((tmp_path / "ts.txt").read_text())
        assert ts.values_set() <= builtin_set(52).values_set()
        res = invoke(runner, tmp_path, "analyze", "--in", str(pat))
        doc = json.loads(res.output)
        assert doc["characteristic"]["tps"] == 522.0
        assert doc["structure"]["dominoes"] == 6
        assert len(doc["singularity_positions"]) == 1

    def test_no_complete_flag(self, runner, tmp_path):
        pat = tmp_path / "p.txt"
        invoke(runner, tmp_path, "construct", "--n", "7", "--out", str(pat))
        invoke(runner, tmp_path, "extract", "--in", str(pat), "--out",
               str(tmp_path / "raw.txt"), "--no-complete")
        invoke(runner, tmp_path, "extract", "--in", str(pat), "--out",
               str(tmp_path / "full.txt"))
        raw = parse_templates((tmp_path / "raw.txt").read_text())
        full = parse_templates((tmp_path / "full.txt").read_text())
        assert raw.values_set() <= full.values_set()

    def test_construct_rejects_even(self, runner, tmp_path):
        res = invoke(runner, tmp_path, "construct", "--n", "6", expect_exit=1)
        assert json.loads(res.stderr)["error"]["stage"] == "construct"


class TestOracleBench:
    def test_oracle_three(self, runner, tmp_path):
        res = invoke(runner, tmp_path, "oracle", "--n", "3")
        doc = json.loads(res.output)
        assert doc["max_tps"] == 91.0
        saved = json.loads((tmp_path / "oracle.json").read_text())
        assert len(saved["representatives"]) == doc["n_classes"]

    def test_bench_summary_and_histogram(self, runner, tmp_path):
        res = invoke(runner, tmp_path, "bench", "--rule", "8", "--n", "6",
                     "--runs", "5", "--tlimit", "60",
                     "--optimum", str(387 / 324))
        doc = json.loads(res.output)
        assert doc["n_runs"] == 5
        hist = (tmp_path / "bench_histogram.csv").read_text().splitlines()
        assert hist[0] == "wealth,count"
        assert sum(int(l.split(",")[1]) for l in hist[1:]) == 5


class TestMisc:
    def test_expected_wealth_csv(self, runner, tmp_path):
        res = invoke(runner, tmp_path, "expected-wealth", "--step", "0.25")
        lines = res.output.splitlines()
        assert lines[0] == "pi_C,W"
        assert lines[-1] == "1,1"
        assert "0.75,1.125" in lines

    def test_payoff_map(self, runner, tmp_path):
        pat = tmp_path / "p.txt"
        pat.write_text("000\n010\n000\n")
        res = invoke(runner, tmp_path, "payoff-map", "--in", str(pat))
        rows = [line.split() for line in res.output.splitlines()]
        assert rows[1][1] == "24"
        assert rows[0][0] == "8"

    def test_render(self, runner, tmp_path):
        pat = tmp_path / "p.txt"
        pat.write_text("000\n010\n000\n")
        invoke(runner, tmp_path, "render", "--in", str(pat), "--out",
               str(tmp_path / "p.ppm"), "--scale", "3")
        data = (tmp_path / "p.ppm").read_bytes()
        assert data.startswith(b"P6\n9 9\n255\n")


class TestPipeline:
    def test_even_grid_end_to_end(self, runner, tmp_path):
        res = invoke(runner, tmp_path, "pipeline", "--n", "6",
                     "--iters", "3000", "--tlimit", "500", seed=1)
        doc = json.loads(res.output)
        assert doc["ga"]["best_tps"] == 387.0
        master = parse((tmp_path / "pipeline_master.txt").read_text())
        assert tps(master) == 387.0
        ts = parse_templates((tmp_path / "pipeline_templates.txt").read_text())
        assert ts.values_set() <= builtin_set(8).values_set()
        assert doc["ca"]["stable"]
        assert doc["ca"]["tps_final"] == 387.0
        assert doc["analysis"]["points"] == 9
