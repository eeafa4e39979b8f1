"""Command-line interface covering the whole pipeline.

Every invocation writes a manifest.json next to its outputs so any result
can be re-derived from the recorded parameters and seed.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import click

from . import __version__
from .analysis import (brute_force_oracle, construct_optimal_odd,
                       detect_singularities, point_filled, run_experiment,
                       structure_report, tps_formula_odd)
from .ca import CaConfig, run_ca
from .ga import GaConfig, run_ga
from .grid import Pattern, PatternError, parse, serialize
from .payoff import (DEFAULT_PARAMS, characteristic, expected_wealth,
                     total_payoff_grid, wealth)
from .render import write_ppm
from .templates import builtin_set, extract_templates, serialize_templates


def _fail(stage: str, message: str) -> None:
    print(json.dumps({"error": {"stage": stage, "message": message}}),
          file=sys.stderr)
    sys.exit(1)


def _read_pattern(path: str, stage: str) -> Pattern:
    try:
        return parse(Path(path).read_text())
    except FileNotFoundError:
        _fail(stage, f"input file not found: {path}")
    except PatternError as exc:
        _fail(stage, f"bad pattern file {path}: {exc}")


def _out_dir(ctx) -> Path:
    out = Path(ctx.obj["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(ctx, subcommand: str, params: dict) -> None:
    manifest = {
        "subcommand": subcommand,
        "params": params,
        "seed": ctx.obj["seed"],
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    (_out_dir(ctx) / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n")


@click.group()
@click.option("--seed", type=int, default=0, show_default=True,
              help="Master seed; all randomness derives from it.")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Worker processes for bench.")
@click.option("--out-dir", type=click.Path(), default=".", show_default=True)
@click.pass_context
def main(ctx, seed, jobs, out_dir):
    """Evolve, analyze and render wealth-optimal binary patterns."""
    ctx.ensure_object(dict)
    ctx.obj.update(seed=seed, jobs=jobs, out_dir=out_dir)


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--pop", type=int, default=40, show_default=True)
@click.option("--p1", type=float, default=0.2, show_default=True)
@click.option("--p2", type=float, default=0.05, show_default=True)
@click.option("--iters", type=int, default=10_000, show_default=True)
@click.option("--target", type=float, default=None,
              help="Stop once the best fitness (TPS) reaches this value.")
@click.option("--top", type=int, default=3, show_default=True,
              help="How many best patterns to write out.")
@click.pass_context
def ga(ctx, n, pop, p1, p2, iters, target, top):
    """Search optimal patterns with the genetic algorithm."""
    cfg = GaConfig(population_size=pop, p1=p1, p2=p2, max_iterations=iters,
                   target_fitness=target, seed=ctx.obj["seed"])
    _write_manifest(ctx, "ga", {"n": n, "pop": pop, "p1": p1, "p2": p2,
                                "iters": iters, "target": target, "top": top})
    result = run_ga(cfg, n)
    out = _out_dir(ctx)
    for rank, sol in enumerate(result.solutions[:top]):
        (out / f"ga_best_{rank}.txt").write_text(serialize(sol.pattern))
    summary = {
        "best_tps": result.best_fitness,
        "best_wealth": wealth(result.best.pattern),
        "iterations_used": result.iterations,
        "seed": ctx.obj["seed"],
    }
    (out / "ga_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    click.echo(json.dumps(summary))


@main.command()
@click.option("--rule", type=click.Choice(["8", "36", "52"]), required=True)
@click.option("--n", type=int, default=None)
@click.option("--tlimit", type=int, default=100, show_default=True)
@click.option("--init", "init_path", type=click.Path(), default=None,
              help="Start pattern file (overrides --init-density).")
@click.option("--init-density", type=float, default=0.25, show_default=True)
@click.option("--select", type=click.Choice(["random", "sequential"]),
              default="random", show_default=True)
@click.option("--pi01", type=float, default=0.04, show_default=True)
@click.option("--pi10", type=float, default=1.0, show_default=True)
@click.option("--dump-every", type=int, default=0,
              help="Dump the pattern every k generations.")
@click.pass_context
def evolve(ctx, rule, n, tlimit, init_path, init_density, select, pi01, pi10,
           dump_every):
    """Evolve a pattern with the template CA rule."""
    start = _read_pattern(init_path, "evolve") if init_path else None
    if start is None and n is None:
        _fail("evolve", "need --n or --init")
    cfg = CaConfig(templates=builtin_set(int(rule)), pi_01=pi01, pi_10=pi10,
                   selection=select, init_density=init_density,
                   t_limit=tlimit, seed=ctx.obj["seed"])
    _write_manifest(ctx, "evolve", {
        "rule": int(rule), "n": n, "tlimit": tlimit, "init": init_path,
        "init_density": init_density, "select": select,
        "pi01": pi01, "pi10": pi10, "dump_every": dump_every})
    out = _out_dir(ctx)

    def dump(state):
        if dump_every and state.t % dump_every == 0:
            (out / f"evolve_t{state.t:05d}.txt").write_text(
                serialize(state.pattern))

    result = run_ca(cfg, n=n, start=start,
                    on_generation=dump if dump_every else None)
    (out / "evolve_final.txt").write_text(serialize(result.final))
    with open(out / "evolve_trace.csv", "w") as fh:
        fh.write("t,tps,wealth,stable\n")
        for row in result.trace:
            fh.write(f"{row.t},{row.tps:g},{row.wealth:.6f},"
                     f"{int(row.stable)}\n")
    summary = {"w_max": result.w_max, "t_max": result.t_max,
               "stable": result.stable, "tps_final": result.tps_final}
    (out / "evolve_summary.json").write_text(
        json.dumps(summary, indent=2) + "\n")
    click.echo(json.dumps(summary))


@main.command()
@click.option("--in", "in_path", type=click.Path(), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--no-complete", is_flag=True,
              help="Skip symmetry completion of the extracted set.")
@click.pass_context
def extract(ctx, in_path, out_path, no_complete):
    """Extract 3x3 templates from a pattern."""
    p = _read_pattern(in_path, "extract")
    _write_manifest(ctx, "extract", {"in": in_path, "out": out_path,
                                     "complete": not no_complete})
    ts = extract_templates(p, complete=not no_complete)
    Path(out_path).write_text(serialize_templates(ts))
    click.echo(f"{len(ts)} templates")


@main.command()
@click.option("--in", "in_path", type=click.Path(), required=True)
@click.pass_context
def analyze(ctx, in_path):
    """Report structure counts and the characteristic of a pattern."""
    p = _read_pattern(in_path, "analyze")
    _write_manifest(ctx, "analyze", {"in": in_path})
    rep = structure_report(p)
    cc = characteristic(p)
    doc = {"structure": dataclasses.asdict(rep),
           "characteristic": dataclasses.asdict(cc),
           "singularity_positions": detect_singularities(p)}
    (_out_dir(ctx) / "analyze.json").write_text(
        json.dumps(doc, indent=2) + "\n")
    click.echo(json.dumps(doc))


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.pass_context
def construct(ctx, n, out_path):
    """Build the optimal odd-size pattern in closed form."""
    try:
        p = construct_optimal_odd(n)
    except ValueError as exc:
        _fail("construct", str(exc))
    _write_manifest(ctx, "construct", {"n": n, "out": out_path})
    text = serialize(p)
    if out_path:
        Path(out_path).write_text(text)
    click.echo(text, nl=False)


@main.command()
@click.option("--n", type=click.IntRange(3, 5), required=True)
@click.pass_context
def oracle(ctx, n):
    """Exhaustively verify the optimum for a small size."""
    _write_manifest(ctx, "oracle", {"n": n})
    res = brute_force_oracle(n, allow_large=(n == 5))
    doc = {"max_tps": res.max_tps, "n_optima": res.n_optima,
           "representatives": [p.rows() for p in res.representatives]}
    (_out_dir(ctx) / "oracle.json").write_text(
        json.dumps(doc, indent=2) + "\n")
    click.echo(json.dumps({"max_tps": res.max_tps,
                           "n_optima": res.n_optima,
                           "n_classes": len(res.representatives)}))


@main.command()
@click.option("--rule", type=click.Choice(["8", "36", "52"]), required=True)
@click.option("--n", type=int, required=True)
@click.option("--runs", type=int, default=100, show_default=True)
@click.option("--tlimit", type=int, default=100, show_default=True)
@click.option("--point-filled", "use_points", is_flag=True,
              help="Start every run from the point-filled pattern.")
@click.option("--optimum", type=float, default=None,
              help="Wealth counted as optimal in the summary.")
@click.pass_context
def bench(ctx, rule, n, runs, tlimit, use_points, optimum):
    """Statistics over many independent CA runs."""
    cfg = CaConfig(templates=builtin_set(int(rule)), t_limit=tlimit)
    _write_manifest(ctx, "bench", {
        "rule": int(rule), "n": n, "runs": runs, "tlimit": tlimit,
        "point_filled": use_points, "optimum": optimum})
    try:
        summary = run_experiment(
            "ca", cfg, n, runs,
            start=point_filled(n) if use_points else None,
            optimum_wealth=optimum, seed=ctx.obj["seed"],
            jobs=ctx.obj["jobs"])
    except ValueError as exc:
        _fail("bench", str(exc))
    out = _out_dir(ctx)
    doc = dataclasses.asdict(summary)
    doc.pop("runs")
    (out / "bench_summary.json").write_text(json.dumps(doc, indent=2) + "\n")
    with open(out / "bench_histogram.csv", "w") as fh:
        fh.write("wealth,count\n")
        for w, c in summary.wealth_histogram:
            fh.write(f"{w:.4f},{c}\n")
    click.echo(json.dumps(doc))


@main.command("expected-wealth")
@click.option("--step", type=float, default=0.01, show_default=True)
@click.pass_context
def expected_wealth_cmd(ctx, step):
    """Mean-field wealth curve over the cooperation rate, as CSV."""
    if not 0.0 < step <= 1.0:
        _fail("expected-wealth", f"step must be in (0, 1], got {step}")
    _write_manifest(ctx, "expected-wealth", {"step": step})
    lines = ["pi_C,W"]
    k = 0
    while True:
        pi_c = k * step
        if pi_c > 1.0 + 1e-12:
            break
        pi_c = min(pi_c, 1.0)
        lines.append(f"{pi_c:.6g},{expected_wealth(pi_c):.6g}")
        k += 1
    text = "\n".join(lines) + "\n"
    (_out_dir(ctx) / "expected_wealth.csv").write_text(text)
    click.echo(text, nl=False)


@main.command()
@click.option("--in", "in_path", type=click.Path(), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--scale", type=int, default=1, show_default=True)
@click.option("--quad", is_flag=True)
@click.option("--mark-singularities", is_flag=True)
@click.pass_context
def render(ctx, in_path, out_path, scale, quad, mark_singularities):
    """Render a pattern to a binary PPM image."""
    p = _read_pattern(in_path, "render")
    _write_manifest(ctx, "render", {"in": in_path, "out": out_path,
                                    "scale": scale, "quad": quad,
                                    "mark_singularities": mark_singularities})
    try:
        write_ppm(out_path, p, scale=scale, quad=quad,
                  mark_singularities=mark_singularities)
    except OSError as exc:
        _fail("render", str(exc))
    click.echo(out_path)


@main.command("payoff-map")
@click.option("--in", "in_path", type=click.Path(), required=True)
@click.pass_context
def payoff_map(ctx, in_path):
    """Per-cell total payoffs as a text grid."""
    p = _read_pattern(in_path, "payoff-map")
    _write_manifest(ctx, "payoff-map", {"in": in_path})
    grid = total_payoff_grid(p)
    width = max(len(f"{v:g}") for v in grid.reshape(-1))
    text = "\n".join(
        " ".join(f"{v:{width}g}" for v in row) for row in grid) + "\n"
    (_out_dir(ctx) / "payoff_map.txt").write_text(text)
    click.echo(text, nl=False)


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--iters", type=int, default=10_000, show_default=True)
@click.option("--tlimit", type=int, default=2000, show_default=True)
@click.option("--rule-from",
              type=click.Choice(["extracted", "8", "36", "52"]),
              default="extracted", show_default=True,
              help="CA rule source: templates extracted from the GA best, "
                   "or a built-in set.")
@click.option("--target", type=float, default=None,
              help="GA early-stop fitness; defaults to the known optimum "
                   "when one is available.")
@click.pass_context
def pipeline(ctx, n, iters, tlimit, rule_from, target):
    """Full chain: GA search, template extraction, CA evolution, analysis."""
    out = _out_dir(ctx)
    seed = ctx.obj["seed"]
    _write_manifest(ctx, "pipeline", {"n": n, "iters": iters,
                                      "tlimit": tlimit,
                                      "rule_from": rule_from,
                                      "target": target})
    if target is None:
        if n % 2 == 0:
            target = 43 * n * n / 4
        elif n >= 5:
            target = float(tps_formula_odd(n))
    ga_cfg = GaConfig(max_iterations=iters, target_fitness=target, seed=seed)
    ga_res = run_ga(ga_cfg, n)
    master = ga_res.best.pattern
    (out / "pipeline_master.txt").write_text(serialize(master))

    if rule_from == "extracted":
        ts = extract_templates(master)
    else:
        ts = builtin_set(int(rule_from))
    (out / "pipeline_templates.txt").write_text(serialize_templates(ts))

    ca_cfg = CaConfig(templates=ts, t_limit=tlimit, seed=seed)
    ca_res = run_ca(ca_cfg, n=n)
    (out / "pipeline_evolved.txt").write_text(serialize(ca_res.final))

    doc = {
        "ga": {"best_tps": ga_res.best_fitness,
               "iterations_used": ga_res.iterations},
        "templates": {"count": len(ts), "labels": ts.labels()},
        "ca": {"w_max": ca_res.w_max, "t_max": ca_res.t_max,
               "stable": ca_res.stable, "tps_final": ca_res.tps_final},
        "analysis": dataclasses.asdict(structure_report(ca_res.final)),
    }
    (out / "pipeline_summary.json").write_text(
        json.dumps(doc, indent=2) + "\n")
    click.echo(json.dumps(doc))


if __name__ == "__main__":
    main()
