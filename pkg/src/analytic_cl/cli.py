"""Command-line front-end.

Subcommands: generate, train, verify, sweep, inspect-checkpoint.
Machine-readable results go to stdout, progress chatter to stderr.
Exit codes: 0 success, 1 verification/metric failure, 2 usage error,
3 I/O or file-corruption error.

Options may also come from a flat key=value config file (--config);
explicit flags win over the file, the file wins over defaults.
"""

import sys
from pathlib import Path

import click
import numpy as np

from . import persist
from .exceptions import AnalyticCLError, FileFormatError, ParameterError, SingularMatrixError
from .oracle import accumulate, joint_solve
from .runner import (
    RunConfig,
    SweepCell,
    run_sweep,
    run_training,
    sweep_table,
    task_boundary_from_updates,
    verify_invariance,
)
from .scenario import (
    ScenarioSpec,
    SyntheticDataset,
    TaskBatch,
    TaskStream,
    generate_siblurry,
    generate_synthetic,
    manifest_text,
)

INVARIANCE_TOL = 1e-8


def _log(msg):
    click.echo(msg, err=True)


def _read_config_file(path):
    values = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise click.UsageError(f"bad config line: {line!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    return values


def _resolve(flag_value, config_values, key, default, cast):
    if flag_value is not None:
        return flag_value
    if config_values and key in config_values:
        return cast(config_values[key])
    return default


def _ratio(value, name):
    if not 0.0 <= value <= 1.0:
        raise click.UsageError(f"{name} must be in [0, 1], got {value}")
    return value


@click.group()
def main():
    """Closed-form continual learning experiment toolkit."""


def _load_scenario_dir(scenario_dir):
    scenario_dir = Path(scenario_dir)
    task_files = sorted(scenario_dir.glob("task_*.gemb"))
    if not task_files:
        raise click.UsageError(f"no task files in {scenario_dir}")
    tasks = []
    for f in task_files:
        x, y = persist.read_embeddings(f)
        tasks.append(TaskBatch(x=x, y=y))
    test_x, test_y = persist.read_embeddings(scenario_dir / "test.gemb")
    return TaskStream(tasks=tasks, test_x=test_x, test_y=test_y)


def _write_scenario_dir(out_dir, tasks, manifest, test_x, test_y):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for t, batch in enumerate(tasks):
        persist.write_embeddings(out_dir / f"task_{t:03d}.gemb", batch.x, batch.y)
    persist.write_embeddings(out_dir / "test.gemb", test_x, test_y)
    (out_dir / "manifest.txt").write_text(manifest_text(manifest))


@main.command()
@click.option("--classes", type=int, default=10, show_default=True)
@click.option("--per-class", type=int, default=100, show_default=True)
@click.option("--d-e", type=int, default=16, show_default=True)
@click.option("--separation", type=float, default=8.0, show_default=True)
@click.option("--embeddings", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Partition a real embedding file instead of synthetic data.")
@click.option("--test-fraction", type=float, default=0.1, show_default=True,
              help="Held-out fraction per class when using --embeddings.")
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--rd", type=float, default=0.5, show_default=True)
@click.option("--rb", type=float, default=0.1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
def generate(classes, per_class, d_e, separation, embeddings, test_fraction,
             k, rd, rb, seed, out):
    """Generate a task-stream scenario (synthetic or from an embedding file)."""
    _ratio(rd, "--rd")
    _ratio(rb, "--rb")
    try:
        if embeddings is not None:
            x, y = persist.read_embeddings(embeddings)
            rng = np.random.default_rng(np.random.SeedSequence([seed, 200]))
            test_rows = []
            for c in np.unique(y):
                rows = np.nonzero(y == c)[0]
                n_test = max(1, int(round(test_fraction * rows.size)))
                test_rows.extend(rng.choice(rows, size=n_test, replace=False))
            test_mask = np.zeros(y.shape[0], dtype=bool)
            test_mask[test_rows] = True
            dataset = SyntheticDataset(
                train_x=x[~test_mask], train_y=y[~test_mask],
                test_x=x[test_mask], test_y=y[test_mask],
            )
        else:
            dataset = generate_synthetic(classes, per_class, d_e, separation, seed)
        spec = ScenarioSpec(num_tasks=k, disjoint_ratio=rd, blurry_ratio=rb, seed=seed)
        tasks, manifest = generate_siblurry(spec, dataset.train_x, dataset.train_y)
    except ParameterError as exc:
        raise click.UsageError(str(exc)) from exc
    _write_scenario_dir(out, tasks, manifest, dataset.test_x, dataset.test_y)
    _log(f"wrote {len(tasks)} tasks to {out}")
    click.echo(f"scenario_dir={out}")
    click.echo(f"num_tasks={len(tasks)}")


def _common_run_options(fn):
    fn = click.option("--config", "config_file",
                      type=click.Path(exists=True, dir_okay=False), default=None)(fn)
    fn = click.option("--gamma", type=float, default=None)(fn)
    fn = click.option("--d-b", type=int, default=None)(fn)
    fn = click.option("--buffer-seed", type=int, default=None)(fn)
    fn = click.option("--delta-n", type=int, default=None)(fn)
    return fn


def _build_config(config_file, gamma, d_b, buffer_seed, delta_n, use_exposed_gain=True):
    cfg = _read_config_file(config_file) if config_file else {}
    try:
        return RunConfig(
            gamma=_resolve(gamma, cfg, "gamma", 100.0, float),
            buffer_width=_resolve(d_b, cfg, "d_b", 64, int),
            buffer_seed=_resolve(buffer_seed, cfg, "buffer_seed", 0, int),
            delta_n=_resolve(delta_n, cfg, "delta_n", 100, int),
            use_exposed_gain=use_exposed_gain,
        )
    except ParameterError as exc:
        raise click.UsageError(str(exc)) from exc


@main.command()
@click.option("--scenario", "scenario_dir", type=click.Path(exists=True, file_okay=False),
              required=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
@click.option("--no-eclg", is_flag=True, default=False,
              help="Ablation: drop the exposed-class gain term each update.")
@click.option("--resume", "resume_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Continue from a task-boundary checkpoint.")
@click.option("--checkpoint-every-task", is_flag=True, default=False)
@_common_run_options
def train(scenario_dir, out, no_eclg, resume_path, checkpoint_every_task,
          config_file, gamma, d_b, buffer_seed, delta_n):
    """Train on a generated scenario; emit report, trace CSV and checkpoint."""
    config = _build_config(config_file, gamma, d_b, buffer_seed, delta_n,
                           use_exposed_gain=not no_eclg)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        stream = _load_scenario_dir(scenario_dir)
        learner, start_task = None, 0
        if resume_path is not None:
            learner = persist.load_checkpoint(resume_path)
            start_task = task_boundary_from_updates(stream, config.delta_n, learner.n_tasks_)
            _log(f"resuming after task {start_task}")

        def after_task(t, current):
            if checkpoint_every_task:
                persist.save_checkpoint(out_dir / f"checkpoint_task_{t:03d}.gacl", current)

        result = run_training(stream, config, learner=learner,
                              start_task=start_task, after_task=after_task)
    except FileFormatError as exc:
        _log(f"error: {exc}")
        sys.exit(3)
    except SingularMatrixError as exc:
        _log(f"error: {exc}")
        sys.exit(1)
    except ParameterError as exc:
        _log(f"error: {exc}")
        sys.exit(1)

    persist.save_checkpoint(out_dir / "final.gacl", result.learner)
    (out_dir / "report.txt").write_text(result.report.to_text())
    (out_dir / "trace.csv").write_text(result.report.trace.to_csv())
    for t, norm in enumerate(result.report.eclg_norms, start=1):
        _log(f"task {t} eclg_norm={norm!r}")
    click.echo(result.report.to_text(), nl=False)


@main.command()
@click.option("--scenario", "scenario_dir", type=click.Path(exists=True, file_okay=False),
              required=True)
@_common_run_options
def verify(scenario_dir, config_file, gamma, d_b, buffer_seed, delta_n):
    """Check the recursive weight against the direct joint solution."""
    cfg = _read_config_file(config_file) if config_file else {}
    gamma_val = _resolve(gamma, cfg, "gamma", 100.0, float)
    try:
        stream = _load_scenario_dir(scenario_dir)
        if gamma_val == 0.0:
            # the recursion cannot start from gamma = 0; surface the
            # degenerate joint problem's outcome instead
            from .buffer import projection_weight, relu_project
            d_e = stream.tasks[0].x.shape[1]
            d_b_val = _resolve(d_b, cfg, "d_b", 64, int)
            seed_val = _resolve(buffer_seed, cfg, "buffer_seed", 0, int)
            w = projection_weight(seed_val, d_e, d_b_val)
            data = accumulate(
                [(relu_project(w, b.x), np.asarray(b.y)) for b in stream.tasks]
            )
            joint_solve(data, 0.0)
            _log("gamma=0 joint system happened to be nonsingular; "
                 "no recursive counterpart exists to compare against")
            click.echo("verify=FAIL")
            click.echo("reason=gamma_zero_has_no_recursive_form")
            sys.exit(1)
        config = _build_config(config_file, gamma, d_b, buffer_seed, delta_n)
        diff, w_rec, _ = verify_invariance(stream, config)
    except FileFormatError as exc:
        _log(f"error: {exc}")
        sys.exit(3)
    except (SingularMatrixError, ParameterError) as exc:
        _log(f"error: {exc}")
        click.echo("verify=FAIL")
        sys.exit(1)
    status = "PASS" if diff <= INVARIANCE_TOL else "FAIL"
    click.echo(f"verify={status}")
    click.echo(f"max_abs_diff={diff!r}")
    click.echo(f"tolerance={INVARIANCE_TOL!r}")
    click.echo(f"columns={w_rec.shape[1]}")
    sys.exit(0 if status == "PASS" else 1)


@main.command()
@click.option("--rd", "rd_values", type=float, multiple=True, default=(0.0, 0.5, 1.0),
              show_default=True)
@click.option("--rb", "rb_values", type=float, multiple=True, default=(0.1,),
              show_default=True)
@click.option("--gamma", "gamma_values", type=float, multiple=True, default=(100.0,),
              show_default=True)
@click.option("--seeds", type=int, default=3, show_default=True)
@click.option("--classes", type=int, default=10, show_default=True)
@click.option("--per-class", type=int, default=100, show_default=True)
@click.option("--d-e", type=int, default=16, show_default=True)
@click.option("--separation", type=float, default=8.0, show_default=True)
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--d-b", type=int, default=64, show_default=True)
@click.option("--delta-n", type=int, default=100, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), default=None)
def sweep(rd_values, rb_values, gamma_values, seeds, classes, per_class, d_e,
          separation, k, d_b, delta_n, out):
    """Grid sweep over (r_d, r_b, gamma); reports mean ± standard error."""
    for v in rd_values:
        _ratio(v, "--rd")
    for v in rb_values:
        _ratio(v, "--rb")
    cells = [
        SweepCell(disjoint_ratio=rd, blurry_ratio=rb, gamma=g)
        for rd in rd_values for rb in rb_values for g in gamma_values
    ]

    def make_stream(cell, seed):
        dataset = generate_synthetic(classes, per_class, d_e, separation, seed)
        spec = ScenarioSpec(num_tasks=k, disjoint_ratio=cell.disjoint_ratio,
                            blurry_ratio=cell.blurry_ratio, seed=seed)
        tasks, manifest = generate_siblurry(spec, dataset.train_x, dataset.train_y)
        return TaskStream(tasks=tasks, test_x=dataset.test_x,
                          test_y=dataset.test_y, manifest=manifest)

    def config_for(cell, seed):
        return RunConfig(gamma=cell.gamma, buffer_width=d_b,
                         buffer_seed=seed, delta_n=delta_n)

    rows = run_sweep(cells, list(range(seeds)), make_stream, config_for)
    table = sweep_table(rows)
    if out is not None:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "sweep.txt").write_text(table)
    click.echo(table, nl=False)


@main.command("inspect-checkpoint")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
def inspect_checkpoint(path):
    """Print a checkpoint's header fields."""
    try:
        learner = persist.load_checkpoint(path)
    except FileFormatError as exc:
        _log(f"error: {exc}")
        sys.exit(3)
    click.echo(f"gamma={learner.gamma!r}")
    click.echo(f"d_b={learner.n_features_in_}")
    click.echo(f"updates={learner.n_tasks_}")
    click.echo(f"class_count={len(learner.registry_)}")
    click.echo(f"classes={','.join(str(c) for c in learner.registry_.classes)}")


if __name__ == "__main__":
    main()
