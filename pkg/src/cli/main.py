"""
Command-line interface.

Exit codes: 0 success, 1 usage/config/contract error, 2 data error,
3 numeric failure.
"""
import sys
from pathlib import Path
from typing import Optional, Tuple

import click
import yaml

from ..data import (
    Dataset,
    SyntheticConfig,
    generate_synthetic,
    load_dataset,
    resolve_manifest,
    sample_labeled_subset,
    split_and_standardize,
    write_dataset,
)
from ..errors import DataError, MsqError, NumericError
from ..experiment.sweep import cell_seed, preflight_sweep, run_sweep, write_sweep_outputs
from ..metrics import compute_metrics, label_class_distribution, length_summary, write_metrics_csv
from ..nn.checkpoint import load_checkpoint, save_checkpoint
from ..nn.diagnostics import DEFAULT_TOLERANCE, run_gradcheck_suite
from ..training import evaluate, finetune, pretrain, train_baseline
from ..utils.logging import get_logger, setup_logging
from .config import RunConfigFile, load_run_config, write_resolved_config

logger = get_logger("cli.main")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

CHECKPOINT_NAME = "model.msq"
TRACE_NAME = "trace.csv"
METRICS_NAME = "metrics.csv"
PRETRAIN_NAME = "pretrain.msq"


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, NumericError):
        return EXIT_NUMERIC
    if isinstance(exc, (DataError, OSError)):
        return EXIT_DATA
    return EXIT_USAGE


class CommandFailure(click.ClickException):
    """A domain error surfaced to the terminal with its mapped exit code."""

    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


class MsqGroup(click.Group):
    """Click group that maps domain errors and usage errors onto the documented exit codes."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except (MsqError, OSError) as exc:
            logger.error("command_failed", error=str(exc), error_type=type(exc).__name__)
            raise CommandFailure(str(exc), exit_code_for(exc)) from exc

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            return super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.ClickException as exc:
            exc.show()
            code = EXIT_USAGE if isinstance(exc, click.UsageError) else exc.exit_code
        except click.Abort:
            click.echo("Aborted!", err=True)
            code = EXIT_USAGE
        if standalone_mode:
            sys.exit(code)
        return code


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _claim_output(path: Path, force: bool, is_dir: bool = True) -> Path:
    """Refuse to overwrite an existing output unless --force is given."""
    occupied = path.exists() and (not path.is_dir() or any(path.iterdir()))
    if occupied and not force:
        raise click.UsageError(f"output {path} already exists; pass --force to overwrite")
    if is_dir:
        path.mkdir(parents=True, exist_ok=True)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _run_config(config_path: Optional[str], seed: Optional[int]) -> RunConfigFile:
    return load_run_config(config_path).resolved(seed)


def _splits(data_dir: str, config: RunConfigFile) -> Tuple[Dataset, Dataset]:
    dataset = load_dataset(resolve_manifest(data_dir))
    train, val, _ = split_and_standardize(dataset, config.data.split_ratio, config.data.split_seed)
    return train, val


def _labeled_run(kind: str, data: str, labels: int, config: RunConfigFile, out: Path, ckpt: Optional[str]) -> None:
    train, val = _splits(data, config)
    seed = cell_seed(config.seed, labels, 0)
    subset = sample_labeled_subset(train, labels, seed)
    train_cfg = config.train.model_copy(update={"seed": seed})

    if kind == "pretrained":
        model, trace = finetune(load_checkpoint(ckpt), subset, train_cfg)
    else:
        model, trace = train_baseline(subset, train_cfg, config.model)
    report = compute_metrics(*evaluate(model, val))

    save_checkpoint(model, out / CHECKPOINT_NAME)
    trace.to_csv(out / TRACE_NAME)
    write_metrics_csv([report.to_row(kind, labels, 0)], out / METRICS_NAME)
    write_resolved_config(config, out)
    click.echo(f"{kind}: overall MAE {report.overall_mae:.4f}, 4-class accuracy {report.overall_acc4:.4f}")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

@click.group(cls=MsqGroup)
@click.option("--log-level", default=None, help="Log level (defaults to $LOG_LEVEL or INFO)")
@click.option("--log-file", default=None, type=click.Path(dir_okay=False), help="Also write logs to this file")
def cli(log_level: Optional[str], log_file: Optional[str]) -> None:
    """Masked-timestep pretraining for emotion-intensity regression."""
    setup_logging(log_level=log_level, log_file=log_file)


@cli.command("gen-data")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False), help="Dataset directory to create")
@click.option("--samples", default=2000, show_default=True, type=click.IntRange(min=1))
@click.option("--seed", default=0, show_default=True, type=click.IntRange(min=0))
@click.option("--noise", default=0.3, show_default=True, type=click.FloatRange(min=0.0))
@click.option("--t-min", default=60, show_default=True, type=click.IntRange(min=1))
@click.option("--t-max", default=140, show_default=True, type=click.IntRange(min=1))
@click.option("--force", is_flag=True, help="Overwrite an existing output directory")
def gen_data(out_dir: str, samples: int, seed: int, noise: float, t_min: int, t_max: int, force: bool) -> None:
    """Write a synthetic labeled dataset."""
    try:
        config = SyntheticConfig(num_samples=samples, seed=seed, noise_scale=noise, t_min=t_min, t_max=t_max)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    out = _claim_output(Path(out_dir), force)
    manifest = write_dataset(generate_synthetic(config), out)
    (out / "generator.yaml").write_text(yaml.safe_dump(config.model_dump(), sort_keys=False), encoding="utf-8")
    click.echo(f"wrote {samples} samples to {manifest}")


@cli.command("pretrain")
@click.option("--data", required=True, type=click.Path(exists=True), help="Dataset directory or manifest")
@click.option("--config", "config_path", default=None, type=click.Path(dir_okay=False), help="Run configuration YAML")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False), help="Checkpoint file to write")
@click.option("--seed", default=None, type=click.IntRange(min=0), help="Override the configured seed")
@click.option("--force", is_flag=True, help="Overwrite an existing checkpoint")
def pretrain_cmd(data: str, config_path: Optional[str], out_path: str, seed: Optional[int], force: bool) -> None:
    """Pretrain the reconstructor on the (label-free) training split."""
    config = _run_config(config_path, seed)
    ckpt = _claim_output(Path(out_path), force, is_dir=False)
    train, _ = _splits(data, config)
    model, trace = pretrain(train.unlabeled(), config.train, config.model, config.mask)

    save_checkpoint(model, ckpt)
    trace.to_csv(ckpt.with_name(f"{ckpt.stem}.trace.csv"))
    write_resolved_config(config, ckpt.with_name(f"{ckpt.stem}.config.yaml"))
    click.echo(f"pretrained {trace.epochs} epochs, final loss {trace.final_loss:.6f}; checkpoint {ckpt}")


def _labeled_options(fn):
    fn = click.option("--force", is_flag=True, help="Overwrite an existing output directory")(fn)
    fn = click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))(fn)
    fn = click.option("--config", "config_path", default=None, type=click.Path(dir_okay=False))(fn)
    fn = click.option("--seed", default=None, type=click.IntRange(min=0), help="Override the configured seed")(fn)
    fn = click.option("--labels", required=True, type=click.IntRange(min=1), help="Number of labeled samples")(fn)
    fn = click.option("--data", required=True, type=click.Path(exists=True))(fn)
    return fn


@cli.command("finetune")
@_labeled_options
@click.option("--ckpt", default=None, type=click.Path(dir_okay=False), help="Pretrained checkpoint")
def finetune_cmd(data: str, labels: int, seed: Optional[int], config_path: Optional[str], out_dir: str, force: bool, ckpt: Optional[str]) -> None:
    """Fine-tune a label head on a frozen pretrained backbone."""
    config = _run_config(config_path, seed)
    ckpt = ckpt or config.data.checkpoint
    if ckpt is None:
        raise click.UsageError("finetune needs a pretrained checkpoint (--ckpt or data.checkpoint)")
    out = _claim_output(Path(out_dir), force)
    _labeled_run("pretrained", data, labels, config, out, ckpt)


@cli.command("baseline")
@_labeled_options
def baseline_cmd(data: str, labels: int, seed: Optional[int], config_path: Optional[str], out_dir: str, force: bool) -> None:
    """Train the same architecture from scratch on labeled samples only."""
    config = _run_config(config_path, seed)
    out = _claim_output(Path(out_dir), force)
    _labeled_run("baseline", data, labels, config, out, None)


@cli.command("sweep")
@click.option("--data", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", default=None, type=click.Path(dir_okay=False))
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False), help="Defaults to output_dir from the config")
@click.option("--ckpt", default=None, type=click.Path(dir_okay=False), help="Pretrained checkpoint (else data.checkpoint, else pretrain)")
@click.option("--seed", default=None, type=click.IntRange(min=0))
@click.option("--force", is_flag=True, help="Overwrite an existing output directory")
def sweep_cmd(data: str, config_path: Optional[str], out_dir: Optional[str], ckpt: Optional[str], seed: Optional[int], force: bool) -> None:
    """Compare pretrained and baseline models across label budgets."""
    config = _run_config(config_path, seed)
    out_dir = out_dir or config.output_dir
    if out_dir is None:
        raise click.UsageError("no output directory: pass --out or set output_dir")
    sweep_cfg = config.sweep_config()
    out = _claim_output(Path(out_dir), force)
    write_resolved_config(config, out)

    train, val = _splits(data, config)
    preflight_sweep(sweep_cfg, train, val)
    ckpt = ckpt or config.data.checkpoint
    recon_loss = None
    if ckpt is not None:
        pretrained = load_checkpoint(ckpt)
    else:
        recon_loss = config.train.recon_loss
        pretrained, trace = pretrain(train.unlabeled(), config.train, config.model, config.mask)
        save_checkpoint(pretrained, out / PRETRAIN_NAME)
        trace.to_csv(out / "pretrain.trace.csv")

    report = run_sweep(sweep_cfg, pretrained, train, val)
    paths = write_sweep_outputs(report, out, sweep_cfg, recon_loss)
    click.echo(f"{len(report.records)} records written to {paths['report']}")


@cli.command("gradcheck")
@click.option("--seed", default=0, show_default=True, type=click.IntRange(min=0))
@click.option("--op-trials", default=100, show_default=True, type=click.IntRange(min=1))
@click.option("--model-trials", default=20, show_default=True, type=click.IntRange(min=1))
@click.option("--tolerance", default=DEFAULT_TOLERANCE, show_default=True, type=click.FloatRange(min=0.0, min_open=True))
def gradcheck_cmd(seed: int, op_trials: int, model_trials: int, tolerance: float) -> None:
    """Compare analytic gradients with central finite differences."""
    results = run_gradcheck_suite(seed=seed, op_trials=op_trials, model_trials=model_trials, tolerance=tolerance)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        click.echo(f"{r.name:<{width}}  trials={r.trials:<4d} max_rel_err={r.max_relative_error:.3e}  {status}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise NumericError(f"gradient check failed for: {', '.join(failed)}")
    click.echo(f"all {len(results)} checks passed (tolerance {tolerance:g})")


@cli.command("describe")
@click.option("--data", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", default=None, type=click.Path(dir_okay=False))
def describe_cmd(data: str, config_path: Optional[str]) -> None:
    """Summarize sequence lengths and the label class distribution."""
    config = load_run_config(config_path)
    dataset = load_dataset(resolve_manifest(data))
    click.echo(yaml.safe_dump(length_summary(dataset, config.mask.mask_length), sort_keys=False).rstrip())
    click.echo("label classes per emotion:")
    click.echo(label_class_distribution(dataset).to_string())


def main() -> None:
    cli(prog_name="msq")


if __name__ == "__main__":
    main()
