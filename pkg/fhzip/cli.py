"""Command-line interface for fhzip.

Provides a Click-based CLI for generating precoding datasets, training the
codec, compressing and decompressing precoders, and evaluating rate and
distortion. This is the single entry point for all command-line
operations.
"""

import functools
from importlib.metadata import version as get_version
from pathlib import Path
from typing import Any, Callable, Optional

import click
from rich.console import Console
from rich.table import Table

from .domain import STAGE_POLICIES, EvalReport, FhzipError, RateReport, RunConfig
from .infrastructure import configure_services, setup_logging
from .services import IConfigService, IPipelineService
from .services.pipeline_service import SPLITS

# Get version from package metadata
try:
    __version__ = get_version("fhzip")
except Exception:
    __version__ = "0.0.0"  # Fallback version

# Context keys
PIPELINE_KEY = "pipeline"
CONFIG_SERVICE_KEY = "config_service"

USAGE_EXIT_CODE = 1

# CLI option name -> configuration key
OVERRIDE_OPTIONS = (
    "preset",
    "seed",
    "out",
    "tx_antennas",
    "users",
    "rbs",
    "paths",
    "delay_spread_ns",
    "rb_average",
    "latent_dim",
    "stages",
    "codebook_sizes",
    "entropy_order",
    "budget_bits_per_token",
    "stage_policy",
    "num_samples",
)


class FhzipGroup(click.Group):
    """Click group that maps every failure onto the documented exit codes."""

    def make_context(self, *args: Any, **kwargs: Any) -> click.Context:
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as e:
            e.exit_code = USAGE_EXIT_CODE
            raise

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = USAGE_EXIT_CODE
            raise
        except FhzipError as e:
            click.echo(f"Error: {e}", err=True)
            ctx.exit(e.exit_code)


def run_options(command: Callable[..., Any]) -> Callable[..., Any]:
    """Attach the shared configuration flags and build a RunConfig.

    The wrapped command receives ``cfg`` instead of the individual flags.
    """
    options = [
        click.option("--config", "config_path", type=click.Path(path_type=Path), help="key=value configuration file."),
        click.option("--preset", type=str, help="Named preset (desk, panel-8x16-dual, paper-outdoor)."),
        click.option("--seed", type=int, help="Master seed."),
        click.option("--out", type=click.Path(path_type=Path), help="Output directory for default file names."),
        click.option("--tx-antennas", type=int, help="Transmit antennas Nt."),
        click.option("--users", type=int, help="Single-antenna users K."),
        click.option("--rbs", type=int, help="Resource blocks G."),
        click.option("--paths", type=int, help="Multipath taps P."),
        click.option("--delay-spread-ns", type=float, help="RMS delay spread in ns."),
        click.option("--rb-average/--rb-center", default=None, help="Average each RB over its subcarriers."),
        click.option("--latent-dim", type=int, help="Latent dimension d."),
        click.option("--stages", type=int, help="Number of residual stages L."),
        click.option("--codebook-sizes", type=str, help="Comma-separated codebook sizes."),
        click.option("--entropy-order", type=int, help="Entropy model order (0 or 1)."),
        click.option("--budget-bits-per-token", type=float, help="Fronthaul budget in bits per token."),
        click.option("--stage-policy", type=click.Choice(STAGE_POLICIES), help="Stage selection rule."),
        click.option("--num-samples", type=int, help="Dataset size N."),
    ]

    @functools.wraps(command)
    def wrapper(ctx: click.Context, config_path: Optional[Path], **kwargs: Any) -> Any:
        overrides = {key: kwargs.pop(key) for key in OVERRIDE_OPTIONS}
        config_service: IConfigService = ctx.obj[CONFIG_SERVICE_KEY]
        cfg = config_service.build(config_path, overrides)
        return command(ctx, cfg, **kwargs)

    for option in reversed(options):
        wrapper = option(wrapper)
    return wrapper


def get_pipeline(ctx: click.Context) -> IPipelineService:
    """Get the pipeline facade from click context."""
    return ctx.obj[PIPELINE_KEY]


def _default_path(cfg: RunConfig, given: Optional[Path], name: str) -> Path:
    return given if given is not None else cfg.out_dir / name


@click.group(cls=FhzipGroup)
@click.option("--verbose", "-v", count=True, help="-v for progress, -vv for details.")
@click.version_option(version=__version__, prog_name="fhzip")
@click.pass_context
def cli(ctx: click.Context, verbose: int) -> None:
    """fhzip - fronthaul compression of RB-wise precoders.

    Generates WMMSE precoding datasets from synthetic multipath channels,
    trains a transform + residual VQ + entropy codec and measures the
    rate, distortion and sum-rate loss of the compressed precoders.
    """
    setup_logging(verbose)
    ctx.ensure_object(dict)
    container = configure_services()
    ctx.obj[PIPELINE_KEY] = container.resolve(IPipelineService)
    ctx.obj[CONFIG_SERVICE_KEY] = container.resolve(IConfigService)


@cli.command("gen-data")
@click.option("--output", "-o", type=click.Path(path_type=Path), help="Dataset file (default OUT/dataset.fhd).")
@click.pass_context
@run_options
def gen_data(ctx: click.Context, cfg: RunConfig, output: Optional[Path]) -> None:
    """Generate channels and WMMSE precoders into an FHD1 dataset."""
    output = _default_path(cfg, output, "dataset.fhd")
    dataset = get_pipeline(ctx).gen_data(cfg, output)
    for i, sample in enumerate(dataset.samples):
        click.echo(f"sample {i}: {sample.sum_rate:.6f} b/s/Hz")
    click.echo(f"Wrote {len(dataset)} samples to {output}")


@cli.command()
@click.option("--dataset", "-d", "dataset_path", type=click.Path(path_type=Path), help="Dataset file (default OUT/dataset.fhd).")
@click.option("--output", "-o", type=click.Path(path_type=Path), help="Artifacts file (default OUT/codec.fhm).")
@click.pass_context
@run_options
def train(ctx: click.Context, cfg: RunConfig, dataset_path: Optional[Path], output: Optional[Path]) -> None:
    """Fit transform, codebooks and entropy model on the train split."""
    dataset_path = _default_path(cfg, dataset_path, "dataset.fhd")
    output = _default_path(cfg, output, "codec.fhm")
    artifacts = get_pipeline(ctx).train(cfg, dataset_path, output)

    table = Table(title="Trained codec")
    table.add_column("Stage", justify="right")
    table.add_column("Codewords", justify="right")
    table.add_column("Requested", justify="right")
    stack = artifacts.codebooks
    for l, (got, want) in enumerate(zip(stack.sizes, stack.requested_sizes)):
        table.add_row(str(l), str(got), str(want))
    Console().print(table)
    click.echo(f"Fingerprint {artifacts.fingerprint:016x}, wrote {output}")


def _rate_table(report: RateReport) -> Table:
    table = Table(title=f"Rate report ({report.tokens} tokens)")
    table.add_column("Stage", justify="right")
    table.add_column("K", justify="right")
    table.add_column("Coded b/tok", justify="right")
    table.add_column("Entropy b/tok", justify="right")
    table.add_column("log2 K", justify="right")
    table.add_column("Sent")
    rows = zip(report.alphabet_sizes, report.stage_rates, report.entropy_rates, report.fixed_rates)
    for l, (k, coded, entropy, fixed) in enumerate(rows):
        table.add_row(
            str(l),
            str(k),
            f"{coded:.4f}",
            f"{entropy:.4f}",
            f"{fixed:.4f}",
            "yes" if l < report.active_stages else "",
        )
    return table


@cli.command()
@click.option("--artifacts", "-a", type=click.Path(path_type=Path), help="Artifacts file (default OUT/codec.fhm).")
@click.option("--input", "-i", "input_path", type=click.Path(path_type=Path), required=True, help="FHT1 tensor or FHD1 dataset.")
@click.option("--sample", type=int, help="Sample index when the input is a dataset.")
@click.option("--active-stages", type=int, help="Send exactly this many stages.")
@click.option("--output", "-o", type=click.Path(path_type=Path), help="Bitstream file (default OUT/precoder.fhz).")
@click.pass_context
@run_options
def compress(
    ctx: click.Context,
    cfg: RunConfig,
    artifacts: Optional[Path],
    input_path: Path,
    sample: Optional[int],
    active_stages: Optional[int],
    output: Optional[Path],
) -> None:
    """Compress a precoding tensor under the fronthaul budget."""
    artifacts = _default_path(cfg, artifacts, "codec.fhm")
    output = _default_path(cfg, output, "precoder.fhz")
    report = get_pipeline(ctx).compress(cfg, artifacts, input_path, output, sample, active_stages)
    Console().print(_rate_table(report))
    click.echo(
        f"{report.active_stages} stage(s), {report.rate_total:.4f} bits/token, "
        f"{report.total_bits} bits total, wrote {output}"
    )


@cli.command()
@click.option("--artifacts", "-a", type=click.Path(path_type=Path), help="Artifacts file (default OUT/codec.fhm).")
@click.option("--input", "-i", "input_path", type=click.Path(path_type=Path), required=True, help="FHZ1 bitstream.")
@click.option("--output", "-o", type=click.Path(path_type=Path), help="Tensor file (default OUT/precoder.fht).")
@click.pass_context
@run_options
def decompress(
    ctx: click.Context,
    cfg: RunConfig,
    artifacts: Optional[Path],
    input_path: Path,
    output: Optional[Path],
) -> None:
    """Reconstruct a precoding tensor from a bitstream."""
    artifacts = _default_path(cfg, artifacts, "codec.fhm")
    output = _default_path(cfg, output, "precoder.fht")
    tensor = get_pipeline(ctx).decompress(artifacts, input_path, output)
    click.echo(
        f"Reconstructed {tensor.num_rbs} RBs x {tensor.num_users} users x "
        f"{tensor.num_tx_antennas} antennas, wrote {output}"
    )


def _eval_table(reports: list[EvalReport], title: str) -> Table:
    table = Table(title=title)
    for name in ("Stages", "Rate b/tok", "MSE", "NMSE dB", "EVM %", "dR", "dSINR dB", "Objective", "CR"):
        table.add_column(name, justify="right")
    for r in reports:
        table.add_row(
            str(r.stages),
            f"{r.rate_bits_per_token:.4f}",
            f"{r.mse:.4e}",
            f"{r.nmse_db:.2f}",
            f"{r.evm_percent:.2f}",
            f"{r.delta_rate_fraction:.4f}" + ("" if r.meets_rate_target else " !"),
            f"{r.sinr_delta_db:.2f}" + ("" if r.meets_sinr_target else " !"),
            f"{r.objective:.4e}",
            f"{r.compression_ratio:.1f}",
        )
    return table


@cli.command("eval")
@click.option("--artifacts", "-a", type=click.Path(path_type=Path), help="Artifacts file (default OUT/codec.fhm).")
@click.option("--dataset", "-d", "dataset_path", type=click.Path(path_type=Path), help="Dataset file (default OUT/dataset.fhd).")
@click.option("--split", type=click.Choice(SPLITS), default="test", show_default=True)
@click.option("--active-stages", type=int, help="Evaluate this many stages instead of the budget choice.")
@click.option("--csv", "csv_path", type=click.Path(path_type=Path), help="CSV report (default OUT/eval.csv).")
@click.pass_context
@run_options
def eval_command(
    ctx: click.Context,
    cfg: RunConfig,
    artifacts: Optional[Path],
    dataset_path: Optional[Path],
    split: str,
    active_stages: Optional[int],
    csv_path: Optional[Path],
) -> None:
    """Evaluate distortion, rate and sum-rate loss on a dataset split."""
    artifacts = _default_path(cfg, artifacts, "codec.fhm")
    dataset_path = _default_path(cfg, dataset_path, "dataset.fhd")
    csv_path = _default_path(cfg, csv_path, "eval.csv")
    report = get_pipeline(ctx).evaluate(cfg, artifacts, dataset_path, csv_path, split, active_stages)
    Console().print(_eval_table([report], f"Evaluation ({split} split)"))
    click.echo(f"Wrote {csv_path}")


@cli.command()
@click.option("--artifacts", "-a", type=click.Path(path_type=Path), help="Artifacts file (default OUT/codec.fhm).")
@click.option("--dataset", "-d", "dataset_path", type=click.Path(path_type=Path), help="Dataset file (default OUT/dataset.fhd).")
@click.option("--split", type=click.Choice(SPLITS), default="test", show_default=True)
@click.option("--csv", "csv_path", type=click.Path(path_type=Path), help="CSV report (default OUT/sweep.csv).")
@click.pass_context
@run_options
def sweep(
    ctx: click.Context,
    cfg: RunConfig,
    artifacts: Optional[Path],
    dataset_path: Optional[Path],
    split: str,
    csv_path: Optional[Path],
) -> None:
    """Rate-distortion sweep over every stage count."""
    artifacts = _default_path(cfg, artifacts, "codec.fhm")
    dataset_path = _default_path(cfg, dataset_path, "dataset.fhd")
    csv_path = _default_path(cfg, csv_path, "sweep.csv")
    reports = get_pipeline(ctx).sweep(cfg, artifacts, dataset_path, csv_path, split)
    Console().print(_eval_table(reports, f"Rate-distortion sweep ({split} split)"))
    click.echo(f"Wrote {csv_path}")


def main() -> None:
    """Main entry point for the CLI."""
    cli()


if __name__ == "__main__":
    main()
