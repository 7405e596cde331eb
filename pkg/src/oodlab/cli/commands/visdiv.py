import logging
from typing import Dict, List

import pandas as pd

from ...batch import run_units
from ...config import OutputFormat, RunConfig, Split
from ...corpus import DatasetManifest, load_split_images
from ...errors import DataError, UsageError
from ...models import TrainingReport
from ...reports import write_heatmap, write_json, write_matrix_csv
from ...textdiv import normalize_matrix
from ...visdiv import (AEConfig, AEParams, load_params, reconstruction_errors, save_params,
                       train_autoencoder_with_history, visual_divergence_matrix)
from ...visdiv.training import DEFAULT_EPOCHS
from .. import output
from ..workspace import Workspace

logger = logging.getLogger(__name__)

NAME = "visdiv"

PRESETS = {"desk": AEConfig.desk_scale, "paper": AEConfig.paper_scale}


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME, help="train autoencoders or score the visual divergence matrix",
        description="train: one autoencoder per source domain (visdiv/params/<name>.oodae, "
                    "visdiv/history/<name>.json). score: visdiv/visual.csv, the mean "
                    "reconstruction MSE of each source autoencoder (rows) on each target "
                    "split (columns).")
    modes = parser.add_subparsers(dest="mode", required=True)

    train = modes.add_parser("train", help="train one autoencoder per domain")
    train.add_argument("--preset", choices=sorted(PRESETS), default="desk")
    train.add_argument("--epochs", type=int, default=DEFAULT_EPOCHS)
    train.set_defaults(handler=run_train)

    score = modes.add_parser("score", help="score every source autoencoder on every target")
    score.add_argument("--split", type=Split, default=Split.TEST, choices=list(Split),
                       help="target split to score (default: test, held out from training "
                            "and selection); with val the diagonal equals each "
                            "autoencoder's best validation MSE")
    score.add_argument("--normalize", action="store_true",
                       help="also write the matrix rescaled onto [0, 100]")
    score.add_argument("--pgm", action="store_true", help="write a PGM heatmap")
    score.add_argument("--per-image", action="store_true",
                       help="write per-image reconstruction errors")
    score.set_defaults(handler=run_score)


def ae_config(config: RunConfig, preset: str) -> AEConfig:
    base = PRESETS[preset](seed=config.seed)
    try:
        return base.with_overrides(**config.ae)
    except TypeError as e:
        raise UsageError(f"invalid autoencoder override: {e}")


def _train_one(manifest: DatasetManifest, ae: AEConfig, epochs: int,
               workspace: Workspace) -> TrainingReport:
    train = load_split_images(manifest, Split.TRAIN, ae.input_h, ae.input_w)
    val = load_split_images(manifest, Split.VAL, ae.input_h, ae.input_w)
    params, history = train_autoencoder_with_history(ae, train, val, epochs,
                                                     desc=f"AE {manifest.name}")
    params_file = save_params(params, workspace.params_file(manifest.name))
    best = next(record for record in history if record.is_best)
    report = TrainingReport(source=manifest.name, params_file=str(params_file),
                            num_parameters=params.num_parameters(), config=ae.to_dict(),
                            best_epoch=best.epoch, best_val_mse=best.val_mse, history=history)
    write_json(report, workspace.history_file(manifest.name))
    return report


def run_train(args, config: RunConfig) -> int:
    output.banner("Autoencoder training")
    workspace = Workspace.from_config(config)
    manifests = workspace.manifests(config)
    ae = ae_config(config, args.preset)
    output.ok(f"{args.preset} preset {ae.input_h}x{ae.input_w}, channels "
              f"{list(ae.enc_channels)}, latent {ae.latent_dim}, {args.epochs} epochs")

    reports = run_units(lambda m: _train_one(m, ae, args.epochs, workspace), manifests,
                        max_workers=config.workers, desc="Training", show_progress=True)
    for report in reports:
        output.ok(f"{report.source}: best val MSE {report.best_val_mse:.6f} "
                  f"at epoch {report.best_epoch} ({report.num_parameters} parameters)")
        output.detail(report.params_file)
    output.footer()
    return 0


def _load_all(manifests: List[DatasetManifest], workspace: Workspace) -> Dict[str, AEParams]:
    missing = [str(workspace.params_file(m.name)) for m in manifests
               if not workspace.params_file(m.name).is_file()]
    if missing:
        raise DataError(f"missing parameter file(s): {', '.join(missing)} "
                        f"(run 'visdiv train' first)")
    params = {m.name: load_params(workspace.params_file(m.name)) for m in manifests}
    sizes = {(p.config.input_h, p.config.input_w) for p in params.values()}
    if len(sizes) != 1:
        raise DataError(f"autoencoders disagree on the input size: {sorted(sizes)}")
    return params


def run_score(args, config: RunConfig) -> int:
    output.banner("Visual divergence")
    workspace = Workspace.from_config(config)
    manifests = workspace.manifests(config)
    params = _load_all(manifests, workspace)
    first = next(iter(params.values())).config
    h, w = first.input_h, first.input_w
    images = run_units(lambda m: load_split_images(m, args.split, h, w), manifests,
                       max_workers=config.workers, desc="Loading images")
    images_by_target = {m.name: x for m, x in zip(manifests, images)}

    matrix = visual_divergence_matrix(params, images_by_target, max_workers=config.workers)
    out_dir = workspace.directory("visdiv")
    written = [write_matrix_csv(matrix, out_dir / "visual.csv")]
    if args.normalize:
        written.append(write_matrix_csv(normalize_matrix(matrix),
                                        out_dir / "visual_normalized.csv"))
    if config.wants(OutputFormat.PGM):
        written.append(write_heatmap(normalize_matrix(matrix), out_dir / "visual.pgm"))
    if args.per_image:
        rows = [
            {"source": s, "target": t, "index": i, "mse": float(e)}
            for s in params for t in images_by_target
            for i, e in enumerate(reconstruction_errors(params[s], images_by_target[t]))
        ]
        path = out_dir / "reconstruction_errors.csv"
        pd.DataFrame(rows).to_csv(path, index=False, float_format="%.17g")
        written.append(path)

    output.table(matrix, float_format="{:.6f}")
    output.wrote(written)
    output.footer()
    return 0
