import logging
from pathlib import Path

from ...analysis import load_validation_log, select_model, selection_summary
from ...config import RunConfig, SelectionStrategy
from ...reports import write_json
from .. import output
from ..workspace import Workspace

logger = logging.getLogger(__name__)

NAME = "select"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME, help="pick checkpoints by validation CER",
        description="Reads a validation log CSV (checkpoint, domain, val_cer) and reports "
                    "the checkpoint chosen by each strategy (id, heldout, oracle). Writes "
                    "select/<source>__<target>.json.")
    parser.add_argument("log", type=Path, help="validation log CSV")
    parser.add_argument("--source", required=True, help="training domain")
    parser.add_argument("--target", required=True, help="evaluation domain")
    parser.add_argument("--strategy", type=SelectionStrategy, choices=list(SelectionStrategy),
                        help="print only this strategy's choice")
    parser.set_defaults(handler=run)


def run(args, config: RunConfig) -> int:
    output.banner(f"Model selection {args.source} -> {args.target}")
    records = load_validation_log(args.log)
    if args.strategy is not None:
        checkpoint = select_model(records, args.strategy, args.source, args.target)
        output.ok(f"{args.strategy.value}: {checkpoint}")
        output.footer()
        return 0

    report = selection_summary(records, args.source, args.target)
    for choice in report.choices:
        cer = "n/a" if choice.target_val_cer is None else f"{choice.target_val_cer:.2f}"
        output.ok(f"{choice.strategy:<8} {choice.checkpoint}  (target val CER {cer})")
    out_dir = Workspace.from_config(config).directory("select")
    output.wrote([write_json(report, out_dir / f"{args.source}__{args.target}.json")])
    output.footer()
    return 0
