import argparse
import sys

import structlog
from rich import print

from convnets import comparison_study, dictionary_learning, evaluate_checkpoint
from convnets import gradient_check, pca_projection, predict_labels
from convnets import prepare_dataset, train_model
from convnets import ConvnetError, configure_logging
from convnets.commands.compare import STUDIES
from convnets.config import load_run_config
from convnets.model_zoo import BUILTINS, VARIANTS

log = structlog.get_logger("main")


class main():
    def __init__(self, argv=None) -> None:
        parser = argparse.ArgumentParser(
            prog="main.py",
            description="""
                CONVNETS:
                Convolutional networks for CIFAR-10 built from scratch on
                numpy. Prepares the data (GCN, ZCA whitening, K-means
                dictionaries), trains the builtin architectures with
                Nesterov momentum, max-norm constraints, dropout and maxout,
                and checks every gradient against finite differences.
            """
        )
        parser.add_argument(
            '--log-level',
            type=str,
            required=False,
            default='info',
            choices=['debug', 'info', 'warning', 'error'],
            help="Log level for the structured log on stderr."
        )
        parser.add_argument(
            '--log-json',
            action='store_true',
            help="Emit the log as JSON lines."
        )
        commands = parser.add_subparsers(dest="command", required=True)

        def with_config(name: str, help_text: str) -> argparse.ArgumentParser:
            sub = commands.add_parser(name, help=help_text)
            sub.add_argument(
                '--config',
                type=str,
                required=False,
                default=None,
                help="""
                    Run-config file with 'key = value' lines. Every key has a
                    default, so the file may be omitted.
                """
            )
            sub.add_argument(
                '--seed',
                type=int,
                required=False,
                default=None,
                help="Overrides the config seed."
            )
            sub.add_argument(
                '--out',
                type=str,
                required=False,
                default=None,
                help="Overrides the config output directory."
            )
            return sub

        with_config("prepare", "Fit preprocessing and write prepared sets.")
        with_config("dict-learn", "Learn a K-means patch dictionary.")

        train = with_config("train", "Train a model.")
        train.add_argument(
            '--dry-run',
            action='store_true',
            help="""
                Print the resolved model, its shape chain, parameter counts
                and the schedule without reading any data.
            """
        )
        train.add_argument(
            '--info-graphic',
            action='store_true',
            help="""
                Render the architecture with graphviz into the output
                directory (architecture.png, source in architecture.gv).
            """
        )
        train.add_argument(
            '--resume',
            type=str,
            required=False,
            default=None,
            help="Continue training from a last.ckpt checkpoint."
        )
        train.add_argument(
            '--max-epochs',
            type=int,
            required=False,
            default=None,
            help="Caps the number of epochs."
        )

        for name, default in (("eval", "validation"), ("predict", "test")):
            sub = with_config(name, f"Run a checkpoint on a prepared set "
                                    f"(default: {default}).")
            sub.add_argument('--checkpoint', type=str, required=True,
                             help="Checkpoint file, usually best.ckpt.")
            sub.add_argument('--data', type=str, default=default,
                             help="train, validation, test or a file path.")
            if name == "predict":
                sub.add_argument('--output', type=str, default="",
                                 help="Submission CSV path.")

        check = commands.add_parser(
            "gradcheck", help="Finite-difference checks of builtin models.")
        check.add_argument('models', nargs='*', default=list(BUILTINS),
                           help="Builtin names; all when omitted.")
        check.add_argument('--variant', choices=VARIANTS + ("all",),
                           default="all")
        check.add_argument('--seed', type=int, default=0)
        check.add_argument('--tolerance', type=float, default=1e-4)
        check.add_argument('--max-coords', type=int, default=20)

        pca = with_config("pca2", "Two-component PCA scatter CSV.")
        pca.add_argument('--data', type=str, default="raw",
                         help="raw (the CIFAR files) or a prepared set.")
        pca.add_argument('--output', type=str, default="")

        compare = with_config("compare", "Train one run per study setting.")
        compare.add_argument('--study', choices=STUDIES, required=True)
        compare.add_argument('--max-epochs', type=int, default=None)

        args = parser.parse_args(argv)
        configure_logging(args.log_level, json=args.log_json)
        try:
            self.dispatch(args)
        except ConvnetError as e:
            print(f"[red]Error:[/red] {e}")
            log.error("command failed", command=args.command, error=str(e),
                      exit_code=e.exit_code)
            sys.exit(e.exit_code)

    def dispatch(self, args: argparse.Namespace) -> None:
        if args.command == "gradcheck":
            variants = VARIANTS if args.variant == "all" else (args.variant,)
            gradient_check(args.models, variants, seed=args.seed,
                           tolerance=args.tolerance,
                           max_coords=args.max_coords)
            return

        config = load_run_config(args.config, {
            "seed": args.seed,
            "out_dir": args.out,
            "max_epochs": getattr(args, "max_epochs", None),
        })
        if args.command == "prepare":
            prepare_dataset(config)
        elif args.command == "dict-learn":
            dictionary_learning(config)
        elif args.command == "train":
            train_model(config, dry_run=args.dry_run,
                        info_graphic=args.info_graphic, resume=args.resume)
        elif args.command == "eval":
            evaluate_checkpoint(config, args.checkpoint, args.data)
        elif args.command == "predict":
            predict_labels(config, args.checkpoint, args.data, args.output)
        elif args.command == "pca2":
            pca_projection(config, args.data, args.output)
        elif args.command == "compare":
            comparison_study(config, args.study)


if __name__ == "__main__":
    main()
