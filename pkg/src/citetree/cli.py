"""Command-line entry point: ``citetree <command> [flags]``.

Exit codes: 0 success, 1 usage error, 2 data/schema error, 3 numeric or
degenerate error.  Flags override values from ``--config`` (a flat
``key=value`` file), which override built-in defaults.
"""
from __future__ import annotations

import argparse
import io
import os
import sys
from pathlib import Path
from typing import Sequence

from . import evaluation, importance, ingest, tree
from .errors import CitetreeError, DataError, NumericError

OUTPUT_DIR_ENV = "CITETREE_OUTPUT_DIR"
FORMATS = ("aligned-text", "tsv")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_io(p, input_help="dataset CSV", output_name=None):
    p.add_argument("--input", help=input_help)
    p.add_argument("--output", help="output file (default: stdout, or "
                   f"${OUTPUT_DIR_ENV}/{output_name} when that variable is set)" if output_name
                   else "output file (default: stdout)")
    p.set_defaults(default_output=output_name)


def _add_control(p):
    p.add_argument("--mincut", type=int, default=3, help="minimum rows in each child (default 3)")
    p.add_argument("--minsize", type=int, default=6, help="minimum rows in a node to split (default 6)")
    p.add_argument("--mindev", type=float, default=0.01,
                   help="split only nodes whose deviance is at least this fraction of the root's (default 0.01)")


def _add_format(p):
    p.add_argument("--format", choices=FORMATS, default="aligned-text", help="report format")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="citetree", description="Classification-tree analysis of citation data.")
    parser.add_argument("--config", help="flat key=value file supplying flag defaults")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic corpus with a planted rule")
    p.add_argument("--rows", type=int, default=305)
    p.add_argument("--seed", type=int)
    p.add_argument("--rule", action="append", default=[],
                   help="region 'cond [& cond] -> p_low,p_median,p_high'; repeatable")
    p.add_argument("--default", default="0.3333333333333333,0.3333333333333333,0.3333333333333334",
                   help="class probabilities outside every region")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--raw", action="store_true", help="emit raw paper records instead of predictors")
    p.add_argument("--history", help="with --raw: where to write the subject history CSV")
    _add_io(p, output_name="synth.csv")

    p = sub.add_parser("derive", help="raw paper records -> predictor CSV")
    p.add_argument("--history", help="subject history CSV (subject,count)")
    p.add_argument("--home-country", default="JP")
    _add_io(p, "raw paper record CSV", "predictors.csv")

    p = sub.add_parser("sample", help="stratified random sample by citation level")
    p.add_argument("--seed", type=int)
    p.add_argument("--strata", help="CSV level,population,sample (default: built-in 305-row design)")
    _add_io(p, output_name="sample.csv")

    p = sub.add_parser("grow", help="grow a tree; writes the tree document and prints its summary")
    _add_control(p)
    p.add_argument("--impurity", choices=sorted(tree.IMPURITIES), default="deviance")
    p.add_argument("--summary", help="also write the summary to this file")
    _add_format(p)
    _add_io(p, output_name="tree.json")

    p = sub.add_parser("summarize", help="summary statistics of a tree on a dataset")
    p.add_argument("--tree", help="tree document")
    _add_format(p)
    _add_io(p, output_name="summary.txt")

    p = sub.add_parser("importance", help="deviance-drop and shuffle importance")
    p.add_argument("--tree", help="tree document")
    p.add_argument("--k", type=int, default=importance.DEFAULT_K, help="shuffle trials per predictor")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    _add_format(p)
    _add_io(p, output_name="importance.txt")

    p = sub.add_parser("evaluate", help="confusion matrix, or --holdout/--loo test error")
    p.add_argument("--tree", help="tree document (confusion-matrix mode)")
    p.add_argument("--holdout", type=int, help="rows held out per trial")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--loo", action="store_true", help="leave-one-out over every row")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    _add_control(p)
    _add_format(p)
    _add_io(p, output_name="evaluation.txt")

    p = sub.add_parser("describe", help="group five-number summaries and scatter export")
    p.add_argument("--group", choices=sorted(evaluation.GROUPINGS), default="authors")
    p.add_argument("--scatter", help="write the (mcq, citations, rt) table here")
    _add_format(p)
    _add_io(p, output_name="describe.txt")
    return parser


def _read_config(path: str) -> dict[str, str]:
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("citetree: a command is required (see --help)")
    if not args.config:
        return args
    config = _read_config(args.config)
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in subparser._actions if a.dest not in ("help",)}
    defaults = {}
    for key, raw in config.items():
        action = actions.get(key)
        if action is None:
            raise UsageError(f"config key {key!r} is not a flag of '{args.command}'")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        elif isinstance(action, argparse._AppendAction):
            defaults[key] = [raw]
        else:
            try:
                value = action.type(raw) if action.type else raw
            except ValueError:
                raise UsageError(f"config key {key!r}: invalid value {raw!r}") from None
            if action.choices and value not in action.choices:
                raise UsageError(f"config key {key!r}: {value!r} not in {list(action.choices)}")
            defaults[key] = value
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


# -- helpers ---------------------------------------------------------------

def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"{args.command}: --{name.replace('_', '-')} is required")


def _check_inputs(*paths):
    for path in paths:
        if path is not None and not Path(path).is_file():
            raise UsageError(f"input file not found: {path}")


def _output_path(args, explicit: str | None = None, default_name: str | None = None) -> Path | None:
    target = explicit if explicit is not None else args.output
    if target is not None:
        return Path(target)
    name = default_name or args.default_output
    env_dir = os.environ.get(OUTPUT_DIR_ENV)
    if env_dir and name:
        return Path(env_dir) / name
    return None


def _check_output(path: Path | None):
    if path is not None and not path.parent.exists():
        raise UsageError(f"output directory does not exist: {path.parent}")


def _emit(text: str, path: Path | None, stdout):
    if path is None:
        stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _read_dataset(path: str) -> ingest.Dataset:
    with open(path, encoding="utf-8", newline="") as fh:
        return ingest.parse_dataset_csv(fh)


def _read_tree(path: str) -> tree.Tree:
    return tree.decode_tree(Path(path).read_text(encoding="utf-8"))


def _control(args) -> tree.GrowthControl:
    try:
        return tree.GrowthControl(args.mincut, args.minsize, args.mindev)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _require_seed(args):
    if args.seed is None:
        raise UsageError(f"{args.command}: --seed is required")
    if args.seed < 0:
        raise UsageError("--seed must be non-negative")


def _summary_text(s: tree.GrowthSummary, fmt: str) -> str:
    if fmt == "tsv":
        rmd = "NA" if s.residual_mean_deviance is None else repr(s.residual_mean_deviance)
        return (
            "variables_used\tterminal_nodes\tresidual_mean_deviance\tleaf_deviance\tdf\t"
            "misclassification_error_rate\tmisclassified\tN\n"
            f"{','.join(s.variables_used)}\t{s.leaf_count}\t{rmd}\t{s.leaf_deviance_sum!r}\t"
            f"{s.N - s.leaf_count}\t{s.misclassification_error_rate!r}\t{s.misclassified}\t{s.N}\n"
        )
    return s.to_text()


# -- commands --------------------------------------------------------------

def cmd_synth(args, stdout):
    _require_seed(args)
    out = _output_path(args)
    history_path = Path(args.history) if args.history else None
    if args.raw and history_path is None:
        raise UsageError("synth --raw requires --history")
    _check_output(out)
    _check_output(history_path)
    cfg = ingest.SynthConfig(
        rows=args.rows, seed=args.seed,
        regions=tuple(ingest.parse_region(r) for r in args.rule),
        default=ingest.parse_probs(args.default), noise=args.noise,
    )
    if args.raw:
        records, history = ingest.generate_synthetic_records(cfg)
        buf = io.StringIO()
        ingest.write_paper_records(records, buf)
        _emit(buf.getvalue(), out, stdout)
        lines = ["subject,count"] + [
            f"{s.value},{history.counts_by_subject_2004_2008.get(s, 0)}" for s in ingest.SUBJECTS
        ]
        _emit("\n".join(lines) + "\n", history_path, stdout)
    else:
        _emit(ingest.dataset_to_csv(ingest.generate_synthetic(cfg)), out, stdout)


def cmd_derive(args, stdout):
    _need(args, "input", "history")
    _check_inputs(args.input, args.history)
    out = _output_path(args)
    _check_output(out)
    with open(args.history, encoding="utf-8", newline="") as fh:
        history = ingest.parse_subject_history(fh)
    with open(args.input, encoding="utf-8", newline="") as fh:
        records = ingest.parse_paper_records(fh)
    d = ingest.derive_dataset(records, history, args.home_country)
    _emit(ingest.dataset_to_csv(d), out, stdout)


def cmd_sample(args, stdout):
    _need(args, "input")
    _require_seed(args)
    _check_inputs(args.input, args.strata)
    out = _output_path(args)
    _check_output(out)
    spec = ingest.REFERENCE_STRATA
    if args.strata:
        with open(args.strata, encoding="utf-8", newline="") as fh:
            spec = ingest.StratumSpec.parse(fh)
    d = _read_dataset(args.input)
    _emit(ingest.dataset_to_csv(ingest.stratified_sample(d, spec, args.seed)), out, stdout)


def cmd_grow(args, stdout):
    _need(args, "input")
    _check_inputs(args.input)
    out = _output_path(args)
    summary_path = Path(args.summary) if args.summary else None
    _check_output(out)
    _check_output(summary_path)
    control = _control(args)
    d = _read_dataset(args.input)
    t = tree.grow_tree(d, control, tree.IMPURITIES[args.impurity])
    summary = _summary_text(tree.summarize_tree(t, d), args.format)
    if out is None:
        stdout.write(tree.encode_tree(t))
    else:
        _emit(tree.encode_tree(t), out, stdout)
        stdout.write(summary)
    if summary_path is not None:
        _emit(summary, summary_path, stdout)


def cmd_summarize(args, stdout):
    _need(args, "input", "tree")
    _check_inputs(args.input, args.tree)
    out = _output_path(args)
    _check_output(out)
    t = _read_tree(args.tree)
    d = _read_dataset(args.input)
    _emit(_summary_text(tree.summarize_tree(t, d), args.format), out, stdout)


def cmd_importance(args, stdout):
    _need(args, "input", "tree")
    _require_seed(args)
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    _check_inputs(args.input, args.tree)
    out = _output_path(args)
    _check_output(out)
    t = _read_tree(args.tree)
    d = _read_dataset(args.input)
    table = importance.deviance_importance(t).merged(
        importance.shuffle_importance(t, d, args.k, args.seed, workers=max(1, args.workers))
    )
    render = importance.importance_to_tsv if args.format == "tsv" else importance.importance_to_text
    _emit(render(table), out, stdout)


def cmd_evaluate(args, stdout):
    _need(args, "input")
    if args.holdout is not None and args.loo:
        raise UsageError("evaluate: --holdout and --loo are mutually exclusive")
    _check_inputs(args.input, args.tree)
    out = _output_path(args)
    _check_output(out)
    if args.holdout is not None or args.loo:
        control = _control(args)
        if args.holdout is not None:
            _require_seed(args)
            if args.trials < 1:
                raise UsageError("--trials must be >= 1")
        d = _read_dataset(args.input)
        if args.loo:
            report = evaluation.leave_one_out(d, control)
        else:
            report = evaluation.repeated_holdout(d, args.holdout, args.trials, control, args.seed,
                                                 workers=max(1, args.workers))
        _emit(report.to_tsv() if args.format == "tsv" else report.to_text(), out, stdout)
        return
    _need(args, "tree")
    t = _read_tree(args.tree)
    d = _read_dataset(args.input)
    cm = evaluation.confusion_matrix(t, d)
    _emit(evaluation.confusion_to_tsv(cm) if args.format == "tsv" else evaluation.confusion_to_text(cm),
          out, stdout)


def cmd_describe(args, stdout):
    _need(args, "input")
    _check_inputs(args.input)
    out = _output_path(args)
    scatter_path = Path(args.scatter) if args.scatter else None
    _check_output(out)
    _check_output(scatter_path)
    d = _read_dataset(args.input)
    groups = evaluation.describe_groups(d, args.group)
    render = evaluation.groups_to_tsv if args.format == "tsv" else evaluation.groups_to_text
    _emit(render(groups), out, stdout)
    if scatter_path is not None:
        _emit(evaluation.scatter_export(d).to_tsv(), scatter_path, stdout)


COMMANDS = {
    "synth": cmd_synth,
    "derive": cmd_derive,
    "sample": cmd_sample,
    "grow": cmd_grow,
    "summarize": cmd_summarize,
    "importance": cmd_importance,
    "evaluate": cmd_evaluate,
    "describe": cmd_describe,
}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(build_parser(), argv)
        COMMANDS[args.command](args, stdout)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    except NumericError as exc:
        print(f"numeric error: {exc}", file=stderr)
        return 3
    except (DataError, CitetreeError) as exc:
        print(f"data error: {exc}", file=stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
