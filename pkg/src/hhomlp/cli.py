"""Command-line front end: ``hhomlp <subcommand> [options]``.

Subcommands
-----------
synth        write a synthetic KDD-style CSV
prepare      CSV -> normalized train/test caches
select       HHO feature selection on the train cache -> mask file
train        HHO-trained MLP on the train cache -> model file
evaluate     model + cache -> metrics on stdout, CSV and JSON
bench-swarm  final training MSE over swarm sizes and seeds

Every subcommand accepts ``--config FILE`` (JSON).  Values resolve as
command-line flag, then config file, then built-in default.  The file may
hold flat keys or one object per subcommand name.

Exit codes: 0 success, 1 usage error, 2 data error, 3 compute error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .data import (
    DataError,
    SplitSpec,
    builtin_schema,
    load_csv,
    load_dataset,
    load_schema,
    prepare,
    save_dataset,
)
from .featsel import CostWeights, MlpErrorEstimator, load_mask, save_mask, select_features
from .hho import SwarmConfig
from .mlp import MlpTopology
from .synthetic import DEFAULT_FAMILY_MIX, KDD99_FAMILY_MIX, make_kdd_like, write_csv
from .train import TrainConfig, evaluate, load_model, save_model, train

log = logging.getLogger("hhomlp")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_COMPUTE = 0, 1, 2, 3
MANIFEST_FORMAT = "hhomlp-manifest/1"

DEFAULTS = {
    "synth": {"rows": 5000, "seed": 0, "mix": "default", "header": False},
    "prepare": {"schema": None, "builtin_schema": None, "train_fraction": 0.8, "stratified": True,
                "seed": 0, "header": False, "policy": "ordinal", "feature_range": [0.0, 1.0],
                "max_rows": None, "extra_attacks": []},
    "select": {"population": 10, "iterations": 30, "seed": 0, "beta_fs": 0.01,
               "validation_fraction": 0.3, "inner_population": 5, "inner_iterations": 10,
               "inner_hidden": [5, 5], "weight_bound": 10.0},
    "train": {"mask": None, "hidden": [5, 5], "topology": None, "population": 10, "iterations": 30,
              "seed": 0, "weight_bound": 10.0},
    "evaluate": {"partition": "test", "csv": None, "json": None, "run_id": None},
    "bench-swarm": {"mask": None, "sizes": [5, 10, 15, 20, 30], "seeds": 10, "first_seed": 0,
                    "iterations": 30, "hidden": [5, 5], "weight_bound": 10.0},
}


class UsageError(Exception):
    """Bad flags, config keys or inconsistent options."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for data errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.replace("-", ",").split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _csv_ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hhomlp", description="Harris Hawks optimized MLP intrusion detection.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", type=Path, help="JSON config file")
        return p

    p = add("synth", "write a synthetic KDD-style CSV (41 features + label, no header)")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--rows", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--mix", choices=["default", "kdd99"])
    p.add_argument("--header", action="store_true", default=None)

    p = add("prepare", "load, encode, split and normalize a CSV into train/test caches")
    p.add_argument("input", type=Path)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--schema", type=Path, help="schema file (name: numeric|categorical|label|ignore)")
    p.add_argument("--builtin-schema", choices=["kdd", "nsl_kdd"])
    p.add_argument("--train-fraction", type=float)
    p.add_argument("--no-stratify", dest="stratified", action="store_false", default=None)
    p.add_argument("--seed", type=int)
    p.add_argument("--header", action="store_true", default=None)
    p.add_argument("--policy", choices=["ordinal", "onehot"])
    p.add_argument("--feature-range", type=float, nargs=2, metavar=("NA", "NB"))
    p.add_argument("--max-rows", type=int, help="use only the first N rows")
    p.add_argument("--extra-attack", dest="extra_attacks", action="append",
                   help="extra label name to treat as an attack (repeatable)")

    p = add("select", "HHO feature selection on the train cache")
    p.add_argument("--data", type=Path, required=True, help="directory written by prepare")
    p.add_argument("--out", type=Path, required=True, help="mask file (CSV)")
    p.add_argument("--population", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--beta-fs", type=float, help="weight of the selected-feature ratio")
    p.add_argument("--validation-fraction", type=float)
    p.add_argument("--inner-population", type=int)
    p.add_argument("--inner-iterations", type=int)
    p.add_argument("--inner-hidden", type=_csv_ints)
    p.add_argument("--weight-bound", type=float, help="inner MLP weight box half-width")

    p = add("train", "train the MLP with HHO on the train cache")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="model file (JSON)")
    p.add_argument("--mask", type=Path)
    p.add_argument("--hidden", type=_csv_ints, help="hidden layer sizes, e.g. 5,5")
    p.add_argument("--topology", type=_int_list, help="full layer sizes, e.g. 15-5-5-1")
    p.add_argument("--population", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--weight-bound", type=float)

    p = add("evaluate", "metrics of a model on a cache partition")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--partition", choices=["train", "test"])
    p.add_argument("--csv", type=Path)
    p.add_argument("--json", type=Path)
    p.add_argument("--run-id")

    p = add("bench-swarm", "final training MSE across swarm sizes and seeds")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--mask", type=Path)
    p.add_argument("--sizes", type=_csv_ints)
    p.add_argument("--seeds", type=int, help="number of seeds")
    p.add_argument("--first-seed", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--hidden", type=_csv_ints)
    p.add_argument("--weight-bound", type=float)
    return parser


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    """Merge built-in defaults, the config file and explicit flags."""
    resolved = dict(DEFAULTS[command])
    if args.config is not None:
        try:
            raw = json.loads(args.config.read_text())
        except FileNotFoundError:
            raise UsageError(f"config file not found: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file {args.config} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise UsageError("config file must hold a JSON object")
        section = {k: v for k, v in raw.items() if k not in DEFAULTS}
        if isinstance(raw.get(command), dict):
            section.update(raw[command])
        section = {k.replace("-", "_"): v for k, v in section.items()}
        unknown = set(section) - set(resolved)
        if unknown:
            raise UsageError(f"unknown config key(s) for {command}: {', '.join(sorted(unknown))}")
        resolved.update(section)
    for key in resolved:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    return resolved


# --- manifests -------------------------------------------------------------

def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _jsonable(value):
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return value


def manifest_digest(manifest: dict) -> str:
    """SHA-256 over the manifest without its wall-clock and digest fields."""
    body = {k: v for k, v in manifest.items() if k not in ("wall_clock_seconds", "digest")}
    return hashlib.sha256(json.dumps(body, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def write_manifest(path: Path, command: str, config: dict, inputs: dict, outputs: dict,
                   started: float, **extra) -> dict:
    manifest = {
        "format": MANIFEST_FORMAT,
        "command": command,
        "version": __version__,
        "config": _jsonable(config),
        "seed": config.get("seed", config.get("first_seed")),
        "inputs": {k: _sha256(v) for k, v in inputs.items()},
        "outputs": outputs,
        **_jsonable(extra),
    }
    manifest["wall_clock_seconds"] = round(time.perf_counter() - started, 3)
    manifest["digest"] = manifest_digest(manifest)
    Path(path).write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    return manifest


def _manifest_path(artifact: Path) -> Path:
    return artifact.with_name(artifact.name + ".manifest.json")


# --- subcommands -----------------------------------------------------------

def _check_positive(config: dict, *keys):
    for key in keys:
        if config[key] is None or config[key] < 1:
            raise UsageError(f"{key.replace('_', '-')} must be a positive integer")


def _swarm(config: dict, population_key="population", seed=None) -> SwarmConfig:
    try:
        return SwarmConfig(config[population_key], config["iterations"],
                           config["seed"] if seed is None else seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load_train_cache(data_dir: Path, partition: str = "train"):
    return load_dataset(Path(data_dir) / f"{partition}.json")


def _load_mask_for(path: Path | None, dataset):
    if path is None:
        return None
    return load_mask(path, dataset.feature_names)


def cmd_synth(args, config) -> int:
    started = time.perf_counter()
    _check_positive(config, "rows")
    mix = KDD99_FAMILY_MIX if config["mix"] == "kdd99" else DEFAULT_FAMILY_MIX
    rows = make_kdd_like(config["rows"], config["seed"], mix)
    header = builtin_schema().feature_names + ["label"] if config["header"] else None
    write_csv(rows, args.out, header)
    write_manifest(_manifest_path(args.out), "synth", config, {}, {args.out.name: _sha256(args.out)}, started)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_prepare(args, config) -> int:
    started = time.perf_counter()
    if config["schema"] and config["builtin_schema"]:
        raise UsageError("give either --schema or --builtin-schema, not both")
    if config["schema"]:
        schema_path = Path(config["schema"])
        if not schema_path.is_file():
            raise UsageError(f"schema file not found: {schema_path}")
        schema = load_schema(schema_path)
    elif config["builtin_schema"]:
        schema = builtin_schema(config["builtin_schema"])
    else:
        raise UsageError("a schema is required (--schema FILE or --builtin-schema kdd|nsl_kdd)")
    try:
        spec = SplitSpec(config["train_fraction"], bool(config["stratified"]), config["seed"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if config["max_rows"] is not None and config["max_rows"] < 2:
        raise UsageError("max-rows must be at least 2")

    records = load_csv(args.input, schema, header=bool(config["header"]))
    if config["max_rows"] is not None:
        records = records[: config["max_rows"]]
    log.info("loaded %d records from %s", len(records), args.input)
    train_ds, test_ds = prepare(records, schema, spec, config["policy"], tuple(config["feature_range"]),
                                config["extra_attacks"] or ())
    args.out.mkdir(parents=True, exist_ok=True)
    outputs = {
        "train.json": save_dataset(train_ds, args.out / "train.json"),
        "test.json": save_dataset(test_ds, args.out / "test.json"),
    }
    inputs = {args.input.name: args.input}
    if config["schema"]:
        inputs["schema"] = Path(config["schema"])
    write_manifest(args.out / "prepare.manifest.json", "prepare", config, inputs, outputs, started,
                   rows={"train": train_ds.n_rows, "test": test_ds.n_rows},
                   n_features=train_ds.n_features, norm_digest=train_ds.norm_stats.digest())
    print(f"train: {train_ds.n_rows} rows, test: {test_ds.n_rows} rows, {train_ds.n_features} features")
    return EXIT_OK


def cmd_select(args, config) -> int:
    started = time.perf_counter()
    _check_positive(config, "inner_population", "inner_iterations")
    swarm = _swarm(config)
    try:
        weights = CostWeights.from_beta(config["beta_fs"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not 0 < config["validation_fraction"] < 1:
        raise UsageError("validation-fraction must lie in (0, 1)")
    if config["beta_fs"] == 0:
        print("hhomlp select: warning: beta-fs is 0, so the number of selected features is unconstrained",
              file=sys.stderr)
    dataset = _load_train_cache(args.data)
    bound = float(config["weight_bound"])
    inner = MlpErrorEstimator(tuple(config["inner_hidden"]), config["inner_population"],
                              config["inner_iterations"], (-bound, bound), seed=swarm.seed)
    result = select_features(dataset, swarm, weights, inner, config["validation_fraction"])
    save_mask(result.mask, dataset.feature_names, args.out)
    write_manifest(_manifest_path(args.out), "select", config, {"train.json": args.data / "train.json"},
                   {args.out.name: _sha256(args.out)}, started,
                   selected=[n for n, b in zip(dataset.feature_names, result.mask) if b],
                   cost=result.cost, error=result.error, history=result.history)
    print(f"selected {int(result.mask.sum())} of {dataset.n_features} features, cost {result.cost:.6f}")
    return EXIT_OK


def _topology_for(config: dict, width: int) -> MlpTopology | None:
    if config["topology"] is None:
        return None
    sizes = list(config["topology"])
    if len(sizes) < 3:
        raise UsageError("topology needs input, at least one hidden layer and output sizes")
    if sizes[-1] != 1:
        raise UsageError("binary detection needs a single output neuron")
    if sizes[0] != width:
        raise UsageError(f"topology input size {sizes[0]} does not match the {width} (masked) features")
    try:
        return MlpTopology(sizes[0], tuple(sizes[1:-1]), 1)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_train(args, config) -> int:
    started = time.perf_counter()
    swarm = _swarm(config)
    if config["weight_bound"] <= 0:
        raise UsageError("weight-bound must be positive")
    dataset = _load_train_cache(args.data)
    mask = _load_mask_for(config["mask"] and Path(config["mask"]), dataset)
    width = int(mask.sum()) if mask is not None else dataset.n_features
    topology = _topology_for(config, width)
    bound = float(config["weight_bound"])
    cfg = TrainConfig(topology=topology, swarm=swarm, weight_bounds=(-bound, bound),
                      feature_mask=mask, hidden_layers=tuple(config["hidden"]))
    model = train(dataset, cfg)
    digest = save_model(model, args.out)
    inputs = {"train.json": args.data / "train.json"}
    if mask is not None:
        inputs["mask"] = Path(config["mask"])
    write_manifest(_manifest_path(args.out), "train", config, inputs, {args.out.name: digest}, started,
                   topology=model.topology.to_dict(), history=list(model.history),
                   norm_digest=model.norm_stats.digest())
    print(f"final training MSE {model.history[-1]:.6f} after {len(model.history)} iterations")
    return EXIT_OK


def cmd_evaluate(args, config) -> int:
    started = time.perf_counter()
    model = load_model(args.model)
    dataset = _load_train_cache(args.data, config["partition"])
    report = evaluate(model, dataset)
    run_id = config["run_id"] or args.model.stem
    print(report.summary())
    outputs = {}
    if config["csv"]:
        Path(config["csv"]).write_text(report.to_csv(run_id))
        outputs[Path(config["csv"]).name] = _sha256(Path(config["csv"]))
    if config["json"]:
        Path(config["json"]).write_text(report.to_json())
        outputs[Path(config["json"]).name] = _sha256(Path(config["json"]))
    if outputs:
        first = Path(config["csv"] or config["json"])
        write_manifest(_manifest_path(first), "evaluate", config,
                       {"model": args.model, f"{config['partition']}.json": args.data / f"{config['partition']}.json"},
                       outputs, started, metrics=report.to_dict())
    return EXIT_OK


def sweep_medians(rows: list[tuple[int, int, float]]) -> list[tuple[int, float]]:
    sizes = sorted({size for size, _, _ in rows})
    return [(s, float(np.median([m for size, _, m in rows if size == s]))) for s in sizes]


def cmd_bench_swarm(args, config) -> int:
    started = time.perf_counter()
    _check_positive(config, "seeds", "iterations")
    sizes = list(config["sizes"])
    if not sizes or any(s < 2 for s in sizes):
        raise UsageError("sizes must be integers >= 2")
    dataset = _load_train_cache(args.data)
    mask = _load_mask_for(config["mask"] and Path(config["mask"]), dataset)
    bound = float(config["weight_bound"])
    seeds = range(config["first_seed"], config["first_seed"] + config["seeds"])
    rows = []
    for size in sizes:
        for seed in seeds:
            cfg = TrainConfig(swarm=SwarmConfig(size, config["iterations"], seed), weight_bounds=(-bound, bound),
                              feature_mask=mask, hidden_layers=tuple(config["hidden"]))
            final = train(dataset, cfg).history[-1]
            rows.append((size, seed, final))
            log.info("size %d seed %d final mse %.6f", size, seed, final)
    rows.sort(key=lambda r: (r[0], r[1]))
    medians = sweep_medians(rows)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "sweep.csv").write_text(
        "size,seed,final_mse\n" + "".join(f"{s},{seed},{m!r}\n" for s, seed, m in rows))
    (args.out / "plot.csv").write_text("size,median_mse\n" + "".join(f"{s},{m!r}\n" for s, m in medians))
    inputs = {"train.json": args.data / "train.json"}
    if mask is not None:
        inputs["mask"] = Path(config["mask"])
    outputs = {name: _sha256(args.out / name) for name in ("sweep.csv", "plot.csv")}
    write_manifest(args.out / "bench.manifest.json", "bench-swarm", config, inputs, outputs, started,
                   medians=[[s, m] for s, m in medians])
    print("size  median_final_mse")
    for s, m in medians:
        print(f"{s:4d}  {m:.6f}")
    return EXIT_OK


COMMANDS = {
    "synth": cmd_synth,
    "prepare": cmd_prepare,
    "select": cmd_select,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "bench-swarm": cmd_bench_swarm,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        config = resolve_config(args.command, args)
        return COMMANDS[args.command](args, config)
    except UsageError as exc:
        print(f"hhomlp {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError) as exc:
        print(f"hhomlp {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"hhomlp {args.command}: compute error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
