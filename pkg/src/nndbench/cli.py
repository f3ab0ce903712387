"""``nnd-bench`` command-line interface.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 partial grid (some cells did not complete).
"""
import argparse
import csv
import io
import json
import logging
import os
import sys

import numpy as np

from ._rng import derive_seed, stream
from .checks import GRADCHECK_TOLERANCE, TARGETS, run_gradcheck
from .codec import construct_code, enumerate_codebook
from .decoders import KINDS, ArchitectureSpec, build, decode, param_count, spec_of
from .errors import ConfigurationError, NumericalError
from .harness import (
    ExperimentConfig,
    TrainingSubset,
    UndefinedRatioError,
    compute_nve,
    make_training_subset,
    nnd_ber,
    noiseless_ber,
    run_experiment,
    time_per_sample,
    train,
)
from .map_oracle import map_ber
from .neuralnet import AdamConfig, load_model, save_model

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_PARTIAL = 0, 1, 2, 3


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text}") from exc


def _dump(obj):
    return json.dumps(obj, sort_keys=True, allow_nan=False)


def _emit(args, text, filename=None):
    sys.stdout.write(text)
    if args.out_dir and filename:
        os.makedirs(args.out_dir, exist_ok=True)
        with open(os.path.join(args.out_dir, filename), "w") as fh:
            fh.write(text)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def cmd_code_info(args):
    code = construct_code(args.n, args.k)
    _emit(args, _dump({
        "n": code.N, "k": code.K,
        "info_positions": list(code.info_positions),
        "frozen_positions": list(code.frozen_positions),
        "codebook_size": 2**code.K,
    }) + "\n", "code_info.json")
    return EXIT_OK


def cmd_param_count(args):
    k = args.k if args.k is not None else args.n // 2
    spec = ArchitectureSpec(args.arch, args.n, k, rnn_hidden=args.rnn_hidden)
    pc = param_count(spec)
    _emit(args, _dump({"arch": spec.kind, "n": args.n, "k": k,
                       "weights_only": pc.weights_only,
                       "total_with_biases": pc.total_with_biases}) + "\n", "param_count.json")
    return EXIT_OK


def cmd_map_ber(args):
    code = construct_code(args.n, args.k)
    book = enumerate_codebook(code)
    rows = [(v, map_ber(code, v, args.samples, derive_seed(args.seed, "test", v),
                        threads=args.threads, book=book)) for v in args.ebn0_list]
    _emit(args, _csv(["ebn0_db", "ber"], rows), "map_ber.csv")
    return EXIT_OK


def cmd_train(args):
    if args.resume:
        model, optimizer, extra = load_model(args.resume)
        spec = spec_of(model)
        p, rho = extra["p"], extra["rho_t_db"]
        start, seed = extra["steps"], extra["train_seed"]
        subset = TrainingSubset(np.asarray(extra["subset"], dtype=np.int64), p)
    else:
        k = args.k if args.k is not None else args.n // 2
        spec = ArchitectureSpec(args.arch, args.n, k, rnn_hidden=args.rnn_hidden,
                                dropout=args.dropout)
        p, rho = args.p, None if args.noiseless else args.rho_t
        if not args.noiseless and rho is None:
            raise ConfigurationError("give --rho-t or --noiseless")
        model = build(spec, stream(args.seed, "init", spec.kind))
        optimizer, start, seed = None, 0, derive_seed(args.seed, "train")
        subset = None
    book = enumerate_codebook(construct_code(spec.N, spec.K))
    if subset is None:
        subset = make_training_subset(book, p, derive_seed(args.seed, "subset"))
    result = train(model, book, subset, rho, args.steps, batch_size=args.batch_size,
                   num_train_samples=args.num_train_samples, seed=seed,
                   adam=AdamConfig(learning_rate=args.learning_rate), optimizer=optimizer,
                   start_step=start)
    extra = {"p": p, "rho_t_db": rho, "steps": result.steps, "train_seed": seed,
             "subset": [int(i) for i in subset.indices]}
    out = args.model_out or os.path.join(args.out_dir or ".", "model.nndm")
    os.makedirs(os.path.dirname(os.path.abspath(out)), exist_ok=True)
    save_model(out, model, result.optimizer, extra=extra)
    summary = {
        "model": out, "arch": spec.kind, "n": spec.N, "k": spec.K, "p": p,
        "rho_t_db": rho, "steps": result.steps,
        "loss_trace": {str(s): v for s, v in result.loss_trace.items()},
        "noiseless_ber_full": noiseless_ber(model, book),
        "noiseless_ber_train_subset": noiseless_ber(model, book, subset.indices),
    }
    _emit(args, _dump(summary) + "\n", "train_summary.json")
    return EXIT_OK


def cmd_eval_ber(args):
    model, _, extra = load_model(args.model)
    spec = spec_of(model)
    book = enumerate_codebook(construct_code(spec.N, spec.K))
    subset = None
    if args.restrict == "subset":
        if "subset" not in extra:
            raise ConfigurationError("model file carries no training subset")
        subset = TrainingSubset(np.asarray(extra["subset"], dtype=np.int64), extra.get("p", 1.0))
    rows = [(v, nnd_ber(model, book, v, args.samples, derive_seed(args.seed, "test", v),
                        restrict_to=args.restrict, subset=subset, threads=args.threads))
            for v in args.ebn0_list]
    _emit(args, _csv(["ebn0_db", "ber"], rows), "eval_ber.csv")
    return EXIT_OK


def cmd_nve(args):
    try:
        value = compute_nve(args.ber_nnd, args.ber_map)
    except (UndefinedRatioError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from exc
    _emit(args, _dump({"nve": value, "points": len(args.ber_nnd)}) + "\n", "nve.json")
    return EXIT_OK


def cmd_time(args):
    rows = []
    for kind in args.arch:
        k = args.k if args.k is not None else args.n // 2
        model = build(ArchitectureSpec(kind, args.n, k, rnn_hidden=args.rnn_hidden),
                      stream(args.seed, "timing-init", kind))
        for direction in args.direction:
            rows.append((kind, args.n, direction,
                         time_per_sample(model, direction, args.repetitions, seed=args.seed)))
    _emit(args, _csv(["arch", "n", "direction", "us_per_sample"], rows), "timing.csv")
    return EXIT_OK


def cmd_gradcheck(args):
    results = []
    for name in args.target:
        err = run_gradcheck(name, seed=args.seed, h=args.h, precision=args.precision,
                            max_per_array=args.max_per_array)
        results.append({"target": name, "max_relative_error": err,
                        "passed": bool(err < GRADCHECK_TOLERANCE)})
    _emit(args, "".join(_dump(r) + "\n" for r in results), "gradcheck.jsonl")
    return EXIT_OK if all(r["passed"] for r in results) else EXIT_NUMERICAL


def _read_vectors(text):
    if os.path.exists(text):
        with open(text) as fh:
            rows = [r for r in csv.reader(fh) if r]
    else:
        rows = [r.split(",") for r in text.split(";") if r.strip()]
    try:
        return np.array([[float(v) for v in r] for r in rows])
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse received vectors: {exc}") from exc


def cmd_decode(args):
    model, _, _ = load_model(args.model)
    y = _read_vectors(args.y)
    try:
        bits = decode(model, y)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc
    _emit(args, "".join("".join(str(b) for b in row) + "\n" for row in bits), "decoded.txt")
    return EXIT_OK


def cmd_run(args):
    config = ExperimentConfig.from_json(args.config)
    if args.seed_given:
        config.seed = args.seed
    out_dir = args.out_dir or "results"
    report = run_experiment(config, out_dir, threads=args.threads)
    sys.stdout.write(_dump({"out_dir": out_dir, "complete": report.complete,
                            "incomplete_cells": report.incomplete_cells}) + "\n")
    return EXIT_OK if report.complete else EXIT_PARTIAL


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors, not argparse's default status 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out-dir", default=argparse.SUPPRESS)

    parser = _Parser(prog="nnd-bench", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=None, help="root random seed (default 0)")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for Monte Carlo")
    parser.add_argument("--out-dir", default=None, help="directory for output files")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("code-info", cmd_code_info, "print the information set of an (N, K) polar code")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = add("param-count", cmd_param_count, "count decoder parameters")
    p.add_argument("--arch", choices=KINDS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, help="default N/2")
    p.add_argument("--rnn-hidden", type=int, default=256)

    p = add("map-ber", cmd_map_ber, "Monte-Carlo BER of MAP decoding")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ebn0-list", type=_floats, required=True, help="e.g. 0,2,4")
    p.add_argument("--samples", type=int, default=10**5)

    p = add("train", cmd_train, "train one decoder and save it")
    p.add_argument("--arch", choices=KINDS, default="mlp")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--k", type=int, help="default N/2")
    p.add_argument("--p", type=float, default=1.0, help="training ratio of the codebook")
    p.add_argument("--rho-t", type=float, help="training Eb/N0 in dB")
    p.add_argument("--noiseless", action="store_true")
    p.add_argument("--steps", type=int, default=2 * 10**4)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--num-train-samples", type=int, default=10**6)
    p.add_argument("--learning-rate", type=float, default=1e-3)
    p.add_argument("--dropout", type=float, default=0.1)
    p.add_argument("--rnn-hidden", type=int, default=256)
    p.add_argument("--model-out", help="model file (default <out-dir>/model.nndm)")
    p.add_argument("--resume", help="continue training from a saved model file")

    p = add("eval-ber", cmd_eval_ber, "Monte-Carlo BER of a saved decoder")
    p.add_argument("--model", required=True)
    p.add_argument("--ebn0-list", type=_floats, required=True)
    p.add_argument("--samples", type=int, default=10**5)
    p.add_argument("--restrict", choices=("full", "subset"), default="full")

    p = add("nve", cmd_nve, "normalized validation error from two BER lists")
    p.add_argument("--ber-nnd", type=_floats, required=True)
    p.add_argument("--ber-map", type=_floats, required=True)

    p = add("time", cmd_time, "median per-sample forward/backward time")
    p.add_argument("--arch", choices=KINDS, nargs="+", default=list(KINDS))
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--k", type=int)
    p.add_argument("--rnn-hidden", type=int, default=256)
    p.add_argument("--direction", choices=("forward", "backward"), nargs="+",
                   default=["forward", "backward"])
    p.add_argument("--repetitions", type=int, default=200)

    p = add("gradcheck", cmd_gradcheck, "compare backprop against finite differences")
    p.add_argument("--target", choices=sorted(TARGETS), nargs="+", default=list(TARGETS))
    p.add_argument("--h", type=float, default=1e-5)
    p.add_argument("--precision", choices=("double", "extended"))
    p.add_argument("--max-per-array", type=int)

    p = add("decode", cmd_decode, "decode received vectors with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--y", required=True,
                   help="CSV file with one vector per row, or inline '0.9,-1.1,...;...'")

    p = add("run", cmd_run, "run a full experiment from a JSON config")
    p.add_argument("--config", required=True)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed_given = args.seed is not None
    if args.seed is None:
        args.seed = 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
