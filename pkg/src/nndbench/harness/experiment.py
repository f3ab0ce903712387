"""Full benchmark grid: architectures x training ratios x training SNRs."""
import csv
import json
import logging
import os
from dataclasses import dataclass, field

from .. import __version__
from .._rng import derive_seed, stream
from ..codec import construct_code, enumerate_codebook
from ..decoders import ArchitectureSpec, build
from ..errors import NumericalError
from ..map_oracle import map_ber
from ..neuralnet import load_model, save_model
from .evaluation import (
    nnd_ber,
    noiseless_ber,
    select_training_snr,
    time_per_sample,
    train_cell,
    validation_map_bers,
)
from .training import TrainResult, make_training_subset

log = logging.getLogger(__name__)

CSV_COLUMNS = {
    "ber_vs_step": ["arch", "p", "rho_t_db", "step", "ber_train_subset", "ber_full"],
    "ber_vs_snr": ["arch", "p", "rho_t_db", "ebn0_db", "ber", "ber_map"],
    "timing": ["arch", "n", "direction", "us_per_sample"],
    "nve": ["arch", "p", "rho_t_db", "nve"],
}


@dataclass
class EvalReport:
    metadata: dict
    ber_vs_step: list = field(default_factory=list)
    ber_vs_snr: list = field(default_factory=list)
    subset_ber_vs_snr: list = field(default_factory=list)
    nve: list = field(default_factory=list)
    chosen_rho_t: list = field(default_factory=list)
    map_ber: list = field(default_factory=list)
    dropped_val_points: list = field(default_factory=list)
    timing: list = field(default_factory=list)
    cells: list = field(default_factory=list)
    incomplete_cells: list = field(default_factory=list)

    @property
    def complete(self):
        return not self.incomplete_cells

    def to_json(self):
        body = {k: v for k, v in vars(self).items()}
        return json.dumps(body, sort_keys=True, indent=1, allow_nan=False) + "\n"


def _fmt(v):
    if v is None:
        return "inf"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])


def write_report(report, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        fh.write(report.to_json())
    for name, cols in CSV_COLUMNS.items():
        write_csv(os.path.join(out_dir, f"{name}.csv"), cols, getattr(report, name))


def _cell_name(arch, p, rho):
    tag = "noiseless" if rho is None else f"{rho:+g}dB"
    return f"{arch}-p{p:g}-{tag}"


class _CellStore:
    """Per-cell model checkpoints, reused when the config hash matches."""

    def __init__(self, out_dir, config_hash):
        self.dir = None if out_dir is None else os.path.join(out_dir, "checkpoints")
        self.hash = config_hash
        if self.dir:
            os.makedirs(self.dir, exist_ok=True)

    def path(self, name):
        return os.path.join(self.dir, f"{name}.nndm")

    def load(self, name):
        if not self.dir or not os.path.exists(self.path(name)):
            return None
        model, optimizer, extra = load_model(self.path(name))
        if extra.get("config_hash") != self.hash or not extra.get("complete"):
            return None
        return model, optimizer, extra

    def save(self, name, model, optimizer, extra):
        if self.dir:
            extra = dict(extra, config_hash=self.hash, complete=True)
            save_model(self.path(name), model, optimizer, extra=extra)

    def failure_path(self, name):
        return None if not self.dir else os.path.join(self.dir, f"{name}.failed.nndm")


def run_experiment(config, out_dir=None, threads=1):
    """Run the configured grid, write the report files to ``out_dir`` (if
    given) and return the EvalReport.

    Noiseless configs produce BER-versus-step curves (exact BER over the
    training subset and the full codebook at every power-of-ten step).
    Noisy configs select the training SNR of each (arch, p) cell by NVE and
    report BER versus Eb/N0 of the selected model next to MAP decoding.
    Trained cells are checkpointed; rerunning with the same config reuses them.
    """
    chash = config.config_hash()
    report = EvalReport(metadata={
        "config": config.to_dict(),
        "config_hash": chash,
        "seed": config.seed,
        "package_version": __version__,
        "mode": "noiseless" if config.noiseless else "noisy",
    })
    if not config.archs:
        if out_dir is not None:
            write_report(report, out_dir)
        return report

    code = construct_code(config.n, config.k)
    book = enumerate_codebook(code)
    store = _CellStore(out_dir, chash)
    subsets = {p: make_training_subset(book, p, derive_seed(config.seed, "subset"))
               for p in config.p_list}

    def arch_spec(kind):
        return ArchitectureSpec(kind, config.n, config.k, tuple(config.mlp_hidden),
                                tuple(config.cnn_channels), config.rnn_hidden, config.dropout)

    if config.noiseless:
        _run_noiseless(config, book, subsets, arch_spec, store, report)
    else:
        _run_noisy(config, book, subsets, arch_spec, store, report, threads)

    if config.measure_timing:
        for kind in config.archs:
            model = build(arch_spec(kind), stream(config.seed, "timing-init", kind))
            for direction in ("forward", "backward"):
                us = time_per_sample(model, direction, config.timing_repetitions, seed=config.seed)
                report.timing.append({"arch": kind, "n": config.n, "direction": direction,
                                      "us_per_sample": us})

    if out_dir is not None:
        write_report(report, out_dir)
    return report


def _trained(config, book, subset, spec, rho, store, on_log_step=None):
    """Trained (model, TrainResult, extra) for a cell, from checkpoint when possible.
    Returns None if training diverged."""
    name = _cell_name(spec.kind, subset.p, rho)
    cached = store.load(name)
    if cached is not None:
        model, optimizer, extra = cached
        trace = {int(k): v for k, v in extra["loss_trace"].items()}
        log.info("reusing checkpoint %s", name)
        return model, TrainResult(model, optimizer, extra["steps"], trace), extra
    steps_log = []

    def hook(step, model):
        if on_log_step is not None:
            steps_log.append(on_log_step(step, model))

    try:
        model, result = train_cell(spec, book, subset, config, rho, on_log_step=hook,
                                   checkpoint_path=store.failure_path(name))
    except NumericalError as exc:
        log.warning("cell %s diverged: %s", name, exc)
        return None
    extra = {"steps": result.steps, "loss_trace": {str(k): v for k, v in result.loss_trace.items()},
             "step_bers": steps_log}
    store.save(name, model, result.optimizer, extra)
    return model, result, extra


def _run_noiseless(config, book, subsets, arch_spec, store, report):
    for kind in config.archs:
        spec = arch_spec(kind)
        for p in config.p_list:
            subset = subsets[p]

            def probe(step, model, subset=subset):
                return [step, noiseless_ber(model, book, subset.indices), noiseless_ber(model, book)]

            out = _trained(config, book, subset, spec, None, store, on_log_step=probe)
            cell = {"arch": kind, "p": p, "rho_t_db": None}
            if out is None:
                report.incomplete_cells.append(dict(cell, reason="numerical divergence"))
                report.cells.append(dict(cell, status="failed"))
                continue
            model, result, extra = out
            for step, b_sub, b_full in extra["step_bers"]:
                report.ber_vs_step.append(dict(cell, step=step, ber_train_subset=b_sub,
                                               ber_full=b_full))
            report.cells.append(dict(cell, status="complete", steps=result.steps,
                                     subset_size=len(subset), loss_trace=extra["loss_trace"]))


def _run_noisy(config, book, subsets, arch_spec, store, report, threads):
    map_val, dropped = validation_map_bers(book, config, threads)
    report.dropped_val_points = dropped
    test_map = {}
    for v in config.eval_snr_grid_db:
        test_map[v] = map_ber(book.code, v, config.num_test_samples,
                              derive_seed(config.seed, "test", v), threads=threads, book=book)
        report.map_ber.append({"ebn0_db": v, "ber": test_map[v]})

    for kind in config.archs:
        spec = arch_spec(kind)
        for p in config.p_list:
            subset = subsets[p]
            extras = {}

            def trainer(spec, rho, subset=subset, extras=extras):
                out = _trained(config, book, subset, spec, rho, store)
                if out is None:
                    report.incomplete_cells.append(
                        {"arch": kind, "p": p, "rho_t_db": rho, "reason": "numerical divergence"})
                    return None
                extras[rho] = out[2]
                return out[0], out[1]

            try:
                sel = select_training_snr(spec, book, subset, config, threads=threads,
                                          map_val=map_val, trainer=trainer)
            except NumericalError:
                report.cells.append({"arch": kind, "p": p, "rho_t_db": None, "status": "failed"})
                continue
            for rho, nve in sel.nve_table.items():
                if nve is not None:
                    report.nve.append({"arch": kind, "p": p, "rho_t_db": rho, "nve": nve})
                report.cells.append({
                    "arch": kind, "p": p, "rho_t_db": rho,
                    "status": "failed" if nve is None else "complete",
                    "loss_trace": extras.get(rho, {}).get("loss_trace"),
                })
            rho = sel.rho_t_db
            report.chosen_rho_t.append({"arch": kind, "p": p, "rho_t_db": rho,
                                        "nve": sel.nve_table[rho]})
            model = sel.models[rho]
            for v in config.eval_snr_grid_db:
                seed = derive_seed(config.seed, "test", v)
                b = nnd_ber(model, book, v, config.num_test_samples, seed, threads=threads)
                report.ber_vs_snr.append({"arch": kind, "p": p, "rho_t_db": rho, "ebn0_db": v,
                                          "ber": b, "ber_map": test_map[v]})
                bs = nnd_ber(model, book, v, config.num_test_samples,
                             derive_seed(config.seed, "test-subset", v), restrict_to="subset",
                             subset=subset, threads=threads)
                report.subset_ber_vs_snr.append({"arch": kind, "p": p, "rho_t_db": rho,
                                                 "ebn0_db": v, "ber_train_subset": bs})
