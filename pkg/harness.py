"""Monte Carlo experiments over the quantized uplink: SER sweeps, scatter clouds, moment and region exports.

Every trial is keyed by (seed, trial_id), so results never depend on the
number of worker processes. Within one operating point the same trials are
detected for every alpha (common random numbers), and trial ids are reused
across operating points.
"""
import multiprocessing as mp
import numpy as np
import pandas as pd
from dataclasses import dataclass
from functools import lru_cache
from tqdm import tqdm
from mimo_utils.chest import Pilot, dft_pilot, estimate_channel
from mimo_utils.common_utils import db_to_linear, report, split_complex
from mimo_utils.errors import ConfigError
from mimo_utils.signal_model import (SYMBOL_SUBSTREAM, UINT64_LIMIT, RngStream, draw_channel,
                                     uplink_data_rx, uplink_pilot_rx)
from models.constellation import get_constellation
from models.detect import detect, make_detector, mrc_estimate, rasterize_regions
from models.moments import asymptotic_moments, moment_table

SWEEPS = ('snr', 'tau', 'alpha', 'scatter', 'moments', 'regions')
DFT_PILOT = 'dft2'


def _as_tuple(value, cast):
    if isinstance(value, (list, tuple, np.ndarray)):
        return tuple(cast(v) for v in value)
    return (cast(value),)


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    m_antennas: tuple = (128,)
    tau: tuple = (32,)
    snr_db: tuple = (10.0,)
    alpha: tuple = (0.0,)
    k_users: int = 1
    constellation: object = '16qam'
    pilot: object = DFT_PILOT
    trials: int = 100000
    threads: int = 1
    sweep: str = 'snr'
    grid_size: int = 512
    extent: object = None
    progress: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'm_antennas', _as_tuple(self.m_antennas, int))
        object.__setattr__(self, 'tau', _as_tuple(self.tau, int))
        object.__setattr__(self, 'snr_db', _as_tuple(self.snr_db, float))
        object.__setattr__(self, 'alpha', _as_tuple(self.alpha, float))
        if not isinstance(self.constellation, str):
            object.__setattr__(self, 'constellation', _as_tuple(self.constellation, complex))
        if not isinstance(self.pilot, str):
            object.__setattr__(self, 'pilot', _as_tuple(self.pilot, complex))
        self._validate()

    def _validate(self):
        if not 0 <= self.seed < UINT64_LIMIT:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.sweep not in SWEEPS:
            raise ConfigError(f"unknown sweep '{self.sweep}', choose from {SWEEPS}")
        if self.k_users != 1:
            raise ConfigError("only single-user simulations are supported (k_users = 1)")
        for name in ('m_antennas', 'tau', 'snr_db', 'alpha'):
            if not getattr(self, name):
                raise ConfigError(f"{name} grid must not be empty")
        if min(self.m_antennas) < 1:
            raise ConfigError(f"m_antennas must be positive, got {self.m_antennas}")
        if min(self.tau) < self.k_users:
            raise ConfigError(f"tau must be >= k_users = {self.k_users}, got {self.tau}")
        if not np.all(np.isfinite(self.snr_db)):
            raise ConfigError(f"snr_db must be finite, got {self.snr_db}")
        if any(not 0 <= a <= 1 for a in self.alpha):
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if self.grid_size < 2:
            raise ConfigError(f"grid_size must be >= 2, got {self.grid_size}")
        if self.extent is not None and not self.extent > 0:
            raise ConfigError(f"extent must be positive, got {self.extent}")
        if isinstance(self.pilot, str):
            if self.pilot != DFT_PILOT:
                raise ConfigError(f"unknown pilot '{self.pilot}', use '{DFT_PILOT}' or explicit entries")
        elif set(self.tau) != {len(self.pilot)}:
            raise ConfigError(f"explicit pilot has length {len(self.pilot)} but tau grid is {self.tau}")

    def single_point(self, with_alpha=False):
        """(M, tau, snr_db[, alpha]) for experiments defined at one operating point."""
        grids = ['m_antennas', 'tau', 'snr_db'] + (['alpha'] if with_alpha else [])
        for name in grids:
            if len(getattr(self, name)) != 1:
                raise ConfigError(f"sweep '{self.sweep}' needs a single {name}, got {getattr(self, name)}")
        point = tuple(getattr(self, name)[0] for name in grids)
        return point


@dataclass(frozen=True)
class SerResult:
    m_antennas: int
    tau: int
    snr_db: float
    alpha: float
    errors: int
    trials: int

    @property
    def ser(self):
        return self.errors / self.trials

    @property
    def std_err(self):
        return np.sqrt(self.ser * (1 - self.ser) / self.trials)

    def as_row(self):
        return {'m_antennas': self.m_antennas, 'tau': self.tau, 'snr_db': self.snr_db,
                'alpha': self.alpha, 'errors': self.errors, 'trials': self.trials,
                'ser': self.ser, 'std_err': self.std_err}


@dataclass(frozen=True, eq=False)
class PointContext:
    """Everything a trial needs at one (M, tau, snr) point; picklable for worker processes."""
    constellation: object
    pilot: Pilot
    rho: float
    table: object
    m_antennas: int
    tau: int
    snr_db: float
    seed: int


def resolve_pilot(pilot, tau):
    if isinstance(pilot, str):
        return dft_pilot(tau)
    return Pilot(np.asarray(pilot, dtype=complex))


@lru_cache(maxsize=64)
def point_context(config, m_antennas, tau, snr_db):
    constellation = get_constellation(config.constellation)
    pilot = resolve_pilot(config.pilot, tau)
    rho = db_to_linear(snr_db)
    table = moment_table(constellation, pilot, rho, m_antennas)
    return PointContext(constellation, pilot, rho, table, m_antennas, tau, snr_db, config.seed)


def results_frame(results):
    return pd.DataFrame([r.as_row() for r in results],
                        columns=['m_antennas', 'tau', 'snr_db', 'alpha', 'errors', 'trials', 'ser', 'std_err'])


def _estimate_symbol(ctx, stream_id, symbol_index=None):
    """One pipeline pass: channel, quantized pilots, estimate, data phase, MRC.

    Returns (transmitted index, x_hat). A forced symbol_index skips the
    uniform symbol draw.
    """
    stream = RngStream(ctx.seed, stream_id)
    if symbol_index is None:
        symbol_gen = stream.spawn(SYMBOL_SUBSTREAM).generator()
        symbol_index = int(symbol_gen.integers(len(ctx.constellation)))
    h = draw_channel(ctx.m_antennas, 1, stream)
    pilots = ctx.pilot.matrix
    r_p = uplink_pilot_rx(h, pilots, ctx.rho, stream)
    h_hat = estimate_channel(r_p, pilots, ctx.table.constants)
    r = uplink_data_rx(h, [ctx.constellation.symbols[symbol_index]], ctx.rho, stream)
    return symbol_index, mrc_estimate(h_hat, r)[0]


def run_trial(config, trial_id, symbol_index=None):
    """(transmitted index, detected index) for one trial at the config's single operating point."""
    m_antennas, tau, snr_db, alpha = config.single_point(with_alpha=True)
    ctx = point_context(config, m_antennas, tau, snr_db)
    tx, xhat = _estimate_symbol(ctx, trial_id, symbol_index)
    return tx, detect(xhat, make_detector(ctx.table, alpha))


def _count_errors(ctx, detectors, trial_ids, progress=False, desc=None):
    errors = [0] * len(detectors)
    for trial_id in tqdm(trial_ids, disable=not progress, desc=desc):
        tx, xhat = _estimate_symbol(ctx, trial_id)
        for k, spec in enumerate(detectors):
            if detect(xhat, spec) != tx:
                errors[k] += 1
    return errors


def _collect_estimates(ctx, symbol_index, stream_offset, trial_ids, progress=False, desc=None):
    out = np.empty(len(trial_ids), dtype=complex)
    for k, trial_id in enumerate(tqdm(trial_ids, disable=not progress, desc=desc)):
        out[k] = _estimate_symbol(ctx, stream_offset + trial_id, symbol_index)[1]
    return out


def _trial_worker(process_id, task, task_args, trials, trials_per_process, progress, return_dict):
    start = process_id * trials_per_process
    stop = min((process_id + 1) * trials_per_process, trials)
    desc = f"worker {process_id}"
    return_dict[process_id] = task(*task_args, range(start, stop), progress, desc)


def run_chunks(task, task_args, trials, threads=1, progress=False):
    """task(*task_args, trial_ids, progress, desc) over contiguous chunks of 0..trials-1.

    Returns the per-chunk results in chunk order, one chunk per process.
    """
    if threads == 1:
        return [task(*task_args, range(trials), progress, None)]

    trials_per_process = trials // threads + 1
    with mp.Manager() as manager:
        return_dict = manager.dict()
        processes = [mp.Process(target=_trial_worker,
                                args=(pid, task, task_args, trials, trials_per_process, progress, return_dict))
                     for pid in range(threads)]
        for p in processes:
            p.start()
        for p in processes:
            p.join()
        for pid, p in enumerate(processes):
            if p.exitcode != 0:
                raise RuntimeError(f"trial worker {pid} exited with code {p.exitcode}")
        return [return_dict[pid] for pid in range(threads)]


def count_errors(ctx, detectors, trials, threads=1, progress=False):
    """Error counts per detector over trial ids 0..trials-1."""
    partial = run_chunks(_count_errors, (ctx, detectors), trials, threads, progress)
    # integer sums, so the order of workers does not matter
    return [sum(counts[k] for counts in partial) for k in range(len(detectors))]


def run_ser(config, logfile=None):
    """SER over the product of the M, tau and snr grids, every alpha detected on the same trials."""
    results = []
    for m_antennas in config.m_antennas:
        for tau in config.tau:
            for snr_db in config.snr_db:
                ctx = point_context(config, m_antennas, tau, snr_db)
                report(f"M={m_antennas} tau={tau} snr={snr_db:g}dB: delta={ctx.table.constants.delta:.6g} "
                       f"upsilon={ctx.table.constants.upsilon:.6g}", logfile)
                detectors = [make_detector(ctx.table, alpha) for alpha in config.alpha]
                errors = count_errors(ctx, detectors, config.trials, config.threads, config.progress)
                for alpha, n_err in zip(config.alpha, errors):
                    result = SerResult(m_antennas, tau, snr_db, alpha, n_err, config.trials)
                    report(f"  alpha={alpha:g}: ser={result.ser:.6g} (+-{result.std_err:.2g}, "
                           f"{n_err}/{config.trials})", logfile)
                    results.append(result)
    return results


def run_alpha_sweep(config, logfile=None):
    config.single_point()
    return run_ser(config, logfile)


def sample_estimates(config, symbol_index, trials=None, stream_offset=0):
    """x_hat for a fixed transmit symbol over trials independent realizations.

    Trial t uses stream id stream_offset + t; chunks are concatenated in order,
    so the samples do not depend on config.threads.
    """
    m_antennas, tau, snr_db = config.single_point()
    ctx = point_context(config, m_antennas, tau, snr_db)
    if not 0 <= symbol_index < len(ctx.constellation):
        raise ConfigError(f"symbol index {symbol_index} outside 0..{len(ctx.constellation) - 1}")
    trials = config.trials if trials is None else trials
    chunks = run_chunks(_collect_estimates, (ctx, symbol_index, stream_offset), trials,
                        config.threads, config.progress)
    return np.concatenate(chunks)


def run_scatter(config, logfile=None):
    """(symbol index, x_hat) for every symbol over config.trials realizations each.

    Symbol l uses stream ids l*trials .. (l+1)*trials - 1.
    """
    m_antennas, tau, snr_db = config.single_point()
    ctx = point_context(config, m_antennas, tau, snr_db)
    rows = []
    for idx in tqdm(range(len(ctx.constellation)), disable=not config.progress):
        xhats = sample_estimates(config, idx, config.trials, stream_offset=idx * config.trials)
        rows.extend((idx, complex(x)) for x in xhats)
    report(f"scatter: {len(rows)} estimates at M={m_antennas} tau={tau} snr={snr_db:g}dB", logfile)
    return rows


def scatter_frame(rows):
    indices = [idx for idx, _ in rows]
    re, im = split_complex([x for _, x in rows])
    return pd.DataFrame({'symbol_index': indices, 'xhat_re': re, 'xhat_im': im})


def run_moments(config, logfile=None):
    m_antennas, tau, snr_db = config.single_point()
    table = point_context(config, m_antennas, tau, snr_db).table
    report(f"moments: M={m_antennas} tau={tau} snr={snr_db:g}dB delta={table.constants.delta:.6g} "
           f"upsilon={table.constants.upsilon:.6g}", logfile)
    return table


def run_asymptotic(config, logfile=None):
    m_antennas, tau, _ = config.single_point()
    constellation = get_constellation(config.constellation)
    limits = asymptotic_moments(constellation, resolve_pilot(config.pilot, tau), m_antennas)
    report(f"asymptotic moments: M={m_antennas} tau={tau} delta_bar={limits.delta_bar:.6g}", logfile)
    return limits


def run_regions(config, logfile=None):
    """Decision-region raster for the weighted detector at the single (M, tau, snr, alpha) point."""
    m_antennas, tau, snr_db, alpha = config.single_point(with_alpha=True)
    table = point_context(config, m_antennas, tau, snr_db).table
    frame = rasterize_regions(make_detector(table, alpha), config.grid_size, config.extent)
    report(f"regions: {config.grid_size}x{config.grid_size} grid, alpha={alpha:g}", logfile)
    return frame


def estimation_mse(config, scales=(0.25, 1.0, 4.0), trials=None):
    """Per-entry MSE E|h_hat - h|^2 of the LS estimate scaled by sqrt(c * Upsilon), for each c."""
    m_antennas, tau, snr_db = config.single_point()
    ctx = point_context(config, m_antennas, tau, snr_db)
    trials = config.trials if trials is None else trials
    pilots = ctx.pilot.matrix
    squared = np.zeros(len(scales))
    for t in range(trials):
        stream = RngStream(ctx.seed, t)
        h = draw_channel(m_antennas, 1, stream)
        h_hat = estimate_channel(uplink_pilot_rx(h, pilots, ctx.rho, stream), pilots, ctx.table.constants)
        for k, c in enumerate(scales):
            diff = np.sqrt(c) * h_hat - h.h
            squared[k] += np.sum(diff.real ** 2 + diff.imag ** 2)
    mse = squared / (trials * m_antennas)
    return pd.DataFrame({'scale': np.asarray(scales, dtype=float), 'mse': mse})
